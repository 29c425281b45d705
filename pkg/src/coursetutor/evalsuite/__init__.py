from .metrics import (EvalCase, MetricScores, answer_relevancy, context_precision,
                      context_recall, faithfulness, score_case)
from .judges import LexicalJudge, RemoteJudge, ScriptedJudge
from .sweep import SweepConfig, run_config_sweep

__all__ = [
    "EvalCase", "MetricScores", "answer_relevancy", "context_precision",
    "context_recall", "faithfulness", "score_case",
    "LexicalJudge", "RemoteJudge", "ScriptedJudge",
    "SweepConfig", "run_config_sweep",
]
