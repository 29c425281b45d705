"""Course-isolated retrieval-augmented tutoring engine."""

from .engine import TutorEngine

__all__ = ["TutorEngine"]
__version__ = "0.1.0"
