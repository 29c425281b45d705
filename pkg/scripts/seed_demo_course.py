#!/usr/bin/env python3
"""Create a demo course, ingest sample notes, and run one chat turn.

Usage:
    python scripts/seed_demo_course.py [--data-dir ./data]

Everything runs with the deterministic offline providers, so this doubles as
a quick smoke test of the full pipeline on a fresh checkout.
"""

import argparse

from coursetutor.engine import TutorEngine

NOTES = [
    ("Geography notes",
     "The capital of France is Paris. The Seine river crosses the city. "
     "France borders Spain along the Pyrenees mountain range in the south."),
    ("Algorithms handbook",
     "Quicksort partitions the array around a pivot element. "
     "Merge sort divides the input into halves and merges sorted runs. "
     "Binary search needs a sorted array and halves the range each step."),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--data-dir", default="./data")
    args = parser.parse_args()
    engine = TutorEngine(args.data_dir)
    if not engine.course_exists("demo"):
        engine.create_course("Demo course", "stem", "demo")
    for title, text in NOTES:
        result = engine.ingest_material("demo", text.encode(), "plain_text", title)
        flag = "duplicate" if result["duplicate"] else "ingested"
        print(f"{flag}: {title} ({result['chunk_count']} chunks)")
    turn = engine.answer_question("demo", "demo-session", "demo-user",
                                  "What is the capital of France?")
    print(f"\nanswer: {turn.answer}")
    for cite in turn.citations:
        print(f"  cited: {cite.document_title} p.{cite.page_number}: "
              f"{cite.fragment[:60]}")


if __name__ == "__main__":
    main()
