import pytest

from coursetutor.embeddings import HashingEmbeddingProvider
from coursetutor.engine import TutorEngine


@pytest.fixture
def embedder():
    return HashingEmbeddingProvider(256)


@pytest.fixture
def engine(tmp_path):
    return TutorEngine(tmp_path / "data")


THREE_DOC_COURSE = [
    ("Geography notes",
     "The capital of France is Paris. The Seine river crosses the city. "
     "France borders Spain along the Pyrenees mountain range in the south."),
    ("Algorithms handbook",
     "Quicksort partitions the array around a pivot element. "
     "Merge sort divides the input into halves and merges sorted runs. "
     "Binary search needs a sorted array and halves the range each step."),
    ("Biology primer",
     "Photosynthesis converts light energy into chemical energy. "
     "Chlorophyll absorbs mostly red and blue light inside chloroplasts. "
     "Cellular respiration releases the stored chemical energy again."),
]


@pytest.fixture
def seeded_engine(engine):
    """Engine with one stem course holding the three-document fixture corpus."""
    course_id = engine.create_course("Fixture course", "stem", "course-fix")
    for title, text in THREE_DOC_COURSE:
        engine.ingest_material(course_id, text.encode(), "plain_text", title)
    return engine, course_id
