import json
import pathlib
import shutil

import pytest

from codemark import model

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
QUESTIONS = FIXTURES / "questions"
PY_SUBS = FIXTURES / "submissions" / "python"
CPP_SUBS = FIXTURES / "submissions" / "cpp"


def load_question(name: str) -> model.Question:
    return model.parse_question((QUESTIONS / f"{name}.json").read_text())


def load_py(name: str) -> str:
    return (PY_SUBS / f"{name}.py").read_text()


def load_cpp(name: str) -> str:
    return (CPP_SUBS / f"{name}.cpp").read_text()


@pytest.fixture(scope="session")
def avg_question() -> model.Question:
    return load_question("avg_word_length")


def require_gxx():
    if shutil.which("g++") is None:
        pytest.skip("g++ not on PATH")


def pretty(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)
