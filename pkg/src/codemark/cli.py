"""Author-and-operator command line: validate, grade, serve.

Machine-readable JSON goes to stdout; human-readable tables and
messages go to stderr, so output can be piped into CI-style regrading
without scraping.

Exit codes:
  0  success (full marks for grade; clean validation for validate)
  1  validation or grading found failures
  2  usage error (bad flags, unreadable files, invalid config)
  3  internal or toolchain error (never misreported as a student fail)
"""

import argparse
import dataclasses
import json
import logging
import sys
import time
from pathlib import Path

from .grader import (AUDIENCE_STUDENT, AUDIENCE_TEACHER, Grader, GradeReport,
                     InternalGradingError, redact_report, report_to_doc)
from .model import Question, parse_question
from .sandbox import Sandbox, ToolchainError
from .service import (ServiceConfig, SessionStore, create_app, load_config,
                      load_questions)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class UsageError(RuntimeError):
    pass


def _read_text(path_str: str, what: str) -> str:
    path = Path(path_str)
    if not path.is_file():
        raise UsageError(f"{what} not found: {path_str}")
    return path.read_text(encoding="utf-8")


def _load_question(path_str: str) -> Question:
    return parse_question(_read_text(path_str, "question file"))


def _fmt_marks(value) -> str:
    return f"{float(value):g}"


def _print_table(report: GradeReport, out=None) -> None:
    """Aligned per-test table on stderr; never the JSON channel."""
    out = out or sys.stderr
    width = max((len(r.test_id) for r in report.results), default=8)
    for r in report.results:
        marks = f"{_fmt_marks(r.marks_awarded)}/{_fmt_marks(r.marks_available)}"
        line = f"  {r.test_id:<{width}}  {r.status:<8} {marks:>9}"
        if r.message:
            line += f"  {r.message.splitlines()[0][:60]}"
        print(line, file=out)
    print(f"  raw {_fmt_marks(report.raw_marks)}"
          f"/{_fmt_marks(report.total_marks)}"
          f"  penalty {report.penalty_pct}%"
          f"  final fraction {_fmt_marks(report.final_fraction)}", file=out)


def _emit_json(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args) -> int:
    try:
        q = _load_question(args.question)
    except (ValueError, KeyError, TypeError) as exc:
        print(f"invalid question: {exc}", file=sys.stderr)
        return EXIT_FAILURES

    if q.model_answer is None:
        print(f"question {q.id}: structure ok; no model answer to run",
              file=sys.stderr)
        _emit_json({"question_id": q.id, "structure": "ok",
                    "model_answer_checked": False})
        return EXIT_OK

    report = Grader().validate_model_answer(q)
    _print_table(report)
    _emit_json({"question_id": q.id, "structure": "ok",
                "model_answer_checked": True,
                "report": report_to_doc(report)})
    if report.raw_marks == report.total_marks:
        print(f"question {q.id}: model answer scores full marks "
              f"({_fmt_marks(report.total_marks)})", file=sys.stderr)
        return EXIT_OK
    failing = [r.test_id for r in report.results if r.status != "pass"]
    print(f"question {q.id}: model answer FAILED "
          f"{', '.join(failing)}", file=sys.stderr)
    return EXIT_FAILURES


def cmd_grade(args) -> int:
    q = _load_question(args.question)
    code = _read_text(args.submission, "submission file")
    started = time.monotonic()
    report = Grader().run_check(q, code, args.attempt)
    elapsed = time.monotonic() - started

    shown = redact_report(report, args.audience)
    doc = report_to_doc(shown)
    if not args.stable:
        doc["elapsed_seconds"] = round(elapsed, 3)
    _emit_json(doc)
    _print_table(shown)
    return EXIT_OK if report.raw_marks == report.total_marks \
        else EXIT_FAILURES


def cmd_serve(args) -> int:
    try:
        config = load_config(args.config)
    except (OSError, ValueError, KeyError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    overrides = {}
    if args.port is not None:
        overrides["port"] = args.port
    if args.data_dir is not None:
        overrides["data_dir"] = args.data_dir
    if args.token is not None:
        overrides["token"] = args.token
    if overrides:
        config = dataclasses.replace(config, **overrides)

    try:
        app = _prepare_service(config)
    except (ValueError, KeyError) as exc:
        print(f"bad question bank: {exc}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(level=logging.INFO)
    try:
        _serve_forever(app, config.port)
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def _prepare_service(config: ServiceConfig):
    """Build the app and fail fast when a needed toolchain is absent."""
    questions = load_questions(config.questions_dir)
    box = Sandbox()
    for language in sorted({q.language for q in questions.values()}):
        box.validate_toolchain(language)
    store = SessionStore(config.data_dir)
    return create_app(questions, store, Grader(box), token=config.token)


def _serve_forever(app, port: int) -> None:
    import uvicorn
    uvicorn.run(app, host="127.0.0.1", port=port)


# ---------------------------------------------------------------------------
# dispatch

def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codemark",
        description="grade code submissions against question files")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate",
                           help="check a question file and its model answer")
    p_val.add_argument("--question", required=True)
    p_val.set_defaults(func=cmd_validate)

    p_grade = sub.add_parser("grade", help="grade one submission")
    p_grade.add_argument("--question", required=True)
    p_grade.add_argument("--submission", required=True)
    p_grade.add_argument("--attempt", type=_positive_int, default=1)
    p_grade.add_argument("--audience", default=AUDIENCE_TEACHER,
                         choices=[AUDIENCE_TEACHER, AUDIENCE_STUDENT])
    p_grade.add_argument("--stable", action="store_true",
                         help="strip timing fields for byte-identical output")
    p_grade.set_defaults(func=cmd_grade)

    p_serve = sub.add_parser("serve", help="run the attempt service")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--port", type=int)
    p_serve.add_argument("--data-dir")
    p_serve.add_argument("--token")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except ToolchainError as exc:
        print(f"toolchain error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except InternalGradingError as exc:
        print(f"internal grading error: {exc}", file=sys.stderr)
        if exc.diagnostics:
            print(exc.diagnostics, file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
