"""Shared exception types.

Everything user-facing (CLI, HTTP API) maps these onto exit codes or error
bodies; library callers can catch the base classes.
"""
from __future__ import annotations


class StepmarkError(Exception):
    """Base class for all domain errors."""


class ParseError(StepmarkError):
    """Submitted text is not a valid line of working.

    `offset` is the 0-based character position the tokenizer/parser gave up at.
    """

    def __init__(self, message: str, offset: int = 0):
        super().__init__(message)
        self.offset = offset


class UnsupportedFeatureError(ParseError):
    """Syntactically plausible input using a construct outside the grammar
    (function calls, non-integer exponents, inequalities, foreign variables)."""


class SubmissionRejectedError(StepmarkError):
    """A step submission failed to parse; it is not recorded as a step.

    Carries the parse message and character offset for inline display.
    """

    def __init__(self, message: str, offset: int = 0):
        super().__init__(message)
        self.offset = offset


class NotPolynomialError(StepmarkError):
    """Expression has no polynomial form in the unknown (variable division etc.)."""


class DegreeLimitError(StepmarkError):
    """Polynomial conversion exceeded the supported degree."""

    def __init__(self, limit: int):
        super().__init__(f"polynomial degree exceeds supported limit {limit}")
        self.limit = limit


class UnsupportedDegreeError(StepmarkError):
    """Equation solving is only implemented up to quadratics."""

    def __init__(self, degree: int):
        super().__init__(f"cannot solve equations of degree {degree}")
        self.degree = degree


class NotEquationError(StepmarkError):
    """A solution set was requested for a line that is a bare expression."""


class EquivUndecidableError(StepmarkError):
    """Numeric sampling could not decide equivalence (almost all points were poles)."""


class KbFormatError(StepmarkError):
    """Knowledge-base file is malformed. `problems` lists `location: message` strings."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


class KbReferenceError(StepmarkError):
    """A production/strategy/question id is referenced but not defined."""

    def __init__(self, ref: str, location: str):
        super().__init__(f"{location}: unknown id {ref!r}")
        self.ref = ref
        self.location = location


class ValidationRejectedError(StepmarkError):
    """An upsert would leave the knowledge base with CRITICAL findings."""

    def __init__(self, report):
        super().__init__("knowledge base update rejected by validation")
        self.report = report


class UnknownQuestionError(StepmarkError):
    def __init__(self, question_id: str, context: str | None = None):
        message = f"unknown question {question_id!r}"
        if context:
            message += f" ({context})"
        super().__init__(message)
        self.question_id = question_id
        self.context = context


class UnknownSessionError(StepmarkError):
    def __init__(self, session_id: str):
        super().__init__(f"unknown session {session_id!r}")
        self.session_id = session_id


class UnknownReviewItemError(StepmarkError):
    def __init__(self, item_id: str):
        super().__init__(f"unknown review item {item_id!r}")
        self.item_id = item_id


class SessionNotActiveError(StepmarkError):
    """Step submitted to (or end requested for) a session that cannot accept it."""


class BadStepCountError(StepmarkError):
    """declared_steps outside the allowed 1..12 range."""


class CorpusFormatError(StepmarkError):
    """A corpus JSONL line is malformed. `line_no` is 1-based."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class BadErrorProfileError(StepmarkError):
    """Corpus-generation error profile has probabilities outside [0,1] or summing > 1."""
