"""Session state machine, transcript persistence, and the review queue.

Sessions live in memory (one blackboard each); finished transcripts and review
items are appended to JSON Lines stores so they survive restarts and can be
replayed. A session grades against the knowledge-base value it was created
with, even if the service swaps in a newer one mid-flight.
"""
from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .engine import (
    ENGINE_SEED,
    Blackboard,
    Classification,
    FinalReport,
    StepAssessment,
    StepRecord,
    assess_final,
    grade_final_answer_only,
    new_blackboard,
    parse_submission,
    trace_step,
    update_blackboard,
)
from .errors import (
    BadStepCountError,
    SessionNotActiveError,
    UnknownQuestionError,
    UnknownReviewItemError,
    UnknownSessionError,
)
from .expr import render_line
from .kb import KnowledgeBase, Question

MIN_DECLARED_STEPS = 1
MAX_DECLARED_STEPS = 12
GRACE_STEPS = 4  # students may run past their declaration by this many steps


class SessionState(str, Enum):
    IN_PROGRESS = "InProgress"
    COMPLETED = "Completed"
    ABANDONED_EARLY = "AbandonedEarly"


@dataclass
class Session:
    id: str
    question_id: str
    declared_steps: int
    state: SessionState
    blackboard: Blackboard
    kb: KnowledgeBase  # pinned at creation
    created_at: float
    ended_at: float | None = None

    @property
    def step_cap(self) -> int:
        return self.declared_steps + GRACE_STEPS


@dataclass(frozen=True)
class StepOutcome:
    assessment: StepAssessment
    running_total: int
    may_continue: bool


# ---------------------------------------------------------------------------
# serialization helpers (shared by sessions, corpus grading, HTTP layer)

def assessment_to_jsonable(assessment: StepAssessment) -> dict:
    return {
        "classification": assessment.classification.value,
        "matched": [
            {"production": m.production_id, "params": list(m.rendered_params())}
            for m in assessment.matched
        ],
        "method_awarded": assessment.method_awarded,
        "accuracy_awarded": assessment.accuracy_awarded,
        "follow_through": assessment.follow_through,
        "ambiguous": assessment.ambiguous,
        "feedback": assessment.feedback,
        "reason": assessment.reason,
    }


def step_to_jsonable(record: StepRecord) -> dict:
    out = {"index": record.index, "submitted": record.submitted_text}
    out["rendered"] = render_line(record.line)
    out.update(assessment_to_jsonable(record.assessment))
    return out


def final_to_jsonable(report: FinalReport, final_only: int) -> dict:
    return {
        "earned_method": report.earned_method,
        "earned_accuracy": report.earned_accuracy,
        "earned": report.earned,
        "max_marks": report.max_marks,
        "reached_correct_final": report.reached_correct_final,
        "strategy_attribution": report.strategy_attribution,
        "final_answer_only_mark": final_only,
    }


def build_transcript(
    *,
    question: Question,
    kb: KnowledgeBase,
    blackboard: Blackboard,
    report: FinalReport,
    declared_steps: int | None,
    session_id: str | None = None,
    state: str | None = None,
    created_at: float | None = None,
    ended_at: float | None = None,
    script_id: str | None = None,
) -> dict:
    texts = [r.submitted_text for r in blackboard.steps]
    transcript = {
        "question_id": question.id,
        "declared_steps": declared_steps,
        "kb_version": kb.version,
        "kb_fingerprint": kb.fingerprint(),
        "engine_seed": ENGINE_SEED,
        "steps": [step_to_jsonable(r) for r in blackboard.steps],
        "final": final_to_jsonable(report, grade_final_answer_only(question, texts)),
    }
    if script_id is not None:
        transcript["script_id"] = script_id
    if session_id is not None:
        transcript["session_id"] = session_id
    if state is not None:
        transcript["state"] = state
    if created_at is not None:
        transcript["created_at"] = created_at
    if ended_at is not None:
        transcript["ended_at"] = ended_at
    return transcript


# volatile fields excluded from byte-stability comparisons (docs/storage.md)
VOLATILE_TRANSCRIPT_FIELDS = frozenset(
    {"session_id", "script_id", "state", "declared_steps", "created_at", "ended_at"}
)


def stable_transcript_view(transcript: dict) -> dict:
    """The grading content of a transcript, with run provenance (ids,
    timestamps, session state) stripped so interactive and batch runs of the
    same submissions compare equal."""
    return {k: v for k, v in transcript.items() if k not in VOLATILE_TRANSCRIPT_FIELDS}


# ---------------------------------------------------------------------------
# persistence

class JsonlStore:
    """Append-only JSON Lines store; one flushed line per append."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def append(self, obj: dict) -> None:
        line = json.dumps(obj, sort_keys=True, separators=(",", ":"))
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()

    def read_all(self) -> list[dict]:
        if not self.path.exists():
            return []
        out = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    out.append(json.loads(line))
        return out


REVIEW_OPEN = "Open"
REVIEW_RESOLVED = "Resolved"


# ---------------------------------------------------------------------------
# the service

class SessionService:
    """All session and review operations; one instance per data directory."""

    def __init__(self, kb: KnowledgeBase, data_dir: str | Path):
        self._kb = kb
        self._kb_lock = threading.Lock()
        self.data_dir = Path(data_dir)
        self.transcripts = JsonlStore(self.data_dir / "transcripts.jsonl")
        self.reviews = JsonlStore(self.data_dir / "review.jsonl")
        self._sessions: dict[str, Session] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._review_lock = threading.Lock()
        self._review_items: dict[str, dict] = {}
        self._review_counter = 0
        for event in self.reviews.read_all():  # last event per id wins
            self._review_items[event["id"]] = event
            number = int(event["id"].rsplit("-", 1)[1])
            self._review_counter = max(self._review_counter, number)

    # -- knowledge base ----------------------------------------------------
    @property
    def kb(self) -> KnowledgeBase:
        with self._kb_lock:
            return self._kb

    def swap_kb(self, kb: KnowledgeBase) -> None:
        with self._kb_lock:
            self._kb = kb

    # -- session lifecycle ---------------------------------------------------
    def create_session(self, question_id: str, declared_steps: int) -> Session:
        kb = self.kb
        if not kb.has_question(question_id):
            raise UnknownQuestionError(question_id)
        if (
            not isinstance(declared_steps, int)
            or isinstance(declared_steps, bool)
            or not MIN_DECLARED_STEPS <= declared_steps <= MAX_DECLARED_STEPS
        ):
            raise BadStepCountError(
                f"declared_steps must be between {MIN_DECLARED_STEPS} and {MAX_DECLARED_STEPS}"
            )
        question = kb.question(question_id)
        session = Session(
            id=uuid.uuid4().hex,
            question_id=question_id,
            declared_steps=declared_steps,
            state=SessionState.IN_PROGRESS,
            blackboard=new_blackboard(question),
            kb=kb,
            created_at=time.time(),
        )
        with self._registry_lock:
            self._sessions[session.id] = session
            self._session_locks[session.id] = threading.Lock()
        return session

    def _get(self, session_id: str) -> tuple[Session, threading.Lock]:
        with self._registry_lock:
            session = self._sessions.get(session_id)
            lock = self._session_locks.get(session_id)
        if session is None or lock is None:
            raise UnknownSessionError(session_id)
        return session, lock

    def _question(self, session: Session) -> Question:
        return session.kb.question(session.question_id)

    def _final_reached(self, session: Session) -> bool:
        bb = session.blackboard
        if not bb.steps:
            return False
        question = self._question(session)
        return assess_final(bb, question).reached_correct_final

    def _may_continue(self, session: Session) -> bool:
        if session.state is not SessionState.IN_PROGRESS:
            return False
        if len(session.blackboard.steps) >= session.step_cap:
            return False
        return not self._final_reached(session)

    def submit_step(self, session_id: str, text: str) -> StepOutcome:
        session, lock = self._get(session_id)
        with lock:
            if session.state is not SessionState.IN_PROGRESS or not self._may_continue(
                session
            ):
                raise SessionNotActiveError(
                    f"session {session_id} is not accepting steps"
                )
            question = self._question(session)
            kb = session.kb
            assessment = trace_step(session.blackboard, text, kb, question)
            line = parse_submission(text, question)
            session.blackboard = update_blackboard(
                session.blackboard, text, line, assessment, question
            )
            if assessment.classification is Classification.UNRECOGNIZED:
                self._enqueue_review(session, text, assessment)
            return StepOutcome(
                assessment=assessment,
                running_total=session.blackboard.earned,
                may_continue=self._may_continue(session),
            )

    def end_session(self, session_id: str) -> dict:
        session, lock = self._get(session_id)
        with lock:
            if session.state is not SessionState.IN_PROGRESS:
                raise SessionNotActiveError(f"session {session_id} already ended")
            question = self._question(session)
            report = assess_final(session.blackboard, question)
            done = (
                report.reached_correct_final
                or len(session.blackboard.steps) >= session.declared_steps
            )
            session.state = SessionState.COMPLETED if done else SessionState.ABANDONED_EARLY
            session.ended_at = time.time()
            transcript = build_transcript(
                question=question,
                kb=session.kb,
                blackboard=session.blackboard,
                report=report,
                declared_steps=session.declared_steps,
                session_id=session.id,
                state=session.state.value,
                created_at=session.created_at,
                ended_at=session.ended_at,
            )
            self.transcripts.append(transcript)
            return transcript

    def snapshot(self, session_id: str) -> dict:
        session, lock = self._get(session_id)
        with lock:
            question = self._question(session)
            return {
                "session_id": session.id,
                "question_id": session.question_id,
                "declared_steps": session.declared_steps,
                "state": session.state.value,
                "premise_text": render_line(session.blackboard.premise),
                "steps": [step_to_jsonable(r) for r in session.blackboard.steps],
                "running_total": session.blackboard.earned,
                "may_continue": self._may_continue(session),
            }

    # -- review queue --------------------------------------------------------
    def _enqueue_review(self, session: Session, text: str, assessment: StepAssessment) -> None:
        bb = session.blackboard  # already updated: last step is the unrecognized one
        premise_before = (
            render_line(bb.steps[-2].line)
            if len(bb.steps) >= 2
            else render_line(self._question(session).initial)
        )
        with self._review_lock:
            self._review_counter += 1
            item = {
                "id": f"rv-{self._review_counter:06d}",
                "session_id": session.id,
                "question_id": session.question_id,
                "step_index": bb.steps[-1].index,
                "submitted_text": text,
                "premise_text": premise_before,
                "reason": assessment.reason,
                "status": REVIEW_OPEN,
                "note": None,
                "created_at": time.time(),
                "resolved_at": None,
            }
            self._review_items[item["id"]] = item
            self.reviews.append(item)

    def list_review(self, status: str | None = None, question_id: str | None = None) -> list[dict]:
        with self._review_lock:
            items = sorted(self._review_items.values(), key=lambda it: it["id"])
        if status is not None:
            items = [it for it in items if it["status"] == status]
        if question_id is not None:
            items = [it for it in items if it["question_id"] == question_id]
        return [dict(it) for it in items]

    def resolve_review(self, item_id: str, note: str) -> dict:
        with self._review_lock:
            item = self._review_items.get(item_id)
            if item is None:
                raise UnknownReviewItemError(item_id)
            if item["status"] == REVIEW_RESOLVED:
                return dict(item)  # idempotent
            resolved = dict(item)
            resolved["status"] = REVIEW_RESOLVED
            resolved["note"] = note
            resolved["resolved_at"] = time.time()
            self._review_items[item_id] = resolved
            self.reviews.append(resolved)
            return dict(resolved)
