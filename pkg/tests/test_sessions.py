"""Session lifecycle, persistence, review queue, and replay determinism."""

from __future__ import annotations

import json

import pytest

from stepmark.corpus import CorpusRecord, grade_script
from stepmark.engine import Classification
from stepmark.errors import (
    BadStepCountError,
    SessionNotActiveError,
    SubmissionRejectedError,
    UnknownQuestionError,
    UnknownReviewItemError,
    UnknownSessionError,
)
from stepmark.kb import kb_from_jsonable, kb_to_jsonable, load_kb
from stepmark.sessions import (
    GRACE_STEPS,
    MAX_DECLARED_STEPS,
    REVIEW_OPEN,
    REVIEW_RESOLVED,
    SessionService,
    SessionState,
    stable_transcript_view,
)

from .conftest import FIXTURE_KB


@pytest.fixture()
def service(kb, tmp_path):
    return SessionService(kb, tmp_path)


def play(service, question_id, declared, texts):
    session = service.create_session(question_id, declared)
    for text in texts:
        service.submit_step(session.id, text)
    return session, service.end_session(session.id)


# --- creation ----------------------------------------------------------------

def test_create_session_starts_at_the_question_premise(service):
    session = service.create_session("Q1", 2)
    assert session.state is SessionState.IN_PROGRESS
    assert session.declared_steps == 2
    snap = service.snapshot(session.id)
    assert snap["premise_text"] == "3*x + 5 = 20"
    assert snap["steps"] == []


def test_create_session_unknown_question(service):
    with pytest.raises(UnknownQuestionError):
        service.create_session("Q9", 2)


@pytest.mark.parametrize("declared", [0, -1, 13, True, "3"])
def test_create_session_bad_step_counts(service, declared):
    with pytest.raises(BadStepCountError):
        service.create_session("Q1", declared)


def test_declared_bounds_are_inclusive(service):
    assert service.create_session("Q1", 1).declared_steps == 1
    assert service.create_session("Q1", MAX_DECLARED_STEPS).declared_steps == 12


# --- submission flow -----------------------------------------------------------

def test_worked_example_flow(service):
    session = service.create_session("Q1", 2)
    first = service.submit_step(session.id, "3x = 15")
    assert first.assessment.classification is Classification.CORRECT_METHOD
    assert first.running_total == 2
    assert first.may_continue is True
    second = service.submit_step(session.id, "x = 5")
    assert second.running_total == 4
    assert second.may_continue is False  # stated final answer reached
    transcript = service.end_session(session.id)
    assert transcript["state"] == "Completed"
    assert transcript["final"]["earned"] == 4
    assert transcript["final"]["reached_correct_final"] is True


def test_equivalent_unfinished_line_does_not_auto_complete(service):
    # "3x = 15" has the right solution set but does not state the answer,
    # so the session stays open.
    session = service.create_session("Q1", 2)
    outcome = service.submit_step(session.id, "3x = 15")
    assert outcome.may_continue is True


def test_rejected_submission_consumes_no_step(service):
    session = service.create_session("Q1", 2)
    with pytest.raises(SubmissionRejectedError):
        service.submit_step(session.id, "3x + = 20")
    assert service.snapshot(session.id)["steps"] == []
    outcome = service.submit_step(session.id, "3x = 15")
    assert outcome.assessment.classification is Classification.CORRECT_METHOD


def test_doubled_plus_rejected_at_second_plus(service):
    session = service.create_session("Q1", 2)
    with pytest.raises(SubmissionRejectedError) as err:
        service.submit_step(session.id, "3x++5")
    assert err.value.offset == 3
    assert service.snapshot(session.id)["steps"] == []


def test_submissions_blocked_after_final_reached(service):
    session = service.create_session("Q1", 3)
    service.submit_step(session.id, "3x = 15")
    service.submit_step(session.id, "x = 5")
    with pytest.raises(SessionNotActiveError):
        service.submit_step(session.id, "x = 5")


def test_step_cap_is_declared_plus_grace(service):
    session = service.create_session("Q1", 1)
    fillers = ["3x = 15", "3x + 1 = 16", "3x + 2 = 17", "3x + 3 = 18", "3x + 4 = 19"]
    assert len(fillers) == 1 + GRACE_STEPS
    outcomes = [service.submit_step(session.id, t) for t in fillers]
    assert [o.may_continue for o in outcomes] == [True, True, True, True, False]
    with pytest.raises(SessionNotActiveError):
        service.submit_step(session.id, "3x + 5 = 20")


def test_unknown_session_is_reported(service):
    with pytest.raises(UnknownSessionError):
        service.submit_step("nope", "3x = 15")
    with pytest.raises(UnknownSessionError):
        service.snapshot("nope")


# --- ending ---------------------------------------------------------------------

def test_end_immediately_is_abandoned(service):
    session = service.create_session("Q1", 2)
    transcript = service.end_session(session.id)
    assert transcript["state"] == "AbandonedEarly"
    assert transcript["final"]["earned"] == 0
    assert session.state is SessionState.ABANDONED_EARLY


def test_end_after_declared_steps_is_completed_even_without_answer(service):
    session = service.create_session("Q1", 1)
    service.submit_step(session.id, "3x = 14")
    transcript = service.end_session(session.id)
    assert transcript["state"] == "Completed"
    assert transcript["final"]["reached_correct_final"] is False


def test_double_end_is_not_active(service):
    session = service.create_session("Q1", 2)
    service.end_session(session.id)
    with pytest.raises(SessionNotActiveError):
        service.end_session(session.id)


def test_follow_through_transcript_payoff(service):
    _, transcript = play(service, "Q1", 2, ["3x = 14", "x = 14/3"])
    assert transcript["final"]["earned"] == 3
    assert transcript["final"]["final_answer_only_mark"] == 0
    flags = [s["follow_through"] for s in transcript["steps"]]
    assert flags == [False, True]


# --- transcripts on disk ----------------------------------------------------------

def test_transcripts_are_persisted_only_on_end(kb, tmp_path):
    service = SessionService(kb, tmp_path)
    path = tmp_path / "transcripts.jsonl"
    session = service.create_session("Q1", 2)
    service.submit_step(session.id, "3x = 15")
    assert not path.exists() or path.read_text() == ""
    service.end_session(session.id)
    lines = [json.loads(l) for l in path.read_text().splitlines()]
    assert len(lines) == 1
    assert lines[0]["session_id"] == session.id


def test_transcripts_survive_restart(kb, tmp_path):
    service = SessionService(kb, tmp_path)
    play(service, "Q1", 2, ["3x = 15", "x = 5"])
    play(service, "Q2", 2, ["(x-2)(x-3) = 0"])
    reborn = SessionService(kb, tmp_path)
    stored = reborn.transcripts.read_all()
    assert len(stored) == 2
    assert {t["question_id"] for t in stored} == {"Q1", "Q2"}


def test_session_transcript_matches_batch_grader(kb, service):
    texts = ["3x = 25", "3x = 15", "x = 5"]
    _, transcript = play(service, "Q1", 3, texts)
    batch = grade_script(kb, CorpusRecord("ignored", "Q1", tuple(texts)))
    assert stable_transcript_view(transcript) == stable_transcript_view(batch)


def test_session_isolation_interleaved_equals_serial(kb, tmp_path):
    interleaved = SessionService(kb, tmp_path / "a")
    s1 = interleaved.create_session("Q1", 2)
    s2 = interleaved.create_session("Q1", 2)
    interleaved.submit_step(s1.id, "3x = 15")
    interleaved.submit_step(s2.id, "3x = 14")
    interleaved.submit_step(s1.id, "x = 5")
    interleaved.submit_step(s2.id, "x = 14/3")
    t1, t2 = interleaved.end_session(s1.id), interleaved.end_session(s2.id)

    serial = SessionService(kb, tmp_path / "b")
    _, u1 = play(serial, "Q1", 2, ["3x = 15", "x = 5"])
    _, u2 = play(serial, "Q1", 2, ["3x = 14", "x = 14/3"])
    assert stable_transcript_view(t1) == stable_transcript_view(u1)
    assert stable_transcript_view(t2) == stable_transcript_view(u2)


def test_sessions_pin_their_creation_time_kb(kb, service):
    session = service.create_session("Q1", 2)
    original_fp = kb.fingerprint()
    raw = kb_to_jsonable(kb)
    raw["version"] = "2.0.0"
    service.swap_kb(kb_from_jsonable(raw))
    service.submit_step(session.id, "3x = 15")
    transcript = service.end_session(session.id)
    assert transcript["kb_version"] == "1.0.0"
    assert transcript["kb_fingerprint"] == original_fp
    fresh = service.create_session("Q1", 2)
    assert service.end_session(fresh.id)["kb_version"] == "2.0.0"


# --- review queue -------------------------------------------------------------------

def test_unrecognized_step_opens_exactly_one_review_item(service):
    session = service.create_session("Q1", 2)
    service.submit_step(session.id, "2x = 9")
    items = service.list_review()
    assert len(items) == 1
    item = items[0]
    assert item["status"] == REVIEW_OPEN
    assert item["session_id"] == session.id
    assert item["question_id"] == "Q1"
    assert item["step_index"] == 1
    assert item["submitted_text"] == "2x = 9"
    assert item["premise_text"] == "3*x + 5 = 20"
    assert item["reason"] == "NoMatchingKnowledge"


def test_recognized_steps_do_not_enqueue(service):
    session = service.create_session("Q1", 2)
    service.submit_step(session.id, "3x = 15")
    service.submit_step(session.id, "x = 5")
    assert service.list_review() == []


def test_review_filtering(service):
    s1 = service.create_session("Q1", 2)
    service.submit_step(s1.id, "2x = 9")
    s2 = service.create_session("Q2", 2)
    service.submit_step(s2.id, "x^2 = 5x - 6")
    assert len(service.list_review()) == 2
    assert len(service.list_review(question_id="Q1")) == 1
    only_open = service.list_review(status=REVIEW_OPEN)
    assert len(only_open) == 2


def test_resolve_review_round_trip(service):
    session = service.create_session("Q1", 2)
    service.submit_step(session.id, "2x = 9")
    item = service.list_review()[0]
    resolved = service.resolve_review(item["id"], "added buggy rule to KB")
    assert resolved["status"] == REVIEW_RESOLVED
    assert resolved["note"] == "added buggy rule to KB"
    assert resolved["resolved_at"] is not None
    again = service.resolve_review(item["id"], "different note")
    assert again == resolved  # idempotent: first resolution stands


def test_resolve_unknown_item(service):
    with pytest.raises(UnknownReviewItemError):
        service.resolve_review("rv-999999", "note")


def test_review_items_survive_restart(kb, tmp_path):
    service = SessionService(kb, tmp_path)
    session = service.create_session("Q1", 2)
    service.submit_step(session.id, "2x = 9")
    item = service.list_review()[0]
    service.resolve_review(item["id"], "noted")

    reborn = SessionService(kb, tmp_path)
    items = reborn.list_review()
    assert len(items) == 1
    assert items[0]["status"] == REVIEW_RESOLVED
    session2 = reborn.create_session("Q1", 2)
    reborn.submit_step(session2.id, "2x = 10")
    ids = {i["id"] for i in reborn.list_review()}
    assert len(ids) == 2  # the counter resumes instead of reusing ids


def test_review_ids_are_sequential(service):
    session = service.create_session("Q1", 4)
    for text in ["2x = 9", "2x = 10"]:
        service.submit_step(session.id, text)
    ids = sorted(i["id"] for i in service.list_review())
    assert ids == ["rv-000001", "rv-000002"]
