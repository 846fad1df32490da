"""Session service: state machine, durability, versioning, user metrics."""

from __future__ import annotations

import dataclasses

import pytest

from critics.crplan.types import CrPlanConfig, Critique, LeaderDecision, RoundRecord
from critics.errors import (
    Conflict,
    IllegalState,
    IndexOutOfRange,
    NotFound,
    RoundIncomplete,
    UnknownRound,
    UnmarkedRounds,
    ValidationError,
)
from critics.evalharness import fleiss_kappa
from critics.gateway import RepeatingBackend
from critics.session import (
    HumanMark,
    Session,
    SessionService,
    SessionStore,
    compute_user_metrics,
    new_session_id,
)
from critics.story import parse_story_package, render_story_package
from tests.helpers import load_fixture
from tests.test_crplan import _scripted_run_backend


@pytest.fixture
def plan():
    return parse_story_package(load_fixture("package_forest.txt"))


@pytest.fixture
def service(tmp_path, plan):
    return SessionService(SessionStore(tmp_path / "data"), _scripted_run_backend(plan))


def _human_critique(question="What if the forest keeps the map?"):
    return Critique(
        criterion_id="originality", question=question, rationale="",
        author_kind="human", author_name="Jo",
    )


class TestLifecycle:
    def test_create(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rng_seed=1), plan)
        assert session.version == 1
        assert session.status == "awaiting_critiques"
        assert service.get_state(session.id) == session

    def test_distinct_ids(self, service, plan):
        a = service.create_session("plan", CrPlanConfig(), plan)
        b = service.create_session("plan", CrPlanConfig(), plan)
        assert a.id != b.id

    def test_wrong_subject_type(self, service, plan):
        with pytest.raises(ValidationError):
            service.create_session("text", CrPlanConfig(), plan)

    def test_unknown_id(self, service):
        with pytest.raises(NotFound):
            service.get_state("missing")

    def test_machine_run_three_advances(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=3, rng_seed=7), plan)
        s1 = service.advance(session.id)
        assert s1.status == "awaiting_advance"
        assert len(s1.rounds) == 1
        s2 = service.advance(session.id)
        s3 = service.advance(session.id)
        assert s3.status == "finalized"
        assert len(s3.rounds) == 3
        assert s3.selected_index == 3
        assert "pairing" in s3.evaluator_transcript
        assert s1.version < s2.version < s3.version

    def test_advance_on_finalized(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=1, rng_seed=2), plan)
        assert service.advance(session.id).status == "finalized"
        with pytest.raises(IllegalState):
            service.advance(session.id)

    def test_export_finalized_plan(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=2, rng_seed=3), plan)
        service.advance(session.id)
        final = service.advance(session.id)
        text = service.export_text(session.id)
        candidates = (plan, *(r.refined_plan for r in final.rounds))
        assert text == render_story_package(candidates[final.selected_index])

    def test_export_before_finalize(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=2, rng_seed=3), plan)
        with pytest.raises(IllegalState):
            service.export_text(session.id)


class TestHumanLeader:
    def test_gate_then_decide(self, service, plan):
        session = service.create_session(
            "plan", CrPlanConfig(rounds=2, rng_seed=5), plan, human_leader=True
        )
        gated = service.advance(session.id)
        assert gated.status == "awaiting_leader"
        assert len(gated.pending.critiques) == 3
        with pytest.raises(IllegalState):
            service.advance(session.id)
        extended = service.submit_critique(session.id, 1, _human_critique())
        assert len(extended.pending.critiques) == 4
        decided = service.submit_leader_decision(
            session.id, 1, LeaderDecision(3, "", author_kind="human")
        )
        assert decided.status == "refining"
        done = service.advance(session.id)
        assert done.status == "awaiting_advance"
        assert done.rounds[0].decision.author_kind == "human"
        assert done.rounds[0].critiques[3] == _human_critique()

    def test_decision_out_of_range(self, service, plan):
        session = service.create_session(
            "plan", CrPlanConfig(rounds=1, rng_seed=5), plan, human_leader=True
        )
        service.advance(session.id)
        with pytest.raises(IndexOutOfRange):
            service.submit_leader_decision(session.id, 1, LeaderDecision(9, "", author_kind="human"))

    def test_machine_critique_rejected(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=1), plan, human_leader=True)
        service.advance(session.id)
        machine = dataclasses.replace(
            _human_critique(), author_kind="machine",
            candidates_considered=("a", "b", "c"),
        )
        with pytest.raises(ValidationError):
            service.submit_critique(session.id, 1, machine)

    def test_wrong_round(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=2), plan, human_leader=True)
        service.advance(session.id)
        with pytest.raises(UnknownRound):
            service.submit_critique(session.id, 2, _human_critique())


class TestVersioning:
    def test_version_counts_mutations(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=1, rng_seed=1), plan)
        assert session.version == 1
        after = service.advance(session.id)
        # one advance may apply several internal steps; version = 1 + steps
        events = service.store.events(session.id)
        assert after.version == events[-1]["version"]
        versions = [e["version"] for e in events]
        assert versions == sorted(set(versions))

    def test_stale_version_conflict(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=2, rng_seed=1), plan)
        service.advance(session.id, expected_version=1)
        with pytest.raises(Conflict):
            service.advance(session.id, expected_version=1)

    def test_get_state_since(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=1), plan)
        assert service.get_state(session.id, since=session.version) is None
        assert service.get_state(session.id, since=0) == session


class TestDurability:
    def test_reload_after_every_mutation(self, tmp_path, plan):
        data_dir = tmp_path / "d"
        service = SessionService(SessionStore(data_dir), _scripted_run_backend(plan))
        session = service.create_session(
            "plan", CrPlanConfig(rounds=3, rng_seed=5), plan, human_leader=True
        )
        snapshots = [session]
        for round_no in (1, 2, 3):
            snapshots.append(service.advance(session.id))
            snapshots.append(service.submit_critique(session.id, round_no, _human_critique()))
            snapshots.append(
                service.submit_leader_decision(
                    session.id, round_no, LeaderDecision(3, "", author_kind="human")
                )
            )
            snapshots.append(service.advance(session.id))
        assert snapshots[-1].status == "finalized"
        # reload through a brand-new store after the fact ("kill and reload")
        fresh = SessionService(SessionStore(data_dir), _scripted_run_backend(plan))
        reloaded = fresh.get_state(session.id)
        assert reloaded == snapshots[-1]
        assert fresh.store.replay(session.id) == snapshots[-1]

    def test_event_log_reconstructs_each_state(self, tmp_path, plan):
        data_dir = tmp_path / "d"
        service = SessionService(SessionStore(data_dir), _scripted_run_backend(plan))
        session = service.create_session("plan", CrPlanConfig(rounds=1, rng_seed=2), plan)
        final = service.advance(session.id)
        events = service.store.events(session.id)
        assert [Session.from_dict(e["snapshot"]).version for e in events][-1] == final.version
        assert Session.from_dict(events[0]["snapshot"]) == session


class TestMarks:
    def test_auto_edited_pass(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=1, rng_seed=1), plan)
        service.advance(session.id)
        marked = service.mark_round(session.id, 1, HumanMark(1, edited="pass", accepted="pass"))
        assert marked.human_marks[0].auto_edited == "pass"
        assert marked.human_marks[0].accepted == "pass"

    def test_auto_edited_fail_on_identity_refinement(self, tmp_path, plan):
        def echo(prompt):
            if "Critical Feedback" in prompt:
                return render_story_package(plan)
            return _scripted_run_backend(plan).responder(prompt)

        service = SessionService(SessionStore(tmp_path / "d"), RepeatingBackend(echo))
        session = service.create_session("plan", CrPlanConfig(rounds=1, rng_seed=1), plan)
        service.advance(session.id)
        marked = service.mark_round(session.id, 1, HumanMark(1, edited="fail"))
        assert marked.human_marks[0].auto_edited == "fail"
        assert marked.human_marks[0].accepted == "unmarked"

    def test_incomplete_round(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=2), plan)
        with pytest.raises(RoundIncomplete):
            service.mark_round(session.id, 1, HumanMark(1, edited="pass"))

    def test_remark_replaces(self, service, plan):
        session = service.create_session("plan", CrPlanConfig(rounds=1, rng_seed=1), plan)
        service.advance(session.id)
        service.mark_round(session.id, 1, HumanMark(1, edited="pass", accepted="fail"))
        marked = service.mark_round(session.id, 1, HumanMark(1, edited="pass", accepted="pass"))
        assert len(marked.human_marks) == 1
        assert marked.human_marks[0].accepted == "pass"


def _finalized_session(plan, marks, label=""):
    question = "q?"
    critique = Critique("originality", question, "", "machine", "X", (question,) * 3)
    rounds = []
    for i, _ in enumerate(marks, start=1):
        refined = dataclasses.replace(plan, premise=plan.premise + f" Revision {i}.")
        rounds.append(
            RoundRecord(
                round=i, input_plan=plan, critiques=(critique,),
                decision=LeaderDecision(0, "j"), refined_plan=refined,
            )
        )
    return Session(
        id=new_session_id(), stage="plan", config=CrPlanConfig(rounds=len(marks)),
        subject=rounds[-1].refined_plan, initial_subject=plan, status="finalized",
        version=1 + len(marks), label=label, rounds=tuple(rounds),
        human_marks=tuple(
            HumanMark(i, edited="pass", accepted=a, auto_edited="pass")
            for i, a in enumerate(marks, start=1)
        ),
        selected_index=0,
    )


class TestUserMetrics:
    def test_all_edited_pass(self, plan):
        sessions = [_finalized_session(plan, ["pass"] * 3)]
        assert compute_user_metrics(sessions)["edited_pass_rate"] == 100.0

    def test_25_of_30_accepted(self, plan):
        marks = ["pass"] * 25 + ["fail"] * 5
        sessions = [_finalized_session(plan, marks[i * 10 : (i + 1) * 10]) for i in range(3)]
        report = compute_user_metrics(sessions)
        assert report["accepted_pass_rate"] == 83.33
        assert report["n_rounds"] == 30

    def test_hand_counted_fraction(self, plan):
        sessions = [_finalized_session(plan, ["pass", "fail", "pass", "fail"])]
        assert compute_user_metrics(sessions)["accepted_pass_rate"] == 50.0

    def test_unmarked_rejected(self, plan):
        with pytest.raises(UnmarkedRounds):
            compute_user_metrics([_finalized_session(plan, ["pass", "unmarked"])])

    def test_unfinalized_rejected(self, plan):
        session = dataclasses.replace(_finalized_session(plan, ["pass"]), status="awaiting_advance")
        with pytest.raises(UnmarkedRounds):
            compute_user_metrics([session])

    def test_fleiss_unanimous_annotators(self, plan):
        marks = ["pass", "fail", "pass"]
        sessions = [_finalized_session(plan, marks, label="story-1") for _ in range(3)]
        assert compute_user_metrics(sessions)["fleiss"] == 1.0

    def test_fleiss_matches_direct_computation(self, plan):
        a = _finalized_session(plan, ["pass", "fail", "pass"], label="s1")
        b = _finalized_session(plan, ["pass", "pass", "fail"], label="s1")
        expected = fleiss_kappa([[2, 0], [1, 1], [1, 1]])
        assert compute_user_metrics([a, b])["fleiss"] == pytest.approx(expected)
