"""Acceptance suite: one test (and one printed pass/fail line) per release
criterion, each at its stated tolerance."""

from __future__ import annotations

import json
import random
import time

import pytest
from click.testing import CliRunner

from critics.cli import main
from critics.crtext import CrTextConfig, run_crtext
from critics.evalharness import (
    Outcome,
    PLAN_METRICS,
    Verdict,
    aggregate_win_rates,
    cohen_kappa,
    fleiss_kappa,
    judge_pair,
    parse_verdicts,
    render_verdicts,
)
from critics.gateway import RepeatingBackend
from critics.session import HumanMark, SessionService, SessionStore, compute_user_metrics
from critics.story import (
    CharacterEntry,
    Outline,
    OutlineItem,
    StoryPackage,
    normalize_package_text,
    parse_story_package,
    render_story_package,
    segment_sentences,
)
from tests.helpers import load_fixture
from tests.test_cli import _plan_script, _text_script, _write
from tests.test_crplan import _scripted_run_backend
from tests.test_crtext import STORY, _scripted_text_backend
from tests.test_eval_harness import _cohen_oracle, _fleiss_oracle, _verdict_set


@pytest.fixture(autouse=True)
def _report(request, capsys):
    yield
    with capsys.disabled():
        print(f"[PASS] {request.node.name}")


class TestAcceptance:
    def test_plan_protocol_shape(self, tmp_path):
        """Three scripted rounds -> 3 round records, 4 candidates, scripted
        pick; byte-identical across 3 runs; each run under 2 seconds."""
        plan_text = load_fixture("package_forest.txt")
        pkg = _write(tmp_path, "pkg.txt", plan_text)
        runner = CliRunner()
        dumps = []
        for attempt in range(3):
            script = _write(tmp_path, f"script{attempt}.json", json.dumps(_plan_script(plan_text)))
            out = tmp_path / f"out{attempt}"
            started = time.perf_counter()
            result = runner.invoke(
                main,
                ["plan", pkg, "--rounds", "3", "--seed", "7", "--mock-script", script,
                 "--output-dir", str(out)],
            )
            elapsed = time.perf_counter() - started
            assert result.exit_code == 0, result.output
            assert elapsed < 2.0
            dumps.append((out / "pkg.crplan.json").read_bytes())
        assert dumps[0] == dumps[1] == dumps[2]
        payload = json.loads(dumps[0])
        assert len(payload["rounds"]) == 3
        assert len(payload["candidates"]) == 4
        assert payload["selected_index"] == 0  # scripted all-tie evaluator keeps the incumbent

    def test_text_protocol_shape(self):
        """Three scripted rounds change exactly 3 sentence ordinals and
        nothing else, in under 1 second."""
        story = segment_sentences(STORY)
        started = time.perf_counter()
        final, trace = run_crtext(story, CrTextConfig(rounds=3, rng_seed=9), _scripted_text_backend())
        assert time.perf_counter() - started < 1.0
        assert len(trace) == 3
        before = [story.sentence(s) for s in story.sentence_index]
        after = [final.sentence(s) for s in final.sentence_index]
        changed = [i for i, (x, y) in enumerate(zip(before, after)) if x != y]
        assert len(changed) == 3
        for i in set(range(len(before))) - set(changed):
            assert before[i] == after[i]

    def test_outline_roundtrip(self):
        """Both exemplar packages and 1000 generated ones round-trip through
        parse -> render byte-exactly."""
        for name in ("package_forest.txt", "package_loneliness.txt"):
            text = load_fixture(name)
            assert render_story_package(parse_story_package(text)) == normalize_package_text(text)
        for seed in range(1000):
            pkg = _random_package(seed)
            rendered = render_story_package(pkg)
            assert parse_story_package(rendered) == pkg
            assert render_story_package(parse_story_package(rendered)) == rendered

    def test_verdict_pipeline(self):
        """Example judge reply parses as stated; render/parse round-trips the
        whole outcome enum; 1000-pair biased-judge rate lands in [45, 55]."""
        out = parse_verdicts("1:[[A]], 2:[[B]], 3:[[B]], 4:[[BY]]", PLAN_METRICS)
        assert [v.outcome for v in out] == [Outcome.A, Outcome.B, Outcome.B, Outcome.BOTH]
        for outcome in Outcome:
            verdicts = tuple(Verdict(m, outcome) for m in PLAN_METRICS.metrics)
            assert parse_verdicts(render_verdicts(verdicts), PLAN_METRICS) == verdicts
        backend = RepeatingBackend(lambda p: "1:[[A]], 2:[[A]], 3:[[A]], 4:[[OA]]")
        sets = [
            judge_pair("same", "same", PLAN_METRICS, seed, backend, pair_id=str(seed))
            for seed in range(1000)
        ]
        table = aggregate_win_rates(sets, PLAN_METRICS)
        for metric in PLAN_METRICS.metrics:
            assert 45.0 <= table[metric].rate_a <= 55.0

    def test_win_rate_semantics(self):
        """[A, Both, B] -> 66.67/66.67 within 0.01; all-Both -> 100/100."""
        mixed = aggregate_win_rates(
            [
                _verdict_set([Outcome.A] * 4),
                _verdict_set([Outcome.BOTH] * 4),
                _verdict_set([Outcome.B] * 4),
            ],
            PLAN_METRICS,
        )
        for metric in PLAN_METRICS.metrics:
            assert mixed[metric].rate_a == pytest.approx(66.67, abs=0.01)
            assert mixed[metric].rate_b == pytest.approx(66.67, abs=0.01)
        all_both = aggregate_win_rates([_verdict_set([Outcome.BOTH] * 4)] * 5, PLAN_METRICS)
        assert all_both["interesting"].rate_a == 100.0
        assert all_both["interesting"].rate_b == 100.0

    def test_agreement_statistics(self):
        """Known two-rater case equals 0.5 exactly; perfect agreement is 1.0
        for both statistics; 1000 random instances match brute-force oracles
        within 1e-9."""
        assert cohen_kappa(["A", "A", "B", "B"], ["A", "B", "B", "B"]) == 0.5
        assert cohen_kappa(["A", "B", "Both"], ["A", "B", "Both"]) == 1.0
        assert fleiss_kappa([[3, 0], [0, 3]]) == 1.0
        rng = random.Random(2024)
        cats = ["A", "B", "Both", "Neither"]
        for _ in range(1000):
            n = rng.randint(1, 25)
            r1 = [rng.choice(cats) for _ in range(n)]
            r2 = [rng.choice(cats) for _ in range(n)]
            assert cohen_kappa(r1, r2) == pytest.approx(_cohen_oracle(r1, r2), abs=1e-9)
        for _ in range(1000):
            n_items, n_cats, n_raters = rng.randint(1, 10), rng.randint(2, 4), rng.randint(2, 5)
            counts = []
            for _ in range(n_items):
                row = [0] * n_cats
                for _ in range(n_raters):
                    row[rng.randrange(n_cats)] += 1
                counts.append(row)
            assert fleiss_kappa(counts) == pytest.approx(_fleiss_oracle(counts), abs=1e-9)

    def test_user_metric_reproduction(self, tmp_path):
        """Always-applying refiner -> auto-Edited 100.00; 25 of 30 accepted
        marks -> 83.33."""
        plan = parse_story_package(load_fixture("package_forest.txt"))
        from critics.crplan import CrPlanConfig

        marks = ["pass"] * 25 + ["fail"] * 5
        sessions = []
        for i in range(10):  # 10 stories x 3 rounds = 30 marked rounds
            service = SessionService(
                SessionStore(tmp_path / f"d{i}"), _scripted_run_backend(plan)
            )
            session = service.create_session("plan", CrPlanConfig(rounds=3, rng_seed=i), plan)
            for _ in range(3):
                service.advance(session.id)
            for round_no in range(1, 4):
                service.mark_round(
                    session.id, round_no,
                    HumanMark(round_no, edited="pass", accepted=marks[i * 3 + round_no - 1]),
                )
            sessions.append(service.get_state(session.id))
        report = compute_user_metrics(sessions)
        assert report["edited_pass_rate"] == 100.0
        assert report["accepted_pass_rate"] == 83.33
        assert report["n_rounds"] == 30

    def test_ablation_configurations(self, tmp_path):
        """Leaderless and single-criterion runs show the expected trace
        shapes: every critique applied, identical criterion on all rounds."""
        plan_text = load_fixture("package_forest.txt")
        pkg = _write(tmp_path, "pkg.txt", plan_text)
        runner = CliRunner()
        script = _write(tmp_path, "s1.json", json.dumps(_plan_script(plan_text, rounds=2)))
        out = tmp_path / "out1"
        result = runner.invoke(
            main,
            ["plan", pkg, "--rounds", "2", "--no-leader", "--no-personas",
             "--criteria", "originality", "--mock-script", script, "--output-dir", str(out)],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads((out / "pkg.crplan.json").read_text())
        assert [c["criterion_id"] for r in payload["rounds"] for c in r["critiques"]] == (
            ["originality", "originality"]
        )
        assert all(r["decision"]["justification"].startswith("leaderless") for r in payload["rounds"])
        # full leaderless run: all three critiques applied each round
        script = _write(tmp_path, "s2.json", json.dumps(
            _plan_script(plan_text, rounds=1)[:-1]
            + [{"match": "Critical Feedback",
                "response": load_fixture("package_forest.txt"), "times": 2},
               {"match": "story plan excerpts", "response": "[[TI]]"}]
        ))
        out = tmp_path / "out2"
        result = runner.invoke(
            main,
            ["plan", pkg, "--rounds", "1", "--no-leader", "--no-personas",
             "--mock-script", script, "--output-dir", str(out)],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads((out / "pkg.crplan.json").read_text())
        assert len(payload["rounds"][0]["critiques"]) == 3

    def test_session_durability(self, tmp_path):
        """Kill-and-reload after every API mutation reproduces the in-memory
        state across a scripted 3-round interactive run."""
        from critics.crplan import CrPlanConfig, Critique, LeaderDecision

        plan = parse_story_package(load_fixture("package_forest.txt"))
        data_dir = tmp_path / "data"

        def fresh():
            return SessionService(SessionStore(data_dir), _scripted_run_backend(plan))

        def check(snapshot):
            assert fresh().get_state(snapshot.id) == snapshot

        service = fresh()
        session = service.create_session(
            "plan", CrPlanConfig(rounds=3, rng_seed=5), plan, human_leader=True
        )
        check(session)
        human = Critique("originality", "What if the map lies?", "", "human", "Jo")
        last = session
        for round_no in (1, 2, 3):
            check(service.advance(session.id))
            check(service.submit_critique(session.id, round_no, human))
            check(
                service.submit_leader_decision(
                    session.id, round_no, LeaderDecision(3, "", author_kind="human")
                )
            )
            last = service.advance(session.id)
            check(last)
        assert last.status == "finalized"
        check(service.mark_round(session.id, 1, HumanMark(1, edited="pass", accepted="pass")))


_WORDS = (
    "river", "lantern", "archive", "signal", "harbor", "method", "winter",
    "garden", "cipher", "market", "thread", "voyage",
)


def _random_package(seed: int) -> StoryPackage:
    rng = random.Random(seed)

    def words(n):
        return " ".join(rng.choice(_WORDS) for _ in range(n))

    def sentence(n):
        return words(n).capitalize() + "."

    names = rng.sample(["Ada", "Bram", "Ceres", "Dorian", "Edda", "Falk"], rng.randint(1, 4))
    characters = tuple(CharacterEntry(name, sentence(rng.randint(3, 8))) for name in names)
    items = []
    for i in range(rng.randint(1, 4)):
        children = tuple(
            OutlineItem(
                label=f"{chr(ord('a') + j)}",
                summary=sentence(rng.randint(4, 10)),
                scene=rng.choice([None, "", words(2)]),
                characters=tuple(rng.sample(names, rng.randint(0, len(names)))),
            )
            for j in range(rng.randint(0, 3))
        )
        items.append(
            OutlineItem(
                label=str(i + 1),
                summary=sentence(rng.randint(4, 10)),
                scene=rng.choice([None, "", words(2)]),
                characters=tuple(rng.sample(names, rng.randint(0, len(names)))),
                children=children,
            )
        )
    return StoryPackage(
        premise=sentence(rng.randint(6, 14)),
        setting=sentence(rng.randint(4, 10)),
        characters=characters,
        outline=Outline(items=tuple(items)),
    )
