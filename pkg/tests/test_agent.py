import filecmp
import json
from pathlib import Path

from tabletutor.agent import load_bundle, run_test, run_training
from tabletutor.oracle import FeedbackOracle
from tabletutor.tasks import generate_suite, training_tasks
from tabletutor.teacher.scripted import ScriptedTeacher

BUNDLE_FILES = ("predicates.pscript", "domain.pddl", "preconds.json",
                "transitions.jsonl", "meta.json")


def train(domain_id, out, seed=0, initial_registry=None):
    out.mkdir(parents=True, exist_ok=True)
    return run_training(
        domain_id, training_tasks(domain_id), ScriptedTeacher(domain_id),
        seed=seed, oracle=FeedbackOracle(domain_id, seed=seed),
        out_dir=out, log_path=out / "session.jsonl",
        initial_registry=initial_registry)


class TestTrainingRun:
    def test_bundle_files_written(self, store_session):
        _, out, _ = store_session
        for name in BUNDLE_FILES:
            assert (out / name).exists(), name
        meta = json.loads((out / "meta.json").read_text())
        assert meta["domain_id"] == "store_objects"
        assert meta["seed"] == 0

    def test_budgets(self, store_session):
        session, _, _ = store_session
        assert session.feedback_count <= 30
        assert len(session.records) <= 100
        assert len(session.operators) == 4

    def test_deterministic_bundles(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        train("store_objects", a)
        train("store_objects", b)
        match, mismatch, errors = filecmp.cmpfiles(
            a, b, BUNDLE_FILES, shallow=False)
        assert not mismatch and not errors

        def stripped(path):
            events = [json.loads(line)
                      for line in (path / "session.jsonl").read_text()
                      .splitlines()]
            for e in events:
                e.pop("wall_time", None)
                if isinstance(e.get("payload"), dict):
                    e["payload"].pop("seconds", None)
            return events

        assert stripped(a) == stripped(b)

    def test_different_seed_changes_nothing_essential(self, tmp_path):
        out = tmp_path / "s1"
        session = train("store_objects", out, seed=1)
        assert len(session.operators) == 4
        registry, domain, meta = load_bundle(out)
        assert {a.schema for a in domain.actions} == {
            "pick_up", "place_first_on_second", "place_on_table"}

    def test_log_event_stream(self, store_session):
        _, out, _ = store_session
        events = [json.loads(line)
                  for line in (out / "session.jsonl").read_text().splitlines()]
        kinds = [e["type"] for e in events]
        assert kinds[0] == "episode_start"
        assert "operators_learned" in kinds
        assert kinds.count("episode_end") == kinds.count("episode_start")
        feedback_events = [e for e in kinds if e == "feedback"]
        assert feedback_events


class TestBundleReuse:
    def test_run_test_on_training_task(self, store_session):
        session, out, teacher = store_session
        task = generate_suite("store_objects", "canonical", seed=0)[0]
        result = run_test(out, task, teacher)
        assert result.success, result.reason

    def test_bootstrap_reuses_predicates(self, store_session, tmp_path):
        session, _, _ = store_session
        out = tmp_path / "bootstrapped"
        boot = train("set_table", out, initial_registry=session.registry)
        # every predicate learned for the first domain is still there
        for name in session.registry.predicates:
            assert name in boot.registry.predicates
        # and fewer teacher exchanges were needed than from scratch
        scratch_out = tmp_path / "scratch"
        scratch = train("set_table", scratch_out)
        assert boot.feedback_count <= scratch.feedback_count
        assert len(boot.operators) >= len(scratch.operators) - 1
