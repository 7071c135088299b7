import io
import zipfile

import pytest
from fastapi.testclient import TestClient

from tabletutor.oracle import FeedbackOracle
from tabletutor.service import create_app
from tabletutor.tasks import GoalAtom
from tabletutor.worldsim import GroundedAction, WorldState, check_feasible


@pytest.fixture()
def client():
    return TestClient(create_app())


def drive_scripted(client, domain="store_objects", seed=0, limit=500):
    created = client.post("/sessions", json={"domain": domain,
                                             "teacher": "scripted",
                                             "seed": seed})
    assert created.status_code == 200
    sid = created.json()["id"]
    advances = 0
    while advances < limit:
        state = client.get(f"/sessions/{sid}/state").json()
        if state["status"] == "finished":
            return sid, advances
        assert state["status"] == "running"
        out = client.post(f"/sessions/{sid}/advance")
        assert out.status_code == 200
        advances += 1
    pytest.fail("scripted session did not finish")


class TestScriptedSession:
    def test_full_run_matches_cli_bundle(self, client, store_session):
        _, cli_out, _ = store_session
        sid, advances = drive_scripted(client)
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["status"] == "finished"
        assert len(state["predicates"]) == 6
        assert "pick_up" in state["operators"]

        # the bundle downloaded over HTTP is byte-identical to the one the
        # training entry point writes for the same domain/seed/teacher
        bundle = client.get(f"/sessions/{sid}/bundle")
        assert bundle.status_code == 200
        assert bundle.headers["content-type"] == "application/zip"
        zf = zipfile.ZipFile(io.BytesIO(bundle.content))
        for name in ("predicates.pscript", "domain.pddl", "preconds.json",
                     "transitions.jsonl", "meta.json"):
            assert zf.read(name) == (cli_out / name).read_bytes(), name

    def test_log_endpoint_streams_jsonl(self, client):
        sid, _ = drive_scripted(client)
        log = client.get(f"/sessions/{sid}/log")
        assert log.status_code == 200
        lines = log.text.strip().splitlines()
        assert lines
        import json
        kinds = [json.loads(line)["type"] for line in lines]
        assert "operators_learned" in kinds

    def test_advance_after_finish_conflicts(self, client):
        sid, _ = drive_scripted(client)
        out = client.post(f"/sessions/{sid}/advance")
        assert out.status_code == 409


def honest_feedback(state):
    """What a truthful teacher would say about the pending proposal."""
    oracle = FeedbackOracle(state["domain"])
    world = WorldState.from_json(state["world"])
    proposal = state["pending_proposal"]
    if proposal["kind"] == "declare_success":
        goal = tuple(GoalAtom(kind, tuple(args))
                     for kind, args in state["task"]["goal"])
        return oracle.verify_success(world, goal).text
    schema = proposal["action"].split("(", 1)[0]
    action = GroundedAction(schema, tuple(proposal["args"]))
    return oracle.verify_action(world, action).text


def _is_feasible(state):
    proposal = state["pending_proposal"]
    schema = proposal["action"].split("(", 1)[0]
    action = GroundedAction(schema, tuple(proposal["args"]))
    return check_feasible(WorldState.from_json(state["world"]), action).ok


class TestHumanSession:
    def make(self, client):
        created = client.post("/sessions", json={"domain": "store_objects",
                                                 "teacher": "human"})
        return created.json()["id"]

    def step_to_proposal(self, client, sid):
        """Set the goal if needed and advance until feedback is requested."""
        for _ in range(200):
            state = client.get(f"/sessions/{sid}/state").json()
            if state["status"] == "awaiting_goal":
                out = client.post(f"/sessions/{sid}/goal",
                                  json={"text": state["goal_text"]})
                assert out.status_code == 200
            elif state["status"] == "running":
                assert client.post(f"/sessions/{sid}/advance").status_code \
                    == 200
            else:
                return state
        pytest.fail("session never asked for feedback")

    def test_goal_then_feedback_flow(self, client):
        sid = self.make(client)
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["status"] == "awaiting_goal"
        # advancing before a goal is a conflict
        assert client.post(f"/sessions/{sid}/advance").status_code == 409

        state = self.step_to_proposal(client, sid)
        assert state["status"] == "awaiting_feedback"
        assert state["pending_proposal"]["kind"] in ("action",
                                                     "declare_success")

        reply = client.post(f"/sessions/{sid}/feedback",
                            json={"text": honest_feedback(state)})
        assert reply.status_code == 200
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["status"] in ("running", "awaiting_goal", "finished")

    def test_approving_infeasible_action_is_retryable(self, client):
        sid = self.make(client)
        # walk until the agent proposes something the simulator would refuse
        for _ in range(50):
            state = self.step_to_proposal(client, sid)
            text = honest_feedback(state)
            proposal = state["pending_proposal"]
            if proposal["kind"] == "action" and not _is_feasible(state):
                break
            assert client.post(f"/sessions/{sid}/feedback",
                               json={"text": text}).status_code == 200
        else:
            pytest.fail("agent never proposed an infeasible action")

        # blanket approval of an impossible action is rejected, not executed
        reply = client.post(f"/sessions/{sid}/feedback",
                            json={"text": "Go ahead."})
        assert reply.status_code == 422
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["status"] == "awaiting_feedback"
        assert state["pending_proposal"] == proposal
        # an honest explanation still gets through
        reply = client.post(f"/sessions/{sid}/feedback", json={"text": text})
        assert reply.status_code == 200

    def test_unintelligible_feedback_is_retryable(self, client):
        sid = self.make(client)
        state = self.step_to_proposal(client, sid)
        proposal = state["pending_proposal"]
        reply = client.post(f"/sessions/{sid}/feedback",
                            json={"text": "flibbertigibbet"})
        assert reply.status_code == 422
        # the proposal is restored so the teacher can rephrase
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["status"] == "awaiting_feedback"
        assert state["pending_proposal"] == proposal
        reply = client.post(f"/sessions/{sid}/feedback",
                            json={"text": honest_feedback(state)})
        assert reply.status_code == 200

    def test_goal_conflicts_when_running(self, client):
        sid = self.make(client)
        state = client.get(f"/sessions/{sid}/state").json()
        client.post(f"/sessions/{sid}/goal", json={"text": state["goal_text"]})
        again = client.post(f"/sessions/{sid}/goal",
                            json={"text": state["goal_text"]})
        assert again.status_code == 409

    def test_bad_goal_is_422(self, client):
        sid = self.make(client)
        out = client.post(f"/sessions/{sid}/goal",
                          json={"text": "make me a sandwich"})
        assert out.status_code == 422
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["status"] == "awaiting_goal"


class TestErrors:
    def test_unknown_session_404(self, client):
        for method, path in (("get", "/sessions/nope/state"),
                             ("post", "/sessions/nope/advance"),
                             ("get", "/sessions/nope/log"),
                             ("get", "/sessions/nope/bundle")):
            response = getattr(client, method)(path)
            assert response.status_code == 404, path

    def test_bad_create_params(self, client):
        assert client.post("/sessions",
                           json={"domain": "juggling"}).status_code == 422
        assert client.post("/sessions",
                           json={"domain": "store_objects",
                                 "teacher": "psychic"}).status_code == 422
