"""HTTP session service: drives training sessions over a small JSON API so
a browser (or any client) can act as the teacher."""
from __future__ import annotations

import io
import json
import secrets
import tempfile
import threading
import zipfile
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .agent import Session, write_bundle
from .config import Config
from .dsl.ast import print_definition
from .oracle import FeedbackOracle
from .pddl.model import compile_domain
from .tasks import Task, training_tasks
from .teacher import make_teacher
from .teacher.types import FeedbackEvent, TeacherError
from .worldsim import WorldError

APPROVALS = frozenset((
    "yes", "ok", "okay", "correct", "go ahead", "approved", "feasible",
    "goal achieved", "you did it", "well done",
))


def _is_approval(text: str) -> bool:
    return text.strip().rstrip(".!").lower() in APPROVALS


class SessionRuntime:
    """One training session plus the state machine the API exposes."""

    def __init__(self, session_id: str, domain_id: str, teacher_mode: str,
                 seed: int, config: Config, work_dir: Path):
        self.id = session_id
        self.domain_id = domain_id
        self.teacher_mode = teacher_mode
        self.seed = seed
        self.lock = threading.Lock()
        self.work_dir = work_dir
        self.log_path = work_dir / "session.jsonl"
        self._log_fh = open(self.log_path, "w")

        teacher = make_teacher(
            domain_id,
            config.teacher_config(
                backend="remote" if teacher_mode == "remote" else "scripted"
            ),
        )
        self.oracle = (FeedbackOracle(domain_id, seed=seed)
                       if teacher_mode == "scripted" else None)
        self.session = Session(
            domain_id, teacher, seed=seed, oracle=self.oracle,
            log_fn=self._write_log,
            max_correction_iterations=config.max_correction_iterations,
            heuristic=config.heuristic,
        )
        self.tasks = training_tasks(domain_id)
        self.task_index = -1
        self.status = "awaiting_goal"
        self.last_outcome: Optional[str] = None
        self._next_episode()

    def _write_log(self, event: dict) -> None:
        self._log_fh.write(json.dumps(event, sort_keys=True) + "\n")
        self._log_fh.flush()

    def _next_episode(self) -> None:
        self.task_index += 1
        if self.task_index >= len(self.tasks):
            self.status = "finished"
            return
        self.session.start_episode(self.tasks[self.task_index])
        if self.oracle is not None:
            task = self.tasks[self.task_index]
            self.session.receive_goal(
                self.oracle.specify_goal(task, step=self.session.step)
            )
            self.status = "running"
        else:
            self.status = "awaiting_goal"

    # -- state machine transitions -------------------------------------------

    def set_goal(self, text: str) -> None:
        if self.status != "awaiting_goal":
            raise HTTPException(409, f"session is {self.status}")
        event = FeedbackEvent("goal_spec", text, step=self.session.step)
        try:
            self.session.receive_goal(event)
        except TeacherError as e:
            raise HTTPException(422, f"goal not understood: {e}") from None
        self.status = "running"

    def advance(self) -> dict:
        if self.status == "finished":
            raise HTTPException(409, "session is finished")
        if self.status != "running":
            raise HTTPException(409, f"session is {self.status}")
        proposal = self.session.propose()
        if proposal is None:
            self._finish_episode("exhausted")
            return {"outcome": "episode_exhausted", "status": self.status}
        if self.oracle is not None:
            task = self.tasks[self.task_index]
            if proposal.kind == "declare_success":
                event = self.oracle.verify_success(
                    self.session.world, task.goal, step=self.session.step
                )
            else:
                event = self.oracle.verify_action(
                    self.session.world, proposal.action,
                    step=self.session.step,
                )
            return self._apply(proposal, event)
        self.status = "awaiting_feedback"
        return {"outcome": "awaiting_feedback", "status": self.status,
                "proposal": self._proposal_json()}

    def give_feedback(self, text: str) -> dict:
        if self.status != "awaiting_feedback":
            raise HTTPException(409, f"session is {self.status}")
        proposal = self.session.pending
        approval = _is_approval(text)
        if proposal.kind == "declare_success":
            kind = ("goal_achieved_signal" if approval
                    else "unsatisfied_goal_explanation")
            event = FeedbackEvent(kind, text, step=self.session.step)
        else:
            kind = ("feasible_action_signal" if approval
                    else "infeasible_action_explanation")
            event = FeedbackEvent(kind, text, subject_action=proposal.action,
                                  step=self.session.step)
        self.status = "running"
        try:
            return self._apply(proposal, event)
        except TeacherError as e:
            self.status = "awaiting_feedback"
            self.session.pending = proposal
            raise HTTPException(422, f"feedback not understood: {e}") from None
        except WorldError:
            self.status = "awaiting_feedback"
            self.session.pending = proposal
            raise HTTPException(
                422,
                "that action is not physically executable in the simulator; "
                "please explain why it is infeasible instead of approving it",
            ) from None

    def _apply(self, proposal, event) -> dict:
        outcome = self.session.apply(proposal, event)
        self.last_outcome = outcome.kind
        if outcome.episode_over:
            self._finish_episode(outcome.kind)
        return {"outcome": outcome.kind, "detail": outcome.detail,
                "status": self.status}

    def _finish_episode(self, outcome_kind: str) -> None:
        self.session.episode_results.append({
            "task_id": self.tasks[self.task_index].task_id,
            "outcome": outcome_kind,
            "steps": self.session.episode_steps,
        })
        self.session.log("episode_end",
                         dict(self.session.episode_results[-1]))
        self._next_episode()

    # -- views ----------------------------------------------------------------

    def _proposal_json(self) -> Optional[dict]:
        p = self.session.pending
        if p is None:
            return None
        return {
            "kind": p.kind,
            "action": str(p.action) if p.action else None,
            "args": list(p.action.args) if p.action else [],
        }

    def state(self) -> dict:
        s = self.session
        domain_text = ""
        if s.operators:
            domain_text = compile_domain(
                s.registry, s.operators, name=s.domain_id
            ).serialize()
        symbolic = sorted(str(lit) for lit in s._current_state()) \
            if s.world is not None else []
        return {
            "id": self.id,
            "domain": self.domain_id,
            "teacher": self.teacher_mode,
            "status": self.status,
            "step": s.step,
            "episode": s.episode,
            "episode_steps": s.episode_steps,
            "task": s.task.to_json() if s.task else None,
            "goal_text": s.task.utterance if s.task else None,
            "world": s.world.to_json() if s.world is not None else None,
            "symbolic_state": symbolic,
            "pending_proposal": self._proposal_json(),
            "last_outcome": self.last_outcome,
            "predicates": [
                {
                    "name": p.name,
                    "description": p.description,
                    "source": print_definition(p.to_definition()),
                }
                for p in s.registry.predicates.values()
                if not p.name.startswith("neg_")
            ],
            "operators": domain_text,
            "ledger": s.ledger.to_json(),
            "feedback_count": s.feedback_count,
        }

    def bundle_zip(self) -> bytes:
        out = self.work_dir / "bundle"
        write_bundle(self.session, out, self.tasks[: self.task_index + 1])
        buffer = io.BytesIO()
        with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as zf:
            for path in sorted(out.iterdir()):
                zf.writestr(path.name, path.read_bytes())
        return buffer.getvalue()


class CreateSession(BaseModel):
    domain: str
    teacher: str = "scripted"
    seed: int = 0


class TextBody(BaseModel):
    text: str


def create_app(config: Optional[Config] = None,
               static_dir: Optional[str | Path] = None) -> FastAPI:
    config = config or Config()
    app = FastAPI(title="tabletutor")
    sessions: dict[str, SessionRuntime] = {}
    root = Path(tempfile.mkdtemp(prefix="tabletutor-"))

    def get(session_id: str) -> SessionRuntime:
        runtime = sessions.get(session_id)
        if runtime is None:
            raise HTTPException(404, "unknown session")
        return runtime

    @app.post("/sessions")
    def create(body: CreateSession):
        if body.domain not in ("store_objects", "set_table", "cook_meal"):
            raise HTTPException(422, f"unknown domain {body.domain!r}")
        if body.teacher not in ("scripted", "human", "remote"):
            raise HTTPException(422, f"unknown teacher {body.teacher!r}")
        session_id = secrets.token_hex(8)
        work_dir = root / session_id
        work_dir.mkdir(parents=True)
        sessions[session_id] = SessionRuntime(
            session_id, body.domain, body.teacher, body.seed, config, work_dir
        )
        return {"id": session_id}

    @app.get("/sessions/{session_id}/state")
    def state(session_id: str):
        runtime = get(session_id)
        with runtime.lock:
            return runtime.state()

    @app.post("/sessions/{session_id}/goal")
    def goal(session_id: str, body: TextBody):
        runtime = get(session_id)
        with runtime.lock:
            runtime.set_goal(body.text)
            return {"status": runtime.status}

    @app.post("/sessions/{session_id}/feedback")
    def feedback(session_id: str, body: TextBody):
        runtime = get(session_id)
        with runtime.lock:
            return runtime.give_feedback(body.text)

    @app.post("/sessions/{session_id}/advance")
    def advance(session_id: str):
        runtime = get(session_id)
        with runtime.lock:
            return runtime.advance()

    @app.get("/sessions/{session_id}/log")
    def log(session_id: str):
        runtime = get(session_id)
        with runtime.lock:
            return PlainTextResponse(
                runtime.log_path.read_text(),
                media_type="application/jsonl",
            )

    @app.get("/sessions/{session_id}/bundle")
    def bundle(session_id: str):
        runtime = get(session_id)
        with runtime.lock:
            data = runtime.bundle_zip()
        return Response(
            data, media_type="application/zip",
            headers={"Content-Disposition":
                     f"attachment; filename={session_id}.zip"},
        )

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="ui")
    return app
