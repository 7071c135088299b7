"""Remote teacher backend: a chat-completion endpoint behind the same
interface as the scripted teacher.

Every request/response pair is appended verbatim to a JSONL exchange log so
runs with a live model are auditable. Model output is expected to carry a
single fenced block (```json or ```pscript depending on the call); anything
else is a format error, retried up to the configured limit.
"""
from __future__ import annotations

import json
import os
import re
import time
from pathlib import Path
from typing import Optional

import httpx

from ..dsl import ast
from ..dsl.ast import print_definition
from ..dsl.parser import parse_program, DslSyntaxError
from ..dsl.registry import Literal, PredicateRegistry
from ..worldsim import PerceptionSnapshot
from .types import (
    FeedbackEvent,
    PreconditionLedger,
    ReasonerOutput,
    TeacherBackendConfig,
    TeacherError,
    TranslationError,
    CorrectionFailed,
)

_PROMPT_DIR = Path(__file__).parent / "prompts"
_FENCE = re.compile(r"```(?:json|pscript)?\s*\n(.*?)```", re.DOTALL)
_RETRIES = 3


class RemoteTeacherError(TeacherError):
    pass


def _load_prompt(name: str) -> str:
    return (_PROMPT_DIR / f"{name}.txt").read_text()


def _extract_fenced(text: str) -> str:
    m = _FENCE.search(text)
    if not m:
        raise RemoteTeacherError("response contains no fenced block")
    return m.group(1).strip()


def _parse_triples(items, objects: Optional[list[str]] = None):
    out = []
    for item in items or []:
        name, args, value = item
        if objects is not None:
            for arg in args:
                if arg not in objects:
                    raise RemoteTeacherError(f"unknown object {arg!r}")
        out.append((Literal(name, tuple(args)), bool(value)))
    return out


class RemoteTeacher:
    """Reasoner / Coder / Corrector / GoalTranslator over HTTP."""

    def __init__(self, domain_id: str, config: TeacherBackendConfig,
                 exchange_log: Optional[str | Path] = None):
        if not config.endpoint:
            raise ValueError("remote teacher needs an endpoint")
        self.domain_id = domain_id
        self.config = config
        self.exchange_log = Path(exchange_log) if exchange_log else None
        self._client = httpx.Client(timeout=config.request_timeout)

    def close(self) -> None:
        self._client.close()

    # -- transport ----------------------------------------------------------

    def _chat(self, prompt: str, purpose: str) -> str:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        last_error = None
        for attempt in range(_RETRIES):
            try:
                response = self._client.post(
                    self.config.endpoint, json=payload, headers=headers
                )
                response.raise_for_status()
                body = response.json()
                text = body["choices"][0]["message"]["content"]
                self._log_exchange(purpose, prompt, text)
                return text
            except (httpx.HTTPError, KeyError, ValueError) as e:
                last_error = e
                time.sleep(min(2 ** attempt, 8))
        raise RemoteTeacherError(
            f"{purpose}: endpoint failed after {_RETRIES} attempts: "
            f"{last_error}"
        )

    def _log_exchange(self, purpose: str, prompt: str, response: str) -> None:
        if self.exchange_log is None:
            return
        record = {
            "time": time.time(),
            "purpose": purpose,
            "prompt": prompt,
            "response": response,
        }
        with open(self.exchange_log, "a") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def _chat_json(self, prompt: str, purpose: str) -> dict:
        text = self._chat(prompt, purpose)
        try:
            return json.loads(_extract_fenced(text))
        except json.JSONDecodeError as e:
            raise RemoteTeacherError(f"{purpose}: bad JSON: {e}") from None

    @staticmethod
    def _describe_registry(registry: PredicateRegistry) -> str:
        lines = [
            f"- {p.name}: {p.description}"
            for p in registry.predicates.values()
            if not p.name.startswith("neg_")
        ]
        return "\n".join(lines) or "(none yet)"

    # -- Reasoner -----------------------------------------------------------

    def reason(
        self,
        event: FeedbackEvent,
        registry: PredicateRegistry,
        objects: list[str],
        goal=None,
        ledger: Optional[PreconditionLedger] = None,
    ) -> ReasonerOutput:
        # the two bare signals have fixed semantics; no model call needed
        if event.kind == "goal_achieved_signal":
            return ReasonerOutput(literal_labels=list(goal or []))
        if event.kind == "feasible_action_signal":
            labels = []
            if ledger is not None and event.subject_action is not None:
                labels = ledger.ground(event.subject_action)
            return ReasonerOutput(literal_labels=labels)
        prompt = _load_prompt("reasoner").format(
            known_predicates=self._describe_registry(registry),
            objects=", ".join(objects),
            action=str(event.subject_action) if event.subject_action else "-",
            kind=event.kind,
            text=event.text,
        )
        data = self._chat_json(prompt, f"reason:{event.kind}")
        preconds = None
        if data.get("preconditions") and event.subject_action is not None:
            preconds = (
                event.subject_action.schema,
                _parse_triples(data["preconditions"]),
            )
        goal_literals = None
        if data.get("goal"):
            goal_literals = _parse_triples(data["goal"], objects)
        return ReasonerOutput(
            new_predicate_descriptions=dict(data.get("new_predicates") or {}),
            literal_labels=_parse_triples(data.get("labels"), objects),
            new_action_preconditions=preconds,
            symbolic_goal=goal_literals,
        )

    # -- Coder --------------------------------------------------------------

    def code(self, descriptions: dict[str, str],
             registry: PredicateRegistry) -> dict[str, str]:
        if not descriptions:
            return {}
        requests = "\n".join(
            f"- {name}: {desc}" for name, desc in sorted(descriptions.items())
        )
        utilities = "\n".join(
            f"- {u.name}({', '.join(u.params)})"
            for u in registry.utilities.values()
        ) or "(none)"
        prompt = _load_prompt("coder").format(
            utilities=utilities, requests=requests
        )
        source = _extract_fenced(self._chat(prompt, "code"))
        # split per predicate so the caller can register them independently;
        # shared utilities ride with the first definition that needs them
        definitions = parse_program(source)
        by_name = {}
        pending_utils: list[ast.Definition] = []
        for defn in definitions:
            if defn.kind == "util":
                pending_utils.append(defn)
                continue
            if defn.name not in descriptions:
                raise RemoteTeacherError(
                    f"coder produced unrequested predicate {defn.name!r}"
                )
            block = pending_utils + [defn]
            pending_utils = []
            by_name[defn.name] = print_program_block(block)
        missing = sorted(set(descriptions) - set(by_name))
        if missing:
            raise RemoteTeacherError(f"coder omitted {missing}")
        return by_name

    # -- Corrector ------------------------------------------------------------

    def correct_execution(self, program: str, trace: str) -> str:
        prompt = _load_prompt("corrector_execution").format(
            program=program, trace=trace
        )
        source = _extract_fenced(self._chat(prompt, "correct_execution"))
        parse_program(source)  # fail fast on unparseable output
        return source

    def correct_alignment(
        self,
        registry: PredicateRegistry,
        labels: list[tuple[PerceptionSnapshot, Literal, bool]],
    ) -> dict[str, ast.Node]:
        offenders = sorted(
            {lit.predicate for snap, lit, value in labels
             if registry.evaluate(lit.predicate, snap, lit.args) != value}
        )
        replacements: dict[str, ast.Node] = {}
        for name in offenders:
            program = print_definition(registry.predicates[name].to_definition())
            relevant = [(s, l, v) for s, l, v in labels
                        if l.predicate == name]
            fixed = None
            for _ in range(self.config.max_correction_iterations):
                disagreements = "\n".join(
                    f"- {lit} expected {value}, predicted "
                    f"{registry.evaluate(lit.predicate, snap, lit.args)}"
                    for snap, lit, value in relevant
                )
                prompt = _load_prompt("corrector_alignment").format(
                    program=program, disagreements=disagreements
                )
                source = _extract_fenced(
                    self._chat(prompt, f"correct_alignment:{name}")
                )
                try:
                    definitions = parse_program(source)
                except DslSyntaxError:
                    continue
                body = definitions[-1].body
                trial = registry.copy()
                trial.replace_predicate_body(name, body)
                if all(trial.evaluate(name, snap, lit.args) == value
                       for snap, lit, value in relevant):
                    fixed = body
                    break
                program = source
            if fixed is None:
                raise CorrectionFailed(
                    f"remote teacher could not align {name} within "
                    f"{self.config.max_correction_iterations} rounds"
                )
            replacements[name] = fixed
        return replacements

    # -- Goal translator --------------------------------------------------------

    def translate_goal(
        self, text: str, registry: PredicateRegistry, objects: list[str]
    ) -> list[tuple[Literal, bool]]:
        prompt = _load_prompt("goal_translator").format(
            known_predicates=self._describe_registry(registry),
            objects=", ".join(objects),
            text=text,
        )
        try:
            data = self._chat_json(prompt, "translate_goal")
            goal = _parse_triples(data.get("goal"), objects)
        except RemoteTeacherError as e:
            raise TranslationError(str(e)) from None
        if not goal:
            raise TranslationError("remote teacher returned an empty goal")
        for literal, _ in goal:
            if literal.predicate not in registry.predicates:
                raise TranslationError(
                    f"goal references unlearned predicate {literal.predicate}"
                )
        return goal


def print_program_block(definitions: list[ast.Definition]) -> str:
    return "\n\n".join(print_definition(d) for d in definitions)
