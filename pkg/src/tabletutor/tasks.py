"""Task definitions: initial configurations plus ground-truth goals.

A goal is a conjunction of atoms checked directly against simulator
state. The teacher phrases the same goal in natural language; the robot
only ever sees the utterance.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import worldsim
from .worldsim import WorldState


GOAL_KINDS = ("on", "on_table", "inside", "filled")


@dataclass(frozen=True)
class GoalAtom:
    kind: str
    args: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in GOAL_KINDS:
            raise ValueError(f"unknown goal kind {self.kind!r}")
        want = 1 if self.kind in ("on_table", "filled") else 2
        if len(self.args) != want:
            raise ValueError(f"{self.kind} takes {want} argument(s)")

    def holds(self, world: WorldState) -> bool:
        if self.kind == "on":
            return worldsim.supported_on(
                world, world.obj(self.args[0]), world.obj(self.args[1])
            )
        if self.kind == "on_table":
            return worldsim.on_table(world, world.obj(self.args[0]))
        if self.kind == "inside":
            return world.obj(self.args[0]).inside_of == self.args[1]
        return world.obj(self.args[0]).has_water

    def phrase(self) -> str:
        if self.kind == "on":
            return f"put the {self.args[0]} on the {self.args[1]}"
        if self.kind == "on_table":
            return f"put the {self.args[0]} on the table"
        if self.kind == "inside":
            return f"put the {self.args[0]} in the {self.args[1]}"
        return f"fill the {self.args[0]} with water"


def goal_holds(world: WorldState, goal: tuple[GoalAtom, ...]) -> bool:
    return all(atom.holds(world) for atom in goal)


def goal_utterance(goal: tuple[GoalAtom, ...]) -> str:
    parts = [atom.phrase() for atom in goal]
    text = " and ".join(parts)
    return text[0].upper() + text[1:] + "."


@dataclass(frozen=True)
class Task:
    task_id: str
    domain_id: str
    objects: tuple[str, ...]
    seed: int
    goal: tuple[GoalAtom, ...]
    init_stacks: tuple[tuple[str, str], ...] = ()

    @property
    def utterance(self) -> str:
        return goal_utterance(self.goal)

    def reset(self) -> WorldState:
        return worldsim.reset(
            self.domain_id, list(self.objects), self.seed, self.init_stacks
        )

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "domain_id": self.domain_id,
            "objects": list(self.objects),
            "seed": self.seed,
            "goal": [[a.kind, list(a.args)] for a in self.goal],
            "init_stacks": [list(p) for p in self.init_stacks],
        }

    @staticmethod
    def from_json(data: dict) -> "Task":
        return Task(
            task_id=data["task_id"],
            domain_id=data["domain_id"],
            objects=tuple(data["objects"]),
            seed=data["seed"],
            goal=tuple(GoalAtom(k, tuple(args)) for k, args in data["goal"]),
            init_stacks=tuple(tuple(p) for p in data["init_stacks"]),
        )


def _task(task_id, domain_id, objects, seed, goal, init_stacks=()):
    return Task(
        task_id=task_id,
        domain_id=domain_id,
        objects=tuple(objects),
        seed=seed,
        goal=tuple(GoalAtom(k, tuple(a)) for k, a in goal),
        init_stacks=tuple(init_stacks),
    )


# ---------------------------------------------------------------------------
# Training curricula. Ten tasks per domain, chosen so that random
# exploration plus goal pursuit runs into every feasibility check at
# least once (stacked blocks for occupied-top checks, oversized objects
# for graspability, containers and the faucet for the kitchen).

def training_tasks(domain_id: str) -> list[Task]:
    if domain_id == "store_objects":
        return _store_objects_training()
    if domain_id == "set_table":
        return _set_table_training()
    if domain_id == "cook_meal":
        return _cook_meal_training()
    raise ValueError(f"unknown domain {domain_id!r}")


def _store_objects_training() -> list[Task]:
    d = "store_objects"
    return [
        _task("train-00", d, ["red block", "blue block", "coaster"], 11,
              [("on", ("red block", "blue block"))]),
        _task("train-01", d, ["red block", "blue block", "green block"], 12,
              [("on", ("green block", "blue block"))],
              init_stacks=[("red block", "blue block")]),
        _task("train-02", d, ["red block", "coaster", "shelf"], 13,
              [("on", ("red block", "coaster"))]),
        _task("train-03", d, ["red block", "blue block"], 14,
              [("on_table", ("red block",))],
              init_stacks=[("red block", "blue block")]),
        _task("train-04", d, ["blue block", "green block", "coaster"], 15,
              [("on", ("blue block", "coaster")),
               ("on", ("green block", "blue block"))]),
        _task("train-05", d, ["red block", "yellow block", "shelf"], 16,
              [("on", ("yellow block", "shelf"))]),
        _task("train-06", d, ["red block", "blue block", "green block"], 17,
              [("on", ("red block", "blue block")),
               ("on_table", ("green block",))],
              init_stacks=[("green block", "red block")]),
        _task("train-07", d, ["purple block", "coaster"], 18,
              [("on", ("purple block", "coaster"))]),
        _task("train-08", d, ["red block", "blue block", "yellow block", "shelf"], 19,
              [("on", ("red block", "shelf")),
               ("on", ("blue block", "yellow block"))]),
        _task("train-09", d, ["green block", "blue block", "coaster"], 20,
              [("on", ("green block", "coaster"))],
              init_stacks=[("blue block", "green block")]),
    ]


def _set_table_training() -> list[Task]:
    d = "set_table"
    return [
        _task("train-00", d, ["table mat", "plate", "fork"], 31,
              [("on", ("plate", "table mat"))]),
        _task("train-01", d, ["table mat", "plate", "cup"], 32,
              [("on", ("cup", "plate")),
               ("on", ("plate", "table mat"))]),
        _task("train-02", d, ["table mat", "white plate", "bread"], 33,
              [("on", ("white plate", "table mat")),
               ("on", ("bread", "white plate"))]),
        _task("train-03", d, ["plate", "fork", "knife"], 34,
              [("on", ("fork", "plate"))]),
        _task("train-04", d, ["table mat", "plate", "fork", "knife"], 35,
              [("on", ("plate", "table mat")),
               ("on", ("fork", "plate"))]),
        _task("train-05", d, ["table mat", "cup", "bread"], 36,
              [("on", ("cup", "table mat"))]),
        _task("train-06", d, ["plate", "white plate", "knife"], 37,
              [("on", ("knife", "plate"))],
              init_stacks=[("knife", "white plate")]),
        _task("train-07", d, ["table mat", "plate", "bread"], 38,
              [("on", ("bread", "plate")),
               ("on", ("plate", "table mat"))]),
        _task("train-08", d, ["table mat", "white plate", "cup", "fork"], 39,
              [("on", ("white plate", "table mat")),
               ("on", ("fork", "white plate"))]),
        _task("train-09", d, ["table mat", "plate", "knife", "bread"], 40,
              [("on", ("plate", "table mat")),
               ("on", ("knife", "plate"))],
              init_stacks=[("bread", "plate")]),
    ]


def _cook_meal_training() -> list[Task]:
    d = "cook_meal"
    return [
        _task("train-00", d, ["pot", "faucet", "sausage"], 51,
              [("inside", ("sausage", "pot"))]),
        _task("train-01", d, ["pot", "faucet", "cup"], 52,
              [("filled", ("pot",))]),
        _task("train-02", d, ["pot", "faucet", "cup", "egg"], 53,
              [("inside", ("egg", "pot")),
               ("filled", ("pot",))]),
        _task("train-03", d, ["faucet", "cup", "blue cup"], 54,
              [("filled", ("cup",)),
               ("on_table", ("cup",))]),
        _task("train-04", d, ["pot", "faucet", "carrot", "potato"], 55,
              [("inside", ("carrot", "pot")),
               ("inside", ("potato", "pot"))]),
        _task("train-05", d, ["pot", "faucet", "cup", "sausage"], 56,
              [("filled", ("cup",))]),
        _task("train-06", d, ["pot", "faucet", "green cup", "egg"], 57,
              [("inside", ("egg", "pot")),
               ("filled", ("green cup",))]),
        _task("train-07", d, ["faucet", "cup", "sausage"], 58,
              [("filled", ("cup",))]),
        _task("train-08", d, ["pot", "faucet", "cup", "carrot", "egg"], 59,
              [("inside", ("carrot", "pot")),
               ("inside", ("egg", "pot")),
               ("filled", ("pot",))]),
        _task("train-09", d, ["pot", "faucet", "blue cup", "potato"], 60,
              [("inside", ("potato", "pot")),
               ("filled", ("blue cup",)),
               ("on_table", ("blue cup",))]),
    ]


# ---------------------------------------------------------------------------
# Test suite generation. Four suites per domain: the canonical setting,
# scenes with extra objects (including a category never seen in
# training), goal shapes not used during training, and both at once.

_UNSEEN = {
    "store_objects": ["tin can", "fruit can"],
    "set_table": ["spoon"],
    "cook_meal": ["basket"],
}

_CANONICAL_POOL = {
    "store_objects": ["red block", "blue block", "green block",
                      "yellow block", "purple block", "coaster", "shelf"],
    "set_table": ["table mat", "plate", "white plate", "cup",
                  "fork", "knife", "bread"],
    "cook_meal": ["pot", "faucet", "cup", "blue cup", "green cup",
                  "sausage", "egg", "carrot", "potato"],
}

SUITES = ("canonical", "more_objects", "novel_goals", "combined")


def generate_suite(domain_id: str, suite: str, seed: int, count: int = 10) -> list[Task]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    rng = random.Random(f"suite:{domain_id}:{suite}:{seed}")
    tasks = []
    for i in range(count):
        more = suite in ("more_objects", "combined")
        novel = suite in ("novel_goals", "combined")
        tasks.append(_random_task(domain_id, f"{suite}-{i:02d}", rng,
                                  more_objects=more, novel_goals=novel))
    return tasks


def _random_task(domain_id, task_id, rng, more_objects, novel_goals) -> Task:
    if domain_id == "store_objects":
        return _random_store(task_id, rng, more_objects, novel_goals)
    if domain_id == "set_table":
        return _random_set_table(task_id, rng, more_objects, novel_goals)
    return _random_cook(task_id, rng, more_objects, novel_goals)


def _random_store(task_id, rng, more_objects, novel_goals) -> Task:
    blocks = ["red block", "blue block", "green block",
              "yellow block", "purple block"]
    supports = ["coaster", "shelf"]
    if novel_goals:
        n_blocks = 3 if not more_objects else rng.choice([3, 4, 5])
    else:
        n_blocks = rng.choice([2, 3]) if not more_objects else rng.choice([3, 4, 5])
    objs = rng.sample(blocks, n_blocks) + [rng.choice(supports)]
    if more_objects:
        objs += rng.sample(_UNSEEN["store_objects"], rng.choice([1, 2]))
    rng.shuffle(objs)
    movable = [o for o in objs if o not in supports]
    support = next(o for o in objs if o in supports)
    if novel_goals:
        # chains of at least three placements composed from simple goals
        a, b, c = rng.sample(movable, 3)
        if rng.random() < 0.6:
            goal = [("on", (a, b)), ("on", (b, c)), ("on", (c, support))]
        else:
            goal = [("on", (a, support)), ("on", (b, a)), ("on", (c, b))]
        stacks = [(movable[0], movable[1])] if rng.random() < 0.5 else []
    else:
        if rng.random() < 0.5:
            a, b = rng.sample(movable, 2)
            goal = [("on", (a, b))]
        else:
            a = rng.choice(movable)
            goal = [("on", (a, support))]
        stacks = []
        if rng.random() < 0.4 and len(movable) >= 2:
            top = rng.choice([m for m in movable if m != goal[0][1][0]] or movable)
            rest = [m for m in movable if m != top]
            if rest:
                stacks = [(top, rng.choice(rest))]
    return _task(task_id, "store_objects", objs, rng.randrange(10_000),
                 goal, stacks)


def _random_set_table(task_id, rng, more_objects, novel_goals) -> Task:
    objs = ["table mat", rng.choice(["plate", "white plate"])]
    cutlery = ["fork", "knife"]
    extras = ["cup", "bread"]
    objs.append(rng.choice(cutlery))
    if more_objects:
        objs += rng.sample(extras, rng.choice([1, 2]))
        objs.append("spoon")
    elif novel_goals:
        # the chain goals below need a fourth stackable object
        objs.append("cup")
    elif rng.random() < 0.5:
        objs.append(rng.choice(extras))
    plate = objs[1]
    tools = [o for o in objs if o in cutlery + ["spoon"]]
    # each support carries at most one object, so goals are chains
    if novel_goals:
        top = "bread" if "bread" in objs and rng.random() >= 0.6 \
            else rng.choice(tools)
        goal = [("on", (plate, "table mat")), ("on", (top, plate))]
        spare = [t for t in tools if t != top]
        others = spare + [o for o in ("cup", "bread") if o in objs and o != top]
        # always compose at least three literals
        third = rng.choice(others)
        goal.append(("on", (third, top)))
        placed = {plate, top, third}
        free = [t for t in spare if t not in placed]
        if "cup" in objs and "cup" not in placed and free \
                and rng.random() < 0.5:
            goal.append(("on", (rng.choice(free), "cup")))
    else:
        goal = [("on", (plate, "table mat")), ("on", (tools[0], plate))]
    return Task(
        task_id=task_id,
        domain_id="set_table",
        objects=tuple(objs),
        seed=rng.randrange(10_000),
        goal=tuple(GoalAtom(k, tuple(a)) for k, a in goal),
    )


def _random_cook(task_id, rng, more_objects, novel_goals) -> Task:
    foods = ["sausage", "egg", "carrot", "potato"]
    cups = ["cup", "blue cup", "green cup"]
    objs = ["pot", "faucet", rng.choice(cups)]
    n_food = rng.choice([1, 2]) if not more_objects else rng.choice([2, 3])
    objs += rng.sample(foods, n_food)
    if more_objects:
        objs.append("basket")
        if rng.random() < 0.5:
            objs.append(rng.choice([c for c in cups if c not in objs]))
    food_in = [o for o in objs if o in foods]
    cup = next(o for o in objs if o in cups)
    if novel_goals:
        goal = [("inside", (f, "pot")) for f in food_in]
        goal.append(("filled", ("pot",)))
        if rng.random() < 0.5 or len(goal) < 3:
            goal.append(("filled", (cup,)))
            goal.append(("on_table", (cup,)))
        if more_objects and "basket" in objs and rng.random() < 0.4:
            goal = [("inside", (food_in[0], "basket"))] + goal[1:]
    else:
        if rng.random() < 0.5:
            goal = [("inside", (food_in[0], "pot")), ("filled", ("pot",))]
        else:
            goal = [("filled", (cup,))]
    return Task(
        task_id=task_id,
        domain_id="cook_meal",
        objects=tuple(objs),
        seed=rng.randrange(10_000),
        goal=tuple(GoalAtom(k, tuple(a)) for k, a in goal),
    )
