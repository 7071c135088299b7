"""Deterministic 2D tabletop kitchen simulator.

Geometry is 2D: x is lateral position on the table, y is vertical.
Objects rest on the table line (y = 0), stack on each other, or sit
inside containers. Water and containment are boolean facts, not fluids.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from importlib import resources
from typing import Optional

_POOLS = json.loads(
    resources.files("tabletutor.data").joinpath("object_pools.json").read_text()
)

CONSTANTS = _POOLS["constants"]
GRIPPER_APERTURE: float = CONSTANTS["gripper_aperture"]
HOLD_HEIGHT: float = CONSTANTS["hold_height"]
SUPPORT_TOL: float = CONSTANTS["support_tol"]
OVERLAP_FRAC: float = CONSTANTS["overlap_frac"]
THIN_HEIGHT_MAX: float = CONSTANTS["thin_height_max"]
FOOD_CONTAINER_MIN_WIDTH: float = CONSTANTS["food_container_min_width"]
TABLE_HEIGHT: float = CONSTANTS["table_height"]

DOMAIN_IDS = ("store_objects", "set_table", "cook_meal")

ACTION_ARITY = {
    "pick_up": 1,
    "place_on_table": 1,
    "place_first_on_second": 2,
    "push_plate_on_object": 2,
    "place_first_in_second": 2,
    "get_water_from_faucet": 1,
    "pour_water_from_first_to_second": 2,
}

DOMAIN_ACTIONS = {
    "store_objects": ("pick_up", "place_on_table", "place_first_on_second"),
    "set_table": (
        "pick_up",
        "place_on_table",
        "place_first_on_second",
        "push_plate_on_object",
    ),
    "cook_meal": (
        "pick_up",
        "place_on_table",
        "place_first_in_second",
        "get_water_from_faucet",
        "pour_water_from_first_to_second",
    ),
}


class WorldError(Exception):
    """Bad domain/object names or a contract violation in execute()."""


class ObjectNotFound(WorldError):
    def __init__(self, name: str):
        super().__init__(f"object not found: {name!r}")
        self.name = name


@dataclass(frozen=True)
class SimObject:
    name: str
    category: str
    center: tuple[float, float]
    size: tuple[float, float]
    movable: bool = True
    is_container: bool = False
    has_water: bool = False
    inside_of: Optional[str] = None

    @property
    def width(self) -> float:
        return self.size[0]

    @property
    def height(self) -> float:
        return self.size[1]

    @property
    def bottom(self) -> float:
        return self.center[1] - self.size[1] / 2

    @property
    def top(self) -> float:
        return self.center[1] + self.size[1] / 2

    @property
    def left(self) -> float:
        return self.center[0] - self.size[0] / 2

    @property
    def right(self) -> float:
        return self.center[0] + self.size[0] / 2

    @property
    def graspable(self) -> bool:
        return self.size[0] < GRIPPER_APERTURE


@dataclass(frozen=True)
class GroundedAction:
    schema: str
    args: tuple[str, ...]

    def __post_init__(self):
        if self.schema not in ACTION_ARITY:
            raise WorldError(f"unknown action schema: {self.schema}")
        if len(self.args) != ACTION_ARITY[self.schema]:
            raise WorldError(
                f"{self.schema} takes {ACTION_ARITY[self.schema]} args, "
                f"got {len(self.args)}"
            )

    def __str__(self) -> str:
        return f"{self.schema}({', '.join(self.args)})"

    @staticmethod
    def parse(text: str) -> "GroundedAction":
        text = text.strip()
        if not text.endswith(")") or "(" not in text:
            raise WorldError(f"malformed action: {text!r}")
        schema, rest = text.split("(", 1)
        inner = rest[:-1].strip()
        args = tuple(a.strip() for a in inner.split(",")) if inner else ()
        return GroundedAction(schema.strip(), args)


@dataclass(frozen=True)
class WorldState:
    domain_id: str
    objects: tuple[SimObject, ...]
    gripper_holding: Optional[str] = None
    table_height: float = TABLE_HEIGHT

    def obj(self, name: str) -> SimObject:
        for o in self.objects:
            if o.name == name:
                return o
        raise ObjectNotFound(name)

    def has(self, name: str) -> bool:
        return any(o.name == name for o in self.objects)

    def with_obj(self, new: SimObject) -> "WorldState":
        objs = tuple(new if o.name == new.name else o for o in self.objects)
        return replace(self, objects=objs)

    def to_json(self) -> dict:
        return {
            "domain_id": self.domain_id,
            "table_height": self.table_height,
            "gripper_holding": self.gripper_holding,
            "objects": [
                {
                    "name": o.name,
                    "category": o.category,
                    "center": list(o.center),
                    "size": list(o.size),
                    "movable": o.movable,
                    "is_container": o.is_container,
                    "has_water": o.has_water,
                    "inside_of": o.inside_of,
                }
                for o in self.objects
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "WorldState":
        return WorldState(
            domain_id=data["domain_id"],
            table_height=data["table_height"],
            gripper_holding=data["gripper_holding"],
            objects=tuple(
                SimObject(
                    name=d["name"],
                    category=d["category"],
                    center=tuple(d["center"]),
                    size=tuple(d["size"]),
                    movable=d["movable"],
                    is_container=d["is_container"],
                    has_water=d["has_water"],
                    inside_of=d["inside_of"],
                )
                for d in data["objects"]
            ),
        )


# ---------------------------------------------------------------------------
# Ground-truth geometric relations


def x_overlap(a: SimObject, b: SimObject) -> float:
    return max(0.0, min(a.right, b.right) - max(a.left, b.left))


def supported_on(world: WorldState, a: SimObject, b: SimObject) -> bool:
    """True if a physically rests on top of b."""
    if a.name == b.name:
        return False
    if world.gripper_holding in (a.name, b.name):
        return False
    if a.inside_of is not None or b.inside_of is not None:
        return False
    return (
        abs(a.bottom - b.top) <= SUPPORT_TOL
        and x_overlap(a, b) >= OVERLAP_FRAC * a.width
    )


def something_on(world: WorldState, b: SimObject) -> bool:
    return any(supported_on(world, o, b) for o in world.objects)


def on_table(world: WorldState, a: SimObject) -> bool:
    if world.gripper_holding == a.name or a.inside_of is not None:
        return False
    return abs(a.bottom - world.table_height) <= SUPPORT_TOL


# ---------------------------------------------------------------------------
# Reset

# x positions reserved for fixed furniture, clear of the movable-object band.
_FIXED_X = {"pot": 30.0, "faucet": 40.0, "table mat": 32.0}


def pool_for(domain_id: str) -> dict:
    if domain_id not in _POOLS["domains"]:
        raise WorldError(f"unknown domain: {domain_id}")
    return _POOLS["domains"][domain_id]


def domain_object_names(domain_id: str) -> list[str]:
    return sorted(pool_for(domain_id)["objects"].keys())


def _make_object(domain_id: str, name: str, center: tuple[float, float]) -> SimObject:
    pool = pool_for(domain_id)
    if name not in pool["objects"]:
        raise WorldError(f"object {name!r} not in {domain_id} pool")
    category = pool["objects"][name]
    spec = pool["categories"][category]
    return SimObject(
        name=name,
        category=category,
        center=center,
        size=tuple(spec["size"]),
        movable=not spec.get("fixed", False),
        is_container=spec.get("container", False),
    )


def reset(
    domain_id: str,
    object_names: list[str],
    seed: int,
    init_stacks: tuple[tuple[str, str], ...] = (),
) -> WorldState:
    """Deterministic initial world: objects in a row on the table, gripper empty.

    init_stacks is a tuple of (top, bottom) pairs applied after base placement.
    """
    rng = random.Random(f"reset:{domain_id}:{','.join(object_names)}:{seed}")
    names = list(dict.fromkeys(object_names))
    if len(names) != len(object_names):
        raise WorldError("duplicate object names in task spec")

    fixed = [n for n in names if n in _FIXED_X]
    movable = [n for n in names if n not in _FIXED_X]
    rng.shuffle(movable)

    objects = []
    x = 1.0
    for name in movable:
        obj = _make_object(domain_id, name, (0.0, 0.0))
        x += obj.width / 2
        cy = TABLE_HEIGHT + obj.height / 2
        objects.append(replace(obj, center=(x, cy)))
        x += obj.width / 2 + 0.6 + rng.random() * 1.2
    for name in fixed:
        obj = _make_object(domain_id, name, (0.0, 0.0))
        cy = TABLE_HEIGHT + obj.height / 2
        objects.append(replace(obj, center=(_FIXED_X[name], cy)))

    world = WorldState(domain_id=domain_id, objects=tuple(objects))
    for top_name, bottom_name in init_stacks:
        base = world.obj(bottom_name)
        top = world.obj(top_name)
        world = world.with_obj(
            replace(top, center=(base.center[0], base.top + top.height / 2))
        )
    return world


# ---------------------------------------------------------------------------
# Feasibility: ordered ground-truth precondition checks per (domain, schema)


@dataclass(frozen=True)
class Feasibility:
    ok: bool
    check_id: Optional[int] = None


def _held(world: WorldState, name: str) -> bool:
    return world.gripper_holding == name


def _is_container(o: SimObject) -> bool:
    return o.is_container


def _checks_pick_up(world: WorldState, a: SimObject, domain_id: str):
    yield 1, world.gripper_holding is not None
    if domain_id == "cook_meal":
        yield 2, a.inside_of is not None
    else:
        yield 2, something_on(world, a)
    yield 3, not a.graspable


def check_feasible(world: WorldState, action: GroundedAction) -> Feasibility:
    """First violated ground-truth check in the domain's fixed order, or ok."""
    domain = world.domain_id
    if action.schema not in DOMAIN_ACTIONS[domain]:
        raise WorldError(f"action {action.schema} not in domain {domain}")
    if len(set(action.args)) != len(action.args):
        raise WorldError(f"repeated arguments: {action}")
    objs = [world.obj(n) for n in action.args]

    checks: list[tuple[int, bool]] = []
    s = action.schema
    if s == "pick_up":
        checks = list(_checks_pick_up(world, objs[0], domain))
    elif s == "place_on_table":
        checks = [(4, not _held(world, objs[0].name))]
    elif s == "place_first_on_second":
        a, b = objs
        checks = [
            (5, not _held(world, a.name)),
            (6, something_on(world, b)),
        ]
    elif s == "push_plate_on_object":
        a, b = objs
        checks = [
            (7, a.category != "plate"),
            (8, world.gripper_holding is not None),
            (9, something_on(world, a)),
            (10, something_on(world, b)),
            (11, b.height > THIN_HEIGHT_MAX),
        ]
    elif s == "place_first_in_second":
        a, b = objs
        checks = [
            (5, not _held(world, a.name)),
            (6, not _is_container(b)),
            (7, a.category != "food"),
            (8, b.width < FOOD_CONTAINER_MIN_WIDTH),
        ]
    elif s == "get_water_from_faucet":
        a = objs[0]
        checks = [
            (9, not _held(world, a.name)),
            (10, not _is_container(a)),
            (11, a.has_water),
        ]
    elif s == "pour_water_from_first_to_second":
        a, b = objs
        checks = [
            (12, not _held(world, a.name)),
            (13, not a.has_water),
            (14, not _is_container(b)),
        ]
    for check_id, violated in checks:
        if violated:
            return Feasibility(ok=False, check_id=check_id)
    return Feasibility(ok=True)


# ---------------------------------------------------------------------------
# Execution


def _find_free_x(world: WorldState, width: float, skip: str) -> float:
    """Leftmost table slot whose x-extent clears every other placed object."""
    margin = 0.4
    x = 1.0 + width / 2
    while x < 100.0:
        lo, hi = x - width / 2 - margin, x + width / 2 + margin
        blocked = False
        for o in world.objects:
            if o.name == skip or o.name == world.gripper_holding:
                continue
            if o.inside_of is not None:
                continue
            if not (hi <= o.left or lo >= o.right):
                blocked = True
                break
        if not blocked:
            return x
        x += 0.5
    raise WorldError("no free table space")


def execute(world: WorldState, action: GroundedAction) -> WorldState:
    """Apply a feasible action. Calling on an infeasible action is an error."""
    feas = check_feasible(world, action)
    if not feas.ok:
        raise WorldError(
            f"execute() called on infeasible action {action} "
            f"(violated check {feas.check_id})"
        )
    s = action.schema
    if s == "pick_up":
        a = world.obj(action.args[0])
        world = world.with_obj(
            replace(a, center=(a.center[0], HOLD_HEIGHT), inside_of=None)
        )
        return replace(world, gripper_holding=a.name)
    if s == "place_on_table":
        a = world.obj(action.args[0])
        x = _find_free_x(world, a.width, skip=a.name)
        world = world.with_obj(
            replace(a, center=(x, world.table_height + a.height / 2))
        )
        return replace(world, gripper_holding=None)
    if s == "place_first_on_second":
        a, b = (world.obj(n) for n in action.args)
        world = world.with_obj(
            replace(a, center=(b.center[0], b.top + a.height / 2))
        )
        return replace(world, gripper_holding=None)
    if s == "push_plate_on_object":
        a, b = (world.obj(n) for n in action.args)
        return world.with_obj(
            replace(a, center=(b.center[0], b.top + a.height / 2))
        )
    if s == "place_first_in_second":
        a, b = (world.obj(n) for n in action.args)
        world = world.with_obj(
            replace(a, center=b.center, inside_of=b.name)
        )
        return replace(world, gripper_holding=None)
    if s == "get_water_from_faucet":
        a = world.obj(action.args[0])
        return world.with_obj(replace(a, has_water=True))
    if s == "pour_water_from_first_to_second":
        a, b = (world.obj(n) for n in action.args)
        world = world.with_obj(replace(a, has_water=False))
        return world.with_obj(replace(world.obj(b.name), has_water=True))
    raise WorldError(f"unhandled schema {s}")


def grounded_actions(world: WorldState) -> list[GroundedAction]:
    """All well-formed grounded actions in this world (distinct args)."""
    names = sorted(o.name for o in world.objects)
    out = []
    for schema in DOMAIN_ACTIONS[world.domain_id]:
        if ACTION_ARITY[schema] == 1:
            out.extend(GroundedAction(schema, (n,)) for n in names)
        else:
            out.extend(
                GroundedAction(schema, (n, m))
                for n in names
                for m in names
                if n != m
            )
    return out


# ---------------------------------------------------------------------------
# Perception


class PerceptionSnapshot:
    """Read-only view of a world, consumed by predicate programs."""

    def __init__(self, world: WorldState):
        self._objects = {o.name: o for o in world.objects}
        self._gripper = world.gripper_holding or ""
        self._table_height = world.table_height
        self._key = _snapshot_key(world)

    def _lookup(self, name: str) -> SimObject:
        if name not in self._objects:
            raise ObjectNotFound(name)
        return self._objects[name]

    def object_names(self) -> list[str]:
        return sorted(self._objects.keys())

    def get_object_center(self, name: str) -> tuple[float, float]:
        return self._lookup(name).center

    def get_object_size(self, name: str) -> tuple[float, float]:
        return self._lookup(name).size

    def get_object_category(self, name: str) -> str:
        return self._lookup(name).category

    def gripper_holding(self) -> str:
        return self._gripper

    def table_height(self) -> float:
        return self._table_height

    def has_water(self, name: str) -> bool:
        return self._lookup(name).has_water

    def inside_container(self, name: str) -> str:
        return self._lookup(name).inside_of or ""

    def __eq__(self, other) -> bool:
        return isinstance(other, PerceptionSnapshot) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)


def _snapshot_key(world: WorldState):
    return (
        world.domain_id,
        world.table_height,
        world.gripper_holding,
        tuple(
            (o.name, o.category, o.center, o.size, o.has_water, o.inside_of)
            for o in sorted(world.objects, key=lambda o: o.name)
        ),
    )


def perceive(world: WorldState) -> PerceptionSnapshot:
    return PerceptionSnapshot(world)
