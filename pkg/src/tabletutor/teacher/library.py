"""Reference predicate implementations for the scripted Coder.

Entries are keyed by canonical description, which doubles as the role
key everywhere else (templates, goal translation, bootstrap matching).
Variant bodies exist for the alignment-correction search; drafts are the
deliberately wrong first attempts used to exercise the correction loop.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class UtilityDef:
    name: str
    params: tuple[str, ...]
    body: str
    description: str


UTILITIES: dict[str, UtilityDef] = {
    u.name: u
    for u in [
        UtilityDef("obj_bottom", ("a",),
                   "get_object_center(a)[1] - get_object_size(a)[1] / 2",
                   "y coordinate of the bottom edge of object a"),
        UtilityDef("obj_top", ("a",),
                   "get_object_center(a)[1] + get_object_size(a)[1] / 2",
                   "y coordinate of the top edge of object a"),
        UtilityDef("obj_left", ("a",),
                   "get_object_center(a)[0] - get_object_size(a)[0] / 2",
                   "x coordinate of the left edge of object a"),
        UtilityDef("obj_right", ("a",),
                   "get_object_center(a)[0] + get_object_size(a)[0] / 2",
                   "x coordinate of the right edge of object a"),
        UtilityDef("x_overlap", ("a", "b"),
                   "min(obj_right(a), obj_right(b)) - "
                   "max(obj_left(a), obj_left(b))",
                   "horizontal overlap length between objects a and b"),
    ]
}


@dataclass(frozen=True)
class LibraryEntry:
    name: str
    params: tuple[str, ...]
    description: str
    body: str
    requires: tuple[str, ...] = ()
    # alternative bodies tried in order during alignment correction;
    # always includes the canonical body at its calibrated spot
    variants: tuple[str, ...] = ()
    draft: Optional[str] = None


def _on_body(tol: float) -> str:
    return (
        f"approx(obj_bottom(a) - obj_top(b), 0, {tol}) and "
        "x_overlap(a, b) >= get_object_size(a)[0] * 0.5"
    )


def _on_table_body(tol: float) -> str:
    return f"approx(obj_bottom(a), table_height(), {tol})"


def _clear_body(tol: float) -> str:
    return (
        "all v in objects(): not "
        f"(approx(obj_bottom(v) - obj_top(a), 0, {tol}) and "
        "x_overlap(v, a) >= get_object_size(v)[0] * 0.5)"
    )


_CONTAINER_BODY = (
    'get_object_category(a) == "cup" or get_object_category(a) == "pot" '
    'or get_object_category(a) == "basket"'
)

_ENTRIES = [
    LibraryEntry(
        name="gripper_empty", params=(),
        description="the gripper is not holding anything",
        body='gripper_holding() == ""',
    ),
    LibraryEntry(
        name="obj_in_gripper", params=("a",),
        description="the gripper is holding object a",
        body="gripper_holding() == a",
    ),
    LibraryEntry(
        name="obj_on_obj", params=("a", "b"),
        description="object a is resting on top of object b",
        body=_on_body(0.1),
        requires=("obj_bottom", "obj_top", "obj_left", "obj_right",
                  "x_overlap"),
        variants=(_on_body(0.01), _on_body(0.05), _on_body(0.1),
                  _on_body(0.5)),
        draft=(
            "obj_left(a) >= obj_left(b) and obj_right(a) <= obj_right(b) "
            "and approx(obj_bottom(a) - obj_top(b), 0, 0.01)"
        ),
    ),
    LibraryEntry(
        name="obj_on_table", params=("a",),
        description="object a is resting directly on the table",
        body=_on_table_body(0.1),
        requires=("obj_bottom",),
        variants=(_on_table_body(0.01), _on_table_body(0.05),
                  _on_table_body(0.1), _on_table_body(0.5)),
    ),
    LibraryEntry(
        name="obj_clear", params=("a",),
        description="nothing is on top of object a",
        body=_clear_body(0.1),
        requires=("obj_bottom", "obj_top", "obj_left", "obj_right",
                  "x_overlap"),
        variants=(_clear_body(0.01), _clear_body(0.05), _clear_body(0.1),
                  _clear_body(0.5)),
    ),
    LibraryEntry(
        name="obj_graspable", params=("a",),
        description="object a is small enough to be grasped",
        body="get_object_size(a)[0] < 3",
        variants=("get_object_size(a)[0] < 3",
                  "get_object_size(a)[0] < 2.5",
                  "get_object_size(a)[0] < 6"),
        draft="get_object_size(a)[2] < 3",
    ),
    LibraryEntry(
        name="obj_is_plate", params=("a",),
        description="object a is a plate",
        body='get_object_category(a) == "plate"',
    ),
    LibraryEntry(
        name="obj_thin_enough", params=("a",),
        description="object a is low enough to push things onto",
        body="get_object_size(a)[1] <= 1",
        variants=("get_object_size(a)[1] <= 0.5",
                  "get_object_size(a)[1] <= 1",
                  "get_object_size(a)[1] <= 2"),
    ),
    LibraryEntry(
        name="obj_is_container", params=("a",),
        description="object a is a container",
        body=_CONTAINER_BODY,
    ),
    LibraryEntry(
        name="obj_is_food", params=("a",),
        description="object a is a food item",
        body='get_object_category(a) == "food"',
    ),
    LibraryEntry(
        name="obj_large_enough", params=("a",),
        description="object a is wide enough to hold food",
        body="get_object_size(a)[0] >= 10",
        variants=("get_object_size(a)[0] >= 10",
                  "get_object_size(a)[0] >= 5",
                  "get_object_size(a)[0] >= 12"),
    ),
    LibraryEntry(
        name="obj_filled_with_water", params=("a",),
        description="object a contains water",
        body="has_water(a)",
    ),
    LibraryEntry(
        name="obj_in_container", params=("a",),
        description="object a is inside some container",
        body='inside_container(a) != ""',
    ),
    LibraryEntry(
        name="obj_inside_obj", params=("a", "b"),
        description="object a is inside object b",
        body="inside_container(a) == b",
    ),
]

BY_NAME: dict[str, LibraryEntry] = {e.name: e for e in _ENTRIES}
BY_DESCRIPTION: dict[str, LibraryEntry] = {e.description: e for e in _ENTRIES}


def description_of(name: str) -> str:
    return BY_NAME[name].description


def program_source(entry: LibraryEntry, body: Optional[str] = None,
                   known_utilities: frozenset = frozenset()) -> str:
    """Render a standalone program: needed utilities, then the predicate."""
    parts = []
    for util_name in entry.requires:
        if util_name in known_utilities:
            continue
        u = UTILITIES[util_name]
        parts.append(
            f"# desc: {u.description}\n"
            f"util {u.name}({', '.join(u.params)}) {{ {u.body} }}"
        )
    parts.append(
        f"# desc: {entry.description}\n"
        f"pred {entry.name}({', '.join(entry.params)}) "
        f"{{ {body if body is not None else entry.body} }}"
    )
    return "\n\n".join(parts) + "\n"
