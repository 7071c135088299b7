import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tabletutor.dsl.ast import print_program
from tabletutor.dsl.checker import DslTypeError
from tabletutor.dsl.interp import ExecError
from tabletutor.dsl.parser import DslSyntaxError, parse_program
from tabletutor.dsl.registry import (
    Literal,
    PredicateRegistry,
    extensionally_equal,
    negation_name,
    parse_state,
)
from tabletutor.teacher import library
from tabletutor.worldsim import execute, perceive, reset, GroundedAction

from conftest import DOMAINS, random_world


def corpus() -> list[str]:
    """Programs covering every library predicate plus every variant body."""
    sources = []
    utilities = frozenset()
    for entry in library.BY_NAME.values():
        sources.append(library.program_source(entry, known_utilities=frozenset()))
        for variant in entry.variants:
            sources.append(library.program_source(
                entry, body=variant, known_utilities=frozenset()))
    return sources


_FULL_REGISTRY = None


def full_registry() -> PredicateRegistry:
    global _FULL_REGISTRY
    if _FULL_REGISTRY is None:
        registry = PredicateRegistry()
        for entry in library.BY_NAME.values():
            for defn in parse_program(library.program_source(
                    entry, known_utilities=frozenset(registry.utilities))):
                if defn.kind == "util":
                    if defn.name not in registry.utilities:
                        registry.register_utility(defn)
                else:
                    registry.register_predicate(defn)
        _FULL_REGISTRY = registry
    return _FULL_REGISTRY.copy()


class TestParser:
    def test_roundtrip_corpus(self):
        sources = corpus()
        assert len(sources) >= 30
        for source in sources:
            defs = parse_program(source)
            printed = print_program(defs)
            again = print_program(parse_program(printed))
            assert printed == again

    def test_minimal_program(self):
        defs = parse_program('pred gripper_empty() { gripper_holding() == "" }')
        assert defs[0].name == "gripper_empty"
        assert defs[0].params == ()

    def test_syntax_error_has_location(self):
        with pytest.raises(DslSyntaxError):
            parse_program("pred broken(a) { approx(1, }")

    def test_type_error_on_param_arithmetic(self):
        with pytest.raises(DslTypeError):
            registry = PredicateRegistry()
            registry.register_predicate(
                parse_program("pred bad(a) { a + 1 }")[0]
            )

    def test_descriptions_survive_roundtrip(self):
        source = ('# desc: whether the gripper is free\n'
                  'pred gripper_empty() { gripper_holding() == "" }')
        defs = parse_program(source)
        assert defs[0].description == "whether the gripper is free"
        assert "# desc: whether the gripper is free" in print_program(defs)


class TestEvaluate:
    def test_on_table_after_reset(self):
        registry = full_registry()
        snap = perceive(reset("store_objects", ["red block"], seed=0))
        assert registry.evaluate("obj_on_table", snap, ("red block",))

    def test_on_obj_after_stacking(self):
        registry = full_registry()
        world = reset("store_objects", ["red block", "coaster"], seed=0)
        world = execute(world, GroundedAction("pick_up", ("red block",)))
        world = execute(world, GroundedAction(
            "place_first_on_second", ("red block", "coaster")))
        snap = perceive(world)
        assert registry.evaluate("obj_on_obj", snap, ("red block", "coaster"))
        assert not registry.evaluate("obj_on_obj", snap,
                                     ("coaster", "red block"))

    def test_unknown_object_execerror(self):
        registry = full_registry()
        snap = perceive(reset("store_objects", ["red block"], seed=0))
        with pytest.raises(ExecError):
            registry.evaluate("obj_on_table", snap, ("ghost",))

    def test_determinism(self):
        registry = full_registry()
        snap = perceive(reset("set_table", ["plate", "fork"], seed=1))
        values = {registry.evaluate("obj_clear", snap, ("plate",))
                  for _ in range(5)}
        assert len(values) == 1


class TestParseState:
    def test_empty_registry(self):
        snap = perceive(reset("store_objects", ["red block"], seed=0))
        assert parse_state(snap, PredicateRegistry()) == frozenset()

    def test_complement_pairing(self):
        registry = PredicateRegistry()
        registry.register_predicate(parse_program(
            'pred gripper_empty() { gripper_holding() == "" }')[0])
        snap = perceive(reset("store_objects", ["red block"], seed=0))
        state = parse_state(snap, registry)
        assert state == frozenset({Literal("gripper_empty", ())})

    def test_literal_count(self):
        registry = PredicateRegistry()
        registry.register_predicate(parse_program(
            "pred obj_on_obj(a, b) { approx(get_object_center(a)[1], "
            "get_object_center(b)[1], 0.1) }")[0])
        registry.register_predicate(parse_program(
            "pred obj_small(a) { get_object_size(a)[0] < 3 }")[0])
        snap = perceive(reset(
            "store_objects",
            ["red block", "blue block", "green block"], seed=0))
        state = parse_state(snap, registry)
        # one of each pair per arg tuple: 3*2 two-ary + 3 one-ary
        assert len(state) == 9

    def test_monotonicity(self):
        registry = PredicateRegistry()
        registry.register_predicate(parse_program(
            "pred obj_small(a) { get_object_size(a)[0] < 3 }")[0])
        snap = perceive(reset("store_objects",
                              ["red block", "coaster"], seed=0))
        before = parse_state(snap, registry)
        registry2 = registry.copy()
        registry2.register_predicate(parse_program(
            "pred obj_tall(a) { get_object_size(a)[1] > 5 }")[0])
        after = parse_state(snap, registry2)
        assert before <= after


class TestComplementInvariant:
    @settings(max_examples=1000, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 9))
    def test_pairs_complementary_over_random_worlds(self, seed):
        registry = full_registry()
        rng = random.Random(seed)
        domain_id = rng.choice(DOMAINS)
        world = random_world(rng, domain_id, steps=rng.randint(0, 6))
        snap = perceive(world)
        names = snap.object_names()
        state = parse_state(snap, registry)
        for name, pred in registry.predicates.items():
            if name.startswith("neg_"):
                continue
            partner = negation_name(name)
            tuples = [()] if pred.arity == 0 else (
                [(o,) for o in names] if pred.arity == 1 else
                [(a, b) for a in names for b in names if a != b]
            )
            for args in tuples:
                positive = registry.evaluate(name, snap, args)
                negative = registry.evaluate(partner, snap, args)
                assert positive != negative
                assert (Literal(name, args) in state) == positive
                assert (Literal(partner, args) in state) == negative


class TestExtensionalEquality:
    def _worlds(self, count=50):
        rng = random.Random("ext-eq")
        return [perceive(random_world(rng, "store_objects"))
                for _ in range(count)]

    def test_reprint_equal(self):
        registry = full_registry()
        snaps = self._worlds()
        reprint = PredicateRegistry.from_pscript(registry.to_pscript())
        assert extensionally_equal(registry, "obj_on_obj",
                                   reprint, "obj_on_obj", snaps)

    def test_synonym_bodies_equal(self):
        registry = full_registry()
        other = registry.copy()
        entry = library.BY_NAME["obj_graspable"]
        renamed = library.program_source(
            entry, known_utilities=frozenset(other.utilities)
        ).replace("obj_graspable", "obj_size_ok_for_gripper")
        for defn in parse_program(renamed):
            if defn.kind == "pred":
                other.register_predicate(defn)
        assert extensionally_equal(registry, "obj_graspable",
                                   other, "obj_size_ok_for_gripper",
                                   self._worlds())

    def test_arity_mismatch_rejected(self):
        from tabletutor.dsl.registry import RegistryError

        registry = full_registry()
        with pytest.raises(RegistryError):
            extensionally_equal(registry, "obj_on_table",
                                registry, "gripper_empty", self._worlds(5))
