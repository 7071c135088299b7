import random

from tabletutor.dsl.registry import Literal, parse_state
from tabletutor.operators import (
    Transition,
    explains,
    learn_operators,
    lift_effects,
    minimal_preconditions_bruteforce,
)
from tabletutor.worldsim import (
    GroundedAction,
    check_feasible,
    execute,
    grounded_actions,
    perceive,
    reset,
)

from conftest import random_world
from test_dsl import full_registry


def scripted_transitions(domain_id, plan, world):
    """Execute a fixed action sequence, parsing states with the library
    predicates."""
    registry = full_registry()
    transitions = []
    for step, action in enumerate(plan):
        s_pre = parse_state(perceive(world), registry)
        world = execute(world, action)
        s_post = parse_state(perceive(world), registry)
        transitions.append(Transition(s_pre, action, s_post, step=step))
    return transitions


# Table-style per-domain predicate inventories; the full library spans all
# three domains and would bloat CON_init with irrelevant negative facts.
DOMAIN_PREDICATES = {
    "store_objects": ("gripper_empty", "obj_in_gripper", "obj_on_obj",
                      "obj_on_table", "obj_clear", "obj_graspable"),
    "set_table": ("gripper_empty", "obj_in_gripper", "obj_on_obj",
                  "obj_on_table", "obj_clear", "obj_graspable",
                  "obj_is_plate"),
    "cook_meal": ("gripper_empty", "obj_in_gripper", "obj_on_table",
                  "obj_graspable", "obj_is_container", "obj_is_food",
                  "obj_filled_with_water", "obj_in_container"),
}


def domain_registry(domain_id):
    source = full_registry()
    registry = type(source)()
    registry.utilities = dict(source.utilities)
    for name in DOMAIN_PREDICATES[domain_id]:
        registry.register_predicate(source.predicates[name].to_definition())
    return registry


def con_init_sizes(transitions):
    """Max per-cluster initial precondition size, as the learner derives it."""
    from tabletutor.operators import _lift_state, _var

    inits = {}
    for t in transitions:
        signature, params, objects = lift_effects(t)
        mapping = {o: _var(i) for i, o in enumerate(objects)}
        lifted = frozenset(
            lit for lit in _lift_state(t.s_pre, mapping)
            if all(a in params for a in lit.args)
        )
        inits[signature] = (lifted if signature not in inits
                            else inits[signature] & lifted)
    return max((len(v) for v in inits.values()), default=0)


def random_transitions(rng, domain_id="store_objects", count=4):
    registry = domain_registry(domain_id)
    world = random_world(rng, domain_id, steps=rng.randint(0, 3))
    transitions = []
    step = 0
    while len(transitions) < count:
        feasible = [a for a in grounded_actions(world)
                    if check_feasible(world, a).ok]
        if not feasible:
            break
        action = rng.choice(feasible)
        s_pre = parse_state(perceive(world), registry)
        world = execute(world, action)
        s_post = parse_state(perceive(world), registry)
        transitions.append(Transition(s_pre, action, s_post, step=step))
        step += 1
    return transitions


def act(schema, *args):
    return GroundedAction(schema, tuple(args))


class TestLiftEffects:
    def test_pick_from_table_signature(self):
        world = reset("store_objects", ["red block", "blue block"], seed=0)
        (t,) = scripted_transitions(
            "store_objects", [act("pick_up", "red block")], world)
        signature, params, objects = lift_effects(t)
        schema, add, dele = signature
        assert schema == "pick_up"
        assert Literal("obj_in_gripper", ("v0",)) in add
        assert Literal("neg_gripper_empty", ()) in add
        assert Literal("neg_obj_on_table", ("v0",)) in add
        assert Literal("gripper_empty", ()) in dele
        assert objects[0] == "red block"

    def test_noop_signature_empty(self):
        world = reset("store_objects", ["red block"], seed=0)
        registry = full_registry()
        s = parse_state(perceive(world), registry)
        t = Transition(s, act("pick_up", "red block"), s)
        signature, _, _ = lift_effects(t)
        assert signature == ("pick_up", frozenset(), frozenset())

    def test_object_bijection_invariance(self):
        w1 = reset("store_objects", ["red block", "blue block"], seed=0)
        w2 = reset("store_objects", ["green block", "yellow block"], seed=4)
        (t1,) = scripted_transitions(
            "store_objects", [act("pick_up", "red block")], w1)
        (t2,) = scripted_transitions(
            "store_objects", [act("pick_up", "green block")], w2)
        assert lift_effects(t1)[0] == lift_effects(t2)[0]


class TestExplains:
    def test_self_explanation(self):
        rng = random.Random("self")
        for _ in range(10):
            transitions = random_transitions(rng, count=3)
            result = learn_operators(transitions)
            for t in transitions:
                assert any(explains(op, t) is not None
                           for op in result.operators)

    def test_fresh_transition_explained(self):
        w1 = reset("store_objects", ["red block", "blue block"], seed=0)
        (t1,) = scripted_transitions(
            "store_objects", [act("pick_up", "red block")], w1)
        result = learn_operators([t1])
        w2 = reset("store_objects", ["green block", "coaster"], seed=9)
        (t2,) = scripted_transitions(
            "store_objects", [act("pick_up", "green block")], w2)
        subs = [explains(op, t2) for op in result.operators]
        assert any(s is not None and s["v0"] == "green block" for s in subs)

    def test_effect_mismatch_not_explained(self):
        world = reset("store_objects", ["red block", "blue block"], seed=0)
        pick, place = scripted_transitions(
            "store_objects",
            [act("pick_up", "red block"),
             act("place_first_on_second", "red block", "blue block")],
            world)
        pick_op = learn_operators([pick]).operators[0]
        assert explains(pick_op, place) is None


class TestLearnOperators:
    def test_two_pick_variants(self):
        world = reset("store_objects",
                      ["red block", "blue block", "green block"], seed=0,
                      init_stacks=(("red block", "blue block"),))
        transitions = scripted_transitions(
            "store_objects",
            [act("pick_up", "red block"),          # from an object
             act("place_on_table", "red block"),
             act("pick_up", "green block")],       # from the table
            world)
        picks = [op for op in learn_operators(transitions).operators
                 if op.schema == "pick_up"]
        assert len(picks) == 2
        signatures = {(op.eff_add, op.eff_del) for op in picks}
        assert len(signatures) == 2

    def test_full_store_session_four_operators(self, store_session):
        session, _, _ = store_session
        assert len(session.operators) == 4
        schemas = sorted(op.schema for op in session.operators)
        assert schemas == ["pick_up", "pick_up", "place_first_on_second",
                           "place_on_table"]

    def test_ledger_literals_never_deleted(self):
        world = reset("store_objects", ["red block", "blue block"], seed=0)
        (t,) = scripted_transitions(
            "store_objects", [act("pick_up", "red block")], world)
        ledger = {"pick_up": [(Literal("obj_graspable", ("v0",)), True)]}
        (op,) = learn_operators([t], ledger).operators
        assert Literal("obj_graspable", ("v0",)) in op.preconditions

    def test_idempotence(self):
        rng = random.Random("idem")
        transitions = random_transitions(rng, "set_table", count=5)
        a = learn_operators(transitions)
        b = learn_operators(transitions)
        assert a.operators == b.operators

    def test_contradictory_transitions_reported(self):
        world = reset("store_objects", ["red block", "blue block"], seed=0)
        (t,) = scripted_transitions(
            "store_objects", [act("pick_up", "red block")], world)
        fake = Transition(t.s_pre, t.action, t.s_pre, step=t.step + 1)
        result = learn_operators([t, fake])
        assert result.diagnostics.contradictory

    def test_constraints_on_random_instances(self):
        """Greedy equals the brute-force minimum on 200 small instances."""
        rng = random.Random("oracle")
        domains = ("store_objects", "set_table", "cook_meal")
        checked = 0
        while checked < 200:
            domain_id = domains[checked % 3]
            transitions = random_transitions(
                rng, domain_id, count=rng.randint(1, 4))
            if not transitions:
                continue
            # keep the brute-force oracle tractable
            if con_init_sizes(transitions) > 12:
                continue
            result = learn_operators(transitions)
            # constraint (i): every kept transition explained exactly once
            for t in transitions:
                owners = [op for op in result.operators
                          if explains(op, t) is not None]
                if not result.diagnostics.contradictory:
                    assert len(owners) == 1, (domain_id, str(t.action))
            # constraint (ii): no CON collision with different effects
            seen = {}
            for op in result.operators:
                key = (op.schema, op.preconditions)
                effects = (op.eff_add, op.eff_del)
                assert seen.setdefault(key, effects) == effects
            # minimality vs brute force
            greedy_size = sum(len(op.preconditions)
                              for op in result.operators)
            best = minimal_preconditions_bruteforce(transitions)
            ledger_size = 0
            assert best is not None
            assert greedy_size - ledger_size == best, domain_id
            checked += 1
