import random

import pytest

from tabletutor import worldsim
from tabletutor.agent import run_training
from tabletutor.oracle import FeedbackOracle
from tabletutor.tasks import training_tasks
from tabletutor.teacher.scripted import ScriptedTeacher

DOMAINS = ("store_objects", "set_table", "cook_meal")


def random_world(rng: random.Random, domain_id: str = "store_objects",
                 steps: int = 6) -> worldsim.WorldState:
    """A reachable world: reset then a short random feasible walk."""
    pool = worldsim.domain_object_names(domain_id)
    count = rng.randint(2, min(5, len(pool)))
    names = rng.sample(pool, count)
    if domain_id == "cook_meal" and "faucet" not in names:
        names[-1] = "faucet"
    world = worldsim.reset(domain_id, names, seed=rng.randint(0, 10 ** 6))
    for _ in range(steps):
        actions = [a for a in worldsim.grounded_actions(world)
                   if worldsim.check_feasible(world, a).ok]
        if not actions:
            break
        world = worldsim.execute(world, rng.choice(actions))
    return world


@pytest.fixture(scope="session")
def store_session(tmp_path_factory):
    """One full scripted StoreObjects training run, shared across tests."""
    out = tmp_path_factory.mktemp("store_bundle")
    teacher = ScriptedTeacher("store_objects")
    session = run_training(
        "store_objects", training_tasks("store_objects"), teacher,
        seed=0, oracle=FeedbackOracle("store_objects", seed=0),
        out_dir=out, log_path=out / "session.jsonl",
    )
    return session, out, teacher
