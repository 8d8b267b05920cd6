"""Hand-built worlds for the knowledge-gain and minimum-occurrence checks."""
from __future__ import annotations

import math
import random

from .world import Arena, World, color_sequence, robot_rng

RED = color_sequence("R")


def _jitter(rng: random.Random, amount: float) -> float:
    return rng.uniform(-amount, amount)


def single_teacher_world(seed: int) -> World:
    """A red-knowing teacher, an ignorant learner and one red target.

    The learner starts next to the target, the teacher about 150 units
    away; both are within the default 200-unit radio range.
    """
    rng = random.Random(seed)
    world = World(Arena.standard(400.0, 400.0), d_coms=200.0)
    lx, ly = 200.0 + _jitter(rng, 5), 200.0 + _jitter(rng, 5)
    world.add_robot("R", lx + 150.0, ly + _jitter(rng, 3), robot_rng(seed, 0, 0))
    world.add_robot("I", lx, ly, robot_rng(seed, 0, 1))
    a = rng.uniform(0.0, 2.0 * math.pi)
    world.add_target("R", lx + 10.0 * math.cos(a), ly + 10.0 * math.sin(a))
    return world


def occurrence_world(seed: int, red_targets: int, learners: int = 4) -> World:
    """One red teacher in the middle and ``learners`` ignorant robots around it.

    Learner ``i`` (for ``i < red_targets``) has a red target of its own just
    outside its position, far from every other robot's detection range, so
    each occurrence can be used by exactly one learner. The teacher's short
    cool-down lets it answer the learners one pair at a time while the
    others' queries wait in its inbox.
    """
    if red_targets > learners:
        raise ValueError("at most one red target per learner")
    rng = random.Random(seed)
    world = World(Arena.standard(400.0, 400.0), d_coms=200.0, t1_limit=5, t2_limit=100)
    cx, cy = 200.0, 200.0
    world.add_robot("R", cx + _jitter(rng, 2), cy + _jitter(rng, 2), robot_rng(seed, 0, 0))
    for i in range(learners):
        a = 2.0 * math.pi * i / learners + _jitter(rng, 0.05)
        r = 80.0 + _jitter(rng, 3)
        x, y = cx + r * math.cos(a), cy + r * math.sin(a)
        world.add_robot("I", x, y, robot_rng(seed, 0, i + 1))
        if i < red_targets:
            world.add_target("R", x + 8.0 * math.cos(a), y + 8.0 * math.sin(a))
    return world


def knows_red(world: World) -> list[bool]:
    return [RED in r.agent.kb for r in world.robots]
