"""Sensing helpers and the action handlers named in the SAR control tree.

Handlers follow the ``handler(sm, robot) -> NodeStatus`` signature; the
robot carries a back-reference to its world.
"""
from __future__ import annotations

import math

from ..bt import FAILURE, RUNNING, SUCCESS, ActionRegistry
from .world import (
    CARRIED,
    COLLECTED,
    COLORS,
    GROUND,
    IN_ZONE_F,
    TREASURE_F,
    Robot,
    World,
    retrieve_tag,
)

# goal-directed walkers that make no progress for STALL_TICKS handler calls
# take a random detour of DETOUR_TICKS before heading for the goal again
STALL_TICKS = 20
DETOUR_TICKS = 30
_EPS = 1e-12


def collision_resultant(position, contacts) -> tuple[float, float]:
    """Sum of ``contact - position`` over the contact points (already within range)."""
    px, py = position
    sx = sy = 0.0
    for cx, cy in contacts:
        sx += cx - px
        sy += cy - py
    return (sx, sy)


def avoidance_direction(resultant, first_contact, rng=None) -> tuple[float, float]:
    """Unit vector to step along when avoiding contacts.

    Normally ``-V_c`` normalised. When the contacts cancel out, the first
    contact vector rotated by 90 degrees is used; when even that is zero
    (a contact sits exactly on the robot) a random heading from ``rng``.
    """
    vx, vy = resultant
    n = math.hypot(vx, vy)
    if n > _EPS:
        return (-vx / n, -vy / n)
    fx, fy = first_contact
    n = math.hypot(fx, fy)
    if n > _EPS:
        return (-fy / n, fx / n)
    if rng is None:
        return (1.0, 0.0)
    a = rng.uniform(0.0, 2.0 * math.pi)
    return (math.cos(a), math.sin(a))


def sense(world: World) -> None:
    """Refresh the blackboard of every robot in ``world`` (one batched pass)."""
    world.sense()


def _new_heading(robot: Robot) -> None:
    a = robot.rng.uniform(0.0, 2.0 * math.pi)
    robot.walk_dx = math.cos(a)
    robot.walk_dy = math.sin(a)


def _walk_step(world: World, robot: Robot) -> bool:
    """One step along the current heading, reflecting off the arena walls."""
    arena = world.arena
    nx = robot.x + robot.walk_dx * robot.speed
    ny = robot.y + robot.walk_dy * robot.speed
    if nx < 0.0 or nx > arena.width:
        robot.walk_dx = -robot.walk_dx
        nx = robot.x + robot.walk_dx * robot.speed
    if ny < 0.0 or ny > arena.height:
        robot.walk_dy = -robot.walk_dy
        ny = robot.y + robot.walk_dy * robot.speed
    return world.move_to(robot, nx, ny)


def step_toward(world: World, robot: Robot, gx: float, gy: float) -> float:
    """Move at most one step toward ``(gx, gy)``; return the remaining distance."""
    if robot.detour > 0:
        robot.detour -= 1
        if not _walk_step(world, robot):
            robot.detour = 0
        return math.hypot(gx - robot.x, gy - robot.y)

    dx = gx - robot.x
    dy = gy - robot.y
    d = math.hypot(dx, dy)
    if robot.goal != (gx, gy):
        robot.goal = (gx, gy)
        robot.best_goal_dist = d
        robot.stall = 0
    elif d < robot.best_goal_dist - 1e-9:
        robot.best_goal_dist = d
        robot.stall = 0
    else:
        robot.stall += 1
        if robot.stall >= STALL_TICKS:
            robot.stall = 0
            robot.best_goal_dist = math.inf
            robot.detour = DETOUR_TICKS
            _new_heading(robot)
    if d <= _EPS:
        return 0.0
    s = min(robot.speed, d)
    ux, uy = dx / d, dy / d
    if not world.move_to(robot, robot.x + ux * s, robot.y + uy * s):
        # slide along whichever axis is free
        if not world.move_to(robot, robot.x + ux * s, robot.y):
            world.move_to(robot, robot.x, robot.y + uy * s)
    return math.hypot(gx - robot.x, gy - robot.y)


def _reset_goal(robot: Robot) -> None:
    robot.goal = None
    robot.best_goal_dist = math.inf
    robot.stall = 0
    robot.detour = 0


# -- handlers -------------------------------------------------------------------

def random_walk(sm, robot: Robot):
    world = robot.world
    if robot.walk_remaining <= 0:
        _new_heading(robot)
        robot.walk_remaining = world.walk_duration
    robot.walk_remaining -= 1
    if not _walk_step(world, robot):
        robot.walk_remaining = 0
        return SUCCESS
    return SUCCESS if robot.walk_remaining == 0 else RUNNING


def collision_avoidance(sm, robot: Robot):
    ux, uy = avoidance_direction(
        sm.vectors.get("collision", (0.0, 0.0)),
        sm.vectors.get("first_contact", (0.0, 0.0)),
        robot.rng,
    )
    robot.world.move_to(robot, robot.x + ux * robot.speed, robot.y + uy * robot.speed)
    return SUCCESS


def stop_walk(sm, robot: Robot):
    return SUCCESS


def walk_to_collection(sm, robot: Robot):
    world = robot.world
    k = robot.carried
    if k is None:
        return FAILURE
    color = world.tcolor[k]
    if world.arena.in_zone(robot.x, robot.y, color):
        return SUCCESS
    gx, gy = world.arena.zone_center(color)
    step_toward(world, robot, gx, gy)
    return SUCCESS if world.arena.in_zone(robot.x, robot.y, color) else RUNNING


def place_treasure(sm, robot: Robot):
    world = robot.world
    k = robot.carried
    if k is None or not world.arena.in_zone(robot.x, robot.y, world.tcolor[k]):
        return FAILURE
    world.tstate[k] = COLLECTED
    world.collected += 1
    robot.carried = None
    sm.flags[TREASURE_F] = False
    sm.flags[IN_ZONE_F] = False
    _reset_goal(robot)
    return SUCCESS


def make_retrieve(color: str):
    def retrieve(sm, robot: Robot):
        world = robot.world
        k = robot.sensed_target
        if robot.carried is not None or k < 0 or world.tcolor[k] != color or world.tstate[k] != GROUND:
            return FAILURE
        tx, ty = world.target_xy(k)
        if math.hypot(tx - robot.x, ty - robot.y) >= world.pickup_radius:
            if step_toward(world, robot, tx, ty) >= world.pickup_radius:
                return RUNNING
        world.tstate[k] = CARRIED
        world.tcarrier[k] = robot.id
        robot.carried = k
        sm.flags[TREASURE_F] = True
        _reset_goal(robot)
        return SUCCESS

    retrieve.__name__ = f"retrieve_{color}"
    return retrieve


def default_registry() -> ActionRegistry:
    reg = ActionRegistry()
    reg.register("RandomWalk", random_walk)
    reg.register("CollisionAvoidance", collision_avoidance)
    reg.register("StopWalk", stop_walk)
    reg.register("WalkToCollection", walk_to_collection)
    reg.register("PlaceTreasure", place_treasure)
    for c in COLORS:
        reg.register(retrieve_tag(c), make_retrieve(c))
    return reg
