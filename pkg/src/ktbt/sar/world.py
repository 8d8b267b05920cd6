"""Arena, targets, robots and the phase-ordered world tick."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..bt import Action, Condition, Node, Selector, Sequence
from ..comms import Endpoint, Medium
from ..knowledge import KtAgent

COLORS = ("R", "G", "Y", "B")
COLOR_NAMES = {"R": "Red", "G": "Green", "Y": "Yellow", "B": "Blue"}
ROBOT_TYPES = ("I", "M", "R", "G", "Y", "B")

GROUND, CARRIED, COLLECTED = 0, 1, 2

COLLISION_F = "_collisionDetectedF"
TREASURE_F = "_treasureOnBoardF"
IN_ZONE_F = "_inZoneF"
WAIT_F = "_waitF"


def target_flag(color: str) -> str:
    return f"_target{color}DetectedF"


TARGET_FLAGS = {c: target_flag(c) for c in COLORS}


def retrieve_tag(color: str) -> str:
    return f"Retrieve{COLOR_NAMES[color]}"


def color_sequence(color: str):
    return ((target_flag(color), False),)


def colors_for_type(label: str) -> tuple[str, ...]:
    if label == "I":
        return ()
    if label == "M":
        return COLORS
    if label in COLORS:
        return (label,)
    raise ValueError(f"unknown robot type {label!r}")


class ConfigurationError(ValueError):
    """The simulation cannot be set up as requested."""


Rect = tuple[float, float, float, float]


@dataclass
class Arena:
    width: float
    height: float
    zone_size: float
    obstacles: list[Rect] = field(default_factory=list)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ConfigurationError("arena dimensions must be positive")
        z = self.zone_size
        if 2 * z > min(self.width, self.height):
            raise ConfigurationError("collection zones overlap")
        w, h = self.width, self.height
        self.zones: dict[str, Rect] = {
            "R": (0.0, 0.0, z, z),
            "G": (w - z, 0.0, w, z),
            "Y": (0.0, h - z, z, h),
            "B": (w - z, h - z, w, h),
        }
        for ob in self.obstacles:
            if any(_overlap(ob, zone) for zone in self.zones.values()):
                raise ConfigurationError(f"obstacle {ob} overlaps a collection zone")

    @classmethod
    def standard(cls, width: float, height: float, obstacles: bool = False) -> Arena:
        side = min(width, height)
        obs = []
        if obstacles:
            half = 0.05 * side
            for fx in (1 / 3, 2 / 3):
                for fy in (1 / 3, 2 / 3):
                    cx, cy = fx * width, fy * height
                    obs.append((cx - half, cy - half, cx + half, cy + half))
        return cls(width, height, 0.08 * side, obs)

    def zone_center(self, color: str) -> tuple[float, float]:
        x0, y0, x1, y1 = self.zones[color]
        return (x0 + x1) / 2, (y0 + y1) / 2

    def in_zone(self, x: float, y: float, color: str) -> bool:
        x0, y0, x1, y1 = self.zones[color]
        return x0 <= x <= x1 and y0 <= y <= y1

    def blocked(self, x: float, y: float) -> bool:
        for x0, y0, x1, y1 in self.obstacles:
            if x0 < x < x1 and y0 < y < y1:
                return True
        return False

    def free_for_placement(self, x: float, y: float) -> bool:
        if any(self.in_zone(x, y, c) for c in COLORS):
            return False
        return not any(x0 <= x <= x1 and y0 <= y <= y1 for x0, y0, x1, y1 in self.obstacles)


def _overlap(a: Rect, b: Rect) -> bool:
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


@dataclass
class Target:
    id: int
    color: str
    position: tuple[float, float]
    state: int
    carried_by: int | None


class Robot:
    __slots__ = (
        "id", "agent", "sm", "world", "x", "y", "speed", "type_label", "rng",
        "carried", "sensed_target", "walk_dx", "walk_dy", "walk_remaining",
        "goal", "best_goal_dist", "stall", "detour",
    )

    def __init__(self, robot_id: int, agent: KtAgent, x: float, y: float, speed: float,
                 type_label: str, rng: random.Random):
        self.id = robot_id
        self.agent = agent
        self.sm = agent.sm
        self.world: World | None = None
        self.x = float(x)
        self.y = float(y)
        self.speed = float(speed)
        self.type_label = type_label
        self.rng = rng
        self.carried: int | None = None
        self.sensed_target = -1
        self.walk_dx = 0.0
        self.walk_dy = 0.0
        self.walk_remaining = 0
        self.goal: tuple[float, float] | None = None
        self.best_goal_dist = math.inf
        self.stall = 0
        self.detour = 0

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def colors_known(self) -> int:
        kb = self.agent.kb
        return sum(1 for c in COLORS if color_sequence(c) in kb)


def control_parts(known_colors=()) -> tuple[list[Node], list[Node], list, Node]:
    """Critical, common, prior-knowledge and fallback parts of a SAR control tree."""
    critical = [
        Sequence([Condition(COLLISION_F), Action("CollisionAvoidance")]),
        Sequence([Condition(WAIT_F), Action("StopWalk")]),
    ]
    common = [
        Sequence([
            Condition(TREASURE_F),
            Selector([
                Sequence([Condition(IN_ZONE_F), Action("PlaceTreasure")]),
                Sequence([Condition(IN_ZONE_F, negated=True), Action("WalkToCollection")]),
            ]),
        ])
    ]
    prior = [(color_sequence(c), Action(retrieve_tag(c))) for c in known_colors]
    return critical, common, prior, Action("RandomWalk")


def make_agent(robot_id: int, type_label: str, handlers, transfer: bool,
               t1_limit: int, t2_limit: int) -> KtAgent:
    critical, common, prior, fallback = control_parts(colors_for_type(type_label))
    return KtAgent(
        robot_id, critical, common, fallback, prior=prior, handlers=handlers,
        query_candidates=[color_sequence(c) for c in COLORS],
        t1_limit=t1_limit, t2_limit=t2_limit, transfer=transfer,
    )


def robot_rng(seed: int, trial: int, robot_id: int) -> random.Random:
    state = np.random.SeedSequence([seed, trial, robot_id, 0x5A4]).generate_state(2)
    return random.Random(int(state[0]) << 32 | int(state[1]))


class World:
    """The search-and-rescue world, advanced one tick at a time by :meth:`step`.

    Each tick: sense all robots, tick every robot's tree in id order, hand
    outboxes to the medium, deliver, advance the clock.
    """

    def __init__(self, arena: Arena, d_coms: float = 200.0, d_t: float = 30.0, d_c: float = 10.0,
                 pickup_radius: float = 2.0, walk_duration: int = 60, transfer: bool = True,
                 t1_limit: int = 50, t2_limit: int = 100):
        from .actions import default_registry

        self.arena = arena
        self.d_t = float(d_t)
        self.d_c = float(d_c)
        self.pickup_radius = float(pickup_radius)
        self.walk_duration = int(walk_duration)
        self.transfer = transfer
        self.t1_limit = t1_limit
        self.t2_limit = t2_limit
        self.medium = Medium(d_coms)
        self.registry = default_registry()
        self.robots: list[Robot] = []
        self.tick = 0
        self.collected = 0
        self._tx: list[float] = []
        self._ty: list[float] = []
        self.tcolor: list[str] = []
        self.tstate = np.zeros(0, dtype=np.int8)
        self.tcarrier: list[int | None] = []
        self._tx_arr = np.zeros(0)
        self._ty_arr = np.zeros(0)
        self._obs_arr = np.array(arena.obstacles, dtype=np.float64).reshape(-1, 4)

    # -- construction -------------------------------------------------------

    def add_robot(self, type_label: str, x: float, y: float, rng: random.Random,
                  speed: float = 1.0) -> Robot:
        if self.arena.blocked(x, y) or not (0 <= x <= self.arena.width and 0 <= y <= self.arena.height):
            raise ConfigurationError(f"robot position ({x}, {y}) is not free")
        rid = len(self.robots)
        agent = make_agent(rid, type_label, self.registry, self.transfer, self.t1_limit, self.t2_limit)
        robot = Robot(rid, agent, x, y, speed, type_label, rng)
        robot.world = self
        self.robots.append(robot)
        return robot

    def add_target(self, color: str, x: float, y: float) -> int:
        if color not in COLORS:
            raise ConfigurationError(f"unknown target color {color!r}")
        self._tx.append(float(x))
        self._ty.append(float(y))
        self.tcolor.append(color)
        self.tcarrier.append(None)
        self.tstate = np.append(self.tstate, np.int8(GROUND))
        self._tx_arr = np.array(self._tx, dtype=np.float64)
        self._ty_arr = np.array(self._ty, dtype=np.float64)
        return len(self._tx) - 1

    # -- queries --------------------------------------------------------------

    @property
    def n_targets(self) -> int:
        return len(self._tx)

    def target(self, k: int) -> Target:
        return Target(k, self.tcolor[k], (self._tx[k], self._ty[k]), int(self.tstate[k]), self.tcarrier[k])

    def targets(self) -> list[Target]:
        return [self.target(k) for k in range(self.n_targets)]

    def target_xy(self, k: int) -> tuple[float, float]:
        return self._tx[k], self._ty[k]

    def state_counts(self) -> tuple[int, int, int]:
        s = self.tstate
        return int((s == GROUND).sum()), int((s == CARRIED).sum()), int((s == COLLECTED).sum())

    def collected_fraction(self) -> float:
        return self.collected / self.n_targets if self.n_targets else 1.0

    # -- kinematics -------------------------------------------------------------

    def move_to(self, robot: Robot, x: float, y: float) -> bool:
        """Move clamped to the arena; refuse positions inside an obstacle."""
        arena = self.arena
        x = 0.0 if x < 0.0 else (arena.width if x > arena.width else x)
        y = 0.0 if y < 0.0 else (arena.height if y > arena.height else y)
        if arena.obstacles and arena.blocked(x, y):
            return False
        robot.x = x
        robot.y = y
        return True

    # -- tick phases --------------------------------------------------------------

    def sense(self) -> None:
        robots = self.robots
        if not robots:
            return
        rx = np.fromiter((r.x for r in robots), dtype=np.float64, count=len(robots))
        ry = np.fromiter((r.y for r in robots), dtype=np.float64, count=len(robots))
        vcx, vcy, ncontact, fcx, fcy, nearest = kernels.sense_all(
            rx, ry, self._tx_arr, self._ty_arr, self.tstate, self._obs_arr, self.d_t, self.d_c
        )
        arena = self.arena
        tcolor = self.tcolor
        for i, robot in enumerate(robots):
            flags = robot.sm.flags
            vectors = robot.sm.vectors
            flags[COLLISION_F] = ncontact[i] > 0
            vectors["collision"] = (vcx[i], vcy[i])
            vectors["first_contact"] = (fcx[i], fcy[i])
            k = nearest[i]
            robot.sensed_target = k
            for name in TARGET_FLAGS.values():
                flags[name] = False
            if k >= 0:
                flags[TARGET_FLAGS[tcolor[k]]] = True
                vectors["target"] = (self._tx[k], self._ty[k])
            carried = robot.carried
            if carried is None:
                flags[TREASURE_F] = False
                flags[IN_ZONE_F] = False
            else:
                flags[TREASURE_F] = True
                flags[IN_ZONE_F] = arena.in_zone(robot.x, robot.y, tcolor[carried])

    def step(self) -> None:
        self.sense()
        now = self.tick
        for robot in self.robots:
            robot.sm.tick_now = now
            robot.agent.tick(robot)
        medium = self.medium
        for robot in self.robots:
            outbox = robot.sm.outbox
            if outbox:
                for msg in outbox:
                    medium.broadcast(robot.id, (robot.x, robot.y), msg)
                outbox.clear()
        if medium.pending:
            medium.deliver([Endpoint(r.id, (r.x, r.y), r.sm, r.agent.kb) for r in self.robots])
        self.tick = now + 1
