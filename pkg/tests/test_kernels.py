import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktbt import kernels
from ktbt._kernels_py import sense_all as sense_py

BACKENDS = kernels.backends()


def arrays(rx, ry, tx=(), ty=(), ts=None, obstacles=()):
    ts = [0] * len(tx) if ts is None else ts
    return (
        np.asarray(rx, dtype=np.float64), np.asarray(ry, dtype=np.float64),
        np.asarray(tx, dtype=np.float64), np.asarray(ty, dtype=np.float64),
        np.asarray(ts, dtype=np.int8), np.asarray(obstacles, dtype=np.float64).reshape(-1, 4),
    )


@pytest.mark.parametrize("impl", sorted(BACKENDS))
def test_contact_sum_and_first_contact(impl):
    fn = BACKENDS[impl]
    vcx, vcy, nc, fcx, fcy, near = fn(*arrays([0, 1, 0, 50], [0, 0, 1, 50]), 30.0, 1.5)
    assert (vcx[0], vcy[0]) == (1.0, 1.0)
    assert nc[0] == 2 and (fcx[0], fcy[0]) == (1.0, 0.0)
    assert nc[3] == 0 and (vcx[3], vcy[3]) == (0.0, 0.0)
    assert near == [-1, -1, -1, -1]


@pytest.mark.parametrize("impl", sorted(BACKENDS))
def test_obstacle_contact_uses_nearest_boundary_point(impl):
    vcx, vcy, nc, *_ = BACKENDS[impl](*arrays([0.0], [5.0], obstacles=[(3, 0, 10, 10)]), 30.0, 5.0)
    assert nc[0] == 1 and (vcx[0], vcy[0]) == (3.0, 0.0)


@pytest.mark.parametrize("impl", sorted(BACKENDS))
def test_nearest_ground_target_only(impl):
    a = arrays([0.0], [0.0], tx=[20, 10, 5, 40], ty=[0, 0, 0, 0], ts=[0, 0, 1, 0])
    *_, near = BACKENDS[impl](*a, 30.0, 1.0)
    assert near == [1]
    # ties go to the lowest index, and a target exactly at d_t is detected
    a = arrays([0.0], [0.0], tx=[30, 0], ty=[0, 30])
    *_, near = BACKENDS[impl](*a, 30.0, 1.0)
    assert near == [0]


def test_results_are_plain_python_values():
    for fn in BACKENDS.values():
        out = fn(*arrays([0, 1], [0, 0], tx=[2], ty=[0]), 30.0, 5.0)
        assert all(type(v) is float for v in out[0] + out[1] + out[3] + out[4])
        assert all(type(v) is int for v in out[2] + out[5])


coords = st.floats(min_value=0.0, max_value=100.0, allow_nan=False)


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.tuples(coords, coords), min_size=1, max_size=12),
    st.lists(st.tuples(coords, coords, st.integers(0, 2)), max_size=12),
    st.lists(st.tuples(coords, coords, st.floats(1, 20), st.floats(1, 20)), max_size=3),
    st.floats(min_value=0.0, max_value=60.0),
    st.floats(min_value=0.0, max_value=30.0),
)
def test_backends_bit_identical(robots, targets, boxes, d_t, d_c):
    obstacles = [(x, y, x + w, y + h) for x, y, w, h in boxes]
    a = arrays([r[0] for r in robots], [r[1] for r in robots],
               [t[0] for t in targets], [t[1] for t in targets], [t[2] for t in targets], obstacles)
    results = [fn(*a, d_t, d_c) for fn in BACKENDS.values()]
    for other in results[1:]:
        assert other == results[0]
    # cross-check the reference against a direct per-robot computation
    vcx, vcy, nc, _, _, near = results[0]
    for i, (px, py) in enumerate(robots):
        contacts = [(x, y) for j, (x, y) in enumerate(robots) if j != i and (x - px) ** 2 + (y - py) ** 2 <= d_c ** 2]
        for x0, y0, x1, y1 in obstacles:
            cx, cy = min(max(px, x0), x1), min(max(py, y0), y1)
            if (cx - px) ** 2 + (cy - py) ** 2 <= d_c ** 2:
                contacts.append((cx, cy))
        assert nc[i] == len(contacts)
        assert vcx[i] == pytest.approx(sum(c[0] - px for c in contacts), abs=1e-9)
        assert vcy[i] == pytest.approx(sum(c[1] - py for c in contacts), abs=1e-9)
        ground = [(math.hypot(x - px, y - py), k) for k, (x, y, s) in enumerate(targets) if s == 0]
        in_range = [g for g in ground if (targets[g[1]][0] - px) ** 2 + (targets[g[1]][1] - py) ** 2 <= d_t ** 2]
        if not in_range:
            assert near[i] == -1
        else:
            best = min(d for d, _ in in_range)
            assert math.hypot(targets[near[i]][0] - px, targets[near[i]][1] - py) == pytest.approx(best)


def test_compiled_backend_is_default_when_built():
    if "compiled" not in BACKENDS:
        pytest.skip("compiled kernel not built")
    assert kernels.BACKEND == "compiled"


def test_env_var_forces_python_fallback():
    env = dict(os.environ, KTBT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import ktbt.kernels as k; print(k.BACKEND, k.sense_all.__module__)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.split() == ["python", "ktbt._kernels_py"]


def test_reference_kernel_is_the_fallback():
    assert BACKENDS["python"] is sense_py
