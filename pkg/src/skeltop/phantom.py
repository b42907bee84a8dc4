"""Deterministic synthetic tubular phantoms with analytically known topology.

Each phantom is a rasterized centerline structure dilated by a Euclidean
ball (squared distance <= radius^2).  Random phantoms draw from an explicit
64-bit linear congruential generator, so identical specs produce bitwise
identical volumes on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .grid import BinaryVolume
from .topology import BettiTriple

KINDS = ("straight_tube", "torus", "y_branch", "multi_tube", "random_vessel_tree")

_LCG_MUL = 6364136223846793005
_LCG_ADD = 1442695040888963407
_MASK64 = (1 << 64) - 1


class Lcg:
    """The fixed 64-bit LCG used by random phantom kinds."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (_LCG_MUL * self.state + _LCG_ADD) & _MASK64
        return self.state

    def uniform(self) -> float:
        return self.next_u64() / 2.0 ** 64

    def randint(self, n: int) -> int:
        return int(self.uniform() * n) % n

    def unit_vector(self) -> np.ndarray:
        # Rejection-sample a direction from the unit ball.
        while True:
            v = np.array([self.uniform() * 2 - 1 for _ in range(3)])
            n = float(np.dot(v, v))
            if 1e-4 < n <= 1.0:
                return v / math.sqrt(n)


@dataclass(frozen=True)
class PhantomSpec:
    kind: str
    dims: tuple[int, int, int] = (64, 64, 64)
    radius: int = 2
    n: int = 3                # multi_tube only
    seed: int = 0             # random_vessel_tree only
    n_branches: int = 6       # random_vessel_tree only
    expected: BettiTriple = field(init=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown phantom kind {self.kind!r}")
        if self.radius < 1:
            raise ValueError("radius must be >= 1")
        if self.kind == "multi_tube" and self.n < 1:
            raise ValueError("multi_tube needs n >= 1")
        expected = {
            "straight_tube": BettiTriple(1, 0, 0),
            "torus": BettiTriple(1, 1, 0),
            "y_branch": BettiTriple(1, 0, 0),
            "multi_tube": BettiTriple(self.n, 0, 0),
            "random_vessel_tree": BettiTriple(1, 0, 0),
        }[self.kind]
        object.__setattr__(self, "expected", expected)

    @classmethod
    def parse(cls, text: str) -> "PhantomSpec":
        """Parse the CLI key=value format, e.g.
        'kind=torus radius=2 dims=64,64,64 seed=7'."""
        kw = {}
        for token in text.split():
            if "=" not in token:
                raise ValueError(f"bad phantom token {token!r}")
            key, val = token.split("=", 1)
            if key == "kind":
                kw["kind"] = val
            elif key == "dims":
                parts = val.split(",")
                if len(parts) != 3:
                    raise ValueError("dims wants nx,ny,nz")
                kw["dims"] = tuple(int(p) for p in parts)
            elif key in ("radius", "n", "seed", "n_branches"):
                kw[key] = int(val)
            else:
                raise ValueError(f"unknown phantom key {key!r}")
        if "kind" not in kw:
            raise ValueError("phantom spec needs kind=...")
        return cls(**kw)


class PhantomError(ValueError):
    """The requested structure does not fit the given dims."""


def _dilate_centerline(points, spec: PhantomSpec) -> BinaryVolume:
    nx, ny, nz = spec.dims
    r = spec.radius
    m = r + 2
    grid = np.zeros((nz, ny, nx), dtype=np.uint8)
    for x, y, z in points:
        xi, yi, zi = int(round(x)), int(round(y)), int(round(z))
        if not (m <= xi <= nx - 1 - m and m <= yi <= ny - 1 - m
                and m <= zi <= nz - 1 - m):
            raise PhantomError(
                f"{spec.kind} with radius {r} does not fit dims {spec.dims}")
        grid[zi, yi, xi] = 1
    if not grid.any():
        raise PhantomError("empty centerline")
    d = ndimage.distance_transform_edt(grid == 0)
    d2 = np.rint(d * d).astype(np.int64)
    return BinaryVolume((d2 <= r * r).astype(np.uint8))


def _sample_segment(a, b, step=0.3):
    a, b = np.asarray(a, float), np.asarray(b, float)
    length = float(np.linalg.norm(b - a))
    n = max(int(math.ceil(length / step)), 1)
    return [tuple(a + (b - a) * (i / n)) for i in range(n + 1)]


def _gen_straight_tube(spec):
    nx, ny, nz = spec.dims
    m = spec.radius + 2
    cy, cz = (ny - 1) / 2, (nz - 1) / 2
    return _sample_segment((m, cy, cz), (nx - 1 - m, cy, cz))


def _gen_torus(spec):
    nx, ny, nz = spec.dims
    r, m = spec.radius, spec.radius + 2
    cx, cy, cz = (nx - 1) / 2, (ny - 1) / 2, (nz - 1) // 2
    big_r = min((nx - 1) / 2, (ny - 1) / 2) - m
    if big_r < r + 3:
        raise PhantomError(f"torus radius {r} does not fit dims {spec.dims}")
    steps = max(int(2 * math.pi * big_r / 0.25), 16)
    return [(cx + big_r * math.cos(2 * math.pi * i / steps),
             cy + big_r * math.sin(2 * math.pi * i / steps), cz)
            for i in range(steps)]


def _gen_y_branch(spec):
    nx, ny, nz = spec.dims
    m = spec.radius + 2
    cy, cz = (ny - 1) / 2, (nz - 1) / 2
    mid_x = (nx - 1) / 2
    spread = (ny - 1) / 2 - m
    if spread < 1:
        raise PhantomError(f"y_branch does not fit dims {spec.dims}")
    pts = _sample_segment((m, cy, cz), (mid_x, cy, cz))
    pts += _sample_segment((mid_x, cy, cz), (nx - 1 - m, cy - spread, cz))
    pts += _sample_segment((mid_x, cy, cz), (nx - 1 - m, cy + spread, cz))
    return pts


def _gen_multi_tube(spec):
    nx, ny, nz = spec.dims
    r, m, n = spec.radius, spec.radius + 2, spec.n
    cy = (ny - 1) / 2
    if n == 1:
        zs = [(nz - 1) / 2]
    else:
        gap = (nz - 1 - 2 * m) / (n - 1)
        if gap < 2 * r + 2:
            raise PhantomError(
                f"multi_tube n={n} radius={r} does not fit dims {spec.dims}")
        zs = [m + i * gap for i in range(n)]
    pts = []
    for cz in zs:
        pts += _sample_segment((m, cy, cz), (nx - 1 - m, cy, cz))
    return pts


def _gen_random_vessel_tree(spec, salt: int = 0):
    nx, ny, nz = spec.dims
    r, m = spec.radius, spec.radius + 2
    lo = np.array([m, m, m], float)
    hi = np.array([nx - 1 - m, ny - 1 - m, nz - 1 - m], float)
    if np.any(hi - lo < 4):
        raise PhantomError(f"vessel tree does not fit dims {spec.dims}")
    rng = Lcg(spec.seed + salt * 0x9E3779B97F4A7C15)
    clearance = 2 * r + 2          # min centerline gap between distinct tubes
    near = clearance + 1           # attachment ball around a branch origin
    recent = 30                    # own-path window exempt from self-checks

    def walk(origin, direction, max_steps, pts_existing):
        # Collision rules keeping the tree loop-free: inside the attachment
        # ball the path must move strictly outward (no curling back onto the
        # junction); once outside, it must keep `clearance` from every other
        # centerline point.  The own-path window is short enough that the
        # curvature bound (max turn ~6 deg/step) forbids self-contact in it.
        origin = np.asarray(origin, float)
        path = [origin]
        d = np.asarray(direction, float)
        ex = np.asarray(pts_existing, float) if len(pts_existing) else None
        if ex is not None:
            far = ex[np.linalg.norm(ex - origin, axis=1) > near]
        else:
            far = None
        prev_dist = 0.0
        for _ in range(max_steps):
            d = d + 0.1 * rng.unit_vector()
            d = d / np.linalg.norm(d)
            p = path[-1] + d
            if np.any(p < lo) or np.any(p > hi):
                break
            dist_origin = float(np.linalg.norm(p - origin))
            if dist_origin <= near:
                if dist_origin < prev_dist + 0.4:
                    return None  # stalling or curling inside the junction ball
                others = far
            else:
                others = ex
            prev_dist = max(prev_dist, dist_origin)
            if others is not None and len(others) and \
                    float(np.min(np.linalg.norm(others - p, axis=1))) < clearance:
                return None
            if len(path) > recent:
                own = np.asarray(path[:-recent], float)
                if float(np.min(np.linalg.norm(own - p, axis=1))) < clearance:
                    return None
            path.append(p)
        return path if len(path) >= 8 else None

    center = (lo + hi) / 2
    trunk_len = max(int(float(np.mean(hi - lo)) * 1.2), 16)
    trunk = None
    for _ in range(60):
        cand = walk(center, rng.unit_vector(), trunk_len, [])
        if cand is not None and (trunk is None or len(cand) > len(trunk)):
            trunk = cand
            if len(trunk) >= int(0.6 * trunk_len):
                break
    if trunk is None:
        raise PhantomError("could not grow vessel-tree trunk")
    pts = list(trunk)

    used_origins = [np.asarray(center, float)]
    wanted = max(spec.n_branches - 1, 0)
    grown = 0
    budget = 40 * max(wanted, 1)
    while grown < wanted and budget > 0:
        budget -= 1
        origin = pts[rng.randint(len(pts))]
        # Keep junctions well apart so attachment blobs cannot chain into
        # unexpected loops.
        if min(float(np.linalg.norm(origin - o)) for o in used_origins) \
                < 2 * near:
            continue
        branch = walk(origin, rng.unit_vector(),
                      12 + rng.randint(trunk_len), pts)
        if branch is not None:
            pts.extend(branch)
            used_origins.append(np.asarray(origin, float))
            grown += 1
    # Undersized budgets simply yield fewer branches; the tree stays a tree.
    return [tuple(p) for p in pts]


_GENERATORS = {
    "straight_tube": _gen_straight_tube,
    "torus": _gen_torus,
    "y_branch": _gen_y_branch,
    "multi_tube": _gen_multi_tube,
    "random_vessel_tree": _gen_random_vessel_tree,
}


def generate(spec: PhantomSpec) -> tuple[BinaryVolume, BettiTriple]:
    """Rasterize the spec's centerlines, dilate by a Euclidean ball, and
    return the volume with its closed-form Betti triple.

    Random trees are verified against the expected topology after dilation;
    rare walks whose junction blobs still pinch off a loop are rejected and
    regrown from a salted stream, keeping generation deterministic per spec.
    """
    if spec.kind == "random_vessel_tree":
        from .topology import betti_numbers
        for salt in range(20):
            points = _gen_random_vessel_tree(spec, salt)
            vol = _dilate_centerline(points, spec)
            if betti_numbers(vol) == spec.expected:
                return vol, spec.expected
        raise PhantomError("vessel tree rejected: could not realize a loop-free tree")
    points = _GENERATORS[spec.kind](spec)
    return _dilate_centerline(points, spec), spec.expected
