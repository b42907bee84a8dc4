"""Simple-point characterizations on packed 27-bit neighborhoods.

Two characterizations are provided, both under the (26-foreground,
6-background) adjacency pair:

* Euler variant: the center may be deleted iff the Euler characteristic of
  the local cubical complex is unchanged (checked with an octant lookup
  table), the remaining foreground of the 26-neighborhood is one non-empty
  26-connected set, and all face-adjacent background cells lie in a single
  6-connected background component of the 18-neighborhood.
* Boolean variant: the topological numbers satisfy T26 == 1 and T6 == 1,
  where T26 counts 26-components of the foreground neighbors and T6 counts
  6-components of the background of the 18-neighborhood that touch a face
  neighbor.

Scalar functions operate on single configurations (fast bit twiddling for
the Euler variant, an explicit component search for the Boolean variant);
the *_batch functions are vectorized over arrays of configurations.
"""

from __future__ import annotations

import numpy as np

from .grid import CENTER_BIT

# ---------------------------------------------------------------------------
# Cell indexing helpers.  Config bit i <-> offset (dz, dy, dx) with
# i = (dz+1)*9 + (dy+1)*3 + (dx+1).


def _bit(dz, dy, dx):
    return (dz + 1) * 9 + (dy + 1) * 3 + (dx + 1)


_OFFSET_OF = {_bit(dz, dy, dx): (dz, dy, dx)
              for dz in (-1, 0, 1) for dy in (-1, 0, 1) for dx in (-1, 0, 1)}

FACE_BITS = [_bit(*o) for o in
             [(-1, 0, 0), (0, -1, 0), (0, 0, -1), (0, 0, 1), (0, 1, 0), (1, 0, 0)]]
FACE_MASK = sum(1 << b for b in FACE_BITS)

N18_BITS = [i for i, (dz, dy, dx) in _OFFSET_OF.items()
            if i != CENTER_BIT and (dz != 0) + (dy != 0) + (dx != 0) <= 2]
N18_MASK = sum(1 << b for b in N18_BITS)

NONCENTER_MASK = (1 << 27) - 1 - (1 << CENTER_BIT)


def _adjacent(i, j, connectivity):
    az, ay, ax = _OFFSET_OF[i]
    bz, by, bx = _OFFSET_OF[j]
    dz, dy, dx = abs(az - bz), abs(ay - by), abs(ax - bx)
    if max(dz, dy, dx) != 1 or (dz, dy, dx) == (0, 0, 0):
        return False
    if connectivity == 6:
        return dz + dy + dx == 1
    return True


# Per-cell adjacency bitmasks (center excluded from both graphs).
NBR26_MASK = [0] * 27
NBR6_MASK = [0] * 27
for _i in range(27):
    for _j in range(27):
        if _j == CENTER_BIT or _i == CENTER_BIT:
            continue
        if _adjacent(_i, _j, 26):
            NBR26_MASK[_i] |= 1 << _j
        if _adjacent(_i, _j, 6):
            NBR6_MASK[_i] |= 1 << _j

# ---------------------------------------------------------------------------
# Octant Euler-characteristic lookup table.
#
# The 3x3x3 neighborhood splits into 8 overlapping 2x2x2 octants that share
# the center voxel.  Deleting the center removes those cells of the cubical
# complex that were supported only by the center; every such cell (vertex,
# edge, face, cube of the center voxel) can be attributed to octants with
# rational weights (vertex 1, edge 1/2, face 1/4, cube 1/8), giving an
# integer table after scaling by 8:
#
#   sum over octants of LUT[octant pattern] == 8 * (chi_before - chi_after)
#
# Local octant bit j encodes offset (oz, oy, ox) in {0,1}^3 along the octant
# direction, j = oz*4 + oy*2 + ox; bit 0 is the center voxel.

_OCTANT_DIRS = [(sz, sy, sx) for sz in (-1, 1) for sy in (-1, 1) for sx in (-1, 1)]

OCTANT_CELLS = []
for sz, sy, sx in _OCTANT_DIRS:
    cells = []
    for oz in (0, 1):
        for oy in (0, 1):
            for ox in (0, 1):
                cells.append(_bit(oz * sz, oy * sy, ox * sx))
    OCTANT_CELLS.append(cells)


def _build_octant_euler_table():
    lut = [0] * 256
    # Local cell groups whose emptiness decides whether a cell vanishes with
    # the center: j-bit sets for the three edges, three faces of the center
    # voxel that touch this octant's corner vertex.
    edge_groups = [(2, 4, 6), (1, 4, 5), (1, 2, 3)]  # along x, y, z
    face_bits = (1, 2, 4)                            # normals x, y, z
    for pat in range(256):
        if not pat & 1:
            continue  # center background: unused entries stay 0
        val = -1  # the center cube itself always vanishes (weight 1/8 -> -1)
        if pat == 1:
            val += 8  # corner vertex vanishes with the center
        for grp in edge_groups:
            if all(not pat >> b & 1 for b in grp):
                val -= 4
        for b in face_bits:
            if not pat >> b & 1:
                val += 2
        lut[pat] = val
    return lut


OCTANT_EULER_TABLE = _build_octant_euler_table()
_OCTANT_EULER_NP = np.asarray(OCTANT_EULER_TABLE, dtype=np.int16)
_OCTANT_CELLS_NP = np.asarray(OCTANT_CELLS, dtype=np.int64)


def euler_delta8(config: int) -> int:
    """8 * (local chi before deletion - after deletion) for a config."""
    s = 0
    for cells in OCTANT_CELLS:
        pat = 0
        for j in range(8):
            if config >> cells[j] & 1:
                pat |= 1 << j
        s += OCTANT_EULER_TABLE[pat]
    return s


def _flood(seed_region: int, region: int, masks) -> int:
    """Bitmask flood fill inside `region`, seeded with the lowest set bit of
    `seed_region`; returns the reached component."""
    comp = seed_region & -seed_region
    frontier = comp
    while frontier:
        grown = 0
        f = frontier
        while f:
            low = f & -f
            grown |= masks[low.bit_length() - 1]
            f ^= low
        frontier = grown & region & ~comp
        comp |= frontier
    return comp


def is_endpoint(config: int) -> bool:
    """Center has at most one foreground 26-neighbor."""
    if not config >> CENTER_BIT & 1:
        raise ValueError("center voxel must be foreground")
    return (config & NONCENTER_MASK).bit_count() <= 1


def is_simple_euler(config: int) -> bool:
    """Euler-characteristic simple-point test (26-fg, 6-bg)."""
    if not config >> CENTER_BIT & 1:
        raise ValueError("center voxel must be foreground")
    if euler_delta8(config) != 0:
        return False
    fg = config & NONCENTER_MASK
    if fg == 0:
        return False
    if _flood(fg, fg, NBR26_MASK) != fg:
        return False
    bg_faces = ~config & FACE_MASK
    if bg_faces == 0:
        return False
    bg = ~config & N18_MASK
    comp = _flood(bg_faces, bg, NBR6_MASK)
    return bg_faces & ~comp == 0


def is_simple_boolean(config: int) -> bool:
    """Boolean characterization: T26 == 1 and T6 == 1.

    Implemented as a direct component search over cell coordinates.
    """
    if not config >> CENTER_BIT & 1:
        raise ValueError("center voxel must be foreground")
    fg_cells = [i for i in range(27)
                if i != CENTER_BIT and config >> i & 1]
    t26 = _count_components(fg_cells, 26)
    if t26 != 1:
        return False
    bg_cells = [i for i in N18_BITS if not config >> i & 1]
    face_set = set(FACE_BITS)
    t6 = _count_components(bg_cells, 6, touching=face_set)
    return t6 == 1


def _count_components(cells, connectivity, touching=None):
    remaining = set(cells)
    count = 0
    while remaining:
        seed = remaining.pop()
        comp = {seed}
        stack = [seed]
        while stack:
            c = stack.pop()
            for n in list(remaining):
                if _adjacent(c, n, connectivity):
                    remaining.discard(n)
                    comp.add(n)
                    stack.append(n)
        if touching is None or comp & touching:
            count += 1
    return count


# ---------------------------------------------------------------------------
# Vectorized batch variants.  Input is an (N, 27) uint8 bit array (column i
# holds config bit i); output is an (N,) bool array.

_BIT_WEIGHTS = (np.int64(1) << np.arange(27, dtype=np.int64))
_NBR26_NP = np.asarray(NBR26_MASK, dtype=np.int64)
_NBR6_NP = np.asarray(NBR6_MASK, dtype=np.int64)
_ADJ26 = [[j for j in range(27)
           if j != CENTER_BIT and _adjacent(i, j, 26)] for i in range(27)]
_ADJ6_18 = [[j for j in N18_BITS if _adjacent(i, j, 6)] for i in range(27)]


def configs_to_bits(configs) -> np.ndarray:
    configs = np.asarray(configs, dtype=np.int64)
    return ((configs[:, None] >> np.arange(27)) & 1).astype(np.uint8)


def _bits_to_masks(bits: np.ndarray) -> np.ndarray:
    return bits.astype(np.int64) @ _BIT_WEIGHTS


def euler_delta8_batch(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[0]
    total = np.zeros(n, dtype=np.int32)
    for cells in _OCTANT_CELLS_NP:
        pat = np.zeros(n, dtype=np.intp)
        for j in range(8):
            pat |= bits[:, cells[j]].astype(np.intp) << j
        total += _OCTANT_EULER_NP[pat]
    return total


def _flood_batch(seed: np.ndarray, region: np.ndarray, masks_np) -> np.ndarray:
    comp = seed & -seed
    for _ in range(27):
        grown = comp.copy()
        for i in range(27):
            sel = (comp >> i) & 1
            grown |= sel * masks_np[i]
        new = grown & region
        if np.array_equal(new, comp):
            break
        comp = new
    return comp


def is_simple_euler_batch(bits: np.ndarray) -> np.ndarray:
    if not bits.size:
        return np.zeros(0, dtype=bool)
    dchi_ok = euler_delta8_batch(bits) == 0
    mask = _bits_to_masks(bits)
    fg = mask & NONCENTER_MASK
    comp = _flood_batch(fg, fg, _NBR26_NP)
    fg_ok = (fg != 0) & (comp == fg)
    bg = ~mask & N18_MASK
    bg_faces = ~mask & FACE_MASK
    comp6 = _flood_batch(bg_faces, bg, _NBR6_NP)
    bg_ok = (bg_faces != 0) & ((bg_faces & ~comp6) == 0)
    return dchi_ok & fg_ok & bg_ok


def _label_components_batch(bits, member, adj_lists, sentinel=27):
    """Min-label propagation over per-config cell subsets.

    `member` is an (N, 27) bool selecting which cells belong to the graph.
    Returns (N, 27) labels; non-member cells hold `sentinel`.
    """
    n = bits.shape[0]
    labels = np.where(member, np.arange(27, dtype=np.int8), np.int8(sentinel))
    while True:
        changed = False
        for i in range(27):
            adj = adj_lists[i]
            if not adj:
                continue
            best = labels[:, adj].min(axis=1)
            upd = member[:, i] & (best < labels[:, i])
            if upd.any():
                labels[upd, i] = best[upd]
                changed = True
        if not changed:
            return labels


def topological_numbers_batch(bits: np.ndarray):
    """Vectorized (T26, T6) per configuration."""
    n = bits.shape[0]
    member_fg = bits.astype(bool).copy()
    member_fg[:, CENTER_BIT] = False
    lab_fg = _label_components_batch(bits, member_fg, _ADJ26)
    roots = member_fg & (lab_fg == np.arange(27, dtype=np.int8))
    t26 = roots.sum(axis=1)

    member_bg = ~bits.astype(bool)
    in18 = np.zeros(27, dtype=bool)
    in18[N18_BITS] = True
    member_bg &= in18
    lab_bg = _label_components_batch(bits, member_bg, _ADJ6_18)
    face_labels = np.where(member_bg[:, FACE_BITS], lab_bg[:, FACE_BITS],
                           np.int8(27))
    s = np.sort(face_labels, axis=1)
    valid = s < 27
    distinct = valid & np.concatenate(
        [np.ones((n, 1), dtype=bool), s[:, 1:] != s[:, :-1]], axis=1)
    t6 = distinct.sum(axis=1)
    return t26, t6


def is_simple_boolean_batch(bits: np.ndarray) -> np.ndarray:
    if not bits.size:
        return np.zeros(0, dtype=bool)
    t26, t6 = topological_numbers_batch(bits)
    return (t26 == 1) & (t6 == 1)
