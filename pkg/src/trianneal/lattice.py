"""Triangular-lattice geometry with periodic boundaries.

Sites live on an L_x by L_y grid, site (x, y) <-> index y*L_x + x.  Each
site has six neighbors: (x+-1, y) along the chains and (x, y+-1),
(x+1, y+1), (x-1, y-1) between chains.  The diagonal direction is fixed
to (+1, +1); the dimer mapping and the seam geometry both rely on this
convention staying put.

Bonds are classified HORIZONTAL (within a chain) or INTERCHAIN, and the
elementary triangles are enumerated so the local constraint (no triangle
with three equal spins) can be checked directly.  Seams describe which
bonds a sweeping-annealing cut severs and which it softens.
"""

from dataclasses import dataclass, field

import numpy as np

HORIZONTAL = 0
INTERCHAIN = 1


@dataclass(frozen=True)
class LatticeGeom:
    """Immutable site/bond/triangle tables for one lattice size.

    All arrays are read-only; one instance can be shared freely across
    concurrent chains.
    """

    lx: int
    ly: int
    n_sites: int
    bond_a: np.ndarray          # (3N,) int32, bond endpoint, a < b
    bond_b: np.ndarray          # (3N,) int32
    bond_class: np.ndarray      # (3N,) int8, HORIZONTAL or INTERCHAIN
    triangles: np.ndarray       # (2N, 3) int32 site indices
    triangle_bonds: np.ndarray  # (2N, 3) int32 bond indices
    bond_triangles: np.ndarray  # (3N, 2) int32, the two triangles of each bond
    site_bonds: np.ndarray      # (N, 6) int32, bonds incident to each site
    site_nbrs: np.ndarray       # (N, 6) int32, neighbor across site_bonds[i, k]

    @property
    def n_bonds(self) -> int:
        return self.bond_a.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def site(self, x: int, y: int) -> int:
        return (y % self.ly) * self.lx + (x % self.lx)


@dataclass(frozen=True)
class Seam:
    """Cut geometry at one column.

    `severed` holds the L_y horizontal bonds crossing the vertical line
    between columns c and c+1 (set to zero coupling during a cut);
    `softened` holds every interchain bond incident to a site in column
    c or c+1 (set to the boundary coupling J_e during a cut).
    """

    column: int
    severed: np.ndarray = field(repr=False)   # (L_y,) int32 bond indices
    softened: np.ndarray = field(repr=False)  # int32 bond indices


def build(lx: int, ly: int) -> LatticeGeom:
    """Construct the periodic triangular lattice of size lx by ly.

    Sizes below 3 are rejected: wrap-around would duplicate bonds and
    degenerate the triangle enumeration.
    """
    if lx < 3 or ly < 3:
        raise ValueError(f"lattice must be at least 3x3, got {lx}x{ly}")
    n = lx * ly

    def sid(x, y):
        return (y % ly) * lx + (x % lx)

    bond_index: dict[tuple[int, int], int] = {}
    bond_a, bond_b, bond_class = [], [], []

    def add_bond(i, j, cls):
        a, b = (i, j) if i < j else (j, i)
        key = (a, b)
        if key in bond_index:
            raise AssertionError(f"duplicate bond {key}")
        bond_index[key] = len(bond_a)
        bond_a.append(a)
        bond_b.append(b)
        bond_class.append(cls)

    for y in range(ly):
        for x in range(lx):
            i = sid(x, y)
            add_bond(i, sid(x + 1, y), HORIZONTAL)
            add_bond(i, sid(x, y + 1), INTERCHAIN)
            add_bond(i, sid(x + 1, y + 1), INTERCHAIN)

    def bid(i, j):
        return bond_index[(i, j) if i < j else (j, i)]

    # Two triangles per site: "up" rests on a horizontal bond from below,
    # "down" hangs from one above.  Each contains exactly one horizontal
    # and two interchain bonds.
    triangles, triangle_bonds = [], []
    for y in range(ly):
        for x in range(lx):
            i = sid(x, y)
            up = (i, sid(x + 1, y), sid(x + 1, y + 1))
            down = (i, sid(x, y + 1), sid(x + 1, y + 1))
            for tri in (up, down):
                a, b, c = tri
                triangles.append(tri)
                triangle_bonds.append((bid(a, b), bid(b, c), bid(a, c)))

    tri_arr = np.asarray(triangles, dtype=np.int32)
    tri_bonds = np.asarray(triangle_bonds, dtype=np.int32)

    bond_tris = np.full((len(bond_a), 2), -1, dtype=np.int32)
    for t, bonds in enumerate(tri_bonds):
        for b in bonds:
            slot = 0 if bond_tris[b, 0] < 0 else 1
            assert bond_tris[b, slot] < 0, "bond in more than two triangles"
            bond_tris[b, slot] = t

    site_bonds = np.full((n, 6), -1, dtype=np.int32)
    site_nbrs = np.full((n, 6), -1, dtype=np.int32)
    fill = np.zeros(n, dtype=np.int64)
    for b, (i, j) in enumerate(zip(bond_a, bond_b)):
        for s, o in ((i, j), (j, i)):
            site_bonds[s, fill[s]] = b
            site_nbrs[s, fill[s]] = o
            fill[s] += 1
    assert np.all(fill == 6), "every site must have coordination 6"

    arrays = dict(
        bond_a=np.asarray(bond_a, dtype=np.int32),
        bond_b=np.asarray(bond_b, dtype=np.int32),
        bond_class=np.asarray(bond_class, dtype=np.int8),
        triangles=tri_arr,
        triangle_bonds=tri_bonds,
        bond_triangles=bond_tris,
        site_bonds=site_bonds,
        site_nbrs=site_nbrs,
    )
    for arr in arrays.values():
        arr.setflags(write=False)
    return LatticeGeom(lx=lx, ly=ly, n_sites=n, **arrays)


def make_seams(geom: LatticeGeom, n: int) -> list[Seam]:
    """Equally spaced cut positions; n must divide L_x.

    Unequal spacing would break the translational symmetry the sweeping
    schedule relies on, so non-divisors are rejected.
    """
    if n < 1 or n > geom.lx:
        raise ValueError(f"seam count must be in 1..{geom.lx}, got {n}")
    if geom.lx % n != 0:
        raise ValueError(f"seam count {n} does not divide L_x={geom.lx}")

    lookup = {}
    for b in range(geom.n_bonds):
        lookup[(int(geom.bond_a[b]), int(geom.bond_b[b]))] = b

    def bid(i, j):
        return lookup[(i, j) if i < j else (j, i)]

    seams = []
    spacing = geom.lx // n
    for k in range(n):
        c = k * spacing
        severed = np.asarray(
            [bid(geom.site(c, y), geom.site(c + 1, y)) for y in range(geom.ly)],
            dtype=np.int32,
        )
        cols = {c % geom.lx, (c + 1) % geom.lx}
        softened = np.asarray(
            sorted(
                b
                for b in range(geom.n_bonds)
                if geom.bond_class[b] == INTERCHAIN
                and (int(geom.bond_a[b]) % geom.lx in cols or int(geom.bond_b[b]) % geom.lx in cols)
            ),
            dtype=np.int32,
        )
        severed.setflags(write=False)
        softened.setflags(write=False)
        seams.append(Seam(column=c, severed=severed, softened=softened))
    return seams
