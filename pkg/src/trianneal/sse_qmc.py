"""Stochastic series expansion QMC for the transverse-field Ising Hamiltonian.

Samples  Z = sum_alpha sum_strings  beta^n (M-n)!/M!  <alpha| prod_p H_p |alpha>
over fixed-length operator strings.  The Hamiltonian is decomposed into
unit vertices with non-negative matrix elements:

    SITE_DIAG(i)     constant h_i            (weight h_i)
    SITE_OFFDIAG(i)  h_i sigma^x_i           (weight h_i)
    BOND_DIAG(b)     J_b - J_b sz_a sz_b     (weight 2 J_b antiparallel, 0 parallel)

so the energy estimator is  <H> = -<n>/beta + sum_b J_b + sum_i h_i.
Parallel bonds carry no vertices at all; the constant shift per bond is
exactly J_b, keeping <n> minimal.

One sweep = one diagonal pass + one cluster pass (= 1 MCS).

Diagonal pass: at each identity slot an insertion is attempted with
probability min(1, beta*W/(M-n)) where W = sum_i h_i + sum_b 2 J_b is
the total candidate weight; the candidate is drawn proportionally to its
weight (alias table) and a bond candidate is rejected when the
propagated spins are parallel.  Every insertable candidate's actual
weight equals its sampling weight, so together with removals at
min(1, (M-n+1)/(beta*W)) the pass is exactly detailed-balanced.
Diagonal operators are removed uniformly; off-diagonal slots only
advance the propagated state.

Cluster pass: the multibranch cluster construction for transverse-field
Ising.  Bond vertices bind the four spin segments meeting at them into
one cluster; site vertices terminate cluster growth, and a site vertex
whose two sides land in clusters with different flip outcomes converts
SITE_DIAG <-> SITE_OFFDIAG.  Each cluster flips with probability 1/2
(sites without any vertex flip freely), which is rejection-free because
the two site-vertex types share the weight h_i.  Around the periodic
time circle of a site the flip flags alternate an even number of times,
so the off-diagonal count per site stays even and imaginary-time
periodicity of the propagated state is preserved by construction.
Clusters are tracked with a union-find over spin segments.

When a schedule drives a coupling to zero (seam cuts), vertices on that
bond acquire zero weight and must be purged before further sweeps;
schedules floor the transverse field at h_res = 1e-3 * J instead of
reaching zero so site vertices always keep positive weight.
"""

import numpy as np
from numba import njit, uint64

from .lattice import LatticeGeom
from .model import Couplings
from .rng import next_double, next_u64

NULL = 0
SITE_DIAG = 1
SITE_OFFDIAG = 2
BOND_DIAG = 3

RESIDUAL_FIELD_FRACTION = 1e-3
_GROW_PADDING = 16

# Operator encoding: one int32 per slot, argument*4 + type.  NULL slots
# are exactly 0.


@njit(cache=True, fastmath=True)
def _diagonal_pass(ops, alpha, work, bond_a, bond_b, prob, alias, w_total, n_sites, beta, n, state):
    m = ops.shape[0]
    k = prob.shape[0]
    bw = beta * w_total
    for i in range(work.shape[0]):
        work[i] = alpha[i]
    p = 0
    while p < m:
        op = ops[p]
        t = op & 3
        if t == NULL:
            # Walk the whole run of identity slots at once.  Each slot is
            # an independent Bernoulli trial with success probability
            # q = min(1, bw/(m-n)), which only changes when an insertion
            # is accepted, so q is hoisted out of the slot loop.  For
            # small q the gap to the next attempted insertion is sampled
            # geometrically (one log instead of many draws).
            run_end = p + 1
            while run_end < m and ops[run_end] == 0:
                run_end += 1
            if bw <= 0.0 or n >= m:
                p = run_end
                continue
            mn = m - n
            q = bw / mn
            use_geo = q < 0.2
            lgq = np.log1p(-q) if use_geo else 0.0
            while p < run_end:
                if q < 1.0:
                    if use_geo:
                        # 1-u is in (0, 1], so the log is finite; compare
                        # in float before converting to avoid overflow.
                        gap = np.log(1.0 - next_double(state)) / lgq
                        if gap >= run_end - p:
                            p = run_end
                            break
                        p += int(gap)
                    elif next_double(state) >= q:
                        p += 1
                        continue
                u = next_double(state) * k
                c = int(u)
                if u - c >= prob[c]:
                    c = alias[c]
                inserted = False
                if c < n_sites:
                    ops[p] = (c << 2) | SITE_DIAG
                    inserted = True
                else:
                    b = c - n_sites
                    if work[bond_a[b]] != work[bond_b[b]]:
                        ops[p] = (b << 2) | BOND_DIAG
                        inserted = True
                p += 1
                if inserted:
                    n += 1
                    if n >= m:
                        p = run_end
                        break
                    mn = m - n
                    q = bw / mn
                    use_geo = q < 0.2
                    lgq = np.log1p(-q) if use_geo else 0.0
            continue
        if t == SITE_OFFDIAG:
            i = op >> 2
            work[i] = -work[i]
        else:
            if m - n + 1 >= bw or next_double(state) * bw < (m - n + 1):
                ops[p] = 0
                n -= 1
        p += 1
    return n


@njit(cache=True, inline="always")
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def _cluster_pass(ops, alpha, bond_a, bond_b, parent, flip, cur, sv_slot, sv_below, sv_above, state):
    m = ops.shape[0]
    n_sites = alpha.shape[0]
    # Segment ids 0..n_sites-1 are the wrap segments crossing the time origin.
    for i in range(n_sites):
        cur[i] = i
        parent[i] = i
    nseg = n_sites
    nsv = 0
    for p in range(m):
        op = ops[p]
        t = op & 3
        if t == NULL:
            continue
        if t == BOND_DIAG:
            b = op >> 2
            u = bond_a[b]
            v = bond_b[b]
            r0 = _find(parent, cur[u])
            r1 = _find(parent, cur[v])
            # Attach larger root under smaller: parents then always point
            # to earlier ids, which makes the flatten pass below exact.
            if r0 > r1:
                r0, r1 = r1, r0
            if r1 != r0:
                parent[r1] = r0
            # The two outgoing segments join the same cluster.
            s2 = nseg
            s3 = nseg + 1
            nseg += 2
            parent[s2] = r0
            parent[s3] = r0
            cur[u] = s2
            cur[v] = s3
        else:
            i = op >> 2
            above = nseg
            nseg += 1
            parent[above] = above
            sv_slot[nsv] = p
            sv_below[nsv] = cur[i]
            sv_above[nsv] = above
            nsv += 1
            cur[i] = above
    # Close the imaginary-time circle: the segment after the last vertex
    # is the wrap segment itself.
    for i in range(n_sites):
        if cur[i] != i:
            ra = _find(parent, cur[i])
            rb = _find(parent, i)
            if ra > rb:
                ra, rb = rb, ra
            if ra != rb:
                parent[rb] = ra
    # One increasing-order pass fully flattens the forest (parents always
    # point to earlier ids) while assigning each cluster a coin and
    # copying it down to every segment, so the loops below use plain
    # array lookups.
    pool = next_u64(state)
    nbits = 64
    for s in range(nseg):
        r = parent[parent[s]]
        parent[s] = r
        if r == s:
            if nbits == 0:
                pool = next_u64(state)
                nbits = 64
            flip[s] = pool & uint64(1)
            pool >>= uint64(1)
            nbits -= 1
        else:
            flip[s] = flip[r]
    # Site vertices with opposite side outcomes convert diag <-> offdiag
    # (types 1 and 2 swap under xor 3).
    for j in range(nsv):
        if flip[sv_below[j]] != flip[sv_above[j]]:
            ops[sv_slot[j]] ^= 3
    for i in range(n_sites):
        if flip[i] == 1:
            alpha[i] = -alpha[i]


@njit(cache=True)
def _propagated(ops, alpha):
    out = alpha.copy()
    for p in range(ops.shape[0]):
        if ops[p] & 3 == SITE_OFFDIAG:
            i = ops[p] >> 2
            out[i] = -out[i]
    return out


@njit(cache=True)
def _build_alias(weights, prob, alias, scaled, small, large):
    """Vose alias table in place; zero-weight entries are never selected.

    Returns the weight total.  Rebuilt whenever the couplings change, so
    it must stay cheap (the schedules mutate couplings every glue step).
    """
    k = weights.shape[0]
    total = 0.0
    for i in range(k):
        total += weights[i]
    if total <= 0.0:
        for i in range(k):
            prob[i] = 0.0
            alias[i] = 0
        return 0.0
    ns = 0
    nl = 0
    inv = k / total
    for i in range(k):
        scaled[i] = weights[i] * inv
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        l = large[nl - 1]
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] -= 1.0 - scaled[s]
        if scaled[l] < 1.0:
            nl -= 1
            small[ns] = l
            ns += 1
    for i in range(nl):
        prob[large[i]] = 1.0
    for i in range(ns):
        prob[small[i]] = 1.0
    return total


class OperatorString:
    """SSE configuration: basis state alpha plus a fixed-length operator sequence.

    Owns the scratch buffers for the cluster pass and a cached candidate
    sampling table keyed on the couplings' mutation counter.  One
    instance per chain; never shared.
    """

    __slots__ = (
        "geom", "alpha", "ops", "n", "mcs",
        "_prob", "_alias", "_w_total", "_cached_key",
        "_wbuf", "_scaled", "_small", "_large",
        "_work", "_cur", "_parent", "_flip", "_sv_slot", "_sv_below", "_sv_above",
    )

    def __init__(self, geom: LatticeGeom, alpha: np.ndarray, m_init: int = 64):
        alpha = np.asarray(alpha, dtype=np.int8)
        if alpha.shape != (geom.n_sites,):
            raise ValueError("alpha must have one spin per site")
        self.geom = geom
        self.alpha = alpha.copy()
        self.ops = np.zeros(m_init, dtype=np.int32)
        self.n = 0
        self.mcs = 0
        k = geom.n_sites + geom.n_bonds
        self._cached_key = None
        self._prob = np.zeros(k, dtype=np.float64)
        self._alias = np.zeros(k, dtype=np.int32)
        self._w_total = 0.0
        self._wbuf = np.empty(k, dtype=np.float64)
        self._scaled = np.empty(k, dtype=np.float64)
        self._small = np.empty(k, dtype=np.int32)
        self._large = np.empty(k, dtype=np.int32)
        self._work = np.empty(geom.n_sites, dtype=np.int8)
        self._cur = np.empty(geom.n_sites, dtype=np.int32)
        self._alloc_buffers()

    @property
    def m(self) -> int:
        return self.ops.shape[0]

    @property
    def op_type(self) -> np.ndarray:
        return (self.ops & 3).astype(np.int8)

    @property
    def op_arg(self) -> np.ndarray:
        return (self.ops >> 2).astype(np.int32)

    def _alloc_buffers(self) -> None:
        cap = self.geom.n_sites + 2 * self.m + 4
        self._parent = np.empty(cap, dtype=np.int32)
        self._flip = np.empty(cap, dtype=np.uint8)
        self._sv_slot = np.empty(self.m, dtype=np.int32)
        self._sv_below = np.empty(self.m, dtype=np.int32)
        self._sv_above = np.empty(self.m, dtype=np.int32)

    def _table(self, couplings: Couplings):
        key = (id(couplings), couplings.version)
        if self._cached_key != key:
            n_sites = self.geom.n_sites
            self._wbuf[:n_sites] = couplings.h
            np.multiply(couplings.bond_value, 2.0, out=self._wbuf[n_sites:])
            self._w_total = float(
                _build_alias(self._wbuf, self._prob, self._alias, self._scaled, self._small, self._large)
            )
            self._cached_key = key
        return self._prob, self._alias, self._w_total

    def propagated(self) -> np.ndarray:
        """Basis state after applying the whole string; equals alpha when valid."""
        return _propagated(self.ops, self.alpha)


def diagonal_update(string: OperatorString, couplings: Couplings, beta: float, rng: np.ndarray) -> None:
    """One insertion/removal pass over all slots."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    prob, alias, w_total = string._table(couplings)
    string.n = int(
        _diagonal_pass(
            string.ops, string.alpha, string._work,
            string.geom.bond_a, string.geom.bond_b,
            prob, alias, w_total, string.geom.n_sites,
            beta, string.n, rng,
        )
    )


def cluster_update(string: OperatorString, rng: np.ndarray) -> None:
    """Multibranch cluster pass: flips spin clusters, converts site vertices."""
    _cluster_pass(
        string.ops, string.alpha,
        string.geom.bond_a, string.geom.bond_b,
        string._parent, string._flip, string._cur,
        string._sv_slot, string._sv_below, string._sv_above, rng,
    )


def adjust_cutoff(string: OperatorString, padding: int = _GROW_PADDING) -> None:
    """Grow M when the string is more than 3/4 full; never shrinks.

    Meant for equilibration phases; appended identity slots keep the
    configuration valid.
    """
    if string.n <= 0.75 * string.m:
        return
    new_m = int(np.ceil(string.n * 4.0 / 3.0)) + padding
    grow = new_m - string.m
    string.ops = np.concatenate([string.ops, np.zeros(grow, dtype=np.int32)])
    string._alloc_buffers()


def qmc_sweep(string: OperatorString, couplings: Couplings, beta: float, rng: np.ndarray) -> None:
    """One MCS: diagonal pass then cluster pass."""
    diagonal_update(string, couplings, beta, rng)
    cluster_update(string, rng)
    string.mcs += 1


def constant_shift(couplings: Couplings) -> float:
    """Total constant added by the vertex decomposition: sum_b J_b + sum_i h_i."""
    return float(couplings.bond_value.sum() + couplings.h.sum())


def measure_energy(string: OperatorString, couplings: Couplings, beta: float) -> float:
    """Instantaneous estimator of <H_QA>: average n over sweeps to reduce noise."""
    return -string.n / beta + constant_shift(couplings)


def measure_sx_total(string: OperatorString, couplings: Couplings, beta: float) -> float:
    """Estimator of <sum_i sigma^x_i> from the off-diagonal vertex density.

    The field enters the Hamiltonian with a positive coefficient, so the
    thermal expectation is negative; the off-diagonal count measures its
    magnitude.
    """
    off = (string.ops & 3) == SITE_OFFDIAG
    if not np.any(off):
        return 0.0
    h = couplings.h[string.ops[off] >> 2]
    if np.any(h <= 0):
        raise ValueError("off-diagonal vertex on a zero-field site")
    return -float(np.sum(1.0 / h) / beta)


def purge_zero_weight(string: OperatorString, couplings: Couplings) -> int:
    """Drop bond vertices whose coupling was driven to zero; returns count.

    Required after severing a seam: a configuration containing such a
    vertex has zero weight under the new Hamiltonian.  Removing diagonal
    vertices never breaks imaginary-time periodicity.
    """
    dead = ((string.ops & 3) == BOND_DIAG) & (couplings.bond_value[string.ops >> 2] == 0.0)
    k = int(np.count_nonzero(dead))
    if k:
        string.ops[dead] = 0
        string.n -= k
    return k
