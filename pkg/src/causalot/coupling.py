"""Causal couplings between slice measures and causal evolutions.

Whether one measure causally precedes another is a transport
feasibility question: is there a coupling supported on the causal
relation?  It is decided here by maximum flow on the bipartite support
graph, carried out in exact integer arithmetic (every 64-bit float is a
dyadic rational, so the instance scales to integers without loss).  The
independent oracle is the finite Strassen condition: feasibility holds
iff no subset of the left support outweighs the causal future of itself
on the right.  Max-flow/min-cut makes the two routes provably agree; the
test suite checks that on thousands of instances anyway.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .measures import Coupling, SliceMeasure
from .spacetime import GEOM_ATOL
from .timefunc import canonical_time

UPSET_SUPPORT_CAP = 20

# Feasibility is decided on exact integer capacities; a relative deficiency
# up to this much of the total mass is forgiven, so that weights carrying
# float rounding dust (products of conditionals, merged marginals) do not
# flip boundary-tie instances.  Exactly representable instances whose true
# deficiency exceeds the threshold are still decided exactly.
FLOW_RTOL_NUM = 1
FLOW_RTOL_DEN = 10 ** 9


def _deficient(deficit, scale):
    """True when the integer flow deficit exceeds the relative tolerance."""
    return deficit * FLOW_RTOL_DEN > scale * FLOW_RTOL_NUM


@dataclass
class MeshSpec:
    """How an evolution's time grid was generated."""

    kind: str  # "dyadic" | "integer" | "explicit"
    a: float | None = None
    b: float | None = None
    depth: int | None = None

    DYADIC = "dyadic"
    INTEGER = "integer"
    EXPLICIT = "explicit"


def dyadic_times(a, b, depth):
    """The 2**depth + 1 dyadic subdivision times of [a, b]."""
    n = 1 << depth
    return [a + (b - a) * i / n for i in range(n + 1)]


class Evolution:
    """A time-indexed family of slice measures on the level sets of one
    time function, with strictly increasing times."""

    def __init__(self, st, entries, time_function=None, mesh=None):
        entries = tuple((float(t), mu) for t, mu in entries)
        if not entries:
            raise InputError("an evolution needs at least one slice")
        for (s, _), (t, _) in zip(entries, entries[1:]):
            if t <= s:
                raise InputError(f"slice times must strictly increase: {s} then {t}")
        self.spacetime = st
        self.entries = entries
        self.time_function = time_function or canonical_time()
        self.mesh = mesh or MeshSpec(MeshSpec.EXPLICIT)

    @property
    def times(self):
        return tuple(t for t, _ in self.entries)

    def measure_at_index(self, i):
        return self.entries[i][1]

    def validate_slices(self):
        """Every atom of the i-th slice must lie on the time function's
        level set at the i-th time; raises naming the offending atom."""
        st = self.spacetime
        tf = self.time_function
        for t, mu in self.entries:
            for e, _ in mu.atoms:
                v = tf.value(st, e)
                if abs(v - t) > GEOM_ATOL:
                    raise InputError(
                        f"atom {e} of the slice at {t} has time value {v}")

    def validate_mesh(self):
        mesh = self.mesh
        times = self.times
        if mesh.kind == MeshSpec.DYADIC:
            want = dyadic_times(mesh.a, mesh.b, mesh.depth)
            if len(times) != len(want) or any(abs(s - t) > 1e-12 for s, t in zip(times, want)):
                raise InputError(
                    f"times {list(times)} do not form the dyadic mesh of "
                    f"[{mesh.a}, {mesh.b}] at depth {mesh.depth}")
        elif mesh.kind == MeshSpec.INTEGER:
            for s, t in zip(times, times[1:]):
                if abs((t - s) - 1.0) > 1e-12:
                    raise InputError(f"integer grid needs unit steps, got {s} then {t}")

    def __len__(self):
        return len(self.entries)


# -- exact bipartite instances ---------------------------------------------------


def _int_weights(ms: SliceMeasure):
    """Weights as exact integers over a common power-of-two denominator."""
    fracs = [Fraction(w) for _, w in ms.atoms]
    scale = max(f.denominator for f in fracs)
    return [int(f * scale) for f in fracs], scale


class _Instance:
    """Exactly mass-balanced integer transport instance between two
    supports, with the causal adjacency."""

    def __init__(self, st, mu, nu, tol=None):
        if tol is None:
            tol = max(st.eps_caus, GEOM_ATOL)
        self.mu = mu
        self.nu = nu
        mu_int, mu_scale = _int_weights(mu)
        nu_int, nu_scale = _int_weights(nu)
        # Cross-multiplying balances the two totals exactly in integers,
        # absorbing the (at most 1e-12) mass discrepancy between the sides.
        self.supply = [w * sum(nu_int) for w in mu_int]
        self.demand = [w * sum(mu_int) for w in nu_int]
        self.scale = sum(mu_int) * sum(nu_int)
        # One capacity unit carries this much mu-mass.
        self._unit_den = mu_scale * sum(nu_int)
        self.adjacency = [
            [st.causally_precedes(p, q, tol) for q, _ in nu.atoms]
            for p, _ in mu.atoms
        ]

    def weight_from_units(self, units):
        return float(Fraction(units, self._unit_den))


def _max_flow(instance: _Instance):
    """Edmonds-Karp max flow on source -> left atoms -> right atoms -> sink
    with integer capacities; deterministic arc ordering by atom index.

    Returns (value, flows, reachable) where flows[i][j] is the flow pushed
    along the admissible arc i -> j and reachable is the set of left atoms
    reachable from the source in the final residual graph (a min-cut
    witness when the flow is not saturating).
    """
    m = len(instance.supply)
    n = len(instance.demand)
    flows = [[0] * n for _ in range(m)]
    used_supply = [0] * m
    used_demand = [0] * n
    while True:
        # BFS over the residual graph; nodes: source=-1, left i, right m+j
        parent = {}
        queue = deque()
        for i in range(m):
            if instance.supply[i] - used_supply[i] > 0:
                parent[i] = -1
                queue.append(i)
        found = None
        while queue and found is None:
            v = queue.popleft()
            if v < m:
                for j in range(n):
                    if instance.adjacency[v][j] and (m + j) not in parent:
                        parent[m + j] = v
                        if instance.demand[j] - used_demand[j] > 0:
                            found = m + j
                            break
                        queue.append(m + j)
            else:
                j = v - m
                for i in range(m):
                    if flows[i][j] > 0 and i not in parent:
                        parent[i] = v
                        queue.append(i)
        if found is None:
            reachable = {v for v in parent if v < m}
            value = sum(sum(row) for row in flows)
            return value, flows, reachable
        # bottleneck along the augmenting path
        path = []
        v = found
        while v != -1:
            path.append(v)
            v = parent[v]
        path.reverse()
        bottleneck = instance.supply[path[0]] - used_supply[path[0]]
        j_final = path[-1] - m
        bottleneck = min(bottleneck, instance.demand[j_final] - used_demand[j_final])
        for k in range(1, len(path) - 1):
            if path[k] >= m and path[k + 1] < m:
                bottleneck = min(bottleneck, flows[path[k + 1]][path[k] - m])
        used_supply[path[0]] += bottleneck
        used_demand[j_final] += bottleneck
        for k in range(len(path) - 1):
            v, w = path[k], path[k + 1]
            if v < m <= w:
                flows[v][w - m] += bottleneck
            elif w < m <= v:
                flows[w][v - m] -= bottleneck


@dataclass
class CutWitness:
    """A subset of the left support whose mass exceeds the mass of its
    causal future on the right: the certificate of infeasibility."""

    events: tuple
    mu_mass: float
    nu_future_mass: float


def find_causal_coupling(st, mu: SliceMeasure, nu: SliceMeasure):
    """Return a causal coupling of mu and nu, or None when none exists.

    Feasibility of a transport plan supported on the causal relation is
    decided by integer max flow (exact arithmetic, deficits below one part
    in 10^9 forgiven as rounding dust); the witness plan uses a fixed
    deterministic arc ordering so repeated runs reproduce it bit for bit.
    """
    inst = _Instance(st, mu, nu)
    value, flows, _ = _max_flow(inst)
    if _deficient(inst.scale - value, inst.scale):
        return None
    atoms = []
    for i, (p, _) in enumerate(mu.atoms):
        for j, (q, _) in enumerate(nu.atoms):
            if flows[i][j] > 0:
                atoms.append(((p, q), inst.weight_from_units(flows[i][j])))
    return Coupling(st, atoms, causal=True)


def cut_witness(st, mu: SliceMeasure, nu: SliceMeasure):
    """Min-cut certificate for an infeasible pair, or None if feasible."""
    inst = _Instance(st, mu, nu)
    value, _, reachable = _max_flow(inst)
    if not _deficient(inst.scale - value, inst.scale):
        return None
    events = tuple(mu.atoms[i][0] for i in sorted(reachable))
    mu_mass = math.fsum(mu.atoms[i][1] for i in sorted(reachable))
    future = {j for i in reachable for j in range(len(nu.atoms)) if inst.adjacency[i][j]}
    nu_mass = math.fsum(nu.atoms[j][1] for j in sorted(future))
    return CutWitness(events, mu_mass, nu_mass)


def dominates_on_upsets(st, mu: SliceMeasure, nu: SliceMeasure) -> bool:
    """Finite Strassen condition: for every subset A of the left support,
    the mass of A must not exceed the nu-mass of the causal future of A.
    Exhaustive over subsets; refuses supports larger than 20 atoms (use
    :func:`find_causal_coupling` there)."""
    m = len(mu.atoms)
    if m > UPSET_SUPPORT_CAP:
        raise InputError(
            f"support of size {m} exceeds the exhaustive cap {UPSET_SUPPORT_CAP}; "
            "use find_causal_coupling instead")
    inst = _Instance(st, mu, nu)
    n = len(nu.atoms)
    future_masks = [0] * n
    for j in range(n):
        for i in range(m):
            if inst.adjacency[i][j]:
                future_masks[j] |= 1 << i
    for mask in range(1, 1 << m):
        mu_mass = sum(inst.supply[i] for i in range(m) if mask & (1 << i))
        nu_mass = sum(inst.demand[j] for j in range(n) if future_masks[j] & mask)
        if _deficient(mu_mass - nu_mass, inst.scale):
            return False
    return True


def compose_couplings(st, first: Coupling, second: Coupling) -> Coupling:
    """Glue two couplings through their shared middle marginal.

    The result transports mass from the left marginal of the first to the
    right marginal of the second by conditioning on the middle; causal
    atoms compose by transitivity of the causal relation.
    """
    from .measures import slice_measures_equal

    mid_right = first.marginal(1)
    mid_left = second.marginal(0)
    if not slice_measures_equal(mid_right, mid_left, wtol=1e-9):
        raise InputError("middle marginals of the two couplings do not match")
    atoms = []
    for y, wy in mid_right.atoms:
        lefts = [(p, w) for (p, q), w in first.atoms if st.events_close(q, y, GEOM_ATOL)]
        rights = [(r, w) for (q, r), w in second.atoms if st.events_close(q, y, GEOM_ATOL)]
        for p, w1 in lefts:
            for r, w2 in rights:
                atoms.append(((p, r), w1 * w2 / wy))
    return Coupling(st, atoms, causal=first.causal and second.causal)


# -- evolutions -------------------------------------------------------------------


@dataclass
class StepResult:
    s: float
    t: float
    causal: bool
    witness: CutWitness | None = None


@dataclass
class EvolutionReport:
    causal: bool
    mode: str
    steps: tuple[StepResult, ...] = ()

    def __bool__(self):
        return self.causal

    @property
    def first_failure(self):
        for step in self.steps:
            if not step.causal:
                return step
        return None

    def to_dict(self):
        out = {"causal": self.causal, "mode": self.mode, "steps": []}
        for step in self.steps:
            entry = {"s": step.s, "t": step.t, "causal": step.causal}
            if step.witness is not None:
                entry["witness"] = {
                    "events": [[e.t, e.x] for e in step.witness.events],
                    "mu_mass": step.witness.mu_mass,
                    "nu_future_mass": step.witness.nu_future_mass,
                }
            out["steps"].append(entry)
        return out


def check_evolution(st, evo: Evolution, mode="consecutive") -> EvolutionReport:
    """Decide whether an evolution is causal.

    ``consecutive`` checks each neighbouring pair of slices, which
    suffices because witness couplings compose through the shared
    marginal; ``all-pairs`` checks every ordered pair.  The report carries
    a min-cut witness for the first failing pair.
    """
    if mode not in ("consecutive", "all-pairs"):
        raise InputError(f"unknown mode {mode!r}")
    evo.validate_slices()
    if mode == "consecutive":
        pairs = [(i, i + 1) for i in range(len(evo) - 1)]
    else:
        pairs = [(i, j) for i in range(len(evo)) for j in range(i, len(evo))]
    steps = []
    causal = True
    for i, j in pairs:
        s, mu = evo.entries[i]
        t, nu = evo.entries[j]
        witness = cut_witness(st, mu, nu)
        ok = witness is None
        steps.append(StepResult(s, t, ok, witness))
        if not ok:
            causal = False
    return EvolutionReport(causal, mode, tuple(steps))
