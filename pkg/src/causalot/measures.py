"""Finitely supported probability measures on events and on curves.

All measures are finite lists of (atom, weight) pairs with weights
summing to one; atom identity is structural equality at tolerance 1e-9,
and equal atoms are merged by weight addition (compensated summation
throughout).  Disintegration is exact discrete conditioning, and the
concatenation of two curve measures over a shared junction marginal is
the finite sum of fiberwise product measures pushed through curve
concatenation.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linprog

from .errors import InputError, PreconditionError
from .spacetime import GEOM_ATOL
from .curves import Interval, concat, curves_close, reparametrize
from .timefunc import canonical_time

MASS_ATOL = 1e-12


def _merge(items, key, close, tol):
    """Sort (atom, weight) pairs by key and merge adjacent equal atoms."""
    pairs = sorted(items, key=lambda aw: key(aw[0]))
    out = []
    for atom, w in pairs:
        if w <= 0:
            raise InputError(f"weights must be positive, got {w} at {atom!r}")
        if out and close(out[-1][0], atom, tol):
            out[-1][1].append(w)
        else:
            out.append([atom, [w]])
    return tuple((atom, math.fsum(ws)) for atom, ws in out)


class SliceMeasure:
    """Probability measure on events, optionally tagged as living on a
    level set of a time function."""

    def __init__(self, st, atoms, time_function=None, tau=None):
        st_atoms = [(st.event(e.t, e.x), float(w)) for e, w in atoms]
        self.spacetime = st
        self.atoms = _merge(st_atoms, st.event_key, st.events_close, GEOM_ATOL)
        self.time_function = time_function
        self.tau = None if tau is None else float(tau)
        total = math.fsum(w for _, w in self.atoms)
        if abs(total - 1.0) > MASS_ATOL:
            raise InputError(f"weights must sum to 1 within {MASS_ATOL}, got {total!r}")
        if self.tau is not None:
            tf = time_function or canonical_time()
            for e, _ in self.atoms:
                v = tf.value(st, e)
                if abs(v - self.tau) > GEOM_ATOL:
                    raise InputError(
                        f"atom {e} has time value {v}, not on the level set {self.tau}")

    def weight_of(self, event, tol=GEOM_ATOL):
        for e, w in self.atoms:
            if self.spacetime.events_close(e, event, tol):
                return w
        return 0.0

    def support(self):
        return tuple(e for e, _ in self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __repr__(self):
        return f"SliceMeasure({len(self.atoms)} atoms, tau={self.tau})"


class CurveMeasure:
    """Probability measure on curves sharing one parameter domain."""

    def __init__(self, st, atoms):
        atoms = tuple((c, float(w)) for c, w in atoms)
        if not atoms:
            raise InputError("a curve measure needs at least one atom")
        domain = atoms[0][0].domain
        for c, _ in atoms:
            if c.domain != domain:
                raise InputError(
                    f"atom domains differ: {c.domain} vs {domain}")
        self.spacetime = st
        self.domain = domain
        self.atoms = _merge(atoms, lambda c: c.sort_key(),
                            lambda c1, c2, tol: curves_close(c1, c2, tol), GEOM_ATOL)
        total = math.fsum(w for _, w in self.atoms)
        if abs(total - 1.0) > MASS_ATOL:
            raise InputError(f"weights must sum to 1 within {MASS_ATOL}, got {total!r}")

    def support(self):
        return tuple(c for c, _ in self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __repr__(self):
        return f"CurveMeasure({len(self.atoms)} atoms on {self.domain})"


class Coupling:
    """Joint measure on event pairs with prescribed marginals; when built
    as causal, every atom pair must be causally related."""

    def __init__(self, st, atoms, left=None, right=None, causal=True):
        atoms = [((st.event(p.t, p.x), st.event(q.t, q.x)), float(w))
                 for (p, q), w in atoms]
        key = lambda pq: st.event_key(pq[0]) + st.event_key(pq[1])
        close = lambda a, b, tol: (st.events_close(a[0], b[0], tol)
                                   and st.events_close(a[1], b[1], tol))
        self.spacetime = st
        self.atoms = _merge(atoms, key, close, GEOM_ATOL)
        self.causal = bool(causal)
        total = math.fsum(w for _, w in self.atoms)
        if abs(total - 1.0) > MASS_ATOL:
            raise InputError(f"weights must sum to 1 within {MASS_ATOL}, got {total!r}")
        if self.causal:
            tol = max(st.eps_caus, GEOM_ATOL)
            for (p, q), _ in self.atoms:
                if not st.causally_precedes(p, q, tol):
                    raise InputError(f"atom pair ({p}, {q}) is not causally related")
        self.left = left if left is not None else self.marginal(0)
        self.right = right if right is not None else self.marginal(1)
        for ref, side in ((self.left, 0), (self.right, 1)):
            got = self.marginal(side)
            if not slice_measures_equal(ref, got, wtol=MASS_ATOL):
                raise InputError(f"marginal {side} does not match its reference measure")

    def marginal(self, side):
        st = self.spacetime
        return SliceMeasure(st, [(pq[side], w) for pq, w in self.atoms])

    def __len__(self):
        return len(self.atoms)

    def __repr__(self):
        return f"Coupling({len(self.atoms)} atoms, causal={self.causal})"


def slice_measures_equal(m1: SliceMeasure, m2: SliceMeasure, tol=GEOM_ATOL, wtol=MASS_ATOL):
    if len(m1.atoms) != len(m2.atoms):
        return False
    st = m1.spacetime
    return all(st.events_close(e1, e2, tol) and abs(w1 - w2) <= wtol
               for (e1, w1), (e2, w2) in zip(m1.atoms, m2.atoms))


def curve_measures_equal(s1: CurveMeasure, s2: CurveMeasure, tol=GEOM_ATOL, wtol=MASS_ATOL):
    if len(s1.atoms) != len(s2.atoms):
        return False
    return all(curves_close(c1, c2, tol) and abs(w1 - w2) <= wtol
               for (c1, w1), (c2, w2) in zip(s1.atoms, s2.atoms))


# -- pushforwards and conditioning --------------------------------------------


def marginal_at(sigma: CurveMeasure, t) -> SliceMeasure:
    """Pushforward of a curve measure under evaluation at parameter t."""
    t = float(t)
    if not sigma.domain.contains(t, GEOM_ATOL):
        raise InputError(f"parameter {t} outside common domain {sigma.domain}")
    st = sigma.spacetime
    atoms = [(c.at(t), w) for c, w in sigma.atoms]
    tf = sigma.atoms[0][0].time_function or canonical_time()
    tau = None
    if all(c.pace is not None and (c.time_function or canonical_time()).same_as(tf)
           for c, _ in sigma.atoms):
        values = [tf.value(st, e) for e, _ in atoms]
        if max(values) - min(values) <= GEOM_ATOL:
            tau = values[0]
    return SliceMeasure(st, atoms, time_function=tf if tau is not None else None, tau=tau)


def disintegrate(sigma: CurveMeasure, at):
    """Condition a curve measure on its value at one parameter.

    Returns ``(base, conditionals)`` where ``base`` is the evaluation
    marginal and ``conditionals`` lists, for each base atom x, the
    renormalized restriction of sigma to the curves passing through x.
    The mixture of the conditionals against the base reproduces sigma
    exactly.
    """
    at = float(at)
    base = marginal_at(sigma, at)
    st = sigma.spacetime
    conditionals = []
    for x, wx in base.atoms:
        fiber = [(c, w) for c, w in sigma.atoms if st.events_close(c.at(at), x, GEOM_ATOL)]
        conditionals.append((x, CurveMeasure(st, [(c, w / wx) for c, w in fiber])))
    return base, conditionals


def concat_measures(s1: CurveMeasure, s2: CurveMeasure) -> CurveMeasure:
    """Concatenate two curve measures over their shared junction marginal.

    Requires the evaluation marginals at the junction to agree; the result
    mixes, fiber by fiber, the product of the two conditional measures
    pushed through curve concatenation.  Its evaluation marginal equals
    s1's strictly before the junction, the shared marginal at it, and s2's
    strictly after.
    """
    st = s1.spacetime
    if s1.domain.kind not in (Interval.COMPACT, Interval.PAST):
        raise InputError(f"left measure must live on curves bounded above, got {s1.domain}")
    if s2.domain.kind not in (Interval.COMPACT, Interval.FUTURE):
        raise InputError(f"right measure must live on curves bounded below, got {s2.domain}")
    b = s1.domain.b
    if abs(b - s2.domain.a) > GEOM_ATOL:
        raise InputError(f"domains do not meet: {s1.domain} then {s2.domain}")
    nu1 = marginal_at(s1, b)
    nu2 = marginal_at(s2, s2.domain.a)
    if not slice_measures_equal(nu1, nu2, wtol=MASS_ATOL):
        detail = [(e, w) for e, w in nu1.atoms], [(e, w) for e, w in nu2.atoms]
        raise PreconditionError(
            f"junction marginals differ at {b}: {detail[0]} vs {detail[1]}")
    _, fibers1 = disintegrate(s1, b)
    _, fibers2 = disintegrate(s2, s2.domain.a)
    lookup2 = list(fibers2)
    atoms = []
    for (x, cond1), wx in zip(fibers1, (w for _, w in nu1.atoms)):
        cond2 = None
        for y, cand in lookup2:
            if st.events_close(x, y, GEOM_ATOL):
                cond2 = cand
                break
        if cond2 is None:
            raise PreconditionError(f"no fiber over {x} in the right measure")
        for c1, w1 in cond1.atoms:
            for c2, w2 in cond2.atoms:
                atoms.append((concat(c1, c2), wx * w1 * w2))
    return CurveMeasure(st, atoms)


def pushforward_reparametrize(sigma: CurveMeasure, tf1, tf2) -> CurveMeasure:
    """Reparametrize every atom of a full-line curve measure from the
    first time function's foliation to the second's, weights carried."""
    st = sigma.spacetime
    return CurveMeasure(st, [(reparametrize(st, c, tf1, tf2), w) for c, w in sigma.atoms])


# -- transport distance ---------------------------------------------------------


def transport_distance(st, mu: SliceMeasure, nu: SliceMeasure) -> float:
    """1-Wasserstein distance between two slice measures w.r.t. the
    Riemannian product distance, by exact linear programming over the
    finite bipartite support."""
    ps = mu.atoms
    qs = nu.atoms
    cost = np.array([[st.riemannian_distance(p, q) for q, _ in qs] for p, _ in ps])
    if len(ps) == 1:
        return float(np.dot(cost[0], [w for _, w in qs]))
    if len(qs) == 1:
        return float(np.dot(cost[:, 0], [w for _, w in ps]))
    m, n = cost.shape
    a_eq = []
    b_eq = []
    for i in range(m):
        row = np.zeros((m, n))
        row[i, :] = 1.0
        a_eq.append(row.ravel())
        b_eq.append(ps[i][1])
    for j in range(n - 1):  # last column constraint is redundant
        col = np.zeros((m, n))
        col[:, j] = 1.0
        a_eq.append(col.ravel())
        b_eq.append(qs[j][1])
    res = linprog(cost.ravel(), A_eq=np.array(a_eq), b_eq=np.array(b_eq),
                  bounds=(0, None), method="highs")
    if not res.success:
        raise PreconditionError(f"transport LP failed: {res.message}")
    return max(float(res.fun), 0.0)
