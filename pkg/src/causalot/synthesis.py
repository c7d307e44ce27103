"""From a causal evolution to a single measure on causal curves and back.

The forward construction works slab by slab: between consecutive slices
a witness causal coupling is computed, each coupling atom is lifted to
the deterministic causal geodesic between its endpoints (canonically
reparametrized onto the slab), and the per-slab curve measures are
folded together by measure concatenation.  The result reproduces every
input slice exactly as an evaluation marginal at its mesh time; between
mesh times the marginals are those of the synthesized curves, and mesh
refinement quantifies the difference (see the Lipschitz bound of
:func:`causalot.spacetime.causal_lipschitz_constant`).

Unbounded intervals are handled at a finite horizon of unit slabs with
the curves' static window extension; truncating a deeper horizon
projects exactly onto a shallower one, and this consistency is asserted
at every fold step.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, PreconditionError, VerificationError
from .spacetime import GEOM_ATOL, causal_geodesic
from .curves import Interval, canonicalize_compact, is_time_parametrized
from .measures import (Coupling, CurveMeasure, concat_measures,
                       curve_measures_equal, marginal_at,
                       pushforward_reparametrize, slice_measures_equal)
from .coupling import (Evolution, MeshSpec, check_evolution, cut_witness,
                       find_causal_coupling)


class NonCausalEvolutionError(PreconditionError):
    """Raised when synthesis is asked to realize a non-causal evolution;
    carries the violating step and its min-cut witness."""

    def __init__(self, s, t, witness):
        self.step = (s, t)
        self.witness = witness
        super().__init__(
            f"evolution is not causal on the step [{s}, {t}]: the subset "
            f"{[e for e in witness.events]} has mass {witness.mu_mass} but its "
            f"causal future only carries {witness.nu_future_mass}")


def lift_coupling(st, tf, omega: Coupling, a, b) -> CurveMeasure:
    """Lift a causal coupling between the level sets at a and b to a
    measure on curves over [a, b].

    Every coupling atom (p, q, w) becomes the canonical parametrization of
    the deterministic causal geodesic from p to q, carrying the weight;
    the evaluation marginals of the result are the coupling's marginals.
    """
    a, b = float(a), float(b)
    if a >= b:
        raise InputError(f"lift needs a < b, got [{a}, {b}]")
    atoms = []
    for (p, q), w in omega.atoms:
        vp = tf.value(st, p)
        vq = tf.value(st, q)
        if abs(vp - a) > GEOM_ATOL:
            raise PreconditionError(f"left atom {p} not on the level set {a} (value {vp})")
        if abs(vq - b) > GEOM_ATOL:
            raise PreconditionError(f"right atom {q} not on the level set {b} (value {vq})")
        if not st.causally_precedes(p, q, max(st.eps_caus, GEOM_ATOL)):
            raise PreconditionError(f"non-causal coupling atom ({p}, {q})")
        curve = canonicalize_compact(st, tf, causal_geodesic(st, p, q), a, b)
        atoms.append((curve, w))
    return CurveMeasure(st, atoms)


def _project(sigma: CurveMeasure, a, b) -> CurveMeasure:
    """Pushforward under restriction of curves to [a, b] of the domain."""
    st = sigma.spacetime
    return CurveMeasure(st, [(c.restrict(a, b), w) for c, w in sigma.atoms])


def _fold_slabs(st, tf, entries):
    """Fold witness-coupling lifts over consecutive slices into one curve
    measure on the spanned compact interval, asserting at every step that
    projecting back onto the previous window reproduces the previous fold."""
    if len(entries) < 2:
        raise InputError("need at least two slices to span an interval")
    sigma = None
    start = entries[0][0]
    for (s, mu), (t, nu) in zip(entries, entries[1:]):
        omega = find_causal_coupling(st, mu, nu)
        if omega is None:
            raise NonCausalEvolutionError(s, t, cut_witness(st, mu, nu))
        piece = lift_coupling(st, tf, omega, s, t)
        if sigma is None:
            sigma = piece
        else:
            grown = concat_measures(sigma, piece)
            if not curve_measures_equal(_project(grown, start, s), sigma):
                raise VerificationError(
                    f"projection onto [{start}, {s}] does not reproduce the previous fold")
            sigma = grown
    return sigma


def _assert_marginals(st, sigma, entries):
    for t, mu in entries:
        got = marginal_at(sigma, t)
        if not slice_measures_equal(got, mu):
            raise VerificationError(
                f"synthesized marginal at {t} does not match the input slice")


def synthesize_compact(st, tf, evo: Evolution) -> CurveMeasure:
    """Realize a causal evolution on a dyadic mesh of [a, b] as a curve
    measure whose evaluation marginals at every mesh time equal the input
    slices exactly.

    Marginals between mesh times are those of the synthesized curves; a
    finer mesh pins them down within the Lipschitz bound times the mesh
    width (the refinement study in the test suite quantifies this).
    """
    if len(evo) < 2:
        raise InputError("need at least two slices")
    if evo.mesh.kind != MeshSpec.DYADIC:
        raise InputError(f"compact synthesis expects a dyadic mesh, got {evo.mesh.kind!r}")
    evo.validate_mesh()
    evo.validate_slices()
    sigma = _fold_slabs(st, tf, evo.entries)
    _assert_marginals(st, sigma, evo.entries)
    return sigma


def synthesize_slabs(st, tf, evo: Evolution, horizon, direction="both") -> CurveMeasure:
    """Realize a causal evolution on a unit grid over a half-line or the
    full line, truncated at the given horizon of slabs.

    ``forward`` folds the first ``horizon`` slabs and returns curves on
    ``[t0, +inf)``; ``backward`` mirrors this; ``both`` folds ``horizon``
    slabs on each side of the grid time 0 and concatenates the two halves,
    returning full-line curves.  Beyond the folded window the curves
    continue statically; the projection consistency between horizons is
    asserted at every fold step.
    """
    if horizon < 1:
        raise InputError(f"horizon must be >= 1, got {horizon}")
    if direction not in ("forward", "backward", "both"):
        raise InputError(f"unknown direction {direction!r}")
    if evo.mesh.kind != MeshSpec.INTEGER:
        raise InputError(f"slab synthesis expects an integer grid, got {evo.mesh.kind!r}")
    evo.validate_mesh()
    evo.validate_slices()
    times = evo.times
    if direction == "forward":
        if len(times) < horizon + 1:
            raise InputError(f"grid has {len(times)} times, need {horizon + 1}")
        entries = evo.entries[:horizon + 1]
        sigma = _fold_slabs(st, tf, entries)
        out = CurveMeasure(st, [(c.with_domain(Interval.future(entries[0][0])), w)
                                for c, w in sigma.atoms])
    elif direction == "backward":
        if len(times) < horizon + 1:
            raise InputError(f"grid has {len(times)} times, need {horizon + 1}")
        entries = evo.entries[-(horizon + 1):]
        sigma = _fold_slabs(st, tf, entries)
        out = CurveMeasure(st, [(c.with_domain(Interval.past(entries[-1][0])), w)
                                for c, w in sigma.atoms])
    else:
        center = None
        for i, t in enumerate(times):
            if abs(t) <= 1e-12:
                center = i
                break
        if center is None:
            raise InputError("two-sided synthesis needs the grid time 0")
        if center < horizon or len(times) - 1 - center < horizon:
            raise InputError(
                f"grid supports horizons up to {min(center, len(times) - 1 - center)}, "
                f"requested {horizon}")
        entries_minus = evo.entries[center - horizon:center + 1]
        entries_plus = evo.entries[center:center + horizon + 1]
        minus = _fold_slabs(st, tf, entries_minus)
        plus = _fold_slabs(st, tf, entries_plus)
        minus = CurveMeasure(st, [(c.with_domain(Interval.past(0.0)), w)
                                  for c, w in minus.atoms])
        plus = CurveMeasure(st, [(c.with_domain(Interval.future(0.0)), w)
                                 for c, w in plus.atoms])
        out = concat_measures(minus, plus)
        entries = evo.entries[center - horizon:center + horizon + 1]
    _assert_marginals(st, out, entries)
    return out


def extract_coupling(sigma: CurveMeasure, s, t) -> Coupling:
    """Pushforward of a curve measure under evaluation at an ordered pair
    of parameters: the coupling of the two evaluation marginals carried by
    the curves themselves (causal because each atom pair lies on one
    causal curve)."""
    s, t = float(s), float(t)
    if s > t:
        raise InputError(f"need s <= t, got {s} > {t}")
    for tau in (s, t):
        if not sigma.domain.contains(tau, GEOM_ATOL):
            raise InputError(f"parameter {tau} outside domain {sigma.domain}")
    st_ = sigma.spacetime
    atoms = [((c.at(s), c.at(t)), w) for c, w in sigma.atoms]
    return Coupling(st_, atoms, causal=True)


def to_time_parametrized(st, tf, sigma: CurveMeasure) -> CurveMeasure:
    """Re-type a full-line curve measure as a measure on curves along
    which the time function reads its own parameter.

    Every atom must pass the membership check; a failing atom signals a
    slice-tagging bug upstream and aborts with that atom rather than
    returning a partial result.
    """
    if sigma.domain.kind != Interval.LINE:
        raise InputError("only full-line curve measures can be normalized")
    for c, _ in sigma.atoms:
        if not is_time_parametrized(st, tf, c):
            raise VerificationError(
                f"atom {c!r} is not parametrized by the time function "
                f"(value at 0 is {tf.value(st, c.at(0.0))}, at 1 is {tf.value(st, c.at(1.0))})")
    out = CurveMeasure(st, sigma.atoms)
    out.identity_time_function = tf
    return out


# -- observer invariance --------------------------------------------------------


@dataclass
class InvarianceReport:
    ok: bool
    horizon: int
    slices_tagged: bool
    evolution_causal: bool
    rawpaths_equal: bool
    marginals: tuple = ()

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {
            "ok": self.ok,
            "horizon": self.horizon,
            "slices_tagged": self.slices_tagged,
            "evolution_causal": self.evolution_causal,
            "rawpaths_equal": self.rawpaths_equal,
        }


def observer_invariance_report(st, tf1, tf2, evo: Evolution, horizon=None) -> InvarianceReport:
    """Synthesize an evolution under one foliation, reparametrize the
    worldline measure to a second foliation, and verify that the moved
    measure reads as a causal, correctly tagged evolution there while its
    unparametrized path multiset is untouched."""
    times = evo.times
    center = None
    for i, t in enumerate(times):
        if abs(t) <= 1e-12:
            center = i
            break
    if center is None:
        raise InputError("observer check needs the grid time 0")
    max_h = min(center, len(times) - 1 - center)
    horizon = max_h if horizon is None else int(horizon)
    sigma1 = synthesize_slabs(st, tf1, evo, horizon, "both")
    ups1 = to_time_parametrized(st, tf1, sigma1)
    moved = pushforward_reparametrize(ups1, tf1, tf2)

    taus = [float(k) for k in range(-horizon, horizon + 1)]
    slices_tagged = True
    entries = []
    for tau in taus:
        nu = marginal_at(moved, tau)
        if nu.tau is None or abs(nu.tau - tau) > GEOM_ATOL:
            slices_tagged = False
        for e, _ in nu.atoms:
            if abs(tf2.value(st, e) - tau) > GEOM_ATOL:
                slices_tagged = False
        entries.append((tau, nu))
    evo2 = Evolution(st, entries, time_function=tf2,
                     mesh=MeshSpec(MeshSpec.INTEGER))
    causal = bool(check_evolution(st, evo2, "consecutive")) if slices_tagged else False

    def path_multiset(sig):
        return sorted((tuple(st.event_key(e) for e in c.raw_path()), w)
                      for c, w in sig.atoms)

    rawpaths_equal = path_multiset(ups1) == path_multiset(moved)
    ok = slices_tagged and causal and rawpaths_equal
    return InvarianceReport(ok, horizon, slices_tagged, causal, rawpaths_equal,
                            marginals=tuple(entries))


# -- general interval requests ----------------------------------------------------


def geometric_times(a, b, n):
    """Times ``b + (a - b) / 2**i`` for i = 0..n: a geometric approach to b
    from inside [a, b)."""
    a, b = float(a), float(b)
    if a >= b:
        raise InputError(f"need a < b, got [{a}, {b}]")
    return [b + (a - b) / (1 << i) for i in range(n + 1)]


@dataclass
class SynthesisPlan:
    """A synthesis request: target interval (with optional open bounded
    ends), the mesh evolution, the slab horizon for unbounded or open
    ends, and the curve selector policy."""

    interval: Interval
    mesh: Evolution
    horizon: int = 1
    selector: str = "geodesic-lex"
    open_left: bool = False
    open_right: bool = False

    def __post_init__(self):
        if self.selector != "geodesic-lex":
            raise InputError(f"unknown selector {self.selector!r}; only geodesic-lex is built in")
        if (self.open_left or self.open_right) and self.interval.kind != Interval.COMPACT:
            raise InputError("open endpoint flags apply to bounded intervals only")


def _match_times(actual, wanted, what):
    if len(actual) != len(wanted) or any(abs(s - t) > 1e-12 for s, t in zip(actual, wanted)):
        raise InputError(f"evolution times {list(actual)} do not match the {what} "
                         f"mesh {list(wanted)}")


def run_plan(st, tf, plan: SynthesisPlan) -> CurveMeasure:
    """Dispatch a synthesis plan to the matching engine.

    Bounded open ends are served by the compact engine over a geometric
    mesh accumulating at the open endpoint, truncated at the plan horizon;
    half-lines and the full line go through unit slabs at the horizon.
    """
    iv = plan.interval
    evo = plan.mesh
    if iv.kind == Interval.FUTURE:
        return synthesize_slabs(st, tf, evo, plan.horizon, "forward")
    if iv.kind == Interval.PAST:
        return synthesize_slabs(st, tf, evo, plan.horizon, "backward")
    if iv.kind == Interval.LINE:
        return synthesize_slabs(st, tf, evo, plan.horizon, "both")
    if not (plan.open_left or plan.open_right):
        return synthesize_compact(st, tf, evo)
    evo.validate_slices()
    a, b = iv.a, iv.b
    if plan.open_right and not plan.open_left:
        _match_times(evo.times, geometric_times(a, b, plan.horizon), "right-open")
        return _fold_slabs(st, tf, evo.entries)
    if plan.open_left and not plan.open_right:
        wanted = [a + b - t for t in geometric_times(a, b, plan.horizon)][::-1]
        _match_times(evo.times, wanted, "left-open")
        return _fold_slabs(st, tf, evo.entries)
    mid = (a + b) / 2
    left_times = [a + b - t for t in geometric_times(mid, b, plan.horizon)][::-1]
    right_times = geometric_times(mid, b, plan.horizon)
    wanted = left_times[:-1] + right_times
    _match_times(evo.times, wanted, "two-sided geometric")
    k = len(left_times)
    left = _fold_slabs(st, tf, evo.entries[:k])
    right = _fold_slabs(st, tf, evo.entries[k - 1:])
    return concat_measures(left, right)
