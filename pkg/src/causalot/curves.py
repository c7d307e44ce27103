"""Time-affine causal curves and their exact piecewise-linear algebra.

A stored curve is piecewise geodesic: a finite list of breakpoints
``(parameter, event)`` with constant-optical-speed motion and linear
coordinate time between consecutive breakpoints.  Constructors refine
every leg at vertex crossings, so on the graph backend each stored
segment stays on a single edge.  As a consequence the composition of any
time function of the family with a stored curve is piecewise linear with
kinks only at breakpoints, and every reparametrization below is computed
by exact piecewise-linear inversion rather than iteration.

Curves over unbounded intervals store a finite breakpoint window and
extend beyond it statically: the spatial point freezes at the window
endpoint while coordinate time keeps growing at the rate that keeps the
parametrizing time function affine along the curve.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

from .errors import InputError, PreconditionError
from .spacetime import Event, GEOM_ATOL, Spacetime
from .timefunc import TimeFunction, canonical_time, validate as validate_tf

AFFINITY_ATOL = 1e-9
ENDPOINT_ATOL = 1e-9


@dataclass(frozen=True)
class Interval:
    """Parameter domain of a curve: compact, half-line, or the full line."""

    kind: str  # "compact" | "future" | "past" | "line"
    a: float | None = None
    b: float | None = None

    COMPACT = "compact"
    FUTURE = "future"   # [a, +inf)
    PAST = "past"       # (-inf, b]
    LINE = "line"

    @classmethod
    def compact(cls, a, b):
        a, b = float(a), float(b)
        if a > b:
            raise InputError(f"compact interval needs a <= b, got [{a}, {b}]")
        return cls(cls.COMPACT, a, b)

    @classmethod
    def future(cls, a):
        return cls(cls.FUTURE, float(a), None)

    @classmethod
    def past(cls, b):
        return cls(cls.PAST, None, float(b))

    @classmethod
    def line(cls):
        return cls(cls.LINE, None, None)

    def contains(self, tau, tol=0.0):
        if self.kind == self.COMPACT:
            return self.a - tol <= tau <= self.b + tol
        if self.kind == self.FUTURE:
            return tau >= self.a - tol
        if self.kind == self.PAST:
            return tau <= self.b + tol
        return True

    def __str__(self):
        return {
            self.COMPACT: f"[{self.a}, {self.b}]",
            self.FUTURE: f"[{self.a}, +inf)",
            self.PAST: f"(-inf, {self.b}]",
            self.LINE: "R",
        }[self.kind]


class RawPath:
    """An unparametrized causal path: events p0 < p1 < ... with geodesic
    interpolation, plus optional static-extension flags at either end."""

    def __init__(self, st: Spacetime, events, extend_past=False, extend_future=False):
        events = tuple(st.event(e.t, e.x) for e in events)
        if not events:
            raise InputError("a path needs at least one event")
        tol = max(st.eps_caus, GEOM_ATOL)
        for p, q in zip(events, events[1:]):
            if q.t <= p.t:
                raise InputError(f"path events out of time order: {p} then {q}")
            if not st.causally_precedes(p, q, tol):
                raise InputError(f"consecutive path events not causally related: {p}, {q}")
        self.spacetime = st
        self.events = events
        self.extend_past = bool(extend_past)
        self.extend_future = bool(extend_future)


def _refine_leg(st, e1, e2):
    """Interior events of the leg e1 -> e2 at vertex crossings.

    The leg runs along the deterministic shortest track at constant
    optical speed with linear coordinate time; returned events exclude
    both endpoints.
    """
    track = st.geodesic_track(e1.x, e2.x)
    if len(track) <= 2:
        return []
    lengths = [st.segment_length(track[i], track[i + 1]) for i in range(len(track) - 1)]
    total = math.fsum(lengths)
    out = []
    run = 0.0
    for i in range(1, len(track) - 1):
        run += lengths[i - 1]
        frac = run / total
        out.append(Event(e1.t + frac * (e2.t - e1.t), track[i]))
    return out


def _materialize(st, events):
    """Refined event chain of a path: inputs plus all vertex crossings."""
    chain = [events[0]]
    for e1, e2 in zip(events, events[1:]):
        chain.extend(_refine_leg(st, e1, e2))
        chain.append(e2)
    return chain


class CausalCurve:
    """Piecewise-geodesic causal curve over an interval.

    ``pace`` is the constant rate at which ``time_function`` increases
    along the curve; ``pace is None`` flags a curve that is not
    time-affine (such curves still support evaluation, restriction and
    causality checks, but not reparametrization).
    """

    def __init__(self, st, domain, breakpoints, pace=None, time_function=None,
                 _checked=False):
        self.spacetime = st
        self.domain = domain
        self.breakpoints = tuple((float(tau), e) for tau, e in breakpoints)
        self.pace = None if pace is None else float(pace)
        self.time_function = time_function
        self._params = tuple(tau for tau, _ in self.breakpoints)
        if not _checked:
            self._validate()

    # -- construction and validation ----------------------------------------

    def _validate(self):
        st = self.spacetime
        if not self.breakpoints:
            raise InputError("a curve needs at least one breakpoint")
        for (s, p), (t, q) in zip(self.breakpoints, self.breakpoints[1:]):
            if t <= s:
                raise InputError(f"breakpoint parameters must increase: {s} then {t}")
            if q.t <= p.t:
                raise InputError(f"coordinate time must increase: {p} then {q}")
            # ensures evaluation is well defined on the graph backend
            st.segment_length(p.x, q.x)
        lo, hi = self._params[0], self._params[-1]
        if self.domain.kind == Interval.COMPACT:
            if abs(lo - self.domain.a) > 1e-12 or abs(hi - self.domain.b) > 1e-12:
                raise InputError(
                    f"compact curve breakpoints [{lo}, {hi}] must span the domain {self.domain}")
        elif self.domain.kind == Interval.FUTURE:
            if abs(lo - self.domain.a) > 1e-12:
                raise InputError("half-line curve must start at the domain endpoint")
        elif self.domain.kind == Interval.PAST:
            if abs(hi - self.domain.b) > 1e-12:
                raise InputError("half-line curve must end at the domain endpoint")
        if self.pace is not None:
            if self.pace <= 0:
                raise InputError(f"pace must be positive, got {self.pace}")
            tf = self.time_function or canonical_time()
            v0 = tf.value(st, self.breakpoints[0][1])
            t0 = self._params[0]
            for tau, e in self.breakpoints:
                expected = v0 + self.pace * (tau - t0)
                if abs(tf.value(st, e) - expected) > AFFINITY_ATOL:
                    raise InputError(
                        f"breakpoint {e} at parameter {tau} violates time-affinity "
                        f"(value {tf.value(st, e)}, expected {expected})")

    @classmethod
    def from_breakpoints(cls, st, domain, breakpoints, time_function=None):
        """Build a curve from (parameter, event) pairs, refining every leg
        at vertex crossings.  When a time function is given, the pace is
        computed from the endpoints and affinity is verified; otherwise the
        curve is stored as non-affine."""
        pts = [(float(tau), st.event(e.t, e.x)) for tau, e in breakpoints]
        refined = [pts[0]]
        for (s, p), (t, q) in zip(pts, pts[1:]):
            for e in _refine_leg(st, p, q):
                frac = (e.t - p.t) / (q.t - p.t)
                refined.append((s + frac * (t - s), e))
            refined.append((t, q))
        pace = None
        if time_function is not None and len(refined) >= 2:
            v0 = time_function.value(st, refined[0][1])
            v1 = time_function.value(st, refined[-1][1])
            pace = (v1 - v0) / (refined[-1][0] - refined[0][0])
        elif time_function is not None:
            pace = 1.0
        return cls(st, domain, refined, pace=pace, time_function=time_function)

    # -- basic geometry -------------------------------------------------------

    @property
    def window(self):
        """Parameter span covered by stored breakpoints."""
        return self._params[0], self._params[-1]

    def _ext_slope(self, forward):
        if self.pace is not None:
            return self.pace
        if len(self.breakpoints) < 2:
            return 1.0
        if forward:
            (s, p), (t, q) = self.breakpoints[-2], self.breakpoints[-1]
        else:
            (s, p), (t, q) = self.breakpoints[0], self.breakpoints[1]
        return (q.t - p.t) / (t - s)

    def at(self, tau):
        """Event at parameter ``tau`` (domain-checked)."""
        tau = float(tau)
        if not self.domain.contains(tau, GEOM_ATOL):
            raise InputError(f"parameter {tau} outside domain {self.domain}")
        lo, hi = self.window
        if tau <= lo:
            if tau == lo or self.domain.kind == Interval.COMPACT:
                t0, e0 = self.breakpoints[0]
                return e0
            t0, e0 = self.breakpoints[0]
            return Event(e0.t + self._ext_slope(False) * (tau - t0), e0.x)
        if tau >= hi:
            if tau == hi or self.domain.kind == Interval.COMPACT:
                return self.breakpoints[-1][1]
            t1, e1 = self.breakpoints[-1]
            return Event(e1.t + self._ext_slope(True) * (tau - t1), e1.x)
        i = bisect_left(self._params, tau)
        if self._params[i] == tau:
            return self.breakpoints[i][1]
        (s, p), (t, q) = self.breakpoints[i - 1], self.breakpoints[i]
        frac = (tau - s) / (t - s)
        return Event(p.t + frac * (q.t - p.t),
                     self.spacetime.point_on_segment(p.x, q.x, frac))

    def raw_path(self):
        """Ordered breakpoint events (the parametrization forgotten)."""
        return tuple(e for _, e in self.breakpoints)

    def restrict(self, a, b):
        """Restriction to the compact interval [a, b] of the domain."""
        a, b = float(a), float(b)
        if a > b:
            raise InputError(f"restriction needs a <= b, got [{a}, {b}]")
        if not (self.domain.contains(a, GEOM_ATOL) and self.domain.contains(b, GEOM_ATOL)):
            raise InputError(f"[{a}, {b}] not contained in domain {self.domain}")
        if a == b:
            return CausalCurve(self.spacetime, Interval.compact(a, b),
                               ((a, self.at(a)),), pace=self.pace,
                               time_function=self.time_function, _checked=True)
        pts = [(a, self.at(a))]
        for tau, e in self.breakpoints:
            if a < tau < b:
                pts.append((tau, e))
        pts.append((b, self.at(b)))
        return CausalCurve(self.spacetime, Interval.compact(a, b), pts,
                           pace=self.pace, time_function=self.time_function)

    def with_domain(self, domain):
        """Rewrap the same breakpoints over a different interval kind (the
        window convention supplies the values beyond the breakpoints)."""
        return CausalCurve(self.spacetime, domain, self.breakpoints,
                           pace=self.pace, time_function=self.time_function)

    def sort_key(self):
        st = self.spacetime
        return (self.domain.kind, len(self.breakpoints),
                tuple((tau,) + st.event_key(e) for tau, e in self.breakpoints))

    def __repr__(self):
        lo, hi = self.window
        return (f"CausalCurve({self.domain}, {len(self.breakpoints)} breakpoints "
                f"on [{lo}, {hi}], pace={self.pace})")


def curves_close(c1: CausalCurve, c2: CausalCurve, tol=GEOM_ATOL):
    """Structural equality of two curves at the given tolerance."""
    if c1.domain.kind != c2.domain.kind:
        return False
    if len(c1.breakpoints) != len(c2.breakpoints):
        return False
    st = c1.spacetime
    for (s, p), (t, q) in zip(c1.breakpoints, c2.breakpoints):
        if abs(s - t) > tol or not st.events_close(p, q, tol):
            return False
    if (c1.pace is None) != (c2.pace is None):
        return False
    if c1.pace is not None and abs(c1.pace - c2.pace) > tol:
        return False
    return True


# -- canonical parametrization ----------------------------------------------


def _as_raw(st, path):
    if isinstance(path, CausalCurve):
        return RawPath(st, path.raw_path())
    return path


def canonicalize_compact(st, tf: TimeFunction, path, a, b) -> CausalCurve:
    """The unique parametrization of a compact path on [a, b] along which
    ``tf`` increases at a constant pace.

    The parameter t is mapped to the path point whose ``tf``-value equals
    ``tf(p0) + (t - a)/(b - a) * (tf(pk) - tf(p0))``; the construction is
    idempotent on already-affine curves.
    """
    path = _as_raw(st, path)
    a, b = float(a), float(b)
    if a >= b:
        raise InputError(f"target interval needs a < b, got [{a}, {b}]")
    if not validate_tf(st, tf):
        raise InputError("time function is not valid on this spacetime")
    chain = _materialize(st, path.events)
    values = [tf.value(st, e) for e in chain]
    for v, w in zip(values, values[1:]):
        if w <= v:
            raise PreconditionError(
                "time function does not strictly increase along the path")
    if len(chain) < 2:
        raise PreconditionError("degenerate path: a single event cannot span [a, b]")
    span = values[-1] - values[0]
    pace = span / (b - a)
    pts = [(a, chain[0])]
    for e, v in zip(chain[1:-1], values[1:-1]):
        pts.append((a + (b - a) * (v - values[0]) / span, e))
    pts.append((b, chain[-1]))
    return CausalCurve(st, Interval.compact(a, b), pts, pace=pace, time_function=tf)


def canonicalize_noncompact(st, tf: TimeFunction, path: RawPath, request: Interval,
                            rate=1.0, shift=0.0) -> CausalCurve:
    """Parametrize a path with declared end behavior over a noncompact
    interval so that ``tf`` increases at constant pace.

    The admissible interval kind is dictated by whether the ``tf``-values
    along the path are bounded toward each end (static extensions make
    them unbounded).  Bounded/bounded paths go to compact intervals where
    the pace is forced; every unbounded case leaves an affine freedom,
    fixed here by ``rate`` (the pace) and, on the full line, ``shift``.
    """
    if not validate_tf(st, tf):
        raise InputError("time function is not valid on this spacetime")
    rate = float(rate)
    if rate <= 0:
        raise InputError(f"rate must be positive, got {rate}")
    lower_unbounded = path.extend_past
    upper_unbounded = path.extend_future
    expected = {
        (False, False): Interval.COMPACT,
        (False, True): Interval.FUTURE,
        (True, False): Interval.PAST,
        (True, True): Interval.LINE,
    }[(lower_unbounded, upper_unbounded)]
    if request.kind != expected:
        low = "-inf" if lower_unbounded else "finite"
        high = "+inf" if upper_unbounded else "finite"
        raise InputError(
            f"path with time-function range ({low}, {high}) parametrizes over a "
            f"{expected} interval, not {request}")
    if request.kind == Interval.COMPACT:
        return canonicalize_compact(st, tf, path, request.a, request.b)
    chain = _materialize(st, path.events)
    values = [tf.value(st, e) for e in chain]
    for v, w in zip(values, values[1:]):
        if w <= v:
            raise PreconditionError(
                "time function does not strictly increase along the path")
    if request.kind == Interval.FUTURE:
        anchor_param, anchor_value = request.a, values[0]
    elif request.kind == Interval.PAST:
        anchor_param, anchor_value = request.b, values[-1]
    else:
        anchor_param, anchor_value = 0.0, float(shift)
    pts = [(anchor_param + (v - anchor_value) / rate, e) for e, v in zip(chain, values)]
    return CausalCurve(st, request, pts, pace=rate, time_function=tf)


# -- reparametrization by a second time function ------------------------------


def reparametrize(st, curve: CausalCurve, tf1: TimeFunction, tf2: TimeFunction) -> CausalCurve:
    """Reparametrize a full-line ``tf1``-affine curve so that it becomes
    ``tf2``-affine, without moving its path.

    The new parameter value of each breakpoint is the solution of
    ``tf1(curve(s)) = tf2(event)``, computed exactly on the piecewise
    linear representation.  The resulting curve traces the same events,
    has the same pace, and satisfies ``tf2(result(s)) = tf1(curve(s))``
    for every s; these postconditions are asserted before returning.
    """
    if curve.domain.kind != Interval.LINE:
        raise InputError(
            "reparametrize needs a full-line curve; canonicalize compact paths instead")
    if curve.pace is None:
        raise InputError("curve is not time-affine")
    if not validate_tf(st, tf1) or not validate_tf(st, tf2):
        raise InputError("both time functions must be valid")
    base_tf = curve.time_function or canonical_time()
    if not base_tf.same_as(tf1):
        raise InputError("curve is not parametrized by the given source time function")
    tau0, e0 = curve.breakpoints[0]
    w0 = tf1.value(st, e0)
    pace = curve.pace
    pts = [(tau0 + (tf2.value(st, e) - w0) / pace, e) for _, e in curve.breakpoints]
    # Constructing with the new time function asserts tf2-affinity at the
    # same pace, which is exactly the identity tf2(result(s)) = tf1(curve(s)).
    out = CausalCurve(st, Interval.line(), pts, pace=pace, time_function=tf2)
    assert out.raw_path() == curve.raw_path()
    return out


# -- concatenation -------------------------------------------------------------


def concat(c1: CausalCurve, c2: CausalCurve) -> CausalCurve:
    """Concatenate two curves meeting at the junction parameter.

    The result restricts exactly to the two inputs; it is time-affine only
    when both pieces share the time function and the pace, and is stored
    as non-affine otherwise.
    """
    st = c1.spacetime
    if c1.domain.kind not in (Interval.COMPACT, Interval.PAST):
        raise InputError(f"left curve must be bounded above, got {c1.domain}")
    if c2.domain.kind not in (Interval.COMPACT, Interval.FUTURE):
        raise InputError(f"right curve must be bounded below, got {c2.domain}")
    b1 = c1.domain.b
    b2 = c2.domain.a
    if abs(b1 - b2) > ENDPOINT_ATOL:
        raise InputError(f"domains do not meet: {c1.domain} then {c2.domain}")
    e1 = c1.breakpoints[-1][1]
    e2 = c2.breakpoints[0][1]
    if not st.events_close(e1, e2, ENDPOINT_ATOL):
        raise InputError(f"endpoint mismatch at junction: {e1} vs {e2}")
    pts = list(c1.breakpoints) + list(c2.breakpoints[1:])
    left_open = c1.domain.kind == Interval.PAST
    right_open = c2.domain.kind == Interval.FUTURE
    if left_open and right_open:
        domain = Interval.line()
    elif left_open:
        domain = Interval.past(c2.domain.b)
    elif right_open:
        domain = Interval.future(c1.domain.a)
    else:
        domain = Interval.compact(c1.domain.a, c2.domain.b)
    pace = None
    tf = None
    if c1.pace is not None and c2.pace is not None and abs(c1.pace - c2.pace) <= AFFINITY_ATOL:
        tf1 = c1.time_function or canonical_time()
        tf2 = c2.time_function or canonical_time()
        if tf1.same_as(tf2):
            pace = c1.pace
            tf = c1.time_function
    return CausalCurve(st, domain, pts, pace=pace, time_function=tf)


# -- verification ---------------------------------------------------------------


@dataclass
class CausalityReport:
    ok: bool
    violations: tuple  # (s, t, event_s, event_t)

    def __bool__(self):
        return self.ok


def verify_causal(st, curve: CausalCurve, samples=8) -> CausalityReport:
    """Check that the curve is future-directed causal: every ordered pair
    among the breakpoints plus ``samples`` uniform parameters must be
    causally related.  For the piecewise-geodesic representation with
    subluminal segments this is sound and complete; sampling guards
    representation bugs."""
    if samples < 2:
        raise InputError("need at least 2 samples")
    lo, hi = curve.window
    params = set(curve._params)
    if hi > lo:
        params.update(lo + (hi - lo) * i / (samples - 1) for i in range(samples))
    ordered = sorted(params)
    events = [curve.at(tau) for tau in ordered]
    tol = max(st.eps_caus, GEOM_ATOL)
    violations = []
    for i in range(len(ordered)):
        for j in range(i, len(ordered)):
            if not st.causally_precedes(events[i], events[j], tol):
                violations.append((ordered[i], ordered[j], events[i], events[j]))
    return CausalityReport(not violations, tuple(violations))


def is_time_parametrized(st, tf: TimeFunction, curve: CausalCurve, tol=AFFINITY_ATOL):
    """True iff the time function reads its own parameter along the whole
    curve, checked through the values at parameters 0 and 1 (sufficient by
    affinity)."""
    if curve.domain.kind != Interval.LINE:
        raise InputError("membership is defined for full-line curves only")
    return (abs(tf.value(st, curve.at(0.0)) - 0.0) <= tol
            and abs(tf.value(st, curve.at(1.0)) - 1.0) <= tol)


# -- bi-Lipschitz envelopes ------------------------------------------------------


@dataclass
class BiLipschitzReport:
    """Empirical parameter-to-distance ratios for a curve family against
    their analytic envelopes."""

    pace_min: float
    pace_max: float
    dw_ratio_min: float
    dw_ratio_max: float
    t2_ratio_min: float
    t2_ratio_max: float
    dw_lower: float
    dw_upper: float
    t2_lower: float
    t2_upper: float
    pairs: int

    def within(self, tol=0.0):
        slack = lambda env: tol * max(1.0, abs(env)) + 1e-15 * max(1.0, abs(env))
        return (self.dw_ratio_min >= self.dw_lower - slack(self.dw_lower)
                and self.dw_ratio_max <= self.dw_upper + slack(self.dw_upper)
                and self.t2_ratio_min >= self.t2_lower - slack(self.t2_lower)
                and self.t2_ratio_max <= self.t2_upper + slack(self.t2_upper))

    def to_dict(self):
        return dict(self.__dict__)


def _direction_slopes(st, tf1, tf2):
    """Pairs (s1, s2) of spatial slopes of the two time functions along
    each oriented travel direction."""
    if st.backend == Spacetime.MINKOWSKI:
        k1 = tf1.slope or 0.0
        k2 = tf2.slope or 0.0
        return [(k1, k2), (-k1, -k2)]
    out = []
    for (a, b), length in sorted(st.edges.items()):
        s1 = (tf1.spatial_part(st, b) - tf1.spatial_part(st, a)) / length
        s2 = (tf2.spatial_part(st, b) - tf2.spatial_part(st, a)) / length
        out.append((s1, s2))
        out.append((-s1, -s2))
    return out


def bilipschitz_report(st, tf2: TimeFunction, curves, a, b, samples=7) -> BiLipschitzReport:
    """Empirical bi-Lipschitz constants of a time-affine curve family on
    [a, b], against the analytic envelopes.

    Two ratio families are measured over sampled parameter pairs: the
    Riemannian displacement per unit parameter, and the increment of a
    second time function per unit parameter.  The envelopes follow from
    the pace bounds of the family, the causal speed limit, and the slopes
    of the two foliations; the reported family must share one
    parametrizing time function.
    """
    if not curves:
        raise InputError("empty curve family")
    a, b = float(a), float(b)
    if a >= b:
        raise InputError(f"window needs a < b, got [{a}, {b}]")
    tf1 = curves[0].time_function or canonical_time()
    paces = []
    for c in curves:
        if c.pace is None:
            raise InputError("family must consist of time-affine curves")
        if not (c.time_function or canonical_time()).same_as(tf1):
            raise InputError("family must share one parametrizing time function")
        if not (c.domain.contains(a) and c.domain.contains(b)):
            raise InputError(f"curve domain {c.domain} does not contain [{a}, {b}]")
        paces.append(c.pace)
    pace_min, pace_max = min(paces), max(paces)
    ua = st.u * st.alpha
    lip1 = tf1.lipschitz(st)
    lip2 = tf2.lipschitz(st)
    # Along a tf1-affine causal curve the coordinate-time rate is at most
    # pace / (1 - lip1) (equality at light speed against the tilt), and the
    # Riemannian speed is at most sqrt(2 u alpha) times that rate; for the
    # canonical foliation the factor collapses to the classical constant.
    dw_lower = pace_min * math.sqrt(ua) / math.sqrt(1.0 + lip1 * lip1)
    dw_upper = pace_max * math.sqrt(2.0 * ua) / (1.0 - lip1)
    gain = min((1.0 - s2) / (1.0 - s1) for s1, s2 in _direction_slopes(st, tf1, tf2))
    t2_lower = pace_min * min(gain, 1.0)
    t2_upper = math.sqrt(1.0 + lip2 * lip2) / math.sqrt(ua) * dw_upper

    dw_lo, dw_hi = math.inf, -math.inf
    t2_lo, t2_hi = math.inf, -math.inf
    pairs = 0
    for c in curves:
        params = {tau for tau in c._params if a <= tau <= b}
        params.update(a + (b - a) * i / (samples - 1) for i in range(samples))
        ordered = sorted(params)
        events = [c.at(tau) for tau in ordered]
        t2values = [tf2.value(st, e) for e in events]
        for i in range(len(ordered)):
            for j in range(i + 1, len(ordered)):
                dt = ordered[j] - ordered[i]
                if dt <= 0:
                    continue
                r_dw = st.riemannian_distance(events[i], events[j]) / dt
                r_t2 = abs(t2values[j] - t2values[i]) / dt
                dw_lo, dw_hi = min(dw_lo, r_dw), max(dw_hi, r_dw)
                t2_lo, t2_hi = min(t2_lo, r_t2), max(t2_hi, r_t2)
                pairs += 1
    return BiLipschitzReport(pace_min, pace_max, dw_lo, dw_hi, t2_lo, t2_hi,
                             dw_lower, dw_upper, t2_lower, t2_upper, pairs)
