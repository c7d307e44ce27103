"""Computable globally hyperbolic backends in static split form.

A spacetime here is the product of a time axis and a spatial factor,
with metric  -alpha dt^2 + alpha g_opt  where g_opt is the *optical*
spatial metric (light travels at unit optical speed).  Two backends are
provided:

* ``minkowski-1+1`` -- spatial factor is the real line, optical
  distance ``|x - y|``;
* ``static-graph`` -- spatial factor is a connected metric graph with
  positive edge lengths, optical distance is shortest-path length
  (edge-interior points included).

The lapse ``alpha`` and the conformal factor ``u`` are global positive
constants per scenario; they enter the auxiliary Riemannian product
metric whose distance is :func:`Spacetime.riemannian_distance` and the
Lipschitz constant :func:`causal_lipschitz_constant`.

Spatial points are plain values: a float for the Minkowski backend; a
vertex id (str) or an ``(a, b, offset)`` tuple for a point at the given
optical offset from vertex ``a`` along edge ``(a, b)`` on the graph
backend.  Edge tuples are kept in canonical orientation (``a < b``) and
exact endpoint offsets are normalised to vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappush, heappop

from .errors import InputError, PreconditionError

# Absolute tolerance for geometric comparisons on derived quantities
# (breakpoints, interpolated offsets).  Raw scenario data is expected to
# be exactly representable; this guards rounding of derived values only.
GEOM_ATOL = 1e-9


@dataclass(frozen=True)
class Event:
    """A point (t, x) of the split spacetime; the atom of causality queries."""

    t: float
    x: object

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise InputError(f"event time must be finite, got {self.t}")


class Spacetime:
    """Immutable backend bundling the spatial factor and the constants.

    Parameters
    ----------
    backend : ``"minkowski-1+1"`` or ``"static-graph"``
    vertices, edges : graph data (ignored for Minkowski); edges are
        ``(a, b, length)`` triples with ``length > 0``.
    alpha, u : positive global constants (lapse, conformal factor).
    eps_caus : slack admitted in causality comparisons (default 0).
    """

    MINKOWSKI = "minkowski-1+1"
    GRAPH = "static-graph"

    def __init__(self, backend, vertices=None, edges=None, alpha=1.0, u=1.0,
                 eps_caus=0.0):
        if backend not in (self.MINKOWSKI, self.GRAPH):
            raise InputError(f"unknown backend {backend!r}")
        if alpha <= 0 or u <= 0:
            raise InputError("alpha and u must be positive")
        if eps_caus < 0:
            raise InputError("eps_caus must be nonnegative")
        self.backend = backend
        self.alpha = float(alpha)
        self.u = float(u)
        self.eps_caus = float(eps_caus)
        if backend == self.GRAPH:
            self._init_graph(vertices, edges)
        else:
            self.vertices = ()
            self.edges = {}

    # -- graph construction -------------------------------------------------

    def _init_graph(self, vertices, edges):
        if not vertices:
            raise InputError("graph backend needs at least one vertex")
        self.vertices = tuple(sorted(str(v) for v in vertices))
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertex ids")
        self.edges = {}
        adj = {v: [] for v in self.vertices}
        for a, b, length in (edges or ()):
            a, b = str(a), str(b)
            if a == b:
                raise InputError(f"self-loop at {a!r} not allowed")
            if a not in adj or b not in adj:
                raise InputError(f"edge ({a!r}, {b!r}) references unknown vertex")
            key = (a, b) if a < b else (b, a)
            if key in self.edges:
                raise InputError(f"duplicate edge {key!r}")
            if not (length > 0):
                raise InputError(f"edge {key!r} must have positive length")
            self.edges[key] = float(length)
            adj[a].append(b)
            adj[b].append(a)
        self._adj = {v: tuple(sorted(ws)) for v, ws in adj.items()}
        self._paths = {v: self._dijkstra(v) for v in self.vertices}
        for v in self.vertices:
            if len(self._paths[v]) != len(self.vertices):
                raise InputError("graph is not connected")

    def _dijkstra(self, source):
        # Deterministic single-source shortest paths: ties broken by the
        # lexicographically smallest vertex-id sequence.  Keying the heap
        # by (dist, path) realises the tie-break because edge lengths are
        # strictly positive.
        done = {}
        heap = [(0.0, (source,))]
        while heap:
            dist, path = heappop(heap)
            v = path[-1]
            if v in done:
                continue
            done[v] = (dist, path)
            for w in self._adj[v]:
                if w not in done:
                    key = (v, w) if v < w else (w, v)
                    heappush(heap, (dist + self.edges[key], path + (w,)))
        return done

    def edge_length(self, a, b):
        key = (a, b) if a < b else (b, a)
        try:
            return self.edges[key]
        except KeyError:
            raise InputError(f"no edge between {a!r} and {b!r}") from None

    # -- spatial points ------------------------------------------------------

    def normalize_point(self, x):
        """Validate a spatial point and return it in canonical form."""
        if self.backend == self.MINKOWSKI:
            try:
                x = float(x)
            except (TypeError, ValueError):
                raise InputError(f"Minkowski point must be a real number, got {x!r}")
            if not math.isfinite(x):
                raise InputError(f"Minkowski point must be finite, got {x!r}")
            return x
        if isinstance(x, str):
            if x not in self._adj:
                raise InputError(f"unknown vertex {x!r}")
            return x
        try:
            a, b, off = x
        except (TypeError, ValueError):
            raise InputError(f"graph point must be a vertex id or (a, b, offset), got {x!r}")
        a, b, off = str(a), str(b), float(off)
        length = self.edge_length(a, b)
        if a > b:
            a, b = b, a
            off = length - off
        if not (-GEOM_ATOL <= off <= length + GEOM_ATOL):
            raise InputError(f"offset {off} outside edge ({a!r}, {b!r}) of length {length}")
        if off <= 0.0:
            return a
        if off >= length:
            return b
        return (a, b, off)

    def point_key(self, x):
        """Total-order sort key for spatial points (backend-consistent)."""
        if self.backend == self.MINKOWSKI:
            return (0, x, "", 0.0)
        if isinstance(x, str):
            return (0, 0.0, x, 0.0)
        a, b, off = x
        return (1, 0.0, a + "|" + b, off)

    def points_close(self, x, y, tol=GEOM_ATOL):
        if self.backend == self.MINKOWSKI:
            return abs(x - y) <= tol
        if isinstance(x, str) or isinstance(y, str):
            if isinstance(x, str) and isinstance(y, str):
                return x == y
            # vertex vs interior point: close only if the offset is within
            # tol of the matching endpoint (normalisation keeps genuinely
            # interior points off the vertices).
            v, e = (x, y) if isinstance(x, str) else (y, x)
            a, b, off = e
            if v == a:
                return off <= tol
            if v == b:
                return self.edge_length(a, b) - off <= tol
            return False
        return x[0] == y[0] and x[1] == y[1] and abs(x[2] - y[2]) <= tol

    def event_key(self, e):
        return (e.t,) + self.point_key(e.x)

    def events_close(self, p, q, tol=GEOM_ATOL):
        return abs(p.t - q.t) <= tol and self.points_close(p.x, q.x, tol)

    def event(self, t, x):
        return Event(float(t), self.normalize_point(x))

    def _endpoint_offsets(self, x):
        # (vertex, offset-to-it) pairs describing how to leave point x.
        if isinstance(x, str):
            return ((x, 0.0),)
        a, b, off = x
        return ((a, off), (b, self.edge_length(a, b) - off))

    # -- distances -----------------------------------------------------------

    def optical_distance(self, x, y):
        """Length-metric distance in the spatial factor."""
        x = self.normalize_point(x)
        y = self.normalize_point(y)
        if self.backend == self.MINKOWSKI:
            return abs(x - y)
        return self._graph_route(x, y)[0]

    def _graph_route(self, x, y):
        """Shortest route between graph points.

        Returns ``(dist, track)`` where the track is the list of spatial
        points visited (x, vertices passed, y) with consecutive entries on
        a common edge.  Ties are broken by the lexicographically smallest
        vertex sequence; the empty sequence (direct move along a shared
        edge) wins every tie.
        """
        candidates = []
        same_edge = self._shared_edge(x, y)
        if same_edge is not None:
            off_x, off_y = same_edge[1], same_edge[2]
            candidates.append((abs(off_x - off_y), (), None))
        for vx, dx in self._endpoint_offsets(x):
            for vy, dy in self._endpoint_offsets(y):
                dist, path = self._paths[vx][vy]
                candidates.append((dx + dist + dy, path, None))
        best = min(candidates, key=lambda c: (c[0], c[1]))
        dist, chain = best[0], best[1]
        track = [x]
        for v in chain:
            if not track or not self.points_close(track[-1], v, 0.0):
                track.append(v)
        if not self.points_close(track[-1], y, 0.0):
            track.append(y)
        return dist, track

    def _shared_edge(self, x, y):
        """Common edge of two graph points as (key, off_x, off_y), or None."""
        ex = self._edges_of(x)
        ey = self._edges_of(y)
        shared = sorted(set(ex) & set(ey))
        if not shared:
            return None
        key = shared[0]
        return key, self._offset_on(x, key), self._offset_on(y, key)

    def _edges_of(self, x):
        if isinstance(x, str):
            return [tuple(sorted((x, w))) for w in self._adj[x]]
        return [(x[0], x[1])]

    def _offset_on(self, x, key):
        if isinstance(x, str):
            return 0.0 if x == key[0] else self.edges[key]
        return x[2]

    def point_on_segment(self, x, y, frac):
        """Point at fraction ``frac`` of the way from x to y along their
        common edge (or straight line on Minkowski).  Both points must lie
        on one edge; curve constructors guarantee this for stored segments."""
        if frac <= 0.0:
            return x
        if frac >= 1.0:
            return y
        if self.backend == self.MINKOWSKI:
            return x + frac * (y - x)
        if self.points_close(x, y, 0.0):
            return x
        shared = self._shared_edge(x, y)
        if shared is None:
            raise PreconditionError(
                f"segment endpoints {x!r}, {y!r} do not share an edge")
        key, off_x, off_y = shared
        return self.normalize_point((key[0], key[1], off_x + frac * (off_y - off_x)))

    def segment_length(self, x, y):
        """Optical length of the stored segment from x to y (single edge)."""
        if self.backend == self.MINKOWSKI:
            return abs(x - y)
        if self.points_close(x, y, 0.0):
            return 0.0
        shared = self._shared_edge(x, y)
        if shared is None:
            raise PreconditionError(
                f"segment endpoints {x!r}, {y!r} do not share an edge")
        return abs(shared[1] - shared[2])

    def geodesic_track(self, x, y):
        """Deterministic shortest spatial track from x to y.

        The track is a list of spatial points with consecutive entries on a
        common edge, so it can be traversed by single-edge segments.
        """
        x = self.normalize_point(x)
        y = self.normalize_point(y)
        if self.backend == self.MINKOWSKI:
            return [x] if x == y else [x, y]
        if self.points_close(x, y, 0.0):
            return [x]
        return self._graph_route(x, y)[1]

    def riemannian_distance(self, p, q):
        """Distance in the auxiliary complete Riemannian product metric.

        Equals ``sqrt(u * alpha) * hypot(dt, optical_distance)``; this is
        the yardstick for all Lipschitz bounds in the package.
        """
        d_opt = self.optical_distance(p.x, q.x)
        return math.sqrt(self.u * self.alpha) * math.hypot(q.t - p.t, d_opt)

    # -- causality -----------------------------------------------------------

    def causally_precedes(self, p, q, tol=None):
        """True iff q is in the causal future of p.

        For the static split the rule is exact: ``q.t - p.t >=
        optical_distance(p.x, q.x)``.  Null-boundary pairs (equality) count
        as causally related.  ``tol`` defaults to the spacetime's
        ``eps_caus``.
        """
        if tol is None:
            tol = self.eps_caus
        self.normalize_point(p.x)
        self.normalize_point(q.x)
        return q.t - p.t >= self.optical_distance(p.x, q.x) - tol


def causally_precedes(st, p, q, tol=None):
    return st.causally_precedes(p, q, tol)


def optical_distance(st, x, y):
    return st.optical_distance(x, y)


def riemannian_distance(st, p, q):
    return st.riemannian_distance(p, q)


def causal_lipschitz_constant(st, a, b):
    """Lipschitz constant ``sqrt(2 u alpha)`` of causal evolutions between
    the time values a and b, w.r.t. the Riemannian product distance.

    With constant ``u`` and ``alpha`` the maximum over the compact slab is
    the constant itself; the slab argument is kept for interface parity and
    validated."""
    if a > b:
        raise InputError(f"slab requires a <= b, got [{a}, {b}]")
    return math.sqrt(2.0 * st.u * st.alpha)


def causal_geodesic(st, p, q):
    """Deterministic causal geodesic from p to q, time-affine in t.

    The spatial track is the deterministic shortest path (lexicographic
    tie-break) traversed at constant optical speed; the coordinate time is
    affine in the parameter, so the curve has unit pace w.r.t. the
    canonical time function.  Identical inputs produce identical curves.
    """
    from .curves import CausalCurve, Interval
    from .timefunc import canonical_time

    p = st.event(p.t, p.x)
    q = st.event(q.t, q.x)
    if not st.causally_precedes(p, q, max(st.eps_caus, GEOM_ATOL)):
        raise PreconditionError(f"{p} does not causally precede {q}")
    if p == q:
        return CausalCurve(st, Interval.compact(p.t, p.t), ((p.t, p),),
                           pace=1.0, time_function=canonical_time())
    if q.t <= p.t:
        raise PreconditionError(
            f"degenerate pair: distinct events {p}, {q} on one time slice")
    track = st.geodesic_track(p.x, q.x)
    total = 0.0
    lengths = []
    for i in range(len(track) - 1):
        seg = st.segment_length(track[i], track[i + 1])
        lengths.append(seg)
        total += seg
    dt = q.t - p.t
    bps = [(p.t, p)]
    if total == 0.0:
        bps.append((q.t, st.event(q.t, p.x)))
    else:
        run = 0.0
        for i in range(1, len(track)):
            run += lengths[i - 1]
            t_i = q.t if i == len(track) - 1 else p.t + dt * (run / total)
            bps.append((t_i, st.event(t_i, track[i])))
        bps[-1] = (q.t, q)
    return CausalCurve(st, Interval.compact(p.t, q.t), tuple(bps),
                       pace=1.0, time_function=canonical_time())
