import math

import pytest
from scipy.stats import wasserstein_distance as scipy_w1

from causalot import (CurveMeasure, InputError, Interval, PreconditionError,
                      RawPath, SliceMeasure, Spacetime, TimeFunction,
                      canonical_time, canonicalize_noncompact,
                      causal_geodesic, concat_measures,
                      curve_measures_equal, disintegrate, marginal_at,
                      pushforward_reparametrize, reparametrize,
                      slice_measures_equal, transport_distance)
from genrand import (identity_parametrized_bundle, random_slice_measure,
                     random_time_function, rng_for)

T0 = canonical_time()


def geod(st, t0, x0, t1, x1):
    return causal_geodesic(st, st.event(t0, x0), st.event(t1, x1))


def point_mass(st, curve):
    return CurveMeasure(st, [(curve, 1.0)])


# -- slice measures ---------------------------------------------------------------

def test_slice_measure_merges_and_validates(mink):
    m = SliceMeasure(mink, [(mink.event(0, 1.0), 0.5), (mink.event(0, 1.0), 0.25),
                            (mink.event(0, 2.0), 0.25)])
    assert len(m) == 2
    assert m.weight_of(mink.event(0, 1.0)) == pytest.approx(0.75, abs=0)
    with pytest.raises(InputError):
        SliceMeasure(mink, [(mink.event(0, 1.0), 0.5)])
    with pytest.raises(InputError):
        SliceMeasure(mink, [(mink.event(0, 1.0), 1.0)], time_function=T0, tau=5.0)


# -- evaluation marginals ------------------------------------------------------------

def test_marginal_point_mass(chain_graph):
    line = RawPath(chain_graph, [chain_graph.event(0, "A"), chain_graph.event(1, "A")],
                   extend_past=True, extend_future=True)
    c = canonicalize_noncompact(chain_graph, T0, line, Interval.line(), 1.0, 0.0)
    m = marginal_at(point_mass(chain_graph, c), 5.0)
    assert len(m) == 1 and m.atoms[0][0] == chain_graph.event(5.0, "A")


def test_marginal_merges_shared_start(mink):
    c1 = geod(mink, 0, 0.0, 1, 1.0)
    c2 = geod(mink, 0, 0.0, 1, -1.0)
    sigma = CurveMeasure(mink, [(c1, 0.5), (c2, 0.5)])
    start = marginal_at(sigma, 0.0)
    assert len(start) == 1 and start.atoms[0][1] == 1.0
    mid = marginal_at(sigma, 1.0)
    assert [(e.x, w) for e, w in mid.atoms] == [(-1.0, 0.5), (1.0, 0.5)]


def test_marginal_outside_domain(mink):
    sigma = point_mass(mink, geod(mink, 0, 0.0, 1, 0.0))
    with pytest.raises(InputError):
        marginal_at(sigma, 2.0)


# -- disintegration -------------------------------------------------------------------

def test_disintegrate_point_mass(mink):
    sigma = point_mass(mink, geod(mink, 0, 0.0, 1, 0.0))
    base, cond = disintegrate(sigma, 0.0)
    assert len(base) == 1 and len(cond) == 1
    assert curve_measures_equal(cond[0][1], sigma)


def test_disintegrate_distinct_fibers(mink):
    c1 = geod(mink, 0, 0.0, 1, 1.0)
    c2 = geod(mink, 0, 1.0, 1, 0.0)
    sigma = CurveMeasure(mink, [(c1, 0.5), (c2, 0.5)])
    base, cond = disintegrate(sigma, 0.0)
    assert len(cond) == 2
    for x, fiber in cond:
        assert len(fiber) == 1
        assert fiber.atoms[0][1] == 1.0


def test_disintegrate_renormalizes(mink):
    c1 = geod(mink, 0, 0.0, 1, 0.5)
    c2 = geod(mink, 0, 0.0, 1, -0.5)
    c3 = geod(mink, 0, 2.0, 1, 2.0)
    sigma = CurveMeasure(mink, [(c1, 0.25), (c2, 0.25), (c3, 0.5)])
    base, cond = disintegrate(sigma, 0.0)
    fiber = dict((x.x, f) for x, f in cond)[0.0]
    assert [w for _, w in fiber.atoms] == [pytest.approx(0.5), pytest.approx(0.5)]
    # reconstruction: mixing conditionals against the base reproduces sigma
    rebuilt = []
    for (x, fiber), (_, wx) in zip(cond, base.atoms):
        rebuilt.extend((c, wx * w) for c, w in fiber.atoms)
    assert curve_measures_equal(CurveMeasure(mink, rebuilt), sigma)


# -- concatenation of measures ----------------------------------------------------------

def test_concat_point_masses(chain_graph):
    s1 = point_mass(chain_graph, geod(chain_graph, 0, "A", 1, "A"))
    s2 = point_mass(chain_graph, geod(chain_graph, 1, "A", 2, "B"))
    out = concat_measures(s1, s2)
    assert len(out) == 1
    assert out.domain == Interval.compact(0, 2)


def test_concat_matches_fibers(mink):
    # nu = half at x=-1, half at x=1; each side continues deterministically
    s1 = CurveMeasure(mink, [(geod(mink, 0, 0.0, 1, -1.0), 0.5),
                             (geod(mink, 0, 0.0, 1, 1.0), 0.5)])
    s2 = CurveMeasure(mink, [(geod(mink, 1, -1.0, 2, -2.0), 0.5),
                             (geod(mink, 1, 1.0, 2, 2.0), 0.5)])
    out = concat_measures(s1, s2)
    assert len(out) == 2
    assert all(w == pytest.approx(0.5) for _, w in out.atoms)


def test_concat_product_inside_fiber(mink):
    # one shared junction event, 2x2 independent choices -> four atoms at 1/4
    s1 = CurveMeasure(mink, [(geod(mink, 0, -1.0, 1, 0.0), 0.5),
                             (geod(mink, 0, 1.0, 1, 0.0), 0.5)])
    s2 = CurveMeasure(mink, [(geod(mink, 1, 0.0, 2, -1.0), 0.5),
                             (geod(mink, 1, 0.0, 2, 1.0), 0.5)])
    out = concat_measures(s1, s2)
    assert len(out) == 4
    assert all(w == pytest.approx(0.25) for _, w in out.atoms)


def test_concat_requires_compatible_marginals(mink):
    s1 = point_mass(mink, geod(mink, 0, 0.0, 1, 0.0))
    s2 = point_mass(mink, geod(mink, 1, 1.0, 2, 1.0))
    with pytest.raises(PreconditionError, match="junction"):
        concat_measures(s1, s2)


def test_concat_marginal_law_five_probes(mink):
    s1 = CurveMeasure(mink, [(geod(mink, 0, -1.0, 1, 0.0), 0.5),
                             (geod(mink, 0, 1.0, 1, 0.0), 0.5)])
    s2 = CurveMeasure(mink, [(geod(mink, 1, 0.0, 2, -0.5), 0.25),
                             (geod(mink, 1, 0.0, 2, 0.5), 0.75)])
    out = concat_measures(s1, s2)
    for t in (0.0, 0.5):
        assert slice_measures_equal(marginal_at(out, t), marginal_at(s1, t))
    assert slice_measures_equal(marginal_at(out, 1.0), marginal_at(s1, 1.0))
    for t in (1.5, 2.0):
        assert slice_measures_equal(marginal_at(out, t), marginal_at(s2, t))


def test_concat_associative_bitwise(mink):
    rng = rng_for(77)
    curves, weights = identity_parametrized_bundle(rng, mink, T0, [0.0, 1.0, 2.0, 3.0])
    pieces = []
    for lo, hi in ((0.0, 1.0), (1.0, 2.0), (2.0, 3.0)):
        atoms = [(c.restrict(lo, hi), w) for c, w in zip(curves, weights)]
        pieces.append(CurveMeasure(mink, atoms))
    left = concat_measures(concat_measures(pieces[0], pieces[1]), pieces[2])
    right = concat_measures(pieces[0], concat_measures(pieces[1], pieces[2]))
    assert len(left) == len(right)
    for (c1, w1), (c2, w2) in zip(left.atoms, right.atoms):
        assert c1.breakpoints == c2.breakpoints
        assert w1 == pytest.approx(w2, abs=1e-15)


# -- pushforward by reparametrization ------------------------------------------------------

def test_pushforward_identity(mink):
    rng = rng_for(55)
    curves, weights = identity_parametrized_bundle(rng, mink, T0, [-1.0, 0.0, 1.0])
    sigma = CurveMeasure(mink, list(zip(curves, weights)))
    out = pushforward_reparametrize(sigma, T0, T0)
    assert curve_measures_equal(out, sigma, 0.0)


def test_pushforward_single_atom(mink):
    tf2 = TimeFunction(slope=0.3)
    line = RawPath(mink, [mink.event(-2, -1.0), mink.event(2, 1.0)],
                   extend_past=True, extend_future=True)
    base = canonicalize_noncompact(mink, T0, line, Interval.line(), 1.0, 0.0)
    sigma = point_mass(mink, base)
    out = pushforward_reparametrize(sigma, T0, tf2)
    assert len(out) == 1
    got = out.atoms[0][0]
    want = reparametrize(mink, base, T0, tf2)
    assert got.breakpoints == want.breakpoints


def test_pushforward_preserves_mass_and_atoms(mink):
    rng = rng_for(56)
    for _ in range(10):
        tf1 = random_time_function(rng, mink)
        tf2 = random_time_function(rng, mink)
        curves, weights = identity_parametrized_bundle(
            rng, mink, tf1, [-1.0, 0.0, 1.0], n_paths=4)
        sigma = CurveMeasure(mink, list(zip(curves, weights)))
        out = pushforward_reparametrize(sigma, tf1, tf2)
        assert len(out) == len(sigma)
        assert math.fsum(w for _, w in out.atoms) == pytest.approx(1.0, abs=1e-12)


# -- transport distance ----------------------------------------------------------------------

def test_transport_distance_identical(mink):
    m = SliceMeasure(mink, [(mink.event(0, -1.0), 0.5), (mink.event(0, 1.0), 0.5)])
    assert transport_distance(mink, m, m) == pytest.approx(0.0, abs=1e-12)


def test_transport_distance_point_masses(chain_graph):
    m1 = SliceMeasure(chain_graph, [(chain_graph.event(0, "A"), 1.0)])
    m2 = SliceMeasure(chain_graph, [(chain_graph.event(1, "A"), 1.0)])
    assert transport_distance(chain_graph, m1, m2) == pytest.approx(1.0, abs=1e-12)


def test_transport_distance_translation(chain_graph):
    # shifting both atoms by dt=2 costs 2 when the spatial split is wide
    m1 = SliceMeasure(chain_graph, [(chain_graph.event(0, "A"), 0.5),
                                    (chain_graph.event(0, "C"), 0.5)])
    m2 = SliceMeasure(chain_graph, [(chain_graph.event(2, "A"), 0.5),
                                    (chain_graph.event(2, "C"), 0.5)])
    assert transport_distance(chain_graph, m1, m2) == pytest.approx(2.0, abs=1e-9)


def test_transport_distance_against_1d_oracle():
    # same-time Minkowski slices reduce to the classical 1-D W1
    rng = rng_for(88)
    st = Spacetime("minkowski-1+1", alpha=4.0, u=0.25)
    for _ in range(20):
        m1 = random_slice_measure(rng, st, 0.0)
        m2 = random_slice_measure(rng, st, 0.0)
        got = transport_distance(st, m1, m2)
        want = scipy_w1([e.x for e, _ in m1.atoms], [e.x for e, _ in m2.atoms],
                        [w for _, w in m1.atoms], [w for _, w in m2.atoms])
        assert got == pytest.approx(math.sqrt(st.u * st.alpha) * want, abs=1e-9)


# -- reconstruction through disintegrate + concat ------------------------------------------------

def test_reconstruction_roundtrip(mink):
    rng = rng_for(99)
    for _ in range(5):
        curves, weights = identity_parametrized_bundle(
            rng, mink, T0, [0.0, 1.0, 2.0], n_paths=4)
        sigma = CurveMeasure(mink, list(zip(curves, weights)))
        left = CurveMeasure(mink, [(c.restrict(0.0, 1.0), w) for c, w in sigma.atoms])
        right = CurveMeasure(mink, [(c.restrict(1.0, 2.0), w) for c, w in sigma.atoms])
        rebuilt = concat_measures(left, right)
        # the rebuilt measure couples the halves through the junction only;
        # its marginals agree with sigma's everywhere
        for t in (0.0, 0.5, 1.0, 1.5, 2.0):
            assert slice_measures_equal(marginal_at(rebuilt, t), marginal_at(sigma, t),
                                        wtol=1e-12)
