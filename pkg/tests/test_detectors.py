"""Detector-layer tests: Dirichlet polynomials, prime/zero sums, the
explicit-formula residual certificate, Type I/II horns, the flexible
multi-level detector, and cluster classification.

Oracles: mpmath (50-digit arithmetic) for the double-double evaluation
path and the Gamma-factor pole; hand-rolled brute-force sums over the
sieve tables for the smoothed prime sum; direct formula re-computation
for truncation bounds and the damped-series block identity.
"""

import math

import mpmath
import numpy as np
import pytest

from zetalab.arith import mollified_coefficient, mollified_window, sieve_tables
from zetalab.detectors import (
    DetectorConstructionError,
    DetectorOutcome,
    DirichletPoly,
    build_flexible_detector,
    classify_clusters,
    d_n_poly,
    detect_half_isolated_U,
    dichotomy_check,
    dirichlet_D_N,
    explicit_formula_residual,
    i_series,
    prime_sum_S,
    prime_sweep,
    type1_check,
    type1_scales,
    type2_value,
    zero_side_sum,
    zero_sum_search,
)
from zetalab.zerosets import (
    CompletenessError,
    ScaleParams,
    cluster_decompose,
    gen_line_config,
    gen_vertical_ap_zeros,
)


# ---------------------------------------------------------------------------
# DirichletPoly construction and evaluation
# ---------------------------------------------------------------------------


def _random_poly(rng, n_terms=400, n_max=5000, damping=None):
    ns = np.unique(rng.integers(2, n_max, size=n_terms).astype(np.int64))
    coeffs = rng.normal(0.0, 1.0, size=ns.size)
    return DirichletPoly(ns=ns, coeffs=coeffs, damping_scale=damping)


def test_dirichlet_poly_validation():
    with pytest.raises(ValueError):
        DirichletPoly(ns=np.array([], dtype=np.int64), coeffs=np.array([]))
    with pytest.raises(ValueError):
        DirichletPoly(ns=np.array([2, 3]), coeffs=np.array([1.0]))
    with pytest.raises(ValueError):
        DirichletPoly(ns=np.array([3, 2]), coeffs=np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        DirichletPoly(ns=np.array([0, 2]), coeffs=np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        DirichletPoly(ns=np.array([2, 3]), coeffs=np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        DirichletPoly(ns=np.array([2, 3]), coeffs=np.array([1.0, 1.0]),
                      damping_scale=0.0)


def test_dirichlet_poly_support_and_damping():
    poly = DirichletPoly(ns=np.array([5, 9, 40]),
                         coeffs=np.array([1.0, -2.0, 0.5]),
                         damping_scale=10.0)
    assert poly.support == (5, 40)
    want = np.array([1.0, -2.0, 0.5]) * np.exp(-np.array([5, 9, 40]) / 10.0)
    np.testing.assert_allclose(poly.effective_coeffs(), want, rtol=1e-15)


def test_evaluate_matches_blocked_summation():
    rng = np.random.default_rng(7)
    poly = _random_poly(rng)
    scale = float(np.sum(np.abs(poly.coeffs)))
    for s in (0.5 + 37.5j, 0.75 + 1234.5j, 1.0 + 0.0j, 0.9 - 250.0j):
        a = poly.evaluate(s)
        b = poly.evaluate_blocked(s)
        assert abs(a - b) <= 1e-12 * max(1.0, scale)


def test_evaluate_double_double_path_against_mpmath():
    # |t| log(n_max) crosses the 2^40 phase budget, forcing the compensated
    # phase reduction; naive float64 phases are wrong by ~1e-4 here.
    ns = np.arange(2, 51, dtype=np.int64)
    coeffs = np.linspace(1.0, 2.0, ns.size)
    poly = DirichletPoly(ns=ns, coeffs=coeffs)
    t = 3.0e11
    assert t * math.log(float(ns[-1])) > 2.0**40
    s = 0.5 + 1j * t

    with mpmath.workdps(40):
        want = complex(mpmath.fsum(
            (c * mpmath.power(int(n), -mpmath.mpc(0.5, t))
             for n, c in zip(ns.tolist(), coeffs.tolist())),
            absolute=False))
    got = poly.evaluate(s)
    scale = float(np.sum(np.abs(coeffs) * ns**-0.5))
    assert abs(got - want) <= 1e-11 * scale
    # the straightforward float64 summation genuinely diverges out there
    assert abs(poly.evaluate_blocked(s) - want) > 1e-9


def test_evaluate_paths_agree_at_moderate_height():
    ns = np.arange(2, 51, dtype=np.int64)
    coeffs = np.linspace(1.0, 2.0, ns.size)
    poly = DirichletPoly(ns=ns, coeffs=coeffs)
    s = 0.5 + 1000.0j
    assert abs(poly.evaluate(s) - poly.evaluate_blocked(s)) <= 1e-11


def test_log_abs_sampler_matches_evaluate():
    rng = np.random.default_rng(11)
    poly = _random_poly(rng, n_terms=50, n_max=200, damping=25.0)
    sampler = poly.log_abs_sampler(0.75)
    ts = np.linspace(0.0, 40.0, 17)
    got = sampler(ts)
    want = np.array([
        math.log(max(abs(poly.evaluate(0.75 + 1j * t)), 1e-300)) for t in ts
    ])
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)


def test_outcome_consistency_enforced():
    with pytest.raises(ValueError):
        DetectorOutcome(kind="x", parameter=1.0, value=1.0 + 0.0j,
                        magnitude=1.0, threshold=2.0, passed=True)


# ---------------------------------------------------------------------------
# smoothed prime sums
# ---------------------------------------------------------------------------


def test_prime_sum_matches_brute_force(tables, weight):
    scale = 30.0
    s = 0.9 + 37.5j
    got = prime_sum_S(s, scale, tables, weight)
    lam = tables.lam
    acc = 0.0 + 0.0j
    for n in range(2, 61):
        if lam[n] == 0.0:
            continue
        w = weight.eval_w0(n / scale)
        if w == 0.0:
            continue
        acc += lam[n] * w * n ** (-s)
    assert abs(got - acc) <= 1e-12 * max(1.0, abs(acc))


def test_prime_sum_force_dd_consistent(tables, weight):
    s = 0.8 + 21.3j
    a = prime_sum_S(s, 30.0, tables, weight)
    b = prime_sum_S(s, 30.0, tables, weight, force_dd=True)
    assert abs(a - b) <= 1e-12


def test_prime_sum_empty_window_is_zero(tables, weight):
    assert prime_sum_S(0.5 + 3.0j, 0.4, tables, weight) == 0.0 + 0.0j


def test_prime_sum_validation(tables, weight):
    with pytest.raises(ValueError):
        prime_sum_S(0.5 + 3.0j, 0.0, tables, weight)
    with pytest.raises(ValueError, match="sieved to"):
        prime_sum_S(0.5 + 3.0j, float(tables.limit), tables, weight)


def test_prime_sweep_matches_pointwise(tables, weight):
    s = 0.5 + 14.134725141734693j
    us = np.geomspace(20.0, 400.0, 25)
    vals, mags = prime_sweep(s, us, tables, weight)
    want = np.array([prime_sum_S(s, float(u), tables, weight) for u in us])
    scale = float(np.max(np.abs(want))) or 1.0
    np.testing.assert_allclose(vals, want, rtol=0.0, atol=1e-12 * scale)
    np.testing.assert_array_equal(mags, np.abs(vals))


# ---------------------------------------------------------------------------
# one-sided zero sums and sweeps
# ---------------------------------------------------------------------------


def _three_zero_line():
    return gen_line_config([(0.5, [100.0, 103.0, 110.0])])


def test_zero_side_sum_hand_oracle(weight):
    zs = _three_zero_line()
    params = ScaleParams(t_scale=100.0)
    z = 50.0
    got = zero_side_sum(zs, 0, z, weight, params, y=50.0)
    acc = 0.0 + 0.0j
    for dg in (0.0, 3.0, 10.0):
        dz = complex(0.0, dg)
        acc += weight.mellin_W0(dz).value * z**dz
    assert abs(got - acc) <= 1e-10


def test_zero_side_sum_validation(weight):
    zs = _three_zero_line()
    params = ScaleParams(t_scale=100.0)
    with pytest.raises(ValueError):
        zero_side_sum(zs, 0, 1.0, weight, params)
    with pytest.raises(ValueError):
        zero_side_sum(zs, 0, 50.0, weight, params, y=1.0)
    incomplete = zs.with_complete_range(90.0, 105.0)
    with pytest.raises(CompletenessError):
        zero_side_sum(incomplete, 0, 50.0, weight, params, y=50.0)


def test_zero_sum_search_trace_properties(weight):
    zs = _three_zero_line()
    params = ScaleParams(t_scale=100.0)
    res = zero_sum_search(zs, 0, 50.0, weight, params)
    grid, mags = res.trace
    assert grid[0] == pytest.approx(50.0)
    assert grid[-1] == pytest.approx(2500.0)
    assert mags.shape == grid.shape
    assert res.magnitude == pytest.approx(float(np.max(mags)))
    assert res.z_star == pytest.approx(float(grid[np.argmax(mags)]))
    assert res.term_count == 3
    assert res.threshold == pytest.approx(params.detection_threshold)
    assert res.passed == (res.magnitude >= res.threshold)
    assert res.lipschitz >= 0.0
    # discrete increments obey the certified Lipschitz constant in log z
    dt = np.diff(np.log(grid))
    assert np.all(np.abs(np.diff(mags)) <= res.lipschitz * dt * (1 + 1e-9)
                  + 1e-12)


def test_zero_sum_search_rejects_tiny_y(weight):
    zs = _three_zero_line()
    with pytest.raises(ValueError):
        zero_sum_search(zs, 0, 1.0, weight, ScaleParams(t_scale=100.0))


# ---------------------------------------------------------------------------
# half-isolated detection sweeps
# ---------------------------------------------------------------------------


def test_detect_prime_evaluand_on_table_zero(tables, weight, zs100):
    params = ScaleParams(t_scale=100.0)
    out = detect_half_isolated_U(zs100, 0, 10.0, tables, weight, params,
                                 evaluand="prime")
    assert out.kind == "detect-sweep-prime"
    grid, mags = out.trace
    assert grid[0] == pytest.approx(10.0)
    assert grid[-1] == pytest.approx(100.0)
    assert out.magnitude == pytest.approx(float(np.max(mags)))
    assert out.threshold == pytest.approx(params.detection_threshold)
    assert out.passed  # a genuine zero lights up its own prime sweep
    assert out.detail["evaluand"] == "prime"
    assert out.detail["index"] == 0
    assert out.detail["y"] == pytest.approx(10.0)


def test_detect_zero_model_on_synthetic_ap(weight):
    ap = gen_vertical_ap_zeros(0.5, 100.0, 2.0, 10)
    params = ScaleParams(t_scale=100.0)
    out = detect_half_isolated_U(ap, 0, 10.0, None, weight, params,
                                 evaluand="zero_model")
    assert out.kind == "detect-sweep-zero_model"
    assert out.passed == (out.magnitude >= out.threshold)
    assert out.magnitude == pytest.approx(float(np.max(out.trace[1])))


def test_detect_predicate_guard_rejects_buried_zero(weight):
    ap = gen_vertical_ap_zeros(0.5, 100.0, 2.0, 10)
    params = ScaleParams(t_scale=100.0)
    with pytest.raises(ValueError, match="half-isolated"):
        detect_half_isolated_U(ap, 5, 10.0, None, weight, params,
                               evaluand="zero_model")
    out = detect_half_isolated_U(ap, 5, 10.0, None, weight, params,
                                 evaluand="zero_model",
                                 check_predicate=False)
    assert out.magnitude >= 0.0


def test_detect_rejects_unknown_evaluand(weight, zs100):
    with pytest.raises(ValueError):
        detect_half_isolated_U(zs100, 0, 10.0, None, weight,
                               ScaleParams(t_scale=100.0), evaluand="bogus")


def test_detect_prime_needs_tables(weight, zs100):
    with pytest.raises(ValueError, match="tables"):
        detect_half_isolated_U(zs100, 0, 10.0, None, weight,
                               ScaleParams(t_scale=100.0), evaluand="prime")


# ---------------------------------------------------------------------------
# explicit-formula residual certificate
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("u", [20.0, 50.0, 100.0])
def test_residual_certifies_genuine_zero(tables, weight, zs100, u):
    params = ScaleParams(t_scale=100.0)
    rep = explicit_formula_residual(zs100, 0, u, tables, weight, params)
    assert rep.ok
    assert rep.residual <= rep.tail_bound
    assert rep.window == pytest.approx(params.window)
    assert set(rep.parts) >= {"known_zero_tail", "density_tail",
                              "contour_tail", "quadrature",
                              "window_zero_count"}


def test_residual_rejects_perturbed_ordinate(tables, weight, zs100):
    gam = zs100.gamma.copy()
    gam[3] += 1e-3
    from zetalab.zerosets import ZeroSet

    zs_bad = ZeroSet(beta=zs100.beta.copy(), gamma=gam, lines=zs100.lines,
                     complete_range=zs100.complete_range,
                     source="perturbed")
    params = ScaleParams(t_scale=100.0)
    rep = explicit_formula_residual(zs_bad, 3, 50.0, tables, weight, params)
    assert not rep.ok
    assert rep.residual > rep.tail_bound


def test_residual_window_clamps_to_table_top(tables, weight, zs100):
    params = ScaleParams(t_scale=100.0)
    g40 = float(zs100.gamma[40])
    zs_sub = zs100.with_complete_range(0.0, g40 + 5.0)
    rep = explicit_formula_residual(zs_sub, 40, 50.0, tables, weight, params)
    assert rep.window == pytest.approx(5.0)
    assert rep.window < params.window


def test_residual_raises_above_table_top(tables, weight, zs100):
    params = ScaleParams(t_scale=100.0)
    g40 = float(zs100.gamma[40])
    zs_bad = zs100.with_complete_range(0.0, g40 - 1.0)
    with pytest.raises(ValueError):
        explicit_formula_residual(zs_bad, 40, 50.0, tables, weight, params)


def test_residual_rejects_tiny_u(tables, weight, zs100):
    with pytest.raises(ValueError):
        explicit_formula_residual(zs100, 0, 1.0, tables, weight,
                                  ScaleParams(t_scale=100.0))


# ---------------------------------------------------------------------------
# Type I scales, block polynomials, damped series
# ---------------------------------------------------------------------------


def test_type1_scales_dyadic_range():
    assert type1_scales(ScaleParams(t_scale=1.0e4)) == [2**j
                                                        for j in range(14)]
    assert type1_scales(ScaleParams(t_scale=10.0, moll_exponent=0.9)) \
        == [4, 8, 16]


def test_type1_scales_empty_range_raises():
    with pytest.raises(ValueError, match="empty dyadic"):
        type1_scales(ScaleParams(t_scale=10.0, moll_exponent=3.0))


def test_d_n_poly_support_and_coefficients(tables):
    params = ScaleParams(t_scale=100.0)
    poly = d_n_poly(8, params, tables)
    assert poly.ns[0] == 9 and poly.ns[-1] == 16
    want = np.array([
        mollified_coefficient(n, params.moll_m, tables) for n in range(9, 17)
    ])
    np.testing.assert_array_equal(poly.coeffs, want)
    assert poly.damping_scale == pytest.approx(params.damping_scale)


def test_d_n_poly_zero_block_below_mollifier_cap(tables):
    # every n <= moll_m has a(n) = sum of mu over all divisors = 0
    params = ScaleParams(t_scale=100.0)
    poly = d_n_poly(1, params, tables)
    assert poly.ns.tolist() == [2]
    assert poly.coeffs.tolist() == [0.0]


def test_dirichlet_D_N_matches_poly(tables):
    params = ScaleParams(t_scale=100.0)
    s = 0.5 + 14.134725141734693j
    got = dirichlet_D_N(s, 16, params, tables)
    want = d_n_poly(16, params, tables).evaluate(s)
    assert got == want


def test_type1_check_consistency(tables, zs100):
    params = ScaleParams(t_scale=100.0)
    rho0 = complex(zs100.beta[0], zs100.gamma[0])
    out = type1_check(rho0, params, tables)
    assert out.kind == "type1"
    scales = type1_scales(params)
    per = out.detail["per_scale"]
    assert sorted(per) == sorted(str(n) for n in scales)
    mags = {int(k): abs(complex(re, im)) for k, (re, im) in per.items()}
    best = max(mags, key=lambda n: mags[n])
    assert out.magnitude == pytest.approx(mags[best])
    assert out.parameter == best
    assert out.threshold == pytest.approx(params.detection_threshold)
    assert set(out.detail["detecting"]) == {
        n for n, m in mags.items() if m >= out.threshold
    }


def test_i_series_truncation_bound_formula(tables, zs100):
    params = ScaleParams(t_scale=100.0)
    rho0 = complex(zs100.beta[0], zs100.gamma[0])
    iv = i_series(rho0, params, tables)
    y = params.damping_scale
    n_max = iv.truncated_at
    assert n_max == math.ceil(42.0 * y)
    want = (n_max + y) * y * math.exp(-n_max / y) * n_max ** max(0.0,
                                                                 -rho0.real)
    assert iv.truncation_bound == pytest.approx(want, rel=1e-12)
    assert iv.truncation_bound < 1e-12


def test_i_series_equals_dyadic_block_sum(tables, zs100):
    # the damped series tiles exactly into the dyadic block polynomials
    params = ScaleParams(t_scale=100.0)
    rho0 = complex(zs100.beta[0], zs100.gamma[0])
    iv = i_series(rho0, params, tables)
    acc = math.exp(-1.0 / params.damping_scale)  # a(1) term
    n_scale = 1
    while n_scale < iv.truncated_at:
        poly = d_n_poly(n_scale, params, tables)
        keep = poly.ns <= iv.truncated_at
        if not np.all(keep):
            poly = DirichletPoly(ns=poly.ns[keep], coeffs=poly.coeffs[keep],
                                 damping_scale=poly.damping_scale)
        acc += poly.evaluate(rho0)
        n_scale *= 2
    assert abs(acc - iv.value) <= 1e-12 * max(1.0, abs(iv.value))


def test_type2_pole_against_mpmath(tables, zs100):
    params = ScaleParams(t_scale=100.0)
    rho0 = complex(zs100.beta[0], zs100.gamma[0])
    rep = type2_value(rho0, params, tables)
    y = params.damping_scale
    m_cap = params.moll_m
    m1 = math.fsum(
        float(tables.mu[n]) / n for n in range(1, int(m_cap) + 1)
        if tables.mu[n]
    )
    with mpmath.workdps(50):
        pole = complex(mpmath.power(y, mpmath.mpc(1) - rho0)
                       * mpmath.gamma(mpmath.mpc(1) - rho0)) * m1
    assert abs(rep.pole_part - pole) <= 1e-10 * max(1.0, abs(pole))
    assert rep.value == pytest.approx(rep.i_part.value - rep.pole_part)
    assert rep.magnitude == pytest.approx(abs(rep.value))


def test_dichotomy_check_on_first_zero(tables, zs100):
    params = ScaleParams(t_scale=13.5)
    rho0 = complex(zs100.beta[0], zs100.gamma[0])
    d = dichotomy_check(rho0, params, tables)
    assert d["holds"]
    assert d["horn1"] == pytest.approx(
        3.0 * math.log(13.5) * d["type1"].magnitude)
    assert d["horn2"] == pytest.approx(3.0 * d["type2"].magnitude)
    assert d["lower_bound"] == pytest.approx(max(d["horn1"], d["horn2"]))
    assert d["lower_bound"] >= 1.0


# ---------------------------------------------------------------------------
# flexible multi-level detector
# ---------------------------------------------------------------------------


def _replay_factor_poly(u, tables, weight):
    """Reconstruct one level's window polynomial from its chosen scale."""
    npp, lam_pp, _ = tables.prime_powers()
    lo = int(np.searchsorted(npp, 0.5 * u, side="left"))
    hi = int(np.searchsorted(npp, 2.0 * u, side="right"))
    ns = npp[lo:hi]
    vals = lam_pp[lo:hi] * weight.eval_w0(ns.astype(np.float64) / u)
    keep = vals != 0.0
    return ns[keep].tolist(), vals[keep].tolist()


def _sparse_product(factor_tables):
    """Sparse convolution of factor tables; drop exact-zero coefficients."""
    prod = {1: 1.0}
    for ns, vals in factor_tables:
        nxt = {}
        for m, bm in prod.items():
            for n, fv in zip(ns, vals):
                key = m * n
                nxt[key] = nxt.get(key, 0.0) + bm * fv
        prod = nxt
    ms = sorted(prod)
    pairs = [(m, prod[m]) for m in ms if prod[m] != 0.0]
    return ([m for m, _ in pairs],
            [b for _, b in pairs])


def test_flexible_detector_frozen_construction(tables, weight, zs100):
    params = ScaleParams(t_scale=100.0)
    det = build_flexible_detector(zs100, 0, 4000.0, tables, weight, params)
    assert det.k == 3
    assert det.factors() == pytest.approx([63.245553203367585,
                                           7.952707287670506])
    assert det.poly.support == (128, 1573)
    rho0 = complex(zs100.beta[0], zs100.gamma[0])
    assert abs(det.value_at(rho0)) == pytest.approx(0.1705921423193516,
                                                    rel=1e-9)


def test_flexible_detector_replay_and_identity(tables, weight, zs100):
    params = ScaleParams(t_scale=100.0)
    det = build_flexible_detector(zs100, 0, 4000.0, tables, weight, params)
    factors = det.factors()
    assert len(factors) == det.k - 1

    # exact replay: sparse convolution of the level window polynomials
    ns, coeffs = _sparse_product(
        [_replay_factor_poly(u, tables, weight) for u in factors])
    assert np.array_equal(np.asarray(ns, dtype=np.int64), det.poly.ns)
    assert np.array_equal(np.asarray(coeffs), det.poly.coeffs)

    # declared support and coefficient bound
    lo, hi = det.declared_support
    assert lo <= det.poly.ns[0] and det.poly.ns[-1] <= hi
    k = det.k
    log2t = math.log(2.0 * params.t_scale)
    for n, b in zip(det.poly.ns.tolist(), det.poly.coeffs.tolist()):
        cap = (2.0 * math.log(n)) ** (k - 1) * log2t ** (k - 1)
        assert abs(b) <= cap * (1.0 + 1e-12)

    # product identity B(s) = prod_i S_{U_i}(s) at random points
    rng = np.random.default_rng(17)
    rho0 = complex(zs100.beta[0], zs100.gamma[0])
    for _ in range(10):
        s = complex(rng.uniform(0.3, 1.2), rng.uniform(5.0, 200.0))
        direct = np.prod([prime_sum_S(s, u, tables, weight)
                          for u in factors])
        got = det.value_at(s)
        assert abs(got - direct) <= 1e-10 * max(1.0, abs(direct))
    assert abs(det.value_at(rho0)
               - np.prod([prime_sum_S(rho0, u, tables, weight)
                          for u in factors])) <= 1e-9


def test_flexible_detector_empty_when_initial_below_stop(tables, weight,
                                                         zs100):
    params = ScaleParams(t_scale=100.0)
    det = build_flexible_detector(zs100, 0, 40.0, tables, weight, params)
    assert det.k == 1
    assert det.factors() == []
    assert det.poly.ns.tolist() == [1]
    assert det.value_at(0.5 + 77.0j) == 1.0 + 0.0j
    assert det.a_final == pytest.approx(40.0)


def test_flexible_detector_unreachable_threshold(tables, weight, zs100):
    params = ScaleParams(t_scale=100.0, detection_threshold=1e6)
    with pytest.raises(DetectorConstructionError) as ei:
        build_flexible_detector(zs100, 0, 4000.0, tables, weight, params)
    assert ei.value.level == 1


def test_flexible_detector_support_bound_violation(tables, weight, zs100):
    params = ScaleParams(t_scale=100.0, stop_scale=1.5)
    with pytest.raises(DetectorConstructionError,
                       match="declared support bound"):
        build_flexible_detector(zs100, 0, 4.0, tables, weight, params)


def test_flexible_detector_rejects_tiny_initial(tables, weight, zs100):
    with pytest.raises(ValueError):
        build_flexible_detector(zs100, 0, 1.0, tables, weight,
                                ScaleParams(t_scale=100.0))


# ---------------------------------------------------------------------------
# cluster classification
# ---------------------------------------------------------------------------


def _census_lineset():
    return gen_line_config([
        (0.5, [30.0, 31.0, 32.0]),
        (0.6, [130.0]),
        (0.55, [180.0, 181.0, 182.0, 183.0, 184.0]),
    ])


def test_classify_clusters_three_line_example(tables):
    params = ScaleParams(t_scale=100.0)
    zs = _census_lineset()
    dec = cluster_decompose(zs, params)
    assert [c.size for c in dec.clusters] == [3, 1, 5]
    labels = classify_clusters(zs, dec, params, tables)
    assert len(labels) == 3

    by_size = {lab.size: lab for lab in labels}
    # low cluster: every member Type II flagged, and it sits outside the
    # [T, 2T] window with right-neighbours on higher lines
    lab3 = by_size[3]
    assert lab3.line_beta == pytest.approx(0.5)
    assert "A" in lab3.labels and "B" in lab3.labels
    assert lab3.type2_count == 3
    assert lab3.in_window_count == 0
    assert lab3.right_count == 6
    # singleton on the rightmost line: detected, in-window, nothing right
    lab1 = by_size[1]
    assert lab1.line_beta == pytest.approx(0.6)
    assert "D" in lab1.labels
    assert lab1.right_count == 0
    assert lab1.in_window_count == 1
    # five-zero cluster: in-window, one right-neighbour, no B/D
    lab5 = by_size[5]
    assert lab5.line_beta == pytest.approx(0.55)
    assert lab5.labels == ["A"]
    assert lab5.right_count == 1
    assert lab5.in_window_count == 5

    for lab in labels:
        ts = lab.typed_subset
        assert ts["count"] == len(ts["indices"])
        assert ts["meets_floor"] == (ts["count"] >= ts["pigeonhole_floor"])
        members = {m["index"] for m in lab.members}
        assert set(ts["indices"]) <= members


def test_classify_requires_complete_neighborhood(tables, zs100):
    params = ScaleParams(t_scale=float(zs100.gamma.max()))
    dec = cluster_decompose(zs100, params)
    with pytest.raises(CompletenessError):
        classify_clusters(zs100, dec, params, tables)
