import math

import numpy as np
import pytest
import scipy.special
import scipy.stats

from ustatcs.boundaries import (
    BoundaryParams,
    gaussian_boundary,
    lil_boundary,
    mixture_boundary,
    normal_mixture_tail,
    normal_mixture_tail_inv,
    riemann_zeta,
)

# canonical parameter set used throughout: alpha=0.05, eta=2, s=1.4
P_LIL = BoundaryParams(alpha=0.05, m=100, eta=2.0, s=1.4, kind="lil")
P_GM = BoundaryParams(alpha=0.05, m=100, kind="gm")


# ---------------------------------------------------------------------------
# zeta
# ---------------------------------------------------------------------------


def test_zeta_known_identity():
    assert riemann_zeta(2.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-10)


def test_zeta_against_scipy_grid():
    for s in (1.05, 1.2, 1.4, 2.0, 3.7, 7.0, 12.0):
        assert riemann_zeta(s) == pytest.approx(float(scipy.special.zeta(s)), rel=1e-10)


def test_zeta_14_series_oracle():
    # independent oracle: direct series with integral tail bracket
    s = 1.4
    n = 2_000_000
    head = np.sum(np.arange(1, n, dtype=float) ** -s)
    tail_lo = n ** (1 - s) / (s - 1)  # integral bound from n
    tail_hi = (n - 1) ** (1 - s) / (s - 1)
    assert head + tail_lo <= riemann_zeta(s) <= head + tail_hi
    assert riemann_zeta(s) == pytest.approx(3.105547277977581, rel=1e-12)


def test_zeta_tends_to_one():
    z20 = riemann_zeta(20.0)
    assert 1.0 < z20 < 1.000002


def test_zeta_domain():
    with pytest.raises(ValueError):
        riemann_zeta(1.0)
    with pytest.raises(ValueError):
        riemann_zeta(0.3)


# ---------------------------------------------------------------------------
# normal mixture tail and its inverse
# ---------------------------------------------------------------------------


def test_tail_at_zero():
    assert normal_mixture_tail(0.0) == pytest.approx(1.0, abs=1e-15)


def test_tail_strictly_decreasing():
    assert normal_mixture_tail(1.0) > normal_mixture_tail(2.0) > normal_mixture_tail(3.0)


def test_tail_matches_norm_oracle():
    norm = scipy.stats.norm
    for a in (0.1, 0.7, 1.5, 2.8, 4.0):
        expected = 2.0 * (1.0 - norm.cdf(a) + a * norm.pdf(a))
        assert normal_mixture_tail(a) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("p", [0.5, 0.05, 0.01])
def test_tail_inverse_roundtrip(p):
    a = normal_mixture_tail_inv(p)
    assert normal_mixture_tail(a) == pytest.approx(p, abs=1e-10)


def test_tail_inverse_oracle_bisection():
    # independent bisection on [0, 10] using scipy's normal functions
    norm = scipy.stats.norm

    def g(a):
        return 2.0 * (1.0 - norm.cdf(a) + a * norm.pdf(a))

    lo, hi = 0.0, 10.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.05:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    assert normal_mixture_tail_inv(0.05) == pytest.approx(root, abs=1e-9)
    assert root == pytest.approx(2.795483482915, abs=1e-9)
    assert abs(root - 2.797) < 2e-3  # matches the usual two-decimal quote


def test_tail_inverse_near_one():
    # g(a) = 1 - phi(0) a^3 + O(a^5) near zero, so the inverse decays like
    # a cube root of the distance to one
    assert normal_mixture_tail_inv(1.0 - 1e-9) < 2e-3
    assert normal_mixture_tail_inv(1.0 - 1e-12) < 2e-4


def test_tail_inverse_domain():
    for bad in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(ValueError):
            normal_mixture_tail_inv(bad)
    with pytest.raises(ValueError):
        normal_mixture_tail(-0.1)


# ---------------------------------------------------------------------------
# stitched boundary
# ---------------------------------------------------------------------------


def test_lil_at_cold_start_closed_form():
    # at n=m the loglog term is log(log(max(eta, e))) = 0 for eta=2 < e
    m = 400
    p = BoundaryParams(alpha=0.05, m=m, eta=2.0, s=1.4, kind="lil")
    zeta = float(scipy.special.zeta(1.4))
    expected = (2**0.25 + 2**-0.25) / math.sqrt(2 * m) * math.sqrt(
        math.log(zeta / (0.05 * math.log(2.0) ** 1.4))
    )
    got = lil_boundary(m, p)
    assert got == pytest.approx(expected, rel=1e-12)
    # frozen value computed with 30-digit arithmetic
    assert got == pytest.approx(0.15464206738152305, rel=1e-13)


def test_lil_vanishes():
    assert lil_boundary(10**6, P_LIL) < lil_boundary(10**3, P_LIL)
    assert lil_boundary(10**8, P_LIL) < 1e-2 * lil_boundary(P_LIL.m, P_LIL)


def test_lil_scale_window():
    p = BoundaryParams(alpha=0.05, m=1, eta=2.0, s=1.4, kind="lil")
    for n in np.geomspace(1e3, 1e7, 25).astype(int):
        v = lil_boundary(int(n), p) * math.sqrt(n / math.log(math.log(n)))
        assert 1.0 <= v <= 6.0


# ---------------------------------------------------------------------------
# mixture boundary
# ---------------------------------------------------------------------------


def test_gm_at_cold_start():
    got = mixture_boundary(P_GM.m, P_GM)
    assert got == pytest.approx(normal_mixture_tail_inv(0.05) / math.sqrt(P_GM.m), rel=1e-12)


def test_gm_strictly_decreasing():
    ns = np.unique(np.geomspace(P_GM.m, 1e5, 200).astype(int))
    vals = [mixture_boundary(int(n), P_GM) for n in ns]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    # consecutive decrease near the cold start as well
    assert mixture_boundary(P_GM.m + 1, P_GM) < mixture_boundary(P_GM.m, P_GM)


def test_both_vanish():
    assert mixture_boundary(10**8, P_GM) < 1e-2 * mixture_boundary(P_GM.m, P_GM)


@pytest.mark.parametrize("kind", ["lil", "gm"])
def test_monotone_in_alpha(kind):
    alphas = (0.01, 0.05, 0.1, 0.3)
    for n in (100, 1000, 50_000):
        vals = [
            gaussian_boundary(n, BoundaryParams(alpha=a, m=100, kind=kind))
            for a in alphas
        ]
        assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("kind", ["lil", "gm"])
def test_before_cold_start_rejected(kind):
    with pytest.raises(ValueError):
        gaussian_boundary(99, BoundaryParams(alpha=0.05, m=100, kind=kind))


def test_param_validation():
    with pytest.raises(ValueError):
        BoundaryParams(alpha=0.0, m=10)
    with pytest.raises(ValueError):
        BoundaryParams(alpha=0.05, m=0)
    with pytest.raises(ValueError):
        BoundaryParams(alpha=0.05, m=10, eta=1.0)
    with pytest.raises(ValueError):
        BoundaryParams(alpha=0.05, m=10, s=1.0)
    with pytest.raises(ValueError):
        BoundaryParams(alpha=0.05, m=10, kind="bernstein")


def test_crossing_probability_smoke():
    # small-scale check of the defining property; the full-size version is
    # acceptance criterion AC-3
    rng = np.random.default_rng(99)
    reps, horizon, m = 500, 1200, 50
    z = rng.standard_normal((reps, horizon))
    means = np.cumsum(z, axis=1)[:, m - 1 :] / np.arange(m, horizon + 1)
    for kind in ("lil", "gm"):
        p = BoundaryParams(alpha=0.05, m=m, kind=kind)
        bound = np.array([gaussian_boundary(n, p) for n in range(m, horizon + 1)])
        frac = np.mean(np.any(np.abs(means) > bound, axis=1))
        assert frac <= 0.05 + 2.0 * math.sqrt(0.05 * 0.95 / reps)
