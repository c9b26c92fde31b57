import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import cumulative_trapezoid

from euler_relax import laminates, states, torus
from euler_relax.errors import MeanNotZero, PreconditionError, WaveConeError
from euler_relax.laminates import DiatomicMeasure, LaminateProfile, Polynomial
from euler_relax.torus import TorusField, TorusGrid

Z1 = states.lift_array(1.0, np.array([0.0, 0.0]))
Z2 = states.lift_array(1.0, np.array([1.0, 0.0]))
E_Y = np.array([0.0, 0.0, 1.0])
NEG_SQ = Polynomial.quadratic_form(-np.eye(6))


def test_chi_profile_examples():
    assert laminates.chi_profile(0.5, 0.25) == 0.5
    assert laminates.chi_profile(0.3, 0.9) == -0.3
    assert laminates.chi_profile(0.3, 1.1) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        laminates.chi_profile(1.0, 0.2)


@pytest.mark.parametrize("lam", [0.2, 0.5, 0.85])
def test_chi_antiderivatives_match_numerical_integration(lam):
    s = np.linspace(0, 1, 200_001)
    chi = laminates.chi_profile(lam, s[:-1] + 0.5 / 200_000)
    first = np.concatenate([[0], np.cumsum(chi) / 200_000])
    first -= np.trapezoid(first, s)
    np.testing.assert_allclose(laminates.chi_antiderivative(lam, s, 1)[:-1], first[:-1], atol=1e-5)
    second = cumulative_trapezoid(laminates.chi_antiderivative(lam, s, 1), s, initial=0)
    second -= np.trapezoid(second, s)
    np.testing.assert_allclose(laminates.chi_antiderivative(lam, s, 2)[:-1], second[:-1], atol=1e-8)
    assert np.max(np.abs(laminates.chi_antiderivative(lam, s, 1))) <= 1.0


@pytest.mark.parametrize("lam", [0.3, 0.5])
def test_chi_fourier_matches_fft(lam):
    n = 1 << 16
    samples = laminates.chi_profile(lam, (np.arange(n) + 0.5) / n)
    shift = np.exp(-1j * np.pi * np.arange(8) / n)
    fft = np.fft.fft(samples)[:8] / n / shift
    np.testing.assert_allclose(fft, laminates.chi_fourier(lam, np.arange(8)), atol=1e-4)


def test_periodic_antiderivative_of_cosine():
    y = np.arange(64) / 64
    out = laminates.periodic_antiderivative(np.cos(2 * np.pi * y))
    np.testing.assert_allclose(out, np.sin(2 * np.pi * y) / (2 * np.pi), atol=1e-14)
    trap = laminates.periodic_antiderivative(np.cos(2 * np.pi * y), method="trapezoid")
    np.testing.assert_allclose(trap, np.sin(2 * np.pi * y) / (2 * np.pi), atol=1e-2)


def test_periodic_antiderivative_rejects_mean():
    with pytest.raises(MeanNotZero):
        laminates.periodic_antiderivative(np.ones(8) + np.arange(8) * 0.1)


def test_periodic_antiderivative_of_chi_is_bounded():
    y = np.arange(1000) / 1000
    chi = laminates.chi_profile(0.3, y)
    out = laminates.periodic_antiderivative(chi - chi.mean(), method="trapezoid")
    assert np.max(np.abs(out)) <= 1.0
    np.testing.assert_allclose(out, laminates.chi_antiderivative(0.3, y, 1), atol=2e-3)


def test_laminate_field_mean_and_values():
    mu = DiatomicMeasure(Z1, Z2, 0.5)
    grid = TorusGrid(4, 4, 256)
    f = laminates.laminate_field(mu, LaminateProfile(0.5, E_Y, 8), grid)
    np.testing.assert_allclose(f.mean(), mu.barycenter, atol=1e-12)
    assert laminates.two_point_fraction(f, Z1, Z2) == 1.0
    assert torus.apply_euler_operator(f).l2() <= 1e-10 * f.l2()


def test_laminate_rejects_non_wavecone_direction():
    mu = DiatomicMeasure(Z1, Z2, 0.5)
    with pytest.raises(WaveConeError):
        laminates.laminate_field(mu, LaminateProfile(0.5, [0.0, 1.0, 0.0], 4), TorusGrid(4, 16, 16))
    with pytest.raises(WaveConeError):
        laminates.potential_amplitude(mu, [1.0, 0.0, 0.0])


def test_laminate_rejects_non_periodic_profile():
    mu = DiatomicMeasure(Z1, Z2, 0.5)
    with pytest.raises(ValueError):
        laminates.laminate_field(mu, LaminateProfile(0.5, [0.0, 0.6, 0.8], 1), TorusGrid(4, 16, 16))


def test_laminate_potential_converges_under_refinement():
    mu = DiatomicMeasure(Z1, Z2, 0.5)
    prof = LaminateProfile(0.5, E_Y, 4)
    errs = []
    for n_y in (64, 256, 1024):
        grid = TorusGrid(4, 4, n_y)
        w = laminates.laminate_potential(mu, prof, grid)
        target = laminates.laminate_field(mu, prof, grid) - mu.barycenter
        errs.append(torus.relative_error(torus.apply_potential_operator(w), target))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.1


def test_empirical_measure_basics():
    grid = TorusGrid(4, 4, 4)
    c = TorusField.constant(grid, np.arange(6.0))
    emp = laminates.empirical_measure(c)
    assert emp.test_against(NEG_SQ, NEG_SQ(np.arange(6.0))) == 0.0
    vals = np.zeros(grid.shape + (1,))
    vals[:, :, :2] = 2.0
    emp = laminates.empirical_measure(TorusField(grid, vals))
    assert emp.integrate(lambda z: z[:, 0]) == 1.0


def test_young_measure_error_matches_branch_counting():
    # with weight 2s the continuum error is |f(z1) - f(z2)| lam (1 - lam) / n exactly
    lam, mu = 0.5, DiatomicMeasure(Z1, Z2, 0.5)
    grid = TorusGrid(4, 4, 4096)
    s = grid.axes()[2]
    weight = np.broadcast_to(2 * s / np.mean(2 * s), grid.shape)
    f = Polynomial.quadratic_form(np.diag([0, 1, 0, 0, 0, 0]))
    for n in (16, 64, 256):
        field = laminates.laminate_field(mu, LaminateProfile(lam, E_Y, n), grid)
        err = laminates.empirical_measure(field).test_against(f, mu.expectation(f), weight)
        assert err == pytest.approx(abs(f(Z1) - f(Z2)) * lam * (1 - lam) / n, rel=0.02)


def test_polynomial_from_config_and_quadratic_form():
    p = Polynomial.from_config('{"terms": [{"coef": 2, "powers": [1, 0, 0, 0, 0, 2]}, {"coef": -1, "powers": [0,0,0,0,0,0]}]}')
    z = np.array([2.0, 0, 0, 0, 0, 3.0])
    assert p(z) == 2 * 2 * 9 - 1
    a = np.random.default_rng(1).normal(size=(6, 6))
    q = Polynomial.quadratic_form(a, linear=np.ones(6), constant=0.5)
    assert q(z) == pytest.approx(z @ a @ z + z.sum() + 0.5)
    with pytest.raises(ValueError):
        Polynomial.from_config({"terms": [{"coef": 1, "powers": [1, 0]}]})


def test_cutoff_vanishes_at_boundary_and_is_one_inside():
    x = np.array([0.0, 0.005, 0.01, 0.5, 0.99, 1.0])
    v, d1, d2 = laminates.cutoff(x, 0.01)
    assert v[0] == v[-1] == 0.0 and v[2] == v[3] == 1.0
    h = 1e-6
    xs = np.array([0.004, 0.007])
    num = (laminates.cutoff(xs + h, 0.01)[0] - laminates.cutoff(xs - h, 0.01)[0]) / (2 * h)
    np.testing.assert_allclose(laminates.cutoff(xs, 0.01)[1], num, rtol=1e-6)


def _witness(n=32, **kw):
    mu = DiatomicMeasure(Z1, Z2, 0.5)
    xi = laminates.potential_amplitude(mu, E_Y)
    return mu, laminates.RankOneWitness(xi, 2, n, 0.5, **kw)


def test_envelope_without_witnesses_is_f():
    z = np.arange(6.0)
    assert laminates.envelope_upper_bound(NEG_SQ, z, 1.0) == NEG_SQ(z)


def test_envelope_of_convex_function_is_f():
    mu, wit = _witness()
    sq = Polynomial.quadratic_form(np.eye(6))
    val = laminates.envelope_upper_bound(sq, mu.barycenter, 1e6, [wit])
    assert val == sq(mu.barycenter)


def test_envelope_of_concave_function_reaches_jensen_bound():
    mu, wit = _witness(n=64)
    val = laminates.envelope_upper_bound(NEG_SQ, mu.barycenter, 1e6, [wit])
    assert val <= mu.expectation(NEG_SQ) + 0.05
    assert val < NEG_SQ(mu.barycenter)


def test_envelope_strict_mode_rejects_large_witness():
    mu, wit = _witness()
    with pytest.raises(PreconditionError):
        laminates.envelope_upper_bound(NEG_SQ, mu.barycenter, 1e-3, [wit])
    assert laminates.envelope_upper_bound(NEG_SQ, mu.barycenter, 1e-3, [wit], mode="filter") == NEG_SQ(mu.barycenter)


def test_envelope_is_monotone_in_q():
    mu, small = _witness(n=8)
    _, large = _witness(n=64)
    bounds = sorted([small.second_derivative_sup(), large.second_derivative_sup()])
    vals = [
        laminates.envelope_upper_bound(NEG_SQ, mu.barycenter, q, [small, large], mode="filter")
        for q in (0.5 * bounds[0], 1.01 * bounds[0], 1.01 * bounds[1])
    ]
    assert vals[0] >= vals[1] >= vals[2]


def test_grid_witness_support_and_hessian():
    grid = TorusGrid(8, 8, 8)
    t, x, y = grid.mesh()
    w = np.zeros(grid.shape + (9,))
    w[..., 0] = np.sin(np.pi * t) ** 2 * np.sin(np.pi * x) ** 2 * np.sin(np.pi * y) ** 2
    wit = laminates.GridWitness(TorusField(grid, w))
    wit.check_support()
    assert wit.second_derivative_sup() > 0
    w[..., 0] += 0.1
    with pytest.raises(PreconditionError):
        laminates.GridWitness(TorusField(grid, w)).check_support()


def test_grid_witness_single_mode_hessian():
    grid = TorusGrid(8, 8, 8)
    _, _, y = grid.mesh()
    w = np.zeros(grid.shape + (9,))
    w[..., 3] = np.cos(2 * np.pi * y)
    assert laminates.GridWitness(TorusField(grid, w)).second_derivative_sup() == pytest.approx((2 * np.pi) ** 2)


def test_jensen_check_for_shear_pair():
    mu = DiatomicMeasure(Z1, Z2, 0.5)
    for f in (NEG_SQ, Polynomial.quadratic_form(np.diag([1.0, -2.0, 0, 0.5, 0, -1.0]))):
        rep = laminates.jensen_witness_check(mu, f, 128)
        assert rep.margin_a >= 0 and rep.margin_b >= 0 and rep.passed


def test_jensen_check_for_convex_function_has_no_gap():
    mu = DiatomicMeasure(Z1, Z2, 0.5)
    sq = Polynomial.quadratic_form(np.eye(6))
    rep = laminates.jensen_witness_check(mu, sq, 64, eps=1e-3)
    assert sq(mu.barycenter) <= rep.lhs <= rep.rhs + 1e-3


def test_jensen_check_degenerate_pair():
    mu = DiatomicMeasure(Z1, Z1, 0.3)
    rep = laminates.jensen_witness_check(mu, NEG_SQ, 16)
    assert rep.lhs == rep.rhs == NEG_SQ(Z1)


def test_jensen_check_rejects_non_wavecone_pair():
    mu = DiatomicMeasure(Z1, Z1 + np.ones(6), 0.5)
    with pytest.raises(WaveConeError):
        laminates.jensen_witness_check(mu, NEG_SQ, 16)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=5, max_size=5), st.sampled_from([16, 32, 64]))
def test_spectral_antiderivative_differentiates_back(coefs, n):
    y = np.arange(n) / n
    a = sum(c * np.cos(2 * np.pi * (k + 1) * y + k) for k, c in enumerate(coefs))
    a -= a.mean()
    out = laminates.periodic_antiderivative(a, atol=1e-12)
    back = np.fft.irfft(np.fft.rfft(out) * 2j * np.pi * np.fft.rfftfreq(n, 1 / n), n=n)
    np.testing.assert_allclose(back, a, atol=1e-10)
    assert abs(out.mean()) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(-3, 3))
def test_chi_is_mean_zero_and_two_valued(lam, shift):
    s = (np.arange(10_000) + 0.5) / 10_000 + shift
    chi = laminates.chi_profile(lam, s)
    assert abs(chi.mean()) <= 1e-3
    assert set(np.round(np.unique(chi), 12)) <= {round(1 - lam, 12), round(-lam, 12)}


def test_smoothed_chi_matches_numerical_convolution():
    from scipy.integrate import quad

    lam, width = 0.3, 0.02
    s = np.array([0.0, 0.01, 0.29, 0.3, 0.31, 0.6, 0.99])
    smoothed = laminates.smoothed_chi(lam, s, width)
    kernel = lambda x: np.exp(-0.5 * (x / width) ** 2) / (np.sqrt(2 * np.pi) * width)
    sharp = [
        lambda t: laminates.chi_antiderivative(lam, t, 2),
        lambda t: laminates.chi_antiderivative(lam, t, 1),
        lambda t: laminates.chi_profile(lam, t),
    ]
    for f, got in zip(sharp, smoothed):
        ref = [
            quad(lambda x: f(si - x) * kernel(x), -10 * width, 10 * width, points=[si - lam, si, si - 1, si - lam + 1], limit=200)[0]
            for si in s
        ]
        np.testing.assert_allclose(got, ref, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 0.9), st.floats(1e-3, 0.01))
def test_smoothed_chi_is_periodic_mean_zero_and_consistent(lam, width):
    s = np.arange(2048) / 2048
    p2, p1, p0 = laminates.smoothed_chi(lam, s, width)
    for p in (p2, p1, p0):
        assert abs(p.mean()) <= 1e-10
    # continuity across the cell edge: steepest slope is about 1/width
    ends = laminates.smoothed_chi(lam, np.array([0.0, 1.0 - 1e-10]), width)
    for p in ends:
        assert abs(p[0] - p[1]) <= 1e-10 / width
    assert np.max(np.abs(p0)) <= max(lam, 1 - lam) + 1e-12
