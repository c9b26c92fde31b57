import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from euler_relax import states
from euler_relax.errors import DomainError, FormatError
from oracles import e_kin_eig

finite = st.floats(-5, 5, allow_nan=False)
positive = st.floats(0.05, 5)


def test_pressure_examples():
    assert states.pressure(1.0) == 1.0
    assert states.pressure(2.0) == 4.0
    assert states.pressure(0.5) == 0.25
    assert states.GAMMA == 2.0 == states.gamma_for(2)
    with pytest.raises(DomainError):
        states.pressure(0.0)


def test_total_energy_examples():
    assert states.total_energy(1.0, [0.0, 0.0]) == 1.0
    assert states.total_energy(1.0, [1.0, 0.0]) == 1.5
    assert states.total_energy(2.0, [2.0, 0.0]) == 5.0
    with pytest.raises(DomainError):
        states.total_energy(-1.0, [0.0, 0.0])


@pytest.mark.parametrize(
    "rho, m, expected",
    [
        (1.0, (0.0, 0.0), (1, 0, 0, 0, 0, 1)),
        (1.0, (0.7, 0.0), (1, 0.7, 0, 0.245, 0, 1.245)),
        (2.0, (1.0, 1.0), (2, 1, 1, 0, 0.5, 4.5)),
    ],
)
def test_lift_examples(rho, m, expected):
    z = states.lift(states.FluidState(rho, m))
    np.testing.assert_allclose(z.as_vector(), expected, atol=1e-15)


def test_lift_rejects_vacuum():
    with pytest.raises(DomainError):
        states.FluidState(0.0, (1.0, 0.0))


def test_e_kin_examples():
    assert states.kinetic_energy_density(1.0, [0.0, 0.0], [0.0, 0.0]) == 0.0
    M = states.TracefreeSym2(0.5, 0.0)
    assert states.kinetic_energy_density(1.0, [1.0, 0.0], M) == pytest.approx(0.5, abs=1e-15)
    assert states.kinetic_energy_density(1.0, [1.0, 0.0], [0.0, 0.0]) == pytest.approx(1.0, abs=1e-15)


def test_e_kin_matches_eigensolver():
    rng = np.random.default_rng(11)
    rho = rng.uniform(0.1, 3.0, 2000)
    m = rng.normal(size=(2000, 2))
    M = rng.normal(size=(2000, 2))
    np.testing.assert_allclose(states.kinetic_energy_density(rho, m, M), e_kin_eig(rho, m, M), rtol=1e-12, atol=1e-12)


def test_subsolution_margin_examples():
    assert states.subsolution_margin(states.lift(states.FluidState(1.0, (1.0, 0.0)))) == pytest.approx(0.0, abs=1e-15)
    assert states.subsolution_margin(np.array([1, 0, 0, 0, 0, 2.0])) == pytest.approx(1.0)
    assert states.subsolution_margin(np.array([1, 1, 0, 0, 0, 1.0])) == pytest.approx(-1.0)


def test_psi_examples():
    rho, m, S = states.psi_block(np.array([1.0, 0, 0, 0, 0, 1.0]))
    np.testing.assert_array_equal(S, np.eye(2))
    alpha = 0.3
    z = states.lift_array(1.0, np.array([alpha, 0.0]))
    _, _, S = states.psi_block(z)
    np.testing.assert_allclose(S, [[1 + alpha**2, 0], [0, 1]], atol=1e-15)


def test_psi_inverse_rejects_nonsymmetric_block():
    with pytest.raises(FormatError):
        states.psi_inverse((1.0, np.zeros(2), np.array([[1.0, 0.2], [0.0, 1.0]])))


def test_tracefree_from_matrix_validates():
    assert states.TracefreeSym2.from_matrix([[1.0, 2.0], [2.0, -1.0]]) == states.TracefreeSym2(1.0, 2.0)
    with pytest.raises(FormatError):
        states.TracefreeSym2.from_matrix([[1.0, 0.0], [0.0, 1.0]])


def test_admissibility_examples():
    rho = np.ones((3, 4, 4))
    m = np.zeros((3, 4, 4, 2))
    assert states.admissibility_check(rho, m).all_admissible
    rising = np.stack([np.full((4, 4), np.sqrt(1.0 + t)) for t in (0.0, 0.5, 1.0)])
    rep = states.admissibility_check(rising, m)
    assert rep.admissible.tolist() == [True, False, False]
    with pytest.raises(ValueError):
        states.admissibility_check(np.zeros((0, 0)), np.zeros((0, 0, 2)))


@settings(max_examples=200, deadline=None)
@given(positive, finite, finite, finite, finite)
def test_psi_round_trip(rho, m1, m2, a, b):
    z = np.array([rho, m1, m2, a, b, 1.0 + rho])
    np.testing.assert_allclose(states.psi_inverse(states.psi(z)), z, atol=1e-12)
    rho_, m, S = states.psi_block(z)
    np.testing.assert_allclose(states.psi_inverse((rho_, m, S)), z, atol=1e-12)


@settings(max_examples=300, deadline=None)
@given(positive, finite, finite, finite, finite)
def test_e_kin_bounds(rho, m1, m2, a, b):
    m = np.array([m1, m2])
    e = states.kinetic_energy_density(rho, m, [a, b])
    assert m @ m / (2 * rho) <= e + 1e-10
    assert np.hypot(a, b) <= (2 * (states.D - 1) / states.D) * e + 1e-10


@settings(max_examples=200, deadline=None)
@given(positive, finite, finite, positive)
def test_lifted_states_sit_on_boundary(rho, m1, m2, scale):
    z = states.lift_array(rho * scale, np.array([m1, m2]))
    assert abs(float(states.subsolution_margin(z))) <= 1e-12 * max(1.0, abs(z[5]))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=10, max_size=10), st.floats(0, 1))
def test_e_kin_convex_along_segments(v, t):
    z1 = np.array([abs(v[0]) + 0.1, v[1], v[2], v[3], v[4]])
    z2 = np.array([abs(v[5]) + 0.1, v[6], v[7], v[8], v[9]])
    zt = t * z1 + (1 - t) * z2
    e = lambda z: states.kinetic_energy_density(z[0], z[1:3], z[3:5])
    assert e(zt) <= t * e(z1) + (1 - t) * e(z2) + 1e-10 * (1 + np.abs(v).max() ** 2 / 0.1)
