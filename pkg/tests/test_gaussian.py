"""Symplectic core: spectra, partial transpose, negativity, rotations."""

import numpy as np
import pytest

from conftest import random_physical_cov
from sqzmirror.errors import (
    DegenerateAngleWarning,
    DimensionError,
    PhysicalityError,
    PhysicalityWarning,
)
from sqzmirror.gaussian import (
    log_negativity,
    mean_phonon,
    min_symplectic_eigenvalue,
    partial_transpose,
    quadrature_observables,
    relative_mode_variances,
    rotate_local,
    rotation_angle,
    symplectic_eigenvalues,
    symplectic_form,
    thermal,
    two_mode_squeezed,
    vacuum,
)

TWO_OVER_LN2 = 2.8853900817779268  # 2 / ln 2


def test_symplectic_form_properties():
    U = symplectic_form(3)
    assert np.array_equal(U.T, -U)
    assert np.allclose(U @ U, -np.eye(6))


def test_symplectic_eigenvalues_vacuum_and_thermal():
    assert np.allclose(symplectic_eigenvalues(vacuum(2)), [0.5, 0.5])
    for a in (0.5, 1.0, 7.3):
        assert np.allclose(symplectic_eigenvalues(a * np.eye(4)), [a, a])


def test_symplectic_eigenvalues_tmsv_pure():
    # pure state: both symplectic eigenvalues at the vacuum floor
    for s in (0.3, 1.0, 2.0):
        nu = symplectic_eigenvalues(two_mode_squeezed(s))
        assert np.allclose(nu, [0.5, 0.5], atol=1e-10)


def test_symplectic_eigenvalues_rejects_bad_input():
    with pytest.raises(DimensionError):
        symplectic_eigenvalues(np.eye(3))
    V = vacuum(1).copy()
    V[0, 1] = 0.2  # asymmetric
    with pytest.raises(DimensionError):
        symplectic_eigenvalues(V)


def test_partial_transpose_diagonal_invariant():
    V = np.diag([0.7, 0.9, 1.1, 1.3])
    assert np.array_equal(partial_transpose(V), V)


def test_partial_transpose_flips_p2_coupling():
    V = vacuum(2)
    V[1, 3] = V[3, 1] = 0.1
    Vt = partial_transpose(V)
    assert Vt[1, 3] == -0.1
    assert Vt[3, 1] == -0.1


def test_partial_transpose_involution(rng):
    V = random_physical_cov(rng, 2)
    assert np.allclose(partial_transpose(partial_transpose(V)), V)


def test_partial_transpose_needs_two_modes():
    with pytest.raises(DimensionError):
        partial_transpose(vacuum(3))


def test_tmsv_partial_transpose_eigenvalue():
    for s in (0.2, 1.0, 1.7):
        nu_min = min_symplectic_eigenvalue(partial_transpose(two_mode_squeezed(s)))
        assert nu_min == pytest.approx(0.5 * np.exp(-2 * s), rel=1e-10)


def test_log_negativity_vacuum_and_thermal_zero():
    assert log_negativity(vacuum(2)) == 0.0
    assert log_negativity(2.3 * np.eye(4)) == 0.0


def test_log_negativity_tmsv():
    assert log_negativity(two_mode_squeezed(1.0)) == pytest.approx(
        TWO_OVER_LN2, rel=1e-10
    )
    # E_N = 2 s / ln 2 for the two-mode squeezed vacuum
    for s in (0.4, 1.5):
        assert log_negativity(two_mode_squeezed(s)) == pytest.approx(
            2 * s / np.log(2), rel=1e-10
        )


def test_log_negativity_warns_on_unphysical():
    with pytest.warns(PhysicalityWarning):
        log_negativity(0.3 * np.eye(4))


@pytest.mark.parametrize(
    "v11, v22, v12, expected",
    [(1.0, 0.5, 0.0, 0.0), (1.0, 1.0, 0.3, np.pi / 2), (1.2, 0.8, 0.2, np.pi / 4)],
)
def test_rotation_angle_quadrants(v11, v22, v12, expected):
    V = vacuum(2)
    V[0, 0], V[1, 1] = v11, v22
    V[0, 1] = V[1, 0] = v12
    assert rotation_angle(V) == pytest.approx(expected, abs=1e-12)


def test_rotation_angle_degenerate_flag():
    with pytest.warns(DegenerateAngleWarning):
        assert rotation_angle(vacuum(2)) == 0.0


def test_rotate_local_identity_and_alignment(rng):
    V = random_physical_cov(rng, 2)
    assert np.allclose(rotate_local(V, 0.0), V)
    theta = rotation_angle(V)
    Vbar = rotate_local(V, theta)
    assert abs(Vbar[0, 1]) < 1e-10 * np.abs(V).max()
    assert Vbar[0, 0] - Vbar[1, 1] >= 0.0


def test_rotate_local_preserves_spectrum_and_negativity(rng):
    for _ in range(5):
        V = random_physical_cov(rng, 2)
        theta = rng.uniform(-np.pi, np.pi)
        Vbar = rotate_local(V, theta)
        assert np.allclose(
            symplectic_eigenvalues(Vbar), symplectic_eigenvalues(V), rtol=1e-10
        )
        assert log_negativity(Vbar) == pytest.approx(log_negativity(V), abs=1e-10)


def test_relative_mode_variances_vacuum_and_offdiag():
    assert relative_mode_variances(vacuum(2)) == (0.5, 0.5, 0.5, 0.5)
    V = vacuum(2)
    V[1, 3] = V[3, 1] = -0.1
    dq_m, dp_m, dq_p, dp_p = relative_mode_variances(V)
    assert dp_m == pytest.approx(0.6)
    assert dp_p == pytest.approx(0.4)


def test_relative_mode_variances_tmsv():
    s = 0.8
    dq_m, dp_m, dq_p, dp_p = relative_mode_variances(two_mode_squeezed(s))
    assert dq_m == pytest.approx(0.5 * np.exp(-2 * s), rel=1e-12)
    assert dp_m == pytest.approx(0.5 * np.exp(2 * s), rel=1e-12)
    assert dq_p == pytest.approx(0.5 * np.exp(2 * s), rel=1e-12)
    assert dp_p == pytest.approx(0.5 * np.exp(-2 * s), rel=1e-12)


def test_relative_mode_variances_rejects_negative():
    V = vacuum(2)
    V[1, 3] = V[3, 1] = -0.8  # dP2_plus would be -0.3
    with pytest.raises(PhysicalityError):
        relative_mode_variances(V)


def test_mean_phonon():
    assert mean_phonon(vacuum(2), 0) == 0.0
    assert mean_phonon(thermal([1.7, 0.2]), 0) == pytest.approx(1.7)
    assert mean_phonon(thermal([1.7, 0.2]), 1) == pytest.approx(0.2)
    s = 0.9
    V = np.diag([np.exp(2 * s) / 2, np.exp(-2 * s) / 2])
    V = np.block([[V, np.zeros((2, 2))], [np.zeros((2, 2)), vacuum(1)]])
    assert mean_phonon(V, 0) == pytest.approx(np.sinh(s) ** 2, rel=1e-12)


def test_mean_phonon_bad_mode():
    with pytest.raises(DimensionError):
        mean_phonon(vacuum(2), 2)


def test_quadrature_observables_consistency(rng):
    for _ in range(5):
        V = random_physical_cov(rng, 2)
        obs = quadrature_observables(V)
        assert obs.nu_tilde[0] <= obs.nu_tilde[1]
        assert obs.dP2_minus * obs.dQ2_minus >= 0.25 - 1e-9
        assert obs.E_N == pytest.approx(log_negativity(V), abs=1e-12)
