import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistnz.shapes import (
    SolverError,
    _equation_rows,
    _jacobian,
    _residuals,
    solve_shapes,
    verify_solution,
    zeta_triple,
)

GOLDEN_Z = (1 + cmath.sqrt(-3)) / 2

SIX3_SHAPES = [
    0.23279 + 0.64139j,
    0.15884 + 1.20014j,
    0.84116 + 1.20014j,
    0.15884 + 1.20014j,
    0.84116 + 1.20014j,
    0.23279 + 0.64139j,
]


# --- zeta variables ---------------------------------------------------------


def test_zeta_at_golden_shape():
    zeta, zp, zpp = zeta_triple(np.array([GOLDEN_Z]))
    assert abs(zeta[0] - (1 - cmath.sqrt(-3)) / 2) < 1e-15
    assert abs(zp[0] - (1 + cmath.sqrt(-3)) / 2) < 1e-15
    assert abs(zpp[0] - (-1)) < 1e-15


def test_zeta_at_two():
    zeta, zp, zpp = zeta_triple(np.array([2.0 + 0j]))
    assert abs(zeta[0] - 0.5) < 1e-15
    assert abs(zp[0] + 1.0) < 1e-15
    assert abs(zpp[0] - 0.5) < 1e-15


@given(st.complex_numbers(max_magnitude=10, allow_nan=False,
                          allow_infinity=False).filter(
                              lambda z: abs(z) > 1e-3 and abs(z - 1) > 1e-3))
def test_zeta_linear_relation(z):
    zeta, zp, zpp = zeta_triple(np.array([z]))
    assert abs(zeta[0] + zp[0] + zpp[0]) < 1e-9 * max(
        1.0, abs(zeta[0]), abs(zp[0]), abs(zpp[0]))


# --- shape solving ---------------------------------------------------------


def test_solve_fig8(fig8):
    sol = solve_shapes(fig8)
    assert max(abs(z - GOLDEN_Z) for z in sol.z) < 1e-12
    assert sol.residual < 1e-12
    assert all(z.imag > 0 for z in sol.z)
    # |z| = 1 and z z' z'' = -1 at the complete structure
    for z in sol.z:
        assert abs(abs(z) - 1) < 1e-12
        zpp = 1 - 1 / z
        zp = 1 / (1 - z)
        assert abs(z * zp * zpp + 1) < 1e-12


def test_solve_six3(six3):
    sol = solve_shapes(six3)
    assert max(abs(a - b) for a, b in zip(sol.z, SIX3_SHAPES)) < 1e-4
    assert sol.residual < 1e-12


def test_solver_is_deterministic(fig8):
    a = solve_shapes(fig8)
    b = solve_shapes(fig8)
    assert all(x == y for x, y in zip(a.z, b.z))
    assert a.iterations == b.iterations


def test_verify_solution_detects_perturbation(fig8):
    sol = solve_shapes(fig8)
    rep = verify_solution(fig8, sol.z)
    assert rep["max_residual"] < 1e-12
    assert set(rep["residuals"]) == {"edge 0", "edge 1", "curve meridian",
                                     "curve longitude"}
    bumped = [z + 1e-3 for z in sol.z]
    rep2 = verify_solution(fig8, bumped)
    assert rep2["max_residual"] >= 1e-4


def test_certificate_windings(fig8):
    sol = solve_shapes(fig8)
    cert = sol.certificate
    assert cert["max_residual"] < 1e-9
    for label, w in zip(cert["labels"], cert["windings"]):
        assert w == (1 if label.startswith("edge") else 0)


def test_certify_rejects_off_solution_point(fig8):
    from twistnz.shapes import certify_solution

    sol = solve_shapes(fig8)
    with pytest.raises(SolverError):
        certify_solution(fig8, [z + 1e-3 for z in sol.z])


# --- Jacobian ---------------------------------------------------------------


@pytest.mark.parametrize("name", ["4_1", "6_3"])
def test_jacobian_matches_finite_differences(name, fig8, six3):
    T = {"4_1": fig8, "6_3": six3}[name]
    sol = solve_shapes(T)
    rows, _targets, _labels = _equation_rows(T)
    rng = np.random.default_rng(42)
    z0 = np.array(sol.z) + 0.01 * (rng.standard_normal(T.n_tets)
                                   + 1j * rng.standard_normal(T.n_tets))
    J = _jacobian(rows, z0)
    h = 1e-7
    for j in range(T.n_tets):
        dz = np.zeros(T.n_tets, dtype=complex)
        dz[j] = h
        f_plus = np.array(_residuals(rows, [0] * len(rows), z0 + dz))
        f_minus = np.array(_residuals(rows, [0] * len(rows), z0 - dz))
        fd = (f_plus - f_minus) / (2 * h)
        denom = np.maximum(np.abs(J[:, j]), 1.0)
        assert np.max(np.abs(fd - J[:, j]) / denom) < 1e-6
