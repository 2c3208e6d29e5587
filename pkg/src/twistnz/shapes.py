"""Geometric shape parameters of an ideal triangulation via Newton's method.

The complete hyperbolic structure is the solution of the logarithmic gluing
equations: every edge class has angle sum 2*pi*i (with rotational holonomy),
and the meridian has trivial translational holonomy.  For a one-cusped
triangulation with N tetrahedra the edge equations have rank N-1, so the
square system solved here is the first N-1 edge equations plus the meridian
equation; the omitted edge equation and the longitude are verified after the
fact, together with the integer winding of every equation in principal
logarithm branches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SolverError(RuntimeError):
    pass


TWO_PI_I = 2j * np.pi


def zeta_triple(z):
    """Logarithmic derivatives (zeta, zeta', zeta'') of the shape cycle.

    zeta = 1/z, zeta' = 1/(1-z), zeta'' = 1/(z(z-1)); they sum to zero.

    >>> z = (1 + 1j * 3 ** 0.5) / 2
    >>> zeta, zp, zpp = zeta_triple(z)
    >>> np.allclose(zeta, (1 - 1j * 3 ** 0.5) / 2), np.allclose(zp, z)
    (True, True)
    >>> np.allclose(zpp, -1), abs(zeta + zp + zpp) < 1e-15
    (True, True)
    """
    return 1.0 / z, 1.0 / (1.0 - z), 1.0 / (z * (z - 1.0))


def _equation_rows(T, include_all_edges=False):
    """(matrix triple rows, targets, labels) for the equation system."""
    G, Gp, Gpp = T.gluing_matrices()
    n = T.n_tets
    rows, targets, labels = [], [], []
    n_edges = n if include_all_edges else n - 1
    for i in range(n_edges):
        rows.append((G[i], Gp[i], Gpp[i]))
        targets.append(TWO_PI_I)
        labels.append(f"edge {i}")
    if include_all_edges:
        for c in T.peripheral_curves:
            rows.append((c.C, c.Cp, c.Cpp))
            targets.append(0.0)
            labels.append(f"curve {c.name}")
    else:
        m = T.curve_by_name("meridian")
        rows.append((m.C, m.Cp, m.Cpp))
        targets.append(0.0)
        labels.append("curve meridian")
    return rows, targets, labels


def _residuals(rows, targets, z):
    lz = np.log(z)
    lzp = np.log(1.0 / (1.0 - z))
    lzpp = np.log(1.0 - 1.0 / z)
    out = []
    for (r, rp, rpp), tgt in zip(rows, targets):
        out.append(np.dot(r, lz) + np.dot(rp, lzp) + np.dot(rpp, lzpp) - tgt)
    return np.array(out)


def _jacobian(rows, z):
    zeta, zp, zpp = zeta_triple(z)
    J = np.empty((len(rows), len(z)), dtype=complex)
    for i, (r, rp, rpp) in enumerate(rows):
        J[i] = np.asarray(r) * zeta + np.asarray(rp) * zp + np.asarray(rpp) * zpp
    return J


@dataclass
class ShapeSolution:
    z: np.ndarray
    iterations: int
    residual: float
    certificate: dict


def solve_shapes(T, tol=1e-12, max_iter=100):
    """Newton iteration for the geometric shapes from the seed exp(i*pi/3).

    Converges when the max equation residual drops below tol.  Raises
    SolverError on non-convergence, on an iterate degenerating to 0 or 1,
    and when the converged point fails the post-hoc certificate (the omitted
    edge equation, the holonomy of every stored curve, and integer windings).
    """
    n = T.n_tets
    rows, targets, _ = _equation_rows(T)
    z = np.full(n, np.exp(1j * np.pi / 3), dtype=complex)
    for it in range(max_iter):
        F = _residuals(rows, targets, z)
        res = float(np.max(np.abs(F)))
        if res < tol:
            cert = certify_solution(T, z, tol=max(tol * 100, 1e-9))
            return ShapeSolution(z=z, iterations=it, residual=res,
                                 certificate=cert)
        J = _jacobian(rows, z)
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError as e:
            raise SolverError(f"singular Jacobian at iteration {it}: {e}") from None
        z = z - step
        if np.any(np.abs(z) < 1e-8) or np.any(np.abs(z - 1.0) < 1e-8):
            raise SolverError(
                f"iterate degenerated to 0 or 1 at iteration {it + 1}")
    raise SolverError(f"no convergence to {tol} within {max_iter} iterations")


def certify_solution(T, z, tol=1e-9):
    """Full-system residuals plus integer winding bookkeeping.

    Every edge equation must hold with winding exactly one turn (sum of
    principal logs equal to 2*pi*i on the nose) and every stored peripheral
    curve must have vanishing holonomy with zero winding.  Raises
    SolverError otherwise; returns the certificate dict.
    """
    rows, targets, labels = _equation_rows(T, include_all_edges=True)
    F = _residuals(rows, targets, np.asarray(z, dtype=complex))
    windings = []
    for resid, tgt, label in zip(F, targets, labels):
        total = resid + tgt
        k = int(np.round(float(np.imag(total) / (2 * np.pi))))
        expected = 1 if label.startswith("edge") else 0
        if k != expected:
            raise SolverError(
                f"{label}: log branches wind {k} times, expected {expected}")
        windings.append(k)
    res = float(np.max(np.abs(F)))
    if res > tol:
        raise SolverError(f"certificate residual {res:.3e} exceeds {tol:.1e}")
    return {
        "labels": labels,
        "windings": windings,
        "max_residual": res,
    }


def verify_solution(T, z):
    """Residuals of all edge and curve equations at z (no exceptions)."""
    rows, targets, labels = _equation_rows(T, include_all_edges=True)
    F = _residuals(rows, targets, np.asarray(z, dtype=complex))
    return {
        "residuals": {label: float(abs(v)) for label, v in zip(labels, F)},
        "max_residual": float(np.max(np.abs(F))),
    }
