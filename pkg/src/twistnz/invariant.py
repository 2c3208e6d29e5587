"""The 1-loop invariant and its twisted polynomial version.

For a geometric solution z and a combinatorial flattening (f, f', f''), the
1-loop invariant along a peripheral curve gamma is

    tau_gamma = det(Ahat diag(zeta) + Bhat diag(zeta'')) /
                (2 prod_j zeta_j^{f_j} zeta'_j^{f'_j} zeta''_j^{f''_j}),

defined up to sign, where the hat replaces the last matrix row by gamma's
combined curve row.  The twisted version replaces (A, B) by the twisted
matrices (A(t), B(t)) of a cocycle alpha, drops the factor 2 and the hat
row, and lands in C[t, 1/t] up to multiplication by +-t^k:

    tau(t) = det(A(t) diag(zeta) + B(t) diag(zeta'')) /
             prod_j zeta_j^{f_j} zeta'_j^{f'_j} zeta''_j^{f''_j}.

The checks in this module exercise its structural properties: invariance
under 2-3 moves up to sign, the cyclic-cover product formula, the symmetry
t <-> 1/t, palindromicity of det A(t) and det B(t), and the derivative
formula tying tau'(1) to the 1-loop invariant along the alpha-trivial
longitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .laurent import (
    CanonicalForm,
    LaurentPoly,
    lmat_det_exact,
    lmat_det_numeric,
    lp_canonicalize,
    lp_eq_mod,
    lp_is_palindromic,
)
from .shapes import zeta_triple
from .triangulation import cyclic_cover
from .twist import twisted_gluing_matrices, twisted_nz_matrices


class InvariantError(RuntimeError):
    pass


ROUTE_TOL = 1e-9


def _denominator(z, flat):
    zeta, zp, zpp = zeta_triple(np.asarray(z, dtype=complex))
    f, fp, fpp = flat.triple()
    out = 1.0 + 0.0j
    for j in range(len(f)):
        out *= zeta[j] ** f[j] * zp[j] ** fp[j] * zpp[j] ** fpp[j]
    return out


def one_loop(T, z, flat, curve_name="longitude"):
    """tau along the named peripheral curve, a complex number up to sign."""
    curve = T.curve_by_name(curve_name)
    z = np.asarray(z, dtype=complex)
    zeta, zp, zpp = zeta_triple(z)
    G, Gp, Gpp = (np.array(M, dtype=complex) for M in T.gluing_matrices())
    for M, row in ((G, curve.C), (Gp, curve.Cp), (Gpp, curve.Cpp)):
        M[-1, :] = row
    A = G - Gp
    B = Gpp - Gp
    num = np.linalg.det(A @ np.diag(zeta) + B @ np.diag(zpp))
    return num / (2.0 * _denominator(z, flat))


@dataclass
class TwistedOneLoop:
    poly: LaurentPoly          # a representative in C[t, 1/t]
    canonical: CanonicalForm   # normalized modulo +-t^k
    route_residual: float      # disagreement between the two determinant routes


def twisted_one_loop(T, z, flat, phi=None, row_plan=None):
    """The twisted 1-loop polynomial tau(t), computed two ways.

    The determinant is evaluated once from (A(t), B(t)) and once from the
    three-term gluing-matrix form G(t) diag(zeta) + G'(t) diag(zeta') +
    G''(t) diag(zeta''); the two must agree coefficientwise to 1e-9, which
    guards the matrix plumbing.
    """
    z = np.asarray(z, dtype=complex)
    zeta, zp, zpp = zeta_triple(z)
    Gt, Gpt, Gppt = twisted_gluing_matrices(T, phi, row_plan)
    At, Bt = Gt - Gpt, Gppt - Gpt
    M1 = _scale_cols(At, zeta) + _scale_cols(Bt, zpp)
    M2 = (_scale_cols(Gt, zeta) + _scale_cols(Gpt, zp)
          + _scale_cols(Gppt, zpp))
    det1 = lmat_det_numeric(M1)
    det2 = lmat_det_numeric(M2)
    diff = det1 - det2
    route_residual = float(diff.max_abs()) if not diff.is_zero() else 0.0
    if route_residual > ROUTE_TOL:
        raise InvariantError(
            f"determinant routes disagree by {route_residual:.3e}")
    tau = det1 * (1.0 / _denominator(z, flat))
    return TwistedOneLoop(poly=tau, canonical=lp_canonicalize(tau, eps=1e-12),
                          route_residual=route_residual)


def _scale_cols(M, scalars):
    out = M
    for j, s in enumerate(scalars):
        out = out.scale_col(j, complex(s))
    return out


def _fit_unit(p, q):
    """Least-squares scalar mu with q ~ mu * p after min-exponent alignment."""
    p = p.shift(-p.min_exp())
    q = q.shift(-q.min_exp())
    keys = sorted(set(p.coeffs) | set(q.coeffs))
    pv = np.array([complex(p[k]) for k in keys])
    qv = np.array([complex(q[k]) for k in keys])
    denom = float(np.vdot(pv, pv).real)
    if denom == 0.0:
        return 0.0 + 0.0j, float(np.max(np.abs(qv))) if len(keys) else 0.0
    mu = complex(np.vdot(pv, qv)) / denom
    resid = float(np.max(np.abs(qv - mu * pv)))
    return mu, resid


def check_pachner_invariance(T, z, flat, move, phi=None, tol=1e-8):
    """tau(t) agrees before and after a 2-3 move, up to sign and monomial.

    The scalar relating the aligned polynomials is solved by least squares
    and must be +1 or -1; any other fit, however good, is a failure.
    """
    before = twisted_one_loop(T, z, flat, phi).poly
    if move.shapes is None or move.flattening is None:
        raise InvariantError("move was made without shapes or flattening")
    after = twisted_one_loop(move.triangulation, move.shapes,
                             move.flattening).poly
    mu, resid = _fit_unit(before, after)
    scale = float(np.max(np.abs(list(before.coeffs.values()) or [1.0])))
    sign_ok = min(abs(mu - 1.0), abs(mu + 1.0)) <= tol
    agrees = lp_eq_mod(before, after, tol=tol * scale)
    return {
        "pass": bool(agrees and sign_ok and resid <= tol * scale),
        "scalar": mu,
        "residual": resid / scale if scale else resid,
    }


def check_cyclic_product(T, z, flat, n, phi=None, tol=1e-6):
    """tau of the n-fold cyclic cover at t^n vs the product over nth roots.

    The left side is computed on the cover (cocycle, shapes, and flattening
    all transported sheetwise); the right side is
    prod_{m=0}^{n-1} tau(T, omega^m t) with omega = exp(2 pi i / n).  The
    sides agree up to one unit-modulus scalar times a monomial, fitted by
    least squares.
    """
    from .homology import Flattening

    vals = list(phi.values if hasattr(phi, "values") else (phi or T.cocycle))
    cover = cyclic_cover(T, vals, n)
    z = np.asarray(z, dtype=complex)
    z_cover = np.concatenate([z] * n)
    flat_cover = Flattening(list(flat.f) * n, list(flat.fp) * n,
                            list(flat.fpp) * n)
    tau_cover = twisted_one_loop(cover, z_cover, flat_cover).poly
    lhs = tau_cover.stretch(n)

    tau = twisted_one_loop(T, z, flat, vals).poly
    omega = np.exp(2j * np.pi / n)
    rhs = LaurentPoly.one()
    for m in range(n):
        rhs = rhs * tau.scale_argument(omega ** m)
    mu, resid = _fit_unit(lhs, rhs)
    scale = float(np.max(np.abs(list(rhs.coeffs.values()) or [1.0])))
    return {
        "pass": bool(abs(abs(mu) - 1.0) <= tol and resid <= tol * scale),
        "scalar": mu,
        "residual": resid / scale if scale else resid,
    }


def check_derivative(T, z, flat, phi=None, tol=1e-8):
    """|tau'(1)| equals |tau_longitude|, and tau(1) = 0.

    The longitude here is the stored alpha-trivial peripheral curve.  Both
    quantities carry an overall sign ambiguity, so absolute values are
    compared.
    """
    tau = twisted_one_loop(T, z, flat, phi).poly
    at_one = abs(tau.evaluate(1.0))
    deriv = abs(tau.derivative().evaluate(1.0))
    lam = abs(one_loop(T, z, flat, "longitude"))
    return {
        "pass": bool(at_one <= tol and abs(deriv - lam) <= tol),
        "tau_at_1": at_one,
        "abs_derivative": deriv,
        "abs_one_loop_longitude": lam,
    }


def check_cover_derivative(T, z, flat, phi=None, tol=1e-6):
    """Degree-2 cover consistency: |tau_lambda(cover)| = |tau(T,-1)| |tau_lambda| / 2.

    The cover's longitude invariant is reached through the derivative
    formula applied on the cover, avoiding any need for lifted curve data.
    """
    from .homology import Flattening

    vals = list(phi.values if hasattr(phi, "values") else (phi or T.cocycle))
    cover = cyclic_cover(T, vals, 2)
    z = np.asarray(z, dtype=complex)
    flat2 = Flattening(list(flat.f) * 2, list(flat.fp) * 2, list(flat.fpp) * 2)
    tau2 = twisted_one_loop(cover, np.concatenate([z, z]), flat2).poly
    lhs = abs(tau2.derivative().evaluate(1.0))
    tau = twisted_one_loop(T, z, flat, vals).poly
    lam = abs(one_loop(T, z, flat, "longitude"))
    rhs = abs(tau.evaluate(-1.0)) * lam / 2.0
    return {
        "pass": bool(abs(lhs - rhs) <= tol * max(1.0, abs(rhs))),
        "cover_longitude": lhs,
        "predicted": rhs,
    }


def check_symmetry(T, z, flat, phi=None, tol=1e-8):
    """tau(t) = tau(1/t) up to sign and monomial; det A(t), det B(t) palindromic.

    The determinant palindromicity is exact integer arithmetic; the tau
    symmetry is numeric with the given tolerance.
    """
    tau = twisted_one_loop(T, z, flat, phi).poly
    scale = float(np.max(np.abs(list(tau.coeffs.values()) or [1.0])))
    sym = lp_eq_mod(tau, tau.involute(), tol=tol * scale)
    At, Bt = twisted_nz_matrices(T, phi)
    detA = lmat_det_exact(At)
    detB = lmat_det_exact(Bt)
    palA = lp_is_palindromic(detA)
    palB = lp_is_palindromic(detB)
    return {
        "pass": bool(sym and palA is not None and palB is not None),
        "tau_symmetric": bool(sym),
        "detA_palindromic": palA,
        "detB_palindromic": palB,
        "detA": detA,
        "detB": detB,
    }
