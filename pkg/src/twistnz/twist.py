"""Twisted gluing and Neumann-Zagier matrices, and their structure checks.

Given a cocycle alpha (an integer per face-pairing, closing up around every
edge), each wedge visit in an edge-class walk acquires an integer offset:
the running signed sum of cocycle values over the face pairings crossed.
Recording t^offset instead of 1 in the quad incidence matrices produces the
twisted gluing matrices G(t), G'(t), G''(t) and from them the twisted
Neumann-Zagier matrices

    A(t) = G(t) - G'(t),      B(t) = G''(t) - G'(t).

Rows are defined up to a monomial (the choice of lifted edge / starting
wedge and offset); columns up to a monomial (the choice of lifted
tetrahedron, equivalently a coboundary shift of alpha).  The checks below
verify the symplectic property of the pair (A(t), B(t)), the block-circulant
factorization over cyclic covers, and the exact matrix identity relating the
matrices before and after a 2-3 move.
"""

from __future__ import annotations

from .laurent import LaurentMatrix, LaurentPoly


class TwistError(ValueError):
    pass


def _cocycle_values(T, phi):
    if phi is None:
        phi = T.cocycle
        if phi is None:
            raise TwistError("no cocycle given and none stored on the triangulation")
    vals = list(phi.values if hasattr(phi, "values") else phi)
    if len(vals) != len(T.face_pairings):
        raise TwistError(
            f"cocycle has {len(vals)} values for {len(T.face_pairings)} face-pairings")
    return vals


def _rotated_visits(ec, start_wedge):
    for m, v in enumerate(ec.visits):
        if (v.tet, v.pair) == start_wedge:
            return ec.visits[m:] + ec.visits[:m]
    raise TwistError(f"wedge {start_wedge} not on edge class {ec.index}")


def twisted_gluing_matrices(T, phi=None, row_plan=None):
    """The triple (G(t), G'(t), G''(t)) as integer Laurent matrices.

    row_plan, when given, is a list of (start_wedge, start_offset) pairs; row
    r of the output is the edge class through start_wedge, walked from that
    wedge with the given initial offset.  By default rows follow the
    triangulation's edge-class order, anchored at offset 0 on each class's
    first wedge.

    Raises TwistError if the cocycle fails to close around some edge.
    """
    vals = _cocycle_values(T, phi)
    n = T.n_tets
    if row_plan is None:
        plan = [((ec.visits[0].tet, ec.visits[0].pair), 0) for ec in T.edge_classes]
    else:
        plan = list(row_plan)
        if len(plan) != n:
            raise TwistError(f"row plan must cover all {n} edge classes")
    mats = [[[LaurentPoly.zero() for _ in range(n)] for _ in range(n)]
            for _ in range(3)]
    for r, (wedge, start) in enumerate(plan):
        ec = T.edge_classes[T.wedge_class[wedge]]
        visits = _rotated_visits(ec, wedge)
        d = start
        for v in visits:
            mats[v.quad][r][v.tet] = mats[v.quad][r][v.tet] + LaurentPoly.term(1, d)
            d += v.sign * vals[v.pairing]
        if d != start:
            raise TwistError(
                f"cocycle does not close around edge class {ec.index}: "
                f"offset drifts by {d - start}")
    return tuple(LaurentMatrix.from_rows(m) for m in mats)


def twisted_nz_matrices(T, phi=None, row_plan=None):
    """A(t) = G(t) - G'(t) and B(t) = G''(t) - G'(t)."""
    Gt, Gpt, Gppt = twisted_gluing_matrices(T, phi, row_plan)
    return Gt - Gpt, Gppt - Gpt


# --- structure checks --------------------------------------------------------

def symplectic_defect(A, B):
    """S(t) = A(t) B(1/t)^T - B(t) A(1/t)^T, identically zero for NZ pairs."""
    Bi = B.involute().transpose()
    Ai = A.involute().transpose()
    return (A @ Bi) - (B @ Ai)


def check_symplectic(T, phi=None, points=8):
    """Exact and numeric forms of the symplectic relation.

    Exact: every coefficient of S(t) vanishes.  Numeric: at `points` points
    omega on the unit circle, A(omega) B(omega)^* is Hermitian (for real t
    coefficients these are the same statement; the numeric form is reported
    as a cross-check).
    """
    import numpy as np

    A, B = twisted_nz_matrices(T, phi)
    S = symplectic_defect(A, B)
    exact = S.max_coeff_abs()
    herm = 0.0
    for k in range(points):
        w = np.exp(2j * np.pi * (k + 0.375) / points)
        H = A.evaluate(w) @ B.evaluate(w).conj().T
        herm = max(herm, float(np.max(np.abs(H - H.conj().T))))
    return {
        "pass": exact == 0,
        "max_abs_coeff": float(exact),
        "hermitian_residual": herm,
    }


def fit_monomial_shifts(M, target, rows_only=False):
    """Monomial row/column rescalings carrying M onto target, or None.

    Seeks integers r_i (and c_j unless rows_only) with
    M[i,j] = t^(r_i + c_j) * target[i,j] for all i, j.  Used to compare
    twisted matrices computed with different edge-lift or tetrahedron-lift
    choices.  Returns (row_shifts, col_shifts).
    """
    if M.rows != target.rows or M.cols != target.cols:
        return None
    nr, nc = M.rows, M.cols
    shift = {}
    for i in range(nr):
        for j in range(nc):
            p, q = M[i, j], target[i, j]
            if p.is_zero() != q.is_zero():
                return None
            if p.is_zero():
                continue
            s = p.min_exp() - q.min_exp()
            if p != q.shift(s):
                return None
            shift[(i, j)] = s
    rowv = [None] * nr
    colv = [None] * nc
    if rows_only:
        # column shifts pinned to zero, so each row shift is forced
        for i in range(nr):
            vals = {shift[(i, j)] for j in range(nc) if (i, j) in shift}
            if len(vals) > 1:
                return None
            if vals:
                rowv[i] = vals.pop()
        return ([r if r is not None else 0 for r in rowv], [0] * nc)
    # propagate assignments across the bipartite support graph
    for i0 in range(nr):
        if rowv[i0] is not None or not any((i0, j) in shift for j in range(nc)):
            continue
        rowv[i0] = 0
        stack = [("r", i0)]
        while stack:
            kind, idx = stack.pop()
            if kind == "r":
                for j in range(nc):
                    if (idx, j) in shift:
                        want = shift[(idx, j)] - rowv[idx]
                        if colv[j] is None:
                            colv[j] = want
                            stack.append(("c", j))
                        elif colv[j] != want:
                            return None
            else:
                for i in range(nr):
                    if (i, idx) in shift:
                        want = shift[(i, idx)] - colv[idx]
                        if rowv[i] is None:
                            rowv[i] = want
                            stack.append(("r", i))
                        elif rowv[i] != want:
                            return None
    return ([r if r is not None else 0 for r in rowv],
            [c if c is not None else 0 for c in colv])


def coefficient_blocks(Mt):
    """Integer coefficient matrices {k: X_k} with Mt = sum_k X_k t^k."""
    blocks = {}
    for i in range(Mt.rows):
        for j in range(Mt.cols):
            for k, c in Mt[i, j].coeffs.items():
                X = blocks.setdefault(k, [[0] * Mt.cols for _ in range(Mt.rows)])
                X[i][j] = int(c)
    return blocks


def circulant_assemble(Mt, n):
    """Block matrix with block (r, s) = sum of X_k over k = s - r (mod n).

    Mt is an N x N integer Laurent matrix; the result is an (nN) x (nN)
    plain integer matrix, the untwisted matrix of the n-fold cyclic cover in
    the sheet-major ordering.
    """
    N = Mt.rows
    blocks = coefficient_blocks(Mt)
    out = [[0] * (n * N) for _ in range(n * N)]
    for k, X in blocks.items():
        for r in range(n):
            s = (r + k) % n
            for i in range(N):
                row = out[r * N + i]
                Xi = X[i]
                for j in range(N):
                    row[s * N + j] += Xi[j]
    return out


def cover_row_plan(T, Tn, n):
    """Row order (sheet-major lifts of base edges) for a cyclic cover's walks.

    Row r*N + i is the lift of base edge class i through sheet r, anchored at
    the lifted copy of the base class's first wedge.
    """
    N = T.n_tets
    plan = [None] * (n * N)
    for i, ec in enumerate(T.edge_classes):
        j0, pair0 = ec.visits[0].tet, ec.visits[0].pair
        for r in range(n):
            plan[r * N + i] = ((r * N + j0, pair0), 0)
    if any(p is None for p in plan):
        raise TwistError("cover row plan incomplete")  # pragma: no cover
    covered = {Tn.wedge_class[w] for w, _ in plan}
    if len(covered) != n * N:
        raise TwistError("lifted edges do not enumerate the cover's edge classes")
    return plan


def check_cover_factorization(T, phi=None, n=2):
    """Untwisted cover matrices vs circulant assembly of twisted blocks.

    Builds the n-fold cyclic cover, reads off its plain gluing matrices in
    the lifted row order, and compares entrywise with the block-circulant
    assembly of the base triangulation's twisted matrices.
    """
    from .triangulation import cyclic_cover

    vals = _cocycle_values(T, phi)
    Tn = cyclic_cover(T, vals, n)
    plan = cover_row_plan(T, Tn, n)
    base = twisted_gluing_matrices(T, vals)
    # untwisted matrices of the cover, rows in lifted order
    NN = n * T.n_tets
    cover = [[[0] * NN for _ in range(NN)] for _ in range(3)]
    for r, (wedge, _) in enumerate(plan):
        ec = Tn.edge_classes[Tn.wedge_class[wedge]]
        for v in ec.visits:
            cover[v.quad][r][v.tet] += 1
    ok = True
    for q in range(3):
        if circulant_assemble(base[q], n) != cover[q]:
            ok = False
    return {"pass": ok, "cover": Tn, "row_plan": plan}


def check_pachner_nz(T, phi, move):
    """Exact matrix identity between twisted NZ matrices across a 2-3 move.

    With rows of the new matrices ordered (new core edge, then the old edges
    in their old order, anchored at transported wedges) and columns
    (three new tets, then surviving old tets), there is a lower-triangular
    P with unit diagonal -- its nontrivial entries confined to the first
    column -- such that

        P Abar(t) = [[-1,-1,-1, 0...],
                     [B_a + B_b | A_a | A_b | A_rest]],
        P Bbar(t) = [[-1,-1,-1, 0...],
                     [0 | A_b + B_a | A_a + B_b | B_rest]],

    where A_a (resp. B_a) is the column of the old A(t), B(t) at the
    dissolved tetrahedron a, and A_rest, B_rest the remaining columns.  The
    b-columns need two adjustments before they fit this frame: the quad
    roles (z, z', z'') of tet b relative to the move are move.beta_quads
    (its apex may be labeled differently from tet a's), so

        A_b = t^-d (G^(q0) - G^(q1))[:, b],
        B_b = t^-d (G^(q2) - G^(q1))[:, b],

    with (q0, q1, q2) = move.beta_quads; and tet b sits at lift level
    d = move.beta_level across the shared face while the three new
    tetrahedra inherit tet a's level, whence the monomial.  P is solved for
    by forward substitution and both identities are verified exactly; any
    mismatch is reported.
    """
    vals = _cocycle_values(T, phi)
    Tn = move.triangulation
    N = T.n_tets
    Gt = twisted_gluing_matrices(T, vals)
    A, B = Gt[0] - Gt[1], Gt[2] - Gt[1]
    plan = [(move.new_edge_start, 0)]
    for ec in T.edge_classes:
        w0 = (ec.visits[0].tet, ec.visits[0].pair)
        plan.append(move.wedge_map[w0])
    seen_classes = {Tn.wedge_class[w] for w, _ in plan}
    if len(seen_classes) != N + 1:
        raise TwistError("transported wedges do not enumerate the new edges")
    Abar, Bbar = twisted_nz_matrices(Tn, None, row_plan=plan)

    al, be = move.alpha_index, move.beta_index
    q0, q1, q2 = move.beta_quads
    lvl = LaurentPoly.term(1, -move.beta_level)
    Ab = [(Gt[q0][i, be] - Gt[q1][i, be]) * lvl for i in range(N)]
    Bb = [(Gt[q2][i, be] - Gt[q1][i, be]) * lvl for i in range(N)]
    rest = [t for t in range(N) if t not in (al, be)]
    zero = LaurentPoly.zero()
    minus1 = LaurentPoly.term(-1, 0)
    ta_rows = [[minus1, minus1, minus1] + [zero] * (N - 2)]
    tb_rows = [[minus1, minus1, minus1] + [zero] * (N - 2)]
    for i in range(N):
        ta_rows.append([B[i, al] + Bb[i], A[i, al], Ab[i]]
                       + [A[i, j] for j in rest])
        tb_rows.append([zero, Ab[i] + B[i, al], A[i, al] + Bb[i]]
                       + [B[i, j] for j in rest])
    TA = LaurentMatrix.from_rows(ta_rows)
    TB = LaurentMatrix.from_rows(tb_rows)

    # P = I + (first-column corrections); row 0 of both new matrices must be
    # the core edge row (-1,-1,-1,0,...), which P fixes.
    head = Abar.row(0)
    if head != TA.row(0) or Bbar.row(0) != TB.row(0):
        return {"pass": False, "reason": "new core edge row is not (-1,-1,-1,0,...)",
                "row": [str(p) for p in head]}
    corrections = []
    for i in range(1, N + 1):
        resid = [TA[i, j] - Abar[i, j] for j in range(N + 1)]
        c = -resid[0]
        if any(resid[j] != c * head[j] for j in range(N + 1)):
            return {"pass": False,
                    "reason": f"A-identity residual at row {i} is not a "
                              f"multiple of the core edge row"}
        corrections.append(c)
    for i in range(1, N + 1):
        c = corrections[i - 1]
        for j in range(N + 1):
            if Bbar[i, j] + c * head[j] != TB[i, j]:
                return {"pass": False,
                        "reason": f"B-identity fails at ({i}, {j}) with the "
                                  f"P solved from the A-identity"}
    return {
        "pass": True,
        "P_first_column": [str(c) for c in corrections],
    }
