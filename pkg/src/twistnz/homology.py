"""Exact integer linear algebra and the two solvers built on it.

Smith normal form with unimodular transforms is the workhorse: it powers
integer linear system solving (for combinatorial flattenings), integer
kernels, and the quotient computation that extracts a generator of the free
part of first cohomology (the cocycle alpha on the dual 1-skeleton).

Matrices here are plain lists of lists of Python ints; inputs may be numpy
arrays and are copied.
"""

from __future__ import annotations

from dataclasses import dataclass


def _to_rows(M):
    return [[int(x) for x in row] for row in M]


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _mat_mul(A, B):
    n, k = len(A), len(B)
    m = len(B[0]) if k else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        for s in range(k):
            a = Ai[s]
            if a:
                Bs = B[s]
                oi = out[i]
                for j in range(m):
                    oi[j] += a * Bs[j]
    return out


def _mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def int_det(M):
    """Determinant of a square integer matrix, exact (Bareiss)."""
    a = _to_rows(M)
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_decomposition(M):
    """Smith normal form: returns (U, D, V) with U*M*V = D.

    U and V are unimodular; D is diagonal (as a rectangular matrix) with
    d1 | d2 | ... and nonnegative diagonal entries.  All lists of lists of
    Python ints, exact.
    """
    A = _to_rows(M)
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):
        # row i += q * row j
        A[i] = [a + q * b for a, b in zip(A[i], A[j])]
        U[i] = [a + q * b for a, b in zip(U[i], U[j])]

    def add_col(i, j, q):
        for row in A:
            row[i] += q * row[j]
        for row in V:
            row[i] += q * row[j]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]

    k = 0
    while k < min(m, n):
        exhausted = False
        while True:
            # Re-select the pivot before every sweep: the nonzero entry of
            # smallest magnitude in A[k:, k:].  Reducing against a stale
            # pivot lets quotients compound and entries blow up
            # exponentially; against the global minimum they stay tame.
            piv = None
            best = 0
            for i in range(k, m):
                for j in range(k, n):
                    a = abs(A[i][j])
                    if a and (piv is None or a < best):
                        piv, best = (i, j), a
            if piv is None:
                exhausted = True
                break
            if piv != (k, k):
                swap_rows(k, piv[0])
                swap_cols(k, piv[1])
            # One reduction sweep of column k and row k.
            for i in range(k + 1, m):
                if A[i][k]:
                    add_row(i, k, -(A[i][k] // A[k][k]))
            for j in range(k + 1, n):
                if A[k][j]:
                    add_col(j, k, -(A[k][j] // A[k][k]))
            if any(A[i][k] for i in range(k + 1, m)) or \
               any(A[k][j] for j in range(k + 1, n)):
                continue  # remainders are all smaller than the pivot
            # Pivot must divide every remaining entry for the chain d1|d2|...
            d = A[k][k]
            stain = None
            for i in range(k + 1, m):
                if any(A[i][j] % d for j in range(k + 1, n)):
                    stain = i
                    break
            if stain is None:
                break
            add_row(k, stain, 1)
            # Reduce the freshly stained row immediately: the offending
            # entry leaves a nonzero remainder below |d|, so the minimum
            # strictly shrinks and the loop terminates.
            for j in range(k + 1, n):
                if A[k][j]:
                    add_col(j, k, -(A[k][j] // A[k][k]))
        if exhausted:
            break
        if A[k][k] < 0:
            negate_row(k)
        k += 1
    return U, A, V


def smith_diagonal(D):
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def integer_solve(M, b):
    """One integer solution x of M x = b, or None if none exists.

    Uses the Smith decomposition: with U M V = D the system becomes
    D y = U b, solvable iff each pivot divides its right-hand entry and the
    zero rows have zero right-hand side; then x = V y.
    """
    U, D, V = smith_decomposition(M)
    m = len(D)
    n = len(D[0]) if m else 0
    ub = _mat_vec(U, list(map(int, b)))
    y = [0] * n
    r = min(m, n)
    for i in range(m):
        d = D[i][i] if i < r else 0
        if d:
            if ub[i] % d:
                return None
            y[i] = ub[i] // d
        elif ub[i]:
            return None
    return _mat_vec(V, y)


def kernel_basis(M):
    """Basis of the integer kernel {x : M x = 0}, as a list of vectors.

    The kernel of an integer matrix is a saturated sublattice, so the basis
    spans every rational kernel vector with integer coordinates.
    """
    U, D, V = smith_decomposition(M)
    m = len(D)
    n = len(D[0]) if m else 0
    rank = sum(1 for i in range(min(m, n)) if D[i][i])
    return [[V[i][j] for i in range(n)] for j in range(rank, n)]


def _solve_in_basis(basis, vec):
    """Coordinates of vec in the given lattice basis (columns), or error.

    basis: list of basis vectors (each length n); vec must be an exact
    integer combination of them.
    """
    cols = len(basis)
    M = [[basis[j][i] for j in range(cols)] for i in range(len(vec))]
    x = integer_solve(M, vec)
    if x is None:
        raise ArithmeticError("vector is not an integer combination of the basis")
    return x


class CocycleError(ValueError):
    pass


@dataclass
class Cocycle:
    """Integer value per face-pairing, representing alpha: pi_1(M) -> Z.

    sign_ambiguous is set when no meridian dual path was available to pin
    the t <-> 1/t choice.
    """

    values: list
    sign_ambiguous: bool = False

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def edge_relation_matrix(T):
    """Edges x face-pairings matrix of signed crossing counts."""
    R = [[0] * len(T.face_pairings) for _ in T.edge_classes]
    for i, ec in enumerate(T.edge_classes):
        for visit in ec.visits:
            R[i][visit.pairing] += visit.sign
    return R


def coboundary_matrix(T):
    """Face-pairings x tets matrix of the coboundary map.

    (delta c)(p) = c(head) - c(tail), where the dual edge of pairing p runs
    from side_a (tail) to side_b (head).
    """
    D = [[0] * T.n_tets for _ in T.face_pairings]
    for p in T.face_pairings:
        D[p.index][p.side_b[0]] += 1
        D[p.index][p.side_a[0]] -= 1
    return D


def apply_coboundary(T, phi, c):
    """New cocycle phi'(p) = phi(p) + c(head) - c(tail)."""
    vals = list(phi.values if isinstance(phi, Cocycle) else phi)
    if len(c) != T.n_tets:
        raise ValueError("coboundary vector length must equal the tetrahedron count")
    for p in T.face_pairings:
        vals[p.index] += int(c[p.side_b[0]]) - int(c[p.side_a[0]])
    amb = phi.sign_ambiguous if isinstance(phi, Cocycle) else False
    return Cocycle(vals, sign_ambiguous=amb)


def solve_cocycle(T):
    """A generator of the free part of H^1 of the dual 1-skeleton.

    Computes ker(edge relations) / im(coboundary) and requires its free rank
    to be exactly 1.  The representative is sign-normalized against the
    triangulation's meridian dual path when present (signed sum +1); without
    one, the first nonzero value is made positive and the result is flagged
    sign-ambiguous.
    """
    R = edge_relation_matrix(T)
    K = kernel_basis(R)
    if not K:
        raise CocycleError("edge-relation kernel is empty; no cocycle exists")
    delta = coboundary_matrix(T)
    # Coordinates of each coboundary generator inside the kernel lattice.
    cob_coords = []
    for j in range(T.n_tets):
        col = [delta[p][j] for p in range(len(T.face_pairings))]
        cob_coords.append(_solve_in_basis(K, col))
    k = len(K)
    Y = [[cob_coords[j][i] for j in range(T.n_tets)] for i in range(k)]
    U, D, V = smith_decomposition(Y)
    diag = smith_diagonal(D)
    rank = sum(1 for d in diag if d)
    free_rank = k - rank
    if free_rank != 1:
        raise CocycleError(
            f"free rank of H^1 is {free_rank}, not 1; manifold outside scope"
        )
    # Quotient coordinates w = U x; the free generator is the preimage of the
    # last unit vector, i.e. the corresponding row block of U^{-1} -- but a
    # generator modulo im(delta) is simpler to read off from U directly:
    # x = U^{-1} e_i has U x = e_i, so solve U x = e_free over the integers.
    e = [0] * k
    e[k - 1] = 1
    x = integer_solve(U, e)
    if x is None:
        raise CocycleError("unimodular solve failed")  # pragma: no cover
    vals = [sum(x[i] * K[i][p] for i in range(k)) for p in range(len(T.face_pairings))]
    # Sanity: the representative must satisfy every edge relation.
    for i, row in enumerate(R):
        if sum(r * v for r, v in zip(row, vals)):
            raise CocycleError(f"cocycle violates edge relation {i}")  # pragma: no cover
    if T.meridian_dual_path:
        s = 0
        for step in T.meridian_dual_path:
            idx = abs(step) - 1
            s += vals[idx] if step > 0 else -vals[idx]
        if abs(s) != 1:
            raise CocycleError(
                f"meridian dual path has alpha = {s}, expected +-1"
            )
        if s == -1:
            vals = [-v for v in vals]
        return Cocycle(vals, sign_ambiguous=False)
    lead = next((v for v in vals if v), 0)
    if lead < 0:
        vals = [-v for v in vals]
    return Cocycle(vals, sign_ambiguous=True)


class FlatteningError(ValueError):
    pass


@dataclass
class Flattening:
    """Integer triple (f, f', f'') satisfying the flattening system."""

    f: list
    fp: list
    fpp: list

    def triple(self):
        return self.f, self.fp, self.fpp


def solve_flattening(T):
    """An integer combinatorial flattening of T.

    Stacked system over x = (f, f', f''):
      gluing rows   G f + G' f' + G'' f'' = 2,
      tet rows      f + f' + f''          = 1,
      curve rows    C f + C' f' + C'' f'' = 0  (one per stored curve).
    Any integer solution is acceptable; existence is guaranteed for genuine
    ideal triangulations.
    """
    G, Gp, Gpp = T.gluing_matrices()
    N = T.n_tets
    rows = []
    rhs = []
    for i in range(N):
        rows.append([int(G[i][j]) for j in range(N)]
                    + [int(Gp[i][j]) for j in range(N)]
                    + [int(Gpp[i][j]) for j in range(N)])
        rhs.append(2)
    for j in range(N):
        row = [0] * (3 * N)
        row[j] = row[N + j] = row[2 * N + j] = 1
        rows.append(row)
        rhs.append(1)
    for curve in T.peripheral_curves:
        rows.append(list(curve.C) + list(curve.Cp) + list(curve.Cpp))
        rhs.append(0)
    x = integer_solve(rows, rhs)
    if x is None:
        raise FlatteningError("flattening system has no integer solution")
    return Flattening(x[:N], x[N : 2 * N], x[2 * N :])


def verify_flattening(T, flat):
    """Exact check of all three defining conditions; returns list of failures."""
    G, Gp, Gpp = T.gluing_matrices()
    N = T.n_tets
    f, fp, fpp = flat.triple()
    bad = []
    for i in range(N):
        s = sum(int(G[i][j]) * f[j] + int(Gp[i][j]) * fp[j] + int(Gpp[i][j]) * fpp[j]
                for j in range(N))
        if s != 2:
            bad.append(f"gluing row {i}: {s} != 2")
    for j in range(N):
        if f[j] + fp[j] + fpp[j] != 1:
            bad.append(f"tet {j}: sum {f[j] + fp[j] + fpp[j]} != 1")
    for curve in T.peripheral_curves:
        s = sum(curve.C[j] * f[j] + curve.Cp[j] * fp[j] + curve.Cpp[j] * fpp[j]
                for j in range(N))
        if s != 0:
            bad.append(f"curve {curve.name}: {s} != 0")
    return bad
