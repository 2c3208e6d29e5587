"""Laurent polynomials in one variable t, and matrices of them.

Two coefficient domains are supported by the same class: exact Python
integers and complex floats.  Quantities downstream (twisted determinants,
1-loop invariants) are only well defined up to multiplication by ``±t^k``,
so alongside plain arithmetic this module provides canonical representatives
of that equivalence class and comparison helpers.

A polynomial is stored as a sparse map {exponent: coefficient} with no zero
coefficients.  The zero polynomial is the empty map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Interpolated determinant coefficients below this magnitude are numerical
# dust from the inverse DFT and get dropped.
PRUNE_EPS = 1e-10


class LaurentPoly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None, eps=0.0):
        """Build from {exponent: coefficient}, dropping (near-)zero entries.

        eps > 0 additionally drops complex coefficients with |c| <= eps.
        """
        d = {}
        if coeffs:
            for k, c in coeffs.items():
                if c == 0:
                    continue
                if eps and abs(c) <= eps:
                    continue
                d[int(k)] = c
        self.coeffs = d

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero():
        return LaurentPoly()

    @staticmethod
    def one():
        return LaurentPoly({0: 1})

    @staticmethod
    def term(c, k=0):
        """The monomial c * t^k."""
        return LaurentPoly({k: c})

    @staticmethod
    def coerce(x):
        if isinstance(x, LaurentPoly):
            return x
        return LaurentPoly({0: x})

    # -- basic queries ------------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def min_exp(self):
        """Lowest exponent; raises on the zero polynomial."""
        return min(self.coeffs)

    def max_exp(self):
        return max(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs.get(k, 0)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, float, complex)):
            return self == LaurentPoly.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = LaurentPoly.coerce(other)
        d = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = d.get(k, 0) + c
            if s == 0:
                d.pop(k, None)
            else:
                d[k] = s
        return LaurentPoly(d)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            if other == 0:
                return LaurentPoly()
            return LaurentPoly({k: c * other for k, c in self.coeffs.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        d = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                s = d.get(k, 0) + a * b
                if s == 0:
                    d.pop(k, None)
                else:
                    d[k] = s
        return LaurentPoly(d)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            if len(self.coeffs) == 1:
                ((k, c),) = self.coeffs.items()
                if c in (1, -1):
                    return LaurentPoly({-k: c}) ** (-n)
            raise ValueError("negative power of a non-unit Laurent polynomial")
        out = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k):
        """Multiply by t^k."""
        if k == 0:
            return self
        return LaurentPoly({e + k: c for e, c in self.coeffs.items()})

    def involute(self):
        """Substitute t -> 1/t."""
        return LaurentPoly({-k: c for k, c in self.coeffs.items()})

    def stretch(self, n):
        """Substitute t -> t^n (exponents multiply by n)."""
        return LaurentPoly({k * n: c for k, c in self.coeffs.items()})

    def scale_argument(self, a):
        """Substitute t -> a*t for a nonzero scalar a."""
        return LaurentPoly({k: c * a ** k for k, c in self.coeffs.items()})

    def max_abs(self):
        """Largest coefficient magnitude (0 for the zero polynomial)."""
        return max((abs(c) for c in self.coeffs.values()), default=0)

    def derivative(self):
        """Formal derivative d/dt."""
        return LaurentPoly({k - 1: k * c for k, c in self.coeffs.items() if k != 0})

    def evaluate(self, x):
        """Value at a nonzero scalar x."""
        return sum(c * x ** k for k, c in self.coeffs.items())

    def map_coeffs(self, f):
        return LaurentPoly({k: f(c) for k, c in self.coeffs.items()})

    def prune(self, eps):
        """Drop coefficients of magnitude <= eps."""
        return LaurentPoly(self.coeffs, eps=eps)

    # -- display -------------------------------------------------------------

    def __repr__(self):
        return f"LaurentPoly('{self}')"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            if k == 0:
                term = f"{c}"
            elif k == 1:
                term = f"{c}*t"
            else:
                term = f"{c}*t^{k}"
            parts.append(term)
        return " + ".join(parts)


@dataclass(frozen=True)
class CanonicalForm:
    """Representative of a Laurent polynomial modulo ±t^ℤ.

    The original polynomial equals sign * t^shift * poly, where poly has
    minimum exponent 0 and its constant coefficient has positive real part
    (or zero real part and positive imaginary part).
    """

    poly: LaurentPoly
    shift: int
    sign: int

    def reconstruct(self):
        return (self.poly * self.sign).shift(self.shift)


def lp_canonicalize(p, eps=0.0):
    """Canonical representative of p modulo ±t^ℤ.

    eps prunes small complex coefficients first, so that numerical dust
    cannot masquerade as the lowest-order term.  Zero maps to (0, 0, +1).
    """
    if eps:
        p = p.prune(eps)
    if p.is_zero():
        return CanonicalForm(LaurentPoly(), 0, 1)
    m = p.min_exp()
    q = p.shift(-m)
    c0 = complex(q[0])
    # Sign rule: make Re > 0, breaking Re == 0 ties by Im > 0.  In the
    # complex domain "Re == 0" means small relative to the coefficient.
    re, im = c0.real, c0.imag
    if abs(re) <= 1e-9 * abs(c0):
        flip = im < 0
    else:
        flip = re < 0
    if flip:
        q = -q
    return CanonicalForm(q, m, -1 if flip else 1)


def lp_eq_mod(p, q, allow_involution=False, tol=0.0):
    """Equality in F[t^{±1}] modulo ±t^ℤ, optionally also modulo t -> 1/t.

    Comparison aligns lowest exponents and then accepts either global sign,
    which avoids relying on the canonical sign rule near its tie-break.
    """
    if _aligned_eq(p, q, tol):
        return True
    if allow_involution and _aligned_eq(p.involute(), q, tol):
        return True
    return False


def _aligned_eq(p, q, tol):
    if tol:
        p = p.prune(tol)
        q = q.prune(tol)
    if p.is_zero() or q.is_zero():
        return p.is_zero() and q.is_zero()
    p = p.shift(-p.min_exp())
    q = q.shift(-q.min_exp())
    for sign in (1, -1):
        keys = set(p.coeffs) | set(q.coeffs)
        if all(abs(p[k] - sign * q[k]) <= tol for k in keys):
            return True
    return False


def lp_is_palindromic(p, tol=0.0):
    """Return (ε, r) with p(t) = ε t^r p(1/t) within tol, or None.

    The zero polynomial is vacuously palindromic with (1, 0).
    """
    if tol:
        p = p.prune(tol)
    if p.is_zero():
        return (1, 0)
    r = p.min_exp() + p.max_exp()
    best = None
    for eps in (1, -1):
        keys = set(p.coeffs)
        keys.update(r - k for k in p.coeffs)
        if all(abs(p[k] - eps * p[r - k]) <= tol for k in keys):
            best = (eps, r)
            break
    return best


def lp_to_json(p):
    """Serialize: exact coefficients as integer strings, complex as [re, im]."""
    terms = []
    for k in sorted(p.coeffs):
        c = p.coeffs[k]
        if isinstance(c, int):
            terms.append([k, str(c)])
        else:
            c = complex(c)
            terms.append([k, c.real, c.imag])
    return {"terms": terms}


def lp_from_json(obj):
    d = {}
    for item in obj["terms"]:
        if len(item) == 2:
            d[int(item[0])] = int(item[1])
        else:
            d[int(item[0])] = complex(item[1], item[2])
    return LaurentPoly(d)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


class LaurentMatrix:
    """Dense rows x cols matrix of LaurentPoly entries (row-major)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries):
        entries = [LaurentPoly.coerce(e) for e in entries]
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @staticmethod
    def from_rows(rows_of_entries):
        r = len(rows_of_entries)
        c = len(rows_of_entries[0]) if r else 0
        flat = [e for row in rows_of_entries for e in row]
        return LaurentMatrix(r, c, flat)

    @staticmethod
    def from_int_matrix(m):
        return LaurentMatrix.from_rows([[LaurentPoly.coerce(int(x)) for x in row] for row in m])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j):
        return self.entries[j :: self.cols]

    def with_row(self, i, new_row):
        """Copy with row i replaced."""
        if len(new_row) != self.cols:
            raise ValueError("row length mismatch")
        entries = list(self.entries)
        entries[i * self.cols : (i + 1) * self.cols] = [LaurentPoly.coerce(e) for e in new_row]
        return LaurentMatrix(self.rows, self.cols, entries)

    def transpose(self):
        return LaurentMatrix.from_rows([self.col(j) for j in range(self.cols)])

    def involute(self):
        """Entrywise t -> 1/t."""
        return LaurentMatrix(self.rows, self.cols, [e.involute() for e in self.entries])

    def scale_row(self, i, mono):
        entries = list(self.entries)
        for j in range(self.cols):
            entries[i * self.cols + j] = entries[i * self.cols + j] * mono
        return LaurentMatrix(self.rows, self.cols, entries)

    def scale_col(self, j, mono):
        entries = list(self.entries)
        for i in range(self.rows):
            entries[i * self.cols + j] = entries[i * self.cols + j] * mono
        return LaurentMatrix(self.rows, self.cols, entries)

    def __add__(self, other):
        self._check_shape(other)
        return LaurentMatrix(
            self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)]
        )

    def __sub__(self, other):
        self._check_shape(other)
        return LaurentMatrix(
            self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)]
        )

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                cj = other.col(j)
                s = LaurentPoly()
                for a, b in zip(ri, cj):
                    s = s + a * b
                out.append(s)
        return LaurentMatrix(self.rows, other.cols, out)

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def _check_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def evaluate(self, x):
        """Numpy complex matrix of entry values at t = x."""
        out = np.empty((self.rows, self.cols), dtype=complex)
        for i in range(self.rows):
            for j in range(self.cols):
                out[i, j] = complex(self[i, j].evaluate(x))
        return out

    def max_coeff_abs(self):
        """Largest coefficient magnitude over all entries (0 for zero matrix)."""
        m = 0.0
        for e in self.entries:
            for c in e.coeffs.values():
                m = max(m, abs(c))
        return m

    def __repr__(self):
        body = "\n".join("  [" + ", ".join(str(e) for e in self.row(i)) + "]" for i in range(self.rows))
        return f"LaurentMatrix({self.rows}x{self.cols},\n{body})"


def _column_spans(M):
    """Per-column (min exponent, max exponent) over nonzero entries.

    Returns None if some column is identically zero (determinant is 0).
    """
    spans = []
    for j in range(M.cols):
        col = [e for e in M.col(j) if not e.is_zero()]
        if not col:
            return None
        spans.append((min(e.min_exp() for e in col), max(e.max_exp() for e in col)))
    return spans


def lmat_det_numeric(M, eps=PRUNE_EPS):
    """Determinant by evaluation at roots of unity and inverse DFT.

    Each column is shifted to have minimum exponent 0; the resulting
    polynomial determinant has degree at most D = sum of column spans, so
    values at D+1 equally spaced points on the unit circle determine it.
    """
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return LaurentPoly.one()
    spans = _column_spans(M)
    if spans is None:
        return LaurentPoly()
    total_shift = sum(lo for lo, hi in spans)
    D = sum(hi - lo for lo, hi in spans)
    npts = D + 1
    values = np.empty(npts, dtype=complex)
    for k in range(npts):
        x = np.exp(2j * np.pi * k / npts)
        values[k] = np.linalg.det(M.evaluate(x)) * x ** (-total_shift)
    coeff = np.fft.fft(values) / npts
    return LaurentPoly(
        {e + total_shift: coeff[e] for e in range(npts)}, eps=eps
    )


def _poly_divmod_exact(num, den):
    """Exact division of integer dict-polynomials (num = q * den required).

    Returns q; raises ArithmeticError if the division is not exact.  Both
    inputs use {exponent: int} with nonnegative exponents.
    """
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    num = dict(num)
    q = {}
    dlead = max(den)
    dc = den[dlead]
    while num:
        nlead = max(num)
        if nlead < dlead:
            raise ArithmeticError("non-exact polynomial division")
        nc = num[nlead]
        if nc % dc:
            raise ArithmeticError("non-exact polynomial division")
        f = nc // dc
        e = nlead - dlead
        q[e] = f
        for k, c in den.items():
            kk = k + e
            s = num.get(kk, 0) - f * c
            if s == 0:
                num.pop(kk, None)
            else:
                num[kk] = s
    return q


def lmat_det_exact(M):
    """Exact determinant over ℤ[t^{±1}] by fraction-free (Bareiss) elimination.

    Columns are first normalized by monomial factors so all exponents are
    nonnegative; every division in the elimination must be exact, and a
    failure aborts loudly since it would mean corrupted arithmetic.
    """
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return LaurentPoly.one()
    spans = _column_spans(M)
    if spans is None:
        return LaurentPoly()
    total_shift = sum(lo for lo, hi in spans)
    # Work on plain dict polynomials with exponents >= 0.
    a = [
        [dict(M[i, j].shift(-spans[j][0]).coeffs) for j in range(n)]
        for i in range(n)
    ]
    sign = 1
    prev = {0: 1}
    for k in range(n - 1):
        if not a[k][k]:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return LaurentPoly()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _dict_sub(_dict_mul(a[k][k], a[i][j]), _dict_mul(a[i][k], a[k][j]))
                a[i][j] = _poly_divmod_exact(num, prev)
            a[i][k] = {}
        prev = a[k][k]
    det = LaurentPoly(a[n - 1][n - 1])
    return (det * sign).shift(total_shift)


def _dict_mul(p, q):
    d = {}
    for i, x in p.items():
        for j, y in q.items():
            k = i + j
            s = d.get(k, 0) + x * y
            if s == 0:
                d.pop(k, None)
            else:
                d[k] = s
    return d


def _dict_sub(p, q):
    d = dict(p)
    for k, c in q.items():
        s = d.get(k, 0) - c
        if s == 0:
            d.pop(k, None)
        else:
            d[k] = s
    return d
