"""Exact linear algebra over Q(i): echelon spans, kernels, Jordan splitting.

Rows and matrices are dense lists of GaussRational.  Pivoting is always the
leftmost nonzero entry in the caller-supplied column order, so every result
is deterministic.
"""

from __future__ import annotations

from .scalars import GR_ONE, GR_ZERO, GaussRational, as_gauss


def _scale_row(row, s):
    return [c * s for c in row]


def _axpy(target, coeff, source):
    return [t + coeff * s for t, s in zip(target, source)]


class ExactSpan:
    """Row space in reduced echelon form, built incrementally."""

    def __init__(self, ncols):
        self.ncols = ncols
        self.rows = []  # reduced rows, pivot columns strictly increasing
        self.pivots = []  # pivot column per row

    @property
    def dim(self):
        return len(self.rows)

    def reduce(self, vec):
        """Residual of vec against the span (fully reduced)."""
        vec = list(vec)
        for row, p in zip(self.rows, self.pivots):
            c = vec[p]
            if c:
                vec = _axpy(vec, -c, row)
        return vec

    def reduce_with_coeffs(self, vec):
        """Residual plus the combination coefficients over stored rows."""
        vec = list(vec)
        coeffs = [GR_ZERO] * len(self.rows)
        for idx, (row, p) in enumerate(zip(self.rows, self.pivots)):
            c = vec[p]
            if c:
                coeffs[idx] = c
                vec = _axpy(vec, -c, row)
        return vec, coeffs

    def contains(self, vec):
        return not any(self.reduce(vec))

    def add(self, vec):
        """Insert a vector; returns True if it enlarged the span."""
        res = self.reduce(vec)
        p = next((j for j, c in enumerate(res) if c), None)
        if p is None:
            return False
        inv = res[p].inverse()
        res = _scale_row(res, inv)
        # back-substitute into existing rows
        for idx, row in enumerate(self.rows):
            c = row[p]
            if c:
                self.rows[idx] = _axpy(row, -c, res)
        at = next((k for k, q in enumerate(self.pivots) if q > p), len(self.pivots))
        self.rows.insert(at, res)
        self.pivots.insert(at, p)
        return True

    def add_all(self, vecs):
        for v in vecs:
            self.add(v)
        return self

    def rows_supported_in(self, colset):
        """Reduced rows whose support lies inside the given column set.

        When the span was eliminated with the complement columns ordered
        first, these rows form a basis of the span's intersection with the
        coordinate subspace.
        """
        out = []
        for row in self.rows:
            if all(j in colset or not c for j, c in enumerate(row)):
                out.append(row)
        return out


def span_of(vecs, ncols):
    return ExactSpan(ncols).add_all(vecs)


class CoordinateSolver:
    """Express vectors as exact combinations of a fixed generating list.

    Works on the augmented rows [v_i | e_i]; as long as a queried vector lies
    in the span, the tail of its residual recovers coefficients over the
    original (not echelonized) generators.
    """

    def __init__(self, vectors, ncols):
        self.n = len(vectors)
        self.ncols = ncols
        self.span = ExactSpan(ncols + self.n)
        for i, v in enumerate(vectors):
            row = list(v) + [GR_ONE if j == i else GR_ZERO for j in range(self.n)]
            self.span.add(row)

    def solve(self, vec):
        """Coefficients c with sum c_i v_i = vec, or None if not in the span."""
        res = self.span.reduce(list(vec) + [GR_ZERO] * self.n)
        if any(res[: self.ncols]):
            return None
        return [-c for c in res[self.ncols :]]


def kernel_basis(rows, ncols):
    """Basis of the right kernel {x : A x = 0} of the ncols-wide matrix."""
    span = span_of(rows, ncols)
    pivcols = set(span.pivots)
    free = [j for j in range(ncols) if j not in pivcols]
    out = []
    for f in free:
        vec = [GR_ZERO] * ncols
        vec[f] = GR_ONE
        for row, p in zip(span.rows, span.pivots):
            if row[f]:
                vec[p] = -row[f]
        out.append(vec)
    return out


def mat_vec(mat, vec):
    out = []
    for row in mat:
        acc = GR_ZERO
        for a, x in zip(row, vec):
            if a and x:
                acc = acc + a * x
        out.append(acc)
    return out


def mat_mul(a, b):
    n, m = len(a), len(b[0]) if b else 0
    out = [[GR_ZERO] * m for _ in range(n)]
    for i, row in enumerate(a):
        for k, c in enumerate(row):
            if not c:
                continue
            brow = b[k]
            orow = out[i]
            for j in range(m):
                if brow[j]:
                    orow[j] = orow[j] + c * brow[j]
    return out

def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, s):
    s = as_gauss(s)
    return [[x * s for x in row] for row in a]


def identity(n):
    return [[GR_ONE if i == j else GR_ZERO for j in range(n)] for i in range(n)]


def zero_matrix(n, m=None):
    m = n if m is None else m
    return [[GR_ZERO] * m for _ in range(n)]


def mat_equal(a, b):
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def mat_inverse(a):
    n = len(a)
    aug = [list(row) + list(erow) for row, erow in zip(a, identity(n))]
    span = span_of(aug, 2 * n)
    if span.pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in span.rows]


def char_poly(a):
    """Characteristic polynomial by Faddeev-LeVerrier; ascending coefficients.

    Returns c with c[0] + c[1] x + ... + c[n] x^n = det(xI - A), c[n] = 1.
    """
    n = len(a)
    coeffs = [GR_ZERO] * (n + 1)
    coeffs[n] = GR_ONE
    m = zero_matrix(n)
    c = GR_ONE
    for k in range(1, n + 1):
        m = mat_mul(a, mat_add(m, mat_scale(identity(n), c)))
        tr = sum((m[i][i] for i in range(n)), GR_ZERO)
        c = -tr / k
        coeffs[n - k] = c
    return coeffs


def poly_eval_mat(coeffs, a):
    n = len(a)
    out = zero_matrix(n)
    power = identity(n)
    for c in coeffs:
        if c:
            out = mat_add(out, mat_scale(power, c))
        power = mat_mul(power, a)
    return out


def poly_derivative(coeffs):
    return [c * k for k, c in enumerate(coeffs)][1:] or [GR_ZERO]


def poly_divmod(num, den):
    num = list(num)
    dn = len(den) - 1
    while len(den) > 1 and not den[-1]:
        den = den[:-1]
        dn -= 1
    lead = den[-1]
    quot = [GR_ZERO] * max(0, len(num) - dn)
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k] / lead
        quot[k - dn] = c
        if c:
            for j in range(dn + 1):
                num[k - dn + j] = num[k - dn + j] - c * den[j]
    rem = num[:dn] if dn else []
    while rem and not rem[-1]:
        rem.pop()
    return quot, rem


def poly_gcd(a, b):
    a, b = list(a), list(b)
    while b and any(b):
        _, r = poly_divmod(a, b)
        a, b = b, r
    while a and not a[-1]:
        a.pop()
    if a:
        lead = a[-1].inverse()
        a = [c * lead for c in a]
    return a


def squarefree_part(coeffs):
    g = poly_gcd(coeffs, poly_derivative(coeffs))
    if len(g) <= 1:
        return list(coeffs)
    q, r = poly_divmod(coeffs, g)
    assert not r
    return q


def jordan_chevalley(a):
    """Exact Jordan-Chevalley split A = S + N over Q(i).

    Newton iteration on the squarefree part of the characteristic polynomial;
    no eigenvalue extraction is required.  Returns (S, N) with S semisimple,
    N nilpotent, [S, N] = 0.
    """
    n = len(a)
    if n == 0:
        return [], []
    f = char_poly(a)
    g = squarefree_part(f)
    gp = poly_derivative(g)
    x = [row[:] for row in a]
    for _ in range(max(1, n.bit_length() + 1)):
        gx = poly_eval_mat(g, x)
        if not any(c for row in gx for c in row):
            break
        gpx_inv = mat_inverse(poly_eval_mat(gp, x))
        x = mat_sub(x, mat_mul(gpx_inv, gx))
    else:
        raise ArithmeticError("Jordan-Chevalley iteration did not converge")
    s = x
    nil = mat_sub(a, s)
    return s, nil


def nilpotency_index(a):
    """Least j with A^j = 0, or None if A is not nilpotent within dim steps."""
    n = len(a)
    power = identity(n)
    for j in range(n + 1):
        if not any(c for row in power for c in row):
            return j
        power = mat_mul(power, a)
    return None
