"""Even positive-definite lattices: validation, dual cosets, enumeration,
the 2-cocycle of the twisted group algebra, and shifted theta series.

Vectors are coordinate tuples in the fixed lattice basis; the Gram matrix G
carries the bilinear form <x, y> = x^T G y.  Dual-lattice vectors have
rational coordinates.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .errors import NotEven, NotPositiveDefinite, NotSymmetric, NonIntegerVector
from .qseries import QSeries
from .scalars import GR_ZERO, GaussRational, as_gauss


class EvenLattice:
    """Rank-k even positive-definite lattice with integer Gram matrix."""

    def __init__(self, gram):
        gram = tuple(tuple(int(x) for x in row) for row in gram)
        k = len(gram)
        if any(len(row) != k for row in gram):
            raise NotSymmetric("gram matrix is not square")
        for i in range(k):
            for j in range(k):
                if gram[i][j] != gram[j][i]:
                    raise NotSymmetric(f"gram[{i}][{j}] != gram[{j}][{i}]")
        for i in range(k):
            if gram[i][i] % 2:
                raise NotEven(f"odd diagonal entry gram[{i}][{i}] = {gram[i][i]}")
        self.rank = k
        self.gram = gram
        # LDL^T with L unit upper-triangular: G = U^T D U; also the p.d. check
        self._ldl_d, self._ldl_u = _ldl(gram)
        self.det = _det_int(gram)
        self._cosets = None
        self._coset_index = None

    # -- bilinear form -------------------------------------------------------

    def pairing(self, x, y):
        """<x, y> = x^T G y; exact, GaussRational when either side is complex."""
        acc = GR_ZERO if _is_gauss_vec(x) or _is_gauss_vec(y) else Fraction(0)
        for i, xi in enumerate(x):
            if not xi:
                continue
            row = self.gram[i]
            for j, yj in enumerate(y):
                if yj:
                    acc = acc + xi * row[j] * yj
        return acc

    def norm(self, x):
        return self.pairing(x, x)

    # -- discriminant group ---------------------------------------------------

    def discriminant_cosets(self):
        """Canonical representatives of L°/L, reduced to [0,1)^k, zero first."""
        if self._cosets is None:
            d, _, v = smith_normal_form([list(r) for r in self.gram])
            reps = set()
            for counters in _mixed_radix([abs(d[i][i]) for i in range(self.rank)]):
                frac = [
                    Fraction(c, abs(d[i][i])) for i, c in enumerate(counters)
                ]
                coords = tuple(
                    sum(
                        Fraction(v[i][j]) * frac[j] for j in range(self.rank)
                    ) % 1
                    for i in range(self.rank)
                )
                reps.add(coords)
            assert len(reps) == abs(self.det)
            ordered = sorted(reps)
            self._cosets = [CosetVector(c, idx) for idx, c in enumerate(ordered)]
            self._coset_index = {c: idx for idx, c in enumerate(ordered)}
        return self._cosets

    def coset_label(self, coords):
        """Label of the coset containing a rational vector of L°."""
        self.discriminant_cosets()
        key = tuple(Fraction(c) % 1 for c in coords)
        if key not in self._coset_index:
            raise NonIntegerVector(f"{coords} is not in the dual lattice")
        return self._coset_index[key]

    def dual_contains(self, coords):
        gx = [self.pairing(_unit(self.rank, i), coords) for i in range(self.rank)]
        return all(Fraction(v).denominator == 1 for v in gx)

    # -- enumeration ------------------------------------------------------------

    def vectors_up_to(self, coset, bound):
        """All alpha in the coset with <alpha, alpha>/2 <= bound, sorted."""
        bound = Fraction(bound)
        if bound < 0:
            return []
        rep = coset.coords if isinstance(coset, CosetVector) else tuple(
            Fraction(c) for c in coset
        )
        out = [
            tuple(Fraction(x) + r for x, r in zip(xs, rep))
            for xs in self.shifted_box(rep, 2 * bound)
        ]
        out.sort(key=lambda a: (self.norm(a), a))
        return out

    def shifted_box(self, shift, budget):
        """Integer vectors x with Q(x + shift) <= budget, by exact LDL recursion."""
        budget = Fraction(budget)
        if budget < 0:
            return []
        k = self.rank
        d, u = self._ldl_d, self._ldl_u
        out = []
        xs = [0] * k

        def rec(i, remaining, partial):
            # partial[j] = sum_{l > i} U[j][l] * y_l for each j <= i
            if i < 0:
                out.append(tuple(xs))
                return
            # y_i = x_i + shift_i + partial_i; need d_i * y_i^2 <= remaining
            center = -(Fraction(shift[i]) + partial[i])
            radius2 = remaining / d[i]
            lo, hi = _integer_window(center, radius2)
            for xi in range(lo, hi + 1):
                yi = xi - center
                used = d[i] * yi * yi
                if used > remaining:
                    continue
                xs[i] = xi
                new_partial = [
                    partial[j] + u[j][i] * yi if j < i else partial[j]
                    for j in range(k)
                ]
                rec(i - 1, remaining - used, new_partial)

        rec(k - 1, budget, [Fraction(0)] * k)
        return out

    def theta_series(self, coset, h, order):
        """Theta series of the coset shifted by a (possibly complex) Cartan h.

        Exponents are <a,a>/2 - <h,a> relative to the global offset <h,h>/2;
        terms are kept while Re of the relative exponent is <= order.
        """
        order = Fraction(order)
        rep = coset.coords if isinstance(coset, CosetVector) else tuple(coset)
        h = tuple(as_gauss(c) for c in h)
        h_re = tuple(c.re for c in h)
        offset = self.pairing(h, h) / 2
        # Re(exponent) = Q(alpha - h_re)/2 - Q(h_re)/2 <= order
        shift = tuple(Fraction(r) - hr for r, hr in zip(rep, h_re))
        budget = 2 * order + Fraction(self.norm(h_re))
        terms = {}
        for xs in self.shifted_box(shift, budget):
            alpha = tuple(Fraction(x) + Fraction(r) for x, r in zip(xs, rep))
            e = as_gauss(self.norm(alpha)) / 2 - self.pairing(h, alpha)
            if e.re > order:
                continue
            terms[e] = terms.get(e, GR_ZERO) + 1
        return QSeries(terms, order, offset)


def validate(gram):
    """Validate and wrap a Gram matrix; raises NotSymmetric/NotEven/NotPositiveDefinite."""
    return EvenLattice(gram)


class CosetVector:
    """A dual-lattice vector tagged with its discriminant-coset label."""

    __slots__ = ("coords", "coset_label")

    def __init__(self, coords, coset_label):
        self.coords = tuple(Fraction(c) for c in coords)
        self.coset_label = coset_label

    def __eq__(self, other):
        return (
            isinstance(other, CosetVector)
            and self.coords == other.coords
            and self.coset_label == other.coset_label
        )

    def __hash__(self):
        return hash((self.coords, self.coset_label))

    def __repr__(self):
        return f"CosetVector({self.coords}, label={self.coset_label})"


class Cocycle:
    """Bilinear sign 2-cocycle for the twisted group algebra of the lattice.

    Convention: eps(b_i, b_j) = (-1)^<b_i, b_j> for i > j, and 1 for i <= j,
    extended bilinearly.  This satisfies eps(a,b)eps(b,a) = (-1)^<a,b> for an
    even Gram matrix.  On module points the second argument is reduced by the
    canonical coset representative before evaluating.
    """

    def __init__(self, lattice):
        self.lattice = lattice
        k = lattice.rank
        self.basis_matrix = tuple(
            tuple(
                -1 if (i > j and lattice.gram[i][j] % 2) else 1 for j in range(k)
            )
            for i in range(k)
        )

    def eval(self, alpha, beta):
        """eps(alpha, beta) for integer vectors; raises NonIntegerVector."""
        alpha = _require_int_vec(alpha)
        beta = _require_int_vec(beta)
        par = 0
        for i in range(self.lattice.rank):
            if not alpha[i]:
                continue
            for j in range(i):
                if beta[j] and self.lattice.gram[i][j] % 2:
                    par += alpha[i] * beta[j]
        return -1 if par % 2 else 1

    def eval_module(self, alpha, point):
        """eps extended to a dual point: reduce by its coset representative."""
        lab = self.lattice.coset_label(point)
        rep = self.lattice.discriminant_cosets()[lab].coords
        beta = [Fraction(p) - r for p, r in zip(point, rep)]
        return self.eval(alpha, beta)


# -- helpers -------------------------------------------------------------------


def _unit(k, i):
    return tuple(1 if j == i else 0 for j in range(k))


def _is_gauss_vec(v):
    return any(isinstance(c, GaussRational) for c in v)


def _require_int_vec(v):
    out = []
    for c in v:
        f = Fraction(c)
        if f.denominator != 1:
            raise NonIntegerVector(f"non-integer coordinate {c}")
        out.append(int(f))
    return out


def _ldl(gram):
    """G = U^T D U with U unit upper-triangular; raises if not p.d."""
    k = len(gram)
    d = [Fraction(0)] * k
    u = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        u[i][i] = Fraction(1)
    for i in range(k):
        acc = Fraction(gram[i][i])
        for l in range(i):
            acc -= d[l] * u[l][i] * u[l][i]
        if acc <= 0:
            raise NotPositiveDefinite(f"leading principal minor {i + 1} is not positive")
        d[i] = acc
        for j in range(i + 1, k):
            s = Fraction(gram[i][j])
            for l in range(i):
                s -= d[l] * u[l][i] * u[l][j]
            u[i][j] = s / d[i]
    return d, u


def _det_int(gram):
    # Bareiss on a copy; exact integer determinant
    k = len(gram)
    m = [[Fraction(x) for x in row] for row in gram]
    det = Fraction(1)
    for c in range(k):
        piv = next((r for r in range(c, k) if m[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, k):
            f = m[r][c] * inv
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    assert det.denominator == 1
    return int(det)


def _integer_window(center, radius2):
    """Integers x with (x - center)^2 <= radius2, conservatively bounded."""
    if radius2 < 0:
        return 0, -1
    # upper bound for sqrt(radius2) = sqrt(p/q): (isqrt(p*q) + 1)/q
    p, q = radius2.numerator, radius2.denominator
    ub = Fraction(isqrt(p * q) + 1, q)
    import math

    return math.ceil(center - ub), math.floor(center + ub)


def _mixed_radix(limits):
    """All tuples (c_0, ..) with 0 <= c_i < limits[i]."""
    if not limits:
        yield ()
        return
    for rest in _mixed_radix(limits[1:]):
        for c in range(limits[0]):
            yield (c,) + rest


def smith_normal_form(m):
    """Smith normal form of a square integer matrix.

    Returns (d, u, v) with u*m*v = d diagonal, u and v unimodular, and
    d[i][i] dividing d[i+1][i+1].
    """
    n = len(m)
    a = [[int(x) for x in row] for row in m]
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, f):
        for row in a:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    for t in range(n):
        while True:
            # locate the minimal nonzero entry in the trailing block
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            done = True
            for r in range(t + 1, n):
                q = a[r][t] // a[t][t]
                if q:
                    add_row(t, r, -q)
                if a[r][t]:
                    done = False
            for c in range(t + 1, n):
                q = a[t][c] // a[t][t]
                if q:
                    add_col(t, c, -q)
                if a[t][c]:
                    done = False
            if done:
                # enforce divisibility into the remaining block
                bad = None
                for i in range(t + 1, n):
                    for j in range(t + 1, n):
                        if a[i][j] % a[t][t]:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(bad, t, 1)
    for t in range(n):
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return a, u, v
