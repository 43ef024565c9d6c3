"""Fock bases of lattice vertex algebras and the exact vertex-mode engine.

States of V_{L-lambda} = M(1) (x) C[L-lambda] are spanned by basis vectors
``b_{i1}(-n1)...b_{ir}(-nr) e^mu`` encoded as a canonical Fock monomial plus a
dual-lattice point.  Every mode application a(n)b is an exact finite
computation: Heisenberg modes act by insertion/contraction, exponential
vertex operators by their normal-ordered expansion, and a general state acts
through the descendant recursion (peel the smallest Heisenberg factor and
normal-order a derivative of the corresponding current against the rest).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import NonIntegerVector, TruncationExceeded
from .lattices import Cocycle, EvenLattice
from .scalars import GR_ONE, GR_ZERO, GaussRational, as_gauss, gbinom, parse_gauss

_F1 = Fraction(1)


def fock_canonical(factors):
    """Canonical monomial order: descending mode, ascending index inside a mode."""
    return tuple(sorted(factors, key=lambda f: (-f[0], f[1])))


def fock_degree(fock):
    return sum(n for n, _ in fock)


def _fock_insert(fock, factor):
    key = (-factor[0], factor[1])
    for idx, f in enumerate(fock):
        if (-f[0], f[1]) > key:
            return fock[:idx] + (factor,) + fock[idx:]
    return fock + (factor,)


def _fock_remove_one(fock, idx):
    return fock[:idx] + fock[idx + 1 :]


class BasisVector:
    """Interned Fock monomial tensor a lattice/dual point."""

    __slots__ = ("fock", "point", "degree", "_hash")

    def __init__(self, fock, point):
        object.__setattr__(self, "fock", fock)
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "degree", fock_degree(fock))
        object.__setattr__(self, "_hash", hash((fock, point)))

    def __setattr__(self, name, value):
        raise AttributeError("BasisVector is immutable")

    def __eq__(self, other):
        return self is other or (
            isinstance(other, BasisVector)
            and self.fock == other.fock
            and self.point == other.point
        )

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (self.degree, self.point, self.fock)

    def __repr__(self):
        mono = "".join(f"b{i}(-{n})" for n, i in self.fock)
        return f"<{mono or '1'} e^{tuple(map(str, self.point))}>"


class GradedVector:
    """Sparse exact linear combination of basis vectors.

    ``truncation`` (a Fraction or None) is the maximum retained Re of the
    L(0)-weight; None means the vector is exact and unbounded.  Operations
    never silently drop terms: overflow either raises TruncationExceeded or,
    with lossy=True at the call site, is discarded explicitly.
    """

    __slots__ = ("terms", "truncation")

    def __init__(self, terms=None, truncation=None):
        clean = {}
        if terms:
            for bv, c in terms.items():
                c = as_gauss(c)
                if c:
                    clean[bv] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(
            self, "truncation", None if truncation is None else Fraction(truncation)
        )

    def __setattr__(self, name, value):
        raise AttributeError("GradedVector is immutable")

    def items(self):
        return sorted(self.terms.items(), key=lambda t: t[0].sort_key())

    def is_zero(self):
        return not self.terms

    def coefficient(self, bv):
        return self.terms.get(bv, GR_ZERO)

    def _common_truncation(self, other):
        if self.truncation is None:
            return other.truncation
        if other.truncation is None:
            return self.truncation
        return min(self.truncation, other.truncation)

    def __add__(self, other):
        if not isinstance(other, GradedVector):
            return NotImplemented
        terms = dict(self.terms)
        for bv, c in other.terms.items():
            acc = terms.get(bv, GR_ZERO) + c
            if acc:
                terms[bv] = acc
            else:
                terms.pop(bv, None)
        return GradedVector(terms, self._common_truncation(other))

    def __sub__(self, other):
        if not isinstance(other, GradedVector):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return GradedVector(
            {bv: -c for bv, c in self.terms.items()}, self.truncation
        )

    def __mul__(self, scalar):
        scalar = as_gauss(scalar)
        if scalar is NotImplemented:
            return NotImplemented
        if not scalar:
            return GradedVector({}, self.truncation)
        return GradedVector(
            {bv: c * scalar for bv, c in self.terms.items()}, self.truncation
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, GradedVector) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        parts = [f"({c})*{bv!r}" for bv, c in self.items()]
        return " + ".join(parts) if parts else "0"

    def to_json_obj(self):
        """External form: fock factors use 1-based Heisenberg indices."""
        return [
            {
                "fock": [[n, i + 1] for n, i in bv.fock],
                "point": [str(x) for x in bv.point],
                "coeff": str(c),
            }
            for bv, c in self.items()
        ]


@lru_cache(maxsize=None)
def _partitions(total):
    """All partitions of ``total`` as count dicts {part: multiplicity}."""
    out = []

    def rec(remaining, max_part, counts):
        if remaining == 0:
            out.append(tuple(sorted(counts.items())))
            return
        for part in range(min(remaining, max_part), 0, -1):
            counts[part] = counts.get(part, 0) + 1
            rec(remaining - part, part, counts)
            counts[part] -= 1
            if not counts[part]:
                del counts[part]

    rec(total, total, {})
    return tuple(out)


@lru_cache(maxsize=None)
def colored_partitions(degree, colors):
    """Canonical Fock monomials of the given degree over ``colors`` indices."""

    def rec(remaining, last):
        if remaining == 0:
            yield ()
            return
        for n in range(remaining, 0, -1):
            for i in range(colors):
                f = (n, i)
                if last is not None and (-n, i) < (-last[0], last[1]):
                    continue
                for rest in rec(remaining - n, f):
                    yield (f,) + rest

    return tuple(rec(degree, None))


class LatticeVOA:
    """Mode engine for V_L and its modules V_{L-lambda}, all arithmetic exact."""

    def __init__(self, lattice: EvenLattice):
        self.lattice = lattice
        self.k = lattice.rank
        self.cocycle = Cocycle(lattice)
        self._intern = {}
        self._mode_memo = {}
        self._zero_point = tuple(Fraction(0) for _ in range(self.k))
        self.vacuum_bv = self.basis_vector((), self._zero_point)
        self._gram_inv = _invert_fraction_matrix(lattice.gram)
        self.omega = self._conformal_vector()
        self.central_charge = as_gauss(self.k)

    # -- construction -----------------------------------------------------------

    def basis_vector(self, fock, point):
        fock = fock_canonical(tuple((int(n), int(i)) for n, i in fock))
        point = tuple(Fraction(x) for x in point)
        return self._bv(fock, point)

    def _bv(self, fock, point):
        """Interning fast path; fock must be canonical, point Fractions."""
        key = (fock, point)
        bv = self._intern.get(key)
        if bv is None:
            bv = BasisVector(fock, point)
            self._intern[key] = bv
        return bv

    def vacuum(self):
        return GradedVector({self.vacuum_bv: GR_ONE})

    def gvec(self, mapping, truncation=None):
        return GradedVector(mapping, truncation)

    def single(self, fock, point, coeff=GR_ONE):
        return GradedVector({self.basis_vector(fock, point): as_gauss(coeff)})

    def exp_point(self, alpha):
        """The pure exponential state e^alpha."""
        return self.single((), alpha)

    def heis_state(self, i):
        """The weight-one Heisenberg state b_i(-1)1."""
        return self.single(((1, i),), self._zero_point)

    def cartan_state(self, coeffs):
        """sum_i c_i b_i(-1)1 for Gaussian-rational coefficients c."""
        terms = {}
        for i, c in enumerate(coeffs):
            c = as_gauss(c)
            if c:
                terms[self.basis_vector(((1, i),), self._zero_point)] = c
        return GradedVector(terms)

    def _conformal_vector(self):
        # omega = (1/2) sum_ij (G^-1)_ij b_i(-1) b_j(-1) 1, central charge = rank
        terms = {}
        for i in range(self.k):
            for j in range(self.k):
                gij = self._gram_inv[i][j]
                if not gij:
                    continue
                bv = self.basis_vector(((1, i), (1, j)), self._zero_point)
                acc = terms.get(bv, GR_ZERO) + as_gauss(gij) * Fraction(1, 2)
                if acc:
                    terms[bv] = acc
                else:
                    terms.pop(bv, None)
        return GradedVector(terms)

    # -- weights -----------------------------------------------------------------

    def weight0(self, bv):
        """L(0)-weight: Fock degree plus half the point norm."""
        return bv.degree + Fraction(self.lattice.norm(bv.point), 2)

    def max_weight0(self, v):
        return max((self.weight0(bv) for bv in v.terms), default=None)

    def n_max(self, a_bv, b_bv):
        """a(n)b = 0 for n above this (point-norm weight floor)."""
        pr = self.lattice.pairing(a_bv.point, b_bv.point)
        if pr.denominator != 1:
            raise NonIntegerVector(
                "operator point must pair integrally with the module point"
            )
        return a_bv.degree + b_bv.degree - int(pr) - 1

    # -- single-term engines ------------------------------------------------------

    def _heis_single(self, i, n, bv):
        """b_i(n) applied to one basis vector; dict of Fraction terms."""
        if n < 0:
            return {self._bv(_fock_insert(bv.fock, (-n, i)), bv.point): _F1}
        if n == 0:
            c = self.lattice.pairing(_unit_vec(self.k, i), bv.point)
            return {bv: Fraction(c)} if c else {}
        out = {}
        seen = set()
        for idx, (m, j) in enumerate(bv.fock):
            if m != n or (m, j) in seen:
                continue
            seen.add((m, j))
            mult = sum(1 for f in bv.fock if f == (m, j))
            coeff = mult * n * self.lattice.gram[i][j]
            if coeff:
                nb = self._bv(_fock_remove_one(bv.fock, idx), bv.point)
                _acc(out, nb, Fraction(coeff))
        return out

    def _dir_annihilate(self, alpha_g, n, terms):
        """alpha(n) for n > 0 with alpha given as the row alpha^T G."""
        out = {}
        for bv, c in terms.items():
            seen = set()
            for idx, (m, j) in enumerate(bv.fock):
                if m != n or (m, j) in seen:
                    continue
                seen.add((m, j))
                mult = sum(1 for f in bv.fock if f == (m, j))
                coeff = mult * n * alpha_g[j]
                if coeff:
                    nb = self._bv(_fock_remove_one(bv.fock, idx), bv.point)
                    _acc(out, nb, c * coeff)
        return out

    def _dir_create(self, alpha, n, terms):
        """alpha(-n) for n > 0: sum_j alpha_j b_j(-n) applied to each term."""
        out = {}
        for bv, c in terms.items():
            for j, aj in enumerate(alpha):
                if not aj:
                    continue
                nb = self._bv(_fock_insert(bv.fock, (n, j)), bv.point)
                _acc(out, nb, c * aj)
        return out

    def _exp_single(self, alpha, n, b_bv):
        """Mode n of Y(e^alpha, z) on one basis vector; alpha integral."""
        if not any(alpha):
            return {b_bv: _F1} if n == -1 else {}
        mu = b_bv.point
        pr = self.lattice.pairing(alpha, mu)
        if pr.denominator != 1:
            raise NonIntegerVector("exponential point pairs non-integrally")
        pr = int(pr)
        eps = self.cocycle.eval_module(alpha, mu)
        new_point = tuple(m + a for m, a in zip(mu, alpha))
        alpha_g = [
            sum(alpha[i] * self.lattice.gram[i][j] for i in range(self.k))
            for j in range(self.k)
        ]
        out = {}
        for s in range(b_bv.degree + 1):
            p = s - n - 1 - pr
            if p < 0:
                continue
            annihilated = self._apply_exp_partitions(
                alpha_g, s, {b_bv: _F1}, annihilate=True
            )
            if not annihilated:
                continue
            moved = {
                self._bv(bv.fock, new_point): c for bv, c in annihilated.items()
            }
            dressed = self._apply_exp_partitions(alpha, p, moved, annihilate=False)
            for bv, c in dressed.items():
                _acc(out, bv, eps * c)
        return out

    def _apply_exp_partitions(self, alpha_data, total, terms, annihilate):
        """Degree-``total`` part of exp(-+ sum_t alpha(+-t)/t z^...) applied to terms."""
        if total == 0:
            return dict(terms)
        out = {}
        for partition in _partitions(total):
            coeff = Fraction(1)
            current = dict(terms)
            for part, count in partition:
                base = Fraction(-1 if annihilate else 1, part)
                for _ in range(count):
                    if annihilate:
                        current = self._dir_annihilate(alpha_data, part, current)
                    else:
                        current = self._dir_create(alpha_data, part, current)
                    if not current:
                        break
                coeff *= base**count / math.factorial(count)
                if not current:
                    break
            if not current:
                continue
            for bv, c in current.items():
                _acc(out, bv, c * coeff)
        return out

    def _mode_single(self, a_bv, n, b_bv):
        """a(n)b for single basis vectors via the descendant recursion."""
        key = (a_bv, n, b_bv)
        memo = self._mode_memo
        hit = memo.get(key)
        if hit is not None:
            return hit
        if n > self.n_max(a_bv, b_bv):
            memo[key] = {}
            return {}
        if not a_bv.fock:
            out = self._exp_single(a_bv.point, n, b_bv)
            memo[key] = out
            return out
        m, i = a_bv.fock[-1]
        a_rest = self._bv(a_bv.fock[:-1], a_bv.point)
        out = {}
        # creation side: b_i(p) for p <= -1, against a_rest(n - p - m)
        p_lo = n - m - self.n_max(a_rest, b_bv)
        for p in range(-1, p_lo - 1, -1):
            inner = self._mode_single(a_rest, n - p - m, b_bv)
            if not inner:
                continue
            beta = _beta(m, p)
            for bv, c in inner.items():
                nb = self._bv(_fock_insert(bv.fock, (-p, i)), bv.point)
                _acc(out, nb, c * beta)
        # annihilation side: a_rest(n - p - m) after b_i(p) for p >= 0
        for p in range(0, b_bv.degree + 1):
            hit_terms = self._heis_single(i, p, b_bv)
            if not hit_terms:
                continue
            beta = _beta(m, p)
            for bv, c in hit_terms.items():
                inner = self._mode_single(a_rest, n - p - m, bv)
                if not inner:
                    continue
                bc = beta * c
                for bv2, c2 in inner.items():
                    _acc(out, bv2, bc * c2)
        memo[key] = out
        return out

    # -- public mode operations -----------------------------------------------------

    def heis_mode(self, i, n, v, lossy=False):
        """Apply b_i(n) (0-based index i) to a graded vector."""
        out = {}
        for bv, c in v.terms.items():
            for nb, nc in self._heis_single(i, n, bv).items():
                _acc(out, nb, c * nc)
        return self._finish(out, v.truncation, lossy)

    def exp_mode(self, alpha, n, v, lossy=False):
        """Apply (e^alpha)(n) for an integral lattice vector alpha."""
        alpha = tuple(int(a) for a in alpha)
        out = {}
        for bv, c in v.terms.items():
            for nb, nc in self._exp_single(alpha, n, bv).items():
                _acc(out, nb, c * nc)
        return self._finish(out, v.truncation, lossy)

    def general_mode(self, a, n, b, lossy=False):
        """a(n)b, bilinear in both arguments; exact and finite."""
        if isinstance(a, BasisVector):
            a = GradedVector({a: GR_ONE})
        if isinstance(b, BasisVector):
            b = GradedVector({b: GR_ONE})
        out = {}
        for a_bv, ca in a.terms.items():
            for b_bv, cb in b.terms.items():
                for bv, c in self._mode_single(a_bv, n, b_bv).items():
                    _acc(out, bv, ca * cb * c)
        trunc = None
        if a.truncation is not None or b.truncation is not None:
            trunc = min(
                t for t in (a.truncation, b.truncation) if t is not None
            )
        return self._finish(out, trunc, lossy)

    def translate(self, v, lossy=False):
        """T = L(-1): derivative of every factor plus the point current."""
        out = {}
        for bv, c in v.terms.items():
            for idx, (m, j) in enumerate(bv.fock):
                nb = self.basis_vector(
                    _fock_insert(_fock_remove_one(bv.fock, idx), (m + 1, j)), bv.point
                )
                _acc(out, nb, c * m)
            if any(bv.point):
                for j, pj in enumerate(bv.point):
                    if pj:
                        nb = self.basis_vector(_fock_insert(bv.fock, (1, j)), bv.point)
                        _acc(out, nb, c * pj)
        return self._finish(out, v.truncation, lossy)

    def virasoro_mode(self, n, v, lossy=False):
        """Undeformed L(n) = omega(n+1)."""
        return self.general_mode(self.omega, n + 1, v, lossy=lossy)

    def _finish(self, terms, truncation, lossy):
        if truncation is not None:
            kept = {}
            for bv, c in terms.items():
                if self.weight0(bv) > truncation:
                    if not lossy:
                        raise TruncationExceeded(
                            f"term {bv!r} has weight {self.weight0(bv)} above {truncation}"
                        )
                else:
                    kept[bv] = c
            terms = kept
        return GradedVector(terms, truncation)

    # -- checks ---------------------------------------------------------------------

    def commutator_check(self, a, b, m, n, vectors):
        """[a(m), b(n)] = sum_i C(m, i) (a(i)b)(m+n-i) on the given vectors."""
        top = max(
            (
                self.n_max(ta, tb)
                for ta in a.terms
                for tb in b.terms
            ),
            default=-1,
        )
        products = []
        for i in range(0, top + 1):
            ab = self.general_mode(a, i, b)
            coeff = gbinom(m, i)
            if not ab.is_zero() and coeff:
                products.append((i, coeff, ab))
        for v in vectors:
            if isinstance(v, BasisVector):
                v = GradedVector({v: GR_ONE})
            lhs = self.general_mode(a, m, self.general_mode(b, n, v)) - (
                self.general_mode(b, n, self.general_mode(a, m, v))
            )
            rhs = GradedVector({})
            for i, coeff, ab in products:
                rhs = rhs + coeff * self.general_mode(ab, m + n - i, v)
            if lhs != rhs:
                return False
        return True

    def skew_symmetry_check(self, a_bv, n, b_bv):
        """a(n)b = sum_j (-1)^(n+j+1) T^j (b(n+j) a) / j!."""
        lhs = self.general_mode(a_bv, n, b_bv)
        rhs = GradedVector({})
        j = 0
        while n + j <= self.n_max(b_bv, a_bv):
            term = self.general_mode(b_bv, n + j, a_bv)
            for _ in range(j):
                term = self.translate(term)
            sign = -1 if (n + j + 1) % 2 else 1
            rhs = rhs + term * as_gauss(Fraction(sign, math.factorial(j)))
            j += 1
        return lhs == rhs

    # -- bases ------------------------------------------------------------------------

    def enumerate_basis(self, coset_label, max_weight):
        """All basis vectors of the module with L(0)-weight <= max_weight."""
        max_weight = Fraction(max_weight)
        rep = self.lattice.discriminant_cosets()[coset_label]
        out = []
        for pt in self.lattice.vectors_up_to(rep, max_weight):
            base = Fraction(self.lattice.norm(pt), 2)
            top = max_weight - base
            for d in range(0, math.floor(top) + 1):
                for fock in colored_partitions(d, self.k):
                    out.append(self.basis_vector(fock, pt))
        out.sort(key=lambda bv: (self.weight0(bv), bv.point, bv.fock))
        return out

    def graded_dims(self, coset_label, max_weight):
        dims = {}
        for bv in self.enumerate_basis(coset_label, max_weight):
            w = self.weight0(bv)
            dims[w] = dims.get(w, 0) + 1
        return dims

    def enumerate_basis_shifted(self, coset_label, h_re, max_re):
        """Basis vectors with Re of the h-shifted weight <= max_re.

        ``h_re`` is the real part of the Cartan coefficient vector; the
        shifted weight is deg + <pt,pt>/2 - <h, pt>.
        """
        max_re = Fraction(max_re)
        h_re = tuple(Fraction(x) for x in h_re)
        rep = self.lattice.discriminant_cosets()[coset_label]
        shift = tuple(r - h for r, h in zip(rep.coords, h_re))
        budget = 2 * max_re + Fraction(self.lattice.norm(h_re))
        out = []
        for xs in self.lattice.shifted_box(shift, budget):
            pt = tuple(Fraction(x) + r for x, r in zip(xs, rep.coords))
            rel = Fraction(self.lattice.norm(pt), 2) - self.lattice.pairing(h_re, pt)
            if rel > max_re:
                continue
            top = max_re - rel
            for d in range(0, math.floor(top) + 1):
                for fock in colored_partitions(d, self.k):
                    out.append(self.basis_vector(fock, pt))
        out.sort(key=lambda bv: (self.weight0(bv), bv.point, bv.fock))
        return out

    # -- serialization ------------------------------------------------------------------

    def gvec_from_json_obj(self, obj):
        terms = {}
        for rec in obj:
            fock = tuple((int(n), int(i) - 1) for n, i in rec["fock"])
            point = tuple(Fraction(x) for x in rec["point"])
            bv = self.basis_vector(fock, point)
            terms[bv] = terms.get(bv, GR_ZERO) + parse_gauss(rec["coeff"])
        return GradedVector(terms)


def _acc(d, key, val):
    acc = d.get(key, GR_ZERO) + val
    if acc:
        d[key] = acc
    else:
        d.pop(key, None)


@lru_cache(maxsize=None)
def _beta(m, p):
    """Coefficient of h(p) z^(-p-m) in (1/(m-1)!) d^(m-1) h(z); a Fraction."""
    sign = -1 if (m - 1) % 2 else 1
    num = 1
    for t in range(m - 1):
        num *= p + m - 1 - t
    return Fraction(sign * num, math.factorial(m - 1))


def _unit_vec(k, i):
    return tuple(1 if j == i else 0 for j in range(k))


def _invert_fraction_matrix(m):
    n = len(m)
    a = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(i == j) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c])
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]
