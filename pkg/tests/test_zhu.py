import math
import random
from fractions import Fraction

import pytest

from vertexflow.conformal import deform
from vertexflow.errors import WeightOutOfRange
from vertexflow.fock import GradedVector, LatticeVOA
from vertexflow.lattices import validate
from vertexflow.linalg import mat_equal, mat_mul
from vertexflow.scalars import GR_ONE, GR_ZERO, gauss, gbinom
from vertexflow.zhu import (
    IN_SPAN,
    NOT_IN_SPAN,
    ZhuContext,
    circle,
    membership,
    module_top,
    ov_span,
    semisimple_probe,
    star,
    t_plus_l,
    top_rep_check,
    vr_split,
    zero_mode,
    zhu_quotient,
)

A1 = validate([[2]])
A2 = validate([[2, -1], [-1, 2]])


@pytest.fixture(scope="module")
def voa():
    return LatticeVOA(A1)


@pytest.fixture(scope="module")
def ctx0(voa):
    return ZhuContext(deform(voa), d=2, d_gen=6)


@pytest.fixture(scope="module")
def ctx_half(voa):
    return ZhuContext(deform(voa, h_cart=(gauss(Fraction(1, 2)),)), d=2, d_gen=6)


@pytest.fixture(scope="module")
def ctx_third(voa):
    return ZhuContext(deform(voa, h_cart=(gauss(Fraction(1, 3)),)), d=2, d_gen=6)


def bvec(voa, bv):
    return GradedVector({bv: GR_ONE})


# -- creation-mode regularity backing the ov_span pair filter ---------------------


def delta_of(ctx, bv):
    from vertexflow.scalars import as_gauss, ceil_re

    w = ctx.wt(bv)
    return 1 if w == as_gauss(ceil_re(w)) else 0


@pytest.mark.parametrize(
    "gram,h,max_w",
    [
        ([[2]], (), 4),
        ([[2]], (Fraction(1, 2),), 4),
        ([[2]], (Fraction(1, 3),), 4),
        ([[2, -1], [-1, 2]], (), 3),
    ],
)
def test_creation_mode_regularity(gram, h, max_w):
    # for point pairing <gamma, mu> <= delta the pure-creation top mode
    # a(-1-delta)b of a non-vanishing circle product is nonzero (the only
    # all-zero case in range is a = vacuum); ov_span's pair filter relies on
    # this.  Larger pairings can cancel: e^{-a}(-2) b(-1)^2 e^{-a} = 0 while
    # e^{-a}(-1) b(-1)^2 e^{-a} != 0, and those pairs are computed honestly.
    lat = validate(gram)
    voa = LatticeVOA(lat)
    h_cart = tuple(gauss(c) for c in h) if h else ()
    ctx = ZhuContext(deform(voa, h_cart=h_cart), d=2, d_gen=6)
    basis = voa.enumerate_basis(0, max_w)
    pairs = 0
    for a in basis:
        delta = delta_of(ctx, a)
        for b in basis:
            if voa.n_max(a, b) < -1 - delta:
                continue
            if lat.pairing(a.point, b.point) > delta:
                continue
            pairs += 1
            top = voa.general_mode(a, -1 - delta, b)
            if top.is_zero():
                assert not (a.fock or any(a.point)), (a, b)  # vacuum only
                assert circle(ctx, bvec(voa, a), bvec(voa, b)).is_zero()
    assert pairs > 50


def test_creation_mode_cancellation_above_delta(voa):
    # the documented counterexample at pairing 2 > delta = 1
    a = voa.basis_vector((), (-1,))
    b = voa.basis_vector(((1, 0), (1, 0)), (-1,))
    assert voa.general_mode(a, -2, b).is_zero()
    assert not voa.general_mode(a, -1, b).is_zero()


def test_creation_mode_regularity_sampled_heavy(voa):
    ctx = ZhuContext(deform(voa, h_cart=(gauss(Fraction(1, 2)),)), d=2, d_gen=8)
    rng = random.Random(17)
    basis = voa.enumerate_basis(0, 7)
    for _ in range(120):
        a, b = rng.choice(basis), rng.choice(basis)
        delta = delta_of(ctx, a)
        if not (a.fock or any(a.point)):  # skip the vacuum exception
            continue
        if A1.pairing(a.point, b.point) > delta:
            continue
        if voa.n_max(a, b) >= -1 - delta:
            assert not voa.general_mode(a, -1 - delta, b).is_zero(), (a, b)


# -- V^r splitting -------------------------------------------------------------------


def test_vr_split_trivial(ctx0, voa):
    v = voa.vacuum() + voa.heis_state(0) + voa.exp_point((1,))
    parts = vr_split(ctx0, v)
    assert set(parts) == {gauss(0)}


def test_vr_split_third(ctx_third, voa):
    e = voa.exp_point((1,))
    parts = vr_split(ctx_third, e)
    assert set(parts) == {gauss(Fraction(-2, 3))}
    assert ctx_third.wt(list(e.terms)[0]) == gauss(Fraction(1, 3))


def test_vr_split_half_integer_weights(ctx_half, voa):
    for bv in voa.enumerate_basis(0, 3):
        assert ctx_half.r_of(bv) == gauss(0)


def test_vr_split_sums_and_range(ctx_third, voa):
    rng = random.Random(3)
    basis = voa.enumerate_basis(0, 3)
    for _ in range(20):
        terms = {rng.choice(basis): gauss(rng.randint(1, 5)) for _ in range(3)}
        v = GradedVector(terms)
        parts = vr_split(ctx_third, v)
        total = GradedVector({})
        for r, part in parts.items():
            assert Fraction(-1) < r.re <= 0
            total = total + part
        assert total == v


# -- circle and star products ------------------------------------------------------------


def test_circle_vacuum_left(ctx0, voa):
    for bv in voa.enumerate_basis(0, 2):
        assert circle(ctx0, voa.vacuum(), bvec(voa, bv)).is_zero()


def test_circle_unit_right_nonzero_r(ctx_third, voa):
    # a o 1 = a for a in V^r, r != 0
    e = voa.exp_point((1,))
    assert circle(ctx_third, e, voa.vacuum()) == e


def test_circle_omega_unit(ctx0, voa):
    # omega o 1 = (T + L)omega = L(-1)omega + 2 omega
    got = circle(ctx0, voa.omega, voa.vacuum())
    want = voa.translate(voa.omega) + gauss(2) * voa.omega
    assert got == want
    assert got == t_plus_l(ctx0, voa.omega)


def test_star_unit(ctx0, voa):
    for bv in voa.enumerate_basis(0, 2):
        v = bvec(voa, bv)
        assert star(ctx0, voa.vacuum(), v) == v


def test_star_kills_nonzero_r(ctx_third, voa):
    e = voa.exp_point((1,))
    for bv in voa.enumerate_basis(0, 2):
        assert star(ctx_third, e, bvec(voa, bv)).is_zero()


def test_star_omega_unit(ctx0, voa):
    assert star(ctx0, voa.omega, voa.vacuum()) == voa.omega


def classical_circle(voa, a_bv, b_bv):
    # independent classical-Zhu product for integer weights at h = 0
    wa = int(voa.weight0(a_bv))
    out = GradedVector({})
    j = 0
    while j - 2 <= voa.n_max(a_bv, b_bv):
        if 0 <= j <= wa:
            out = out + gauss(math.comb(wa, j)) * voa.general_mode(a_bv, j - 2, b_bv)
        j += 1
    return out


def classical_star(voa, a_bv, b_bv):
    wa = int(voa.weight0(a_bv))
    out = GradedVector({})
    j = 0
    while j - 1 <= voa.n_max(a_bv, b_bv):
        if 0 <= j <= wa:
            out = out + gauss(math.comb(wa, j)) * voa.general_mode(a_bv, j - 1, b_bv)
        j += 1
    return out


def test_products_match_classical_zhu(ctx0, voa):
    basis = voa.enumerate_basis(0, 3)
    for a in basis:
        for b in basis:
            assert circle(ctx0, bvec(voa, a), bvec(voa, b)) == classical_circle(
                voa, a, b
            )
            assert star(ctx0, bvec(voa, a), bvec(voa, b)) == classical_star(voa, a, b)


def test_products_bilinear(ctx0, voa):
    a1 = voa.heis_state(0)
    a2 = voa.exp_point((1,))
    b = voa.heis_state(0)
    lhs = circle(ctx0, a1 + gauss(3) * a2, b)
    rhs = circle(ctx0, a1, b) + gauss(3) * circle(ctx0, a2, b)
    assert lhs == rhs
    lhs = star(ctx0, a1 + gauss(3) * a2, b)
    rhs = star(ctx0, a1, b) + gauss(3) * star(ctx0, a2, b)
    assert lhs == rhs


# -- the truncated span and memberships ------------------------------------------------------


def test_span_contains_t_plus_l(ctx0, voa):
    span = ov_span(ctx0)
    for bv in voa.enumerate_basis(0, 2):
        el = t_plus_l(ctx0, bvec(voa, bv))
        if not el.is_zero():
            assert span.membership(el) == IN_SPAN


def test_span_contains_nonzero_r_vectors(ctx_third, voa):
    span = ov_span(ctx_third)
    assert span.membership(voa.exp_point((1,))) == IN_SPAN


def test_unit_not_in_span(ctx0, voa):
    assert membership(ctx0, voa.vacuum()) == NOT_IN_SPAN


def test_weight_zero_span_trivial(voa):
    ctx = ZhuContext(deform(voa), d=0, d_gen=4, d_span=0)
    assert membership(ctx, voa.vacuum()) == NOT_IN_SPAN


def test_membership_weight_out_of_range(ctx0, voa):
    heavy = voa.single(((4, 0),), (0,))
    with pytest.raises(WeightOutOfRange):
        membership(ctx0, heavy)


def test_t_plus_l_omega_in_span(ctx0, voa):
    assert membership(ctx0, t_plus_l(ctx0, voa.omega)) == IN_SPAN


def test_span_monotone_in_d_gen(voa):
    datum = deform(voa, h_cart=(gauss(Fraction(1, 2)),))
    dims = []
    for d_gen in (2, 4, 6):
        ctx = ZhuContext(datum, d=2, d_gen=d_gen)
        dims.append(ov_span(ctx).dim)
    assert dims == sorted(dims)


# -- quotient -------------------------------------------------------------------------------------


def test_quotient_dimension_golden(voa):
    # dim A(V) for this lattice is 1^2 + 2^2 = 5 (two simple tops of dims 1, 2);
    # the truncated upper bound already meets it at d = 2 and stays there
    for d, d_gen in [(2, 6), (2, 8), (3, 7)]:
        q = zhu_quotient(ZhuContext(deform(voa), d=d, d_gen=d_gen))
        assert q["dim_upper_bound"] == 5
        assert q["associativity"]["failures"] == 0


def test_quotient_upper_bound_monotone(voa):
    datum = deform(voa)
    dims = [
        zhu_quotient(ZhuContext(datum, d=2, d_gen=d_gen))["dim_upper_bound"]
        for d_gen in (2, 4, 6)
    ]
    assert dims == sorted(dims, reverse=True)
    assert all(dim >= 2 for dim in dims)  # at least as many as simple tops


def test_quotient_unit_is_representative(ctx0, voa):
    q = zhu_quotient(ctx0)
    reps = q["representatives"]
    assert voa.vacuum_bv in reps
    i = reps.index(voa.vacuum_bv)
    # the unit acts as a two-sided unit on the structure-constant table
    for j in range(len(reps)):
        left = q["star_table"][(i, j)]
        right = q["star_table"][(j, i)]
        want = [GR_ONE if t == j else GR_ZERO for t in range(len(reps))]
        assert left == want and right == want


# -- module tops, zero modes, probes -----------------------------------------------------------------


def test_module_tops_h0(voa):
    datum = deform(voa)
    re0, top0 = module_top(datum, 0)
    re1, top1 = module_top(datum, 1)
    assert re0 == 0 and len(top0) == 1
    assert re1 == Fraction(1, 4) and len(top1) == 2


def test_module_tops_half(voa):
    datum = deform(voa, h_cart=(gauss(Fraction(1, 2)),))
    re0, top0 = module_top(datum, 0)
    re1, top1 = module_top(datum, 1)
    assert re0 == 0 and len(top0) == 2  # vacuum and e^alpha
    assert re1 == Fraction(-1, 4) and len(top1) == 1  # e^{alpha/2} only


def test_zero_mode_examples(ctx0, voa):
    _, top0 = module_top(ctx0.datum, 0)
    _, top1 = module_top(ctx0.datum, 1)
    o_omega = zero_mode(ctx0, voa.omega, top0)
    assert o_omega == [[GR_ZERO]]
    o_b = zero_mode(ctx0, voa.heis_state(0), top1)
    flat = sorted(str(o_b[i][i]) for i in range(2))
    assert flat == ["-1", "1"]
    assert o_b[0][1] == GR_ZERO and o_b[1][0] == GR_ZERO
    o_omega1 = zero_mode(ctx0, voa.omega, top1)
    assert o_omega1 == [
        [gauss(Fraction(1, 4)), GR_ZERO],
        [GR_ZERO, gauss(Fraction(1, 4))],
    ]


def test_zero_mode_nonzero_r_annihilates(ctx_third, voa):
    _, top0 = module_top(ctx_third.datum, 0)
    m = zero_mode(ctx_third, voa.exp_point((1,)), top0)
    assert all(not c for row in m for c in row)


def test_zero_mode_linear(ctx0, voa):
    _, top1 = module_top(ctx0.datum, 1)
    a = voa.heis_state(0)
    b = voa.omega
    lhs = zero_mode(ctx0, a + gauss(2) * b, top1)
    want = [
        [x + gauss(2) * y for x, y in zip(r1, r2)]
        for r1, r2 in zip(zero_mode(ctx0, a, top1), zero_mode(ctx0, b, top1))
    ]
    assert lhs == want


def test_top_rep_check_h0(ctx0):
    tops = [module_top(ctx0.datum, c)[1] for c in (0, 1)]
    report = top_rep_check(ctx0, tops)
    assert report["annihilation"]["failures"] == []
    assert report["homomorphism"]["failures"] == []
    assert report["homomorphism"]["passes"] > 0


def test_omega_star_omega_zero_mode(ctx0, voa):
    # o(omega * omega) = o(omega)^2 = (1/16) Id on the two-dimensional top
    _, top1 = module_top(ctx0.datum, 1)
    prod = star(ctx0, voa.omega, voa.omega)
    lhs = zero_mode(ctx0, prod, top1)
    o = zero_mode(ctx0, voa.omega, top1)
    assert mat_equal(lhs, mat_mul(o, o))
    assert lhs[0][0] == gauss(Fraction(1, 16))


def test_semisimple_probe_a1(ctx0):
    tops = [module_top(ctx0.datum, c)[1] for c in (0, 1)]
    probe = semisimple_probe(ctx0, tops)
    assert probe["full_dim"] == 5
    assert probe["image_dim"] == 5
    assert probe["spans_all"]


def test_semisimple_probe_z4_lattice():
    # lattice [[4]]: four cosets with top dims (1, 1, 2, 1); weight-3 zero
    # modes act diagonally through cubics over five distinct h-eigenvalues,
    # so at d = 3 the image misses one diagonal direction and d = 4 fills it
    lat = validate([[4]])
    voa = LatticeVOA(lat)
    datum = deform(voa)
    tops = [module_top(datum, c)[1] for c in range(4)]
    assert sorted(len(t) for t in tops) == [1, 1, 1, 2]
    probe3 = semisimple_probe(ZhuContext(datum, d=3, d_gen=5), tops)
    assert probe3["full_dim"] == 7
    assert probe3["image_dim"] == 6
    probe4 = semisimple_probe(ZhuContext(datum, d=4, d_gen=6), tops)
    assert probe4["spans_all"]
