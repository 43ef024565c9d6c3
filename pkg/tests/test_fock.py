import random
from fractions import Fraction

import pytest

from vertexflow.errors import TruncationExceeded
from vertexflow.fock import GradedVector, LatticeVOA, colored_partitions, fock_canonical
from vertexflow.lattices import validate
from vertexflow.qseries import QSeries, geometric_inverse_power
from vertexflow.scalars import GR_ONE, gauss

A1 = validate([[2]])
A2 = validate([[2, -1], [-1, 2]])
SQ2 = validate([[2, 0], [0, 2]])


@pytest.fixture(scope="module")
def voa():
    return LatticeVOA(A1)


def test_fock_canonical_order():
    assert fock_canonical(((1, 0), (2, 1), (2, 0))) == ((2, 0), (2, 1), (1, 0))


def test_colored_partitions_counts():
    # one color: ordinary partitions 1,1,2,3,5,7
    for d, expect in enumerate([1, 1, 2, 3, 5, 7]):
        assert len(colored_partitions(d, 1)) == expect
    # two colors at degree 2: 2(-2) choices x2 + (1,1) pairs {00,01,11} = 5
    assert len(colored_partitions(2, 2)) == 5


# -- graded dimension oracle -----------------------------------------------------


def fock_theta_dims_oracle(lat, coset_label, max_weight):
    # independent series product: prod (1-q^m)^(-k) * theta coefficients
    k = lat.rank
    order = Fraction(max_weight)
    prod = geometric_inverse_power(1, k, order)
    m = 2
    while m <= order:
        prod = prod * geometric_inverse_power(m, k, order)
        m += 1
    theta = lat.theta_series(lat.discriminant_cosets()[coset_label], [gauss(0)] * k, order)
    full = prod * theta
    return {e.re: int(c.re) for e, c in full.abs_items() if e.re <= order}


@pytest.mark.parametrize("lat", [A1, A2, SQ2])
def test_graded_dims_match_series(lat):
    voa = LatticeVOA(lat)
    for coset in lat.discriminant_cosets():
        dims = voa.graded_dims(coset.coset_label, 6)
        oracle = fock_theta_dims_oracle(lat, coset.coset_label, 6)
        assert dims == oracle


def test_enumerate_basis_examples(voa):
    dims = voa.graded_dims(0, 2)
    assert dims[Fraction(0)] == 1
    assert dims[Fraction(1)] == 3
    assert dims[Fraction(2)] == 4
    half = voa.graded_dims(1, Fraction(1, 4))
    assert half == {Fraction(1, 4): 2}


# -- Heisenberg modes ---------------------------------------------------------------


def test_heis_relation(voa):
    v = voa.heis_state(0)  # b(-1)1
    assert voa.heis_mode(0, 1, v) == voa.vacuum() * gauss(2)


def test_heis_annihilates_vacuum(voa):
    for n in range(0, 4):
        assert voa.heis_mode(0, n, voa.vacuum()).is_zero()


def test_heis_zero_mode_eigenvalue(voa):
    e = voa.exp_point((1,))
    assert voa.heis_mode(0, 0, e) == e * gauss(2)


# -- exponential modes ----------------------------------------------------------------


def test_exp_creativity(voa):
    assert voa.exp_mode((1,), -1, voa.vacuum()) == voa.exp_point((1,))
    for n in range(0, 5):
        assert voa.exp_mode((1,), n, voa.vacuum()).is_zero()


def test_exp_on_opposite(voa):
    em = voa.exp_point((-1,))
    eps = gauss(voa.cocycle.eval((1,), (-1,)))
    assert voa.exp_mode((1,), 1, em) == voa.vacuum() * eps
    assert voa.exp_mode((1,), 0, em) == voa.heis_state(0) * eps


def test_exp_same_sign_vanishes(voa):
    e = voa.exp_point((1,))
    for n in range(-2, 3):
        assert voa.exp_mode((1,), n, e).is_zero()
    # first nonzero mode of Y(e^a, z) e^a sits at n = -3
    got = voa.exp_mode((1,), -3, e)
    assert got == voa.single((), (2,), voa.cocycle.eval((1,), (1,)))


# -- translation -------------------------------------------------------------------------


def test_translate_examples(voa):
    assert voa.translate(voa.vacuum()).is_zero()
    e = voa.exp_point((1,))
    assert voa.translate(e) == voa.single(((1, 0),), (1,))


def test_translate_matches_minus_two_mode(voa):
    for bv in voa.enumerate_basis(0, 3):
        v = GradedVector({bv: GR_ONE})
        assert voa.translate(v) == voa.general_mode(v, -2, voa.vacuum())


def test_translate_raises_weight(voa):
    for bv in voa.enumerate_basis(0, 4):
        tv = voa.translate(GradedVector({bv: GR_ONE}))
        w = voa.weight0(bv)
        for tb in tv.terms:
            assert voa.weight0(tb) == w + 1


# -- general modes -------------------------------------------------------------------------


def test_omega_one_is_weight_operator(voa):
    for bv in voa.enumerate_basis(0, 4):
        v = GradedVector({bv: GR_ONE})
        assert voa.virasoro_mode(0, v) == v * gauss(voa.weight0(bv))


def test_omega_zero_is_translation(voa):
    for bv in voa.enumerate_basis(0, 3):
        v = GradedVector({bv: GR_ONE})
        assert voa.virasoro_mode(-1, v) == voa.translate(v)


def test_mode_weight_homogeneity(voa):
    basis = voa.enumerate_basis(0, 2)
    module = voa.enumerate_basis(1, Fraction(9, 4))
    for a in basis:
        for b in module:
            wa, wb = voa.weight0(a), voa.weight0(b)
            for n in range(-2, voa.n_max(a, b) + 1):
                out = voa.general_mode(a, n, b)
                for bv in out.terms:
                    assert voa.weight0(bv) == wa + wb - n - 1


def test_mode_vanishing_bound(voa):
    basis = voa.enumerate_basis(0, 3)
    for a in basis:
        for b in basis:
            n = voa.n_max(a, b)
            for extra in range(1, 3):
                assert voa.general_mode(a, n + extra, b).is_zero()


def test_vacuum_modes(voa):
    for bv in voa.enumerate_basis(0, 3):
        v = GradedVector({bv: GR_ONE})
        assert voa.general_mode(voa.vacuum(), -1, v) == v
        for n in (0, 1, -2, 3):
            got = voa.general_mode(voa.vacuum(), n, v)
            assert got.is_zero()


def test_commutator_examples(voa):
    b = voa.heis_state(0)
    vs = voa.enumerate_basis(0, 2)
    assert voa.commutator_check(b, b, 1, -1, vs)
    assert voa.commutator_check(voa.omega, b, 0, 2, vs)
    assert voa.commutator_check(voa.vacuum(), voa.omega, 1, 0, vs)


def test_commutator_random(voa):
    rng = random.Random(11)
    basis = voa.enumerate_basis(0, 3) + voa.enumerate_basis(1, Fraction(9, 4))
    ops = voa.enumerate_basis(0, 3)
    for _ in range(50):
        a = GradedVector({rng.choice(ops): GR_ONE})
        b = GradedVector({rng.choice(ops): GR_ONE})
        m = rng.randint(-3, 3)
        n = rng.randint(-3, 3)
        v = rng.choice(basis)
        assert voa.commutator_check(a, b, m, n, [v])


def test_skew_symmetry_sampled(voa):
    rng = random.Random(5)
    ops = voa.enumerate_basis(0, 3)
    for _ in range(25):
        a = rng.choice(ops)
        b = rng.choice(ops)
        n = rng.randint(-3, voa.n_max(a, b))
        assert voa.skew_symmetry_check(a, n, b)


def test_jacobi_identity_on_module(voa):
    # weak associativity consequence: commutator formula on the half coset
    vs = voa.enumerate_basis(1, Fraction(9, 4))
    e = voa.exp_point((1,))
    f = voa.exp_point((-1,))
    for m in (-1, 0, 1):
        for n in (-1, 0, 1):
            assert voa.commutator_check(e, f, m, n, vs)
            assert voa.commutator_check(e, voa.omega, m, n, vs)


# -- truncation policy ------------------------------------------------------------------------


def test_truncation_error_and_lossy(voa):
    v = GradedVector({voa.vacuum_bv: GR_ONE}, truncation=Fraction(1))
    with pytest.raises(TruncationExceeded):
        voa.heis_mode(0, -2, v)
    dropped = voa.heis_mode(0, -2, v, lossy=True)
    assert dropped.is_zero()
    kept = voa.heis_mode(0, -1, v)
    assert kept == GradedVector({voa.basis_vector(((1, 0),), (0,)): GR_ONE}, Fraction(1))


# -- rank 2 sanity ------------------------------------------------------------------------------


def test_a2_omega_weight_operator():
    voa2 = LatticeVOA(A2)
    for bv in voa2.enumerate_basis(0, 2):
        v = GradedVector({bv: GR_ONE})
        assert voa2.virasoro_mode(0, v) == v * gauss(voa2.weight0(bv))
    # central charge = rank: [L(2), L(-2)]1 = c/2 * 1
    one = voa2.vacuum()
    lhs = voa2.virasoro_mode(2, voa2.virasoro_mode(-2, one))
    assert lhs == one * gauss(Fraction(2 * 2 * 2 - 2, 12) * 2)


def test_json_roundtrip(voa):
    v = voa.single(((2, 0), (1, 0)), (Fraction(1, 2),), gauss(Fraction(3, 4), 1)) + (
        voa.exp_point((1,)) * gauss(2)
    )
    obj = v.to_json_obj()
    assert obj[0]["fock"] == [] or obj[0]["fock"][0][1] == 1  # 1-based index
    back = voa.gvec_from_json_obj(obj)
    assert back == v
