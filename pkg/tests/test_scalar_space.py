"""Scalar-model tests: the functional phi, free cumulants, and builders.

The moment side and the cumulant side are built as mutually inverse lattice
sums, so the central test is the roundtrip: feed in a cumulant table,
compute moments, recover every cumulant exactly. Named laws are pinned
against their textbook moment sequences, and cross-family cumulants are
checked to vanish together with the product factorizations that freeness
forces.
"""

import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toepfree.errors import DegreeCapExceeded, DimensionMismatch
from toepfree.nc_lattice import NcPartition, catalan
from toepfree.ncpoly import Generator, NcPolynomial, poly_add, poly_scale
from toepfree.scalar_space import (
    CumulantSpec,
    MomentFunctional,
    builtin_distribution,
    build_space,
)

F = Fraction
gen = NcPolynomial.generator


@pytest.fixture
def semi() -> MomentFunctional:
    return build_space(
        {"sf": {"s": {"kind": "semicircular", "variance": 1}}},
        degree_cap=8,
    )


@pytest.fixture
def mixed() -> MomentFunctional:
    return build_space(
        {
            "sf": {"s": {"kind": "semicircular", "variance": 1}},
            "pf": {"p": {"kind": "free_poisson", "rate": 1}},
            "cf": {"c": {"kind": "constant", "value": 3}},
        },
        degree_cap=6,
    )


# --------------------------------------------------------------------------
# builders
# --------------------------------------------------------------------------


def test_builtin_distribution_tables():
    assert builtin_distribution("semicircular", "s", variance=F(1, 2)) == {
        ("s", "s"): F(1, 2)
    }
    assert builtin_distribution("free_poisson", "p", 3, rate=2) == {
        ("p",): F(2),
        ("p", "p"): F(2),
        ("p", "p", "p"): F(2),
    }
    assert builtin_distribution("constant", "c", value="5/3") == {
        ("c",): F(5, 3)
    }
    assert builtin_distribution(
        "custom", "x", cumulants={("x", "x"): "1/4"}
    ) == {("x", "x"): F(1, 4)}
    # zero cumulants are dropped
    assert builtin_distribution("constant", "c", value=0) == {}


def test_builtin_distribution_rejects_bad_input():
    with pytest.raises(ValueError):
        builtin_distribution("gaussian", "x")
    with pytest.raises(ValueError):
        builtin_distribution("semicircular", "s", rate=1)
    with pytest.raises(ValueError):
        builtin_distribution("custom", "x", cumulants=[1, 2])


def test_functional_validates_spec():
    gens = [Generator("a", "f"), Generator("b", "g")]
    with pytest.raises(ValueError):  # duplicate id
        MomentFunctional(
            [Generator("a", "f"), Generator("a", "f")],
            CumulantSpec.build({}, 3),
        )
    with pytest.raises(ValueError):  # cap out of range
        MomentFunctional(gens, CumulantSpec.build({}, 0))
    with pytest.raises(ValueError):  # cap above the hard maximum
        MomentFunctional(gens, CumulantSpec.build({}, 9))
    with pytest.raises(ValueError):  # key longer than the cap
        MomentFunctional(
            gens, CumulantSpec.build({"f": {("a",) * 4: 1}}, 3)
        )
    with pytest.raises(ValueError):  # key references undeclared generator
        MomentFunctional(
            gens, CumulantSpec.build({"f": {("z",): 1}}, 3)
        )
    with pytest.raises(ValueError):  # key references a foreign family
        MomentFunctional(
            gens, CumulantSpec.build({"f": {("b",): 1}}, 3)
        )


def test_build_space_requires_one_entry_point():
    with pytest.raises(ValueError):
        build_space()
    with pytest.raises(ValueError):
        build_space(families={"f": {}})
    fn = build_space(
        generators=[Generator("a", "f")],
        families={"f": {("a",): F(2)}},
        degree_cap=4,
    )
    assert fn.phi_word(("a",)) == 2


# --------------------------------------------------------------------------
# moments of the named laws
# --------------------------------------------------------------------------


def test_semicircular_moments_are_catalan(semi):
    for k in range(1, 5):
        assert semi.phi_word(("s",) * (2 * k)) == catalan(k)
    for n in (1, 3, 5, 7):
        assert semi.phi_word(("s",) * n) == 0


def test_free_poisson_rate_one_moments_are_catalan():
    fn = build_space(
        {"pf": {"p": {"kind": "free_poisson", "rate": 1}}}, degree_cap=6
    )
    for n in range(1, 7):
        assert fn.phi_word(("p",) * n) == catalan(n)


def test_constant_moments_are_powers(mixed):
    for n in range(1, 7):
        assert mixed.phi_word(("c",) * n) == F(3) ** n


def test_phi_word_edges(mixed):
    assert mixed.phi_word(()) == 1
    with pytest.raises(DegreeCapExceeded):
        mixed.phi_word(("s",) * 7)
    with pytest.raises(ValueError):
        mixed.phi_word(("nope",))


def test_phi_is_linear(semi):
    p = poly_add(
        poly_scale(F(1, 2), NcPolynomial.from_word(("s", "s"))),
        NcPolynomial.constant(3),
    )
    assert semi.phi(p) == F(1, 2) * 1 + 3
    assert semi.phi(NcPolynomial.zero()) == 0
    # value used widely downstream: phi(s*s + 1) = 2
    assert semi.phi(gen("s") * gen("s") + NcPolynomial.one()) == 2


def test_phi_partition_examples(semi):
    pi = NcPartition.from_blocks(3, [[1, 3], [2]])
    s = gen("s")
    assert semi.phi_partition(pi, (s, s, s)) == 0  # phi(ss) * phi(s)
    pi2 = NcPartition.from_blocks(4, [[1, 2], [3, 4]])
    assert semi.phi_partition(pi2, (s, s, s, s)) == 1
    with pytest.raises(DimensionMismatch):
        semi.phi_partition(pi, (s, s))


# --------------------------------------------------------------------------
# cumulants
# --------------------------------------------------------------------------


def test_semicircular_cumulants(semi):
    s = gen("s")
    assert semi.cumulant((s, s)) == 1
    for n in (1, 3, 4, 5, 6):
        assert semi.cumulant((s,) * n) == 0


def test_cross_family_cumulants_vanish(mixed):
    s, p = gen("s"), gen("p")
    assert mixed.cumulant((s, p)) == 0
    assert mixed.cumulant((s, p, s)) == 0
    assert mixed.cumulant((p, p, s, p)) == 0


def test_cumulants_with_constant_slots_vanish(mixed):
    one = NcPolynomial.one()
    s = gen("s")
    for args in ((s, one), (one, s), (s, one, s), (one, one)):
        assert mixed.cumulant(args) == 0
    # arity 1 on a constant is just phi
    assert mixed.cumulant((NcPolynomial.constant(F(7, 2)),)) == F(7, 2)


def test_cumulant_edges(mixed):
    with pytest.raises(ValueError):
        mixed.cumulant(())
    with pytest.raises(DegreeCapExceeded):
        mixed.cumulant((gen("s"),) * 7)


def test_cumulant_is_multilinear(mixed):
    s, p = gen("s"), gen("p")
    combo = poly_add(poly_scale(2, s), poly_scale(F(-1, 3), p))
    lhs = mixed.cumulant((combo, s))
    rhs = 2 * mixed.cumulant((s, s)) + F(-1, 3) * mixed.cumulant((p, s))
    assert lhs == rhs
    lhs3 = mixed.cumulant((s, combo, p))
    rhs3 = 2 * mixed.cumulant((s, s, p)) + F(-1, 3) * mixed.cumulant(
        (s, p, p)
    )
    assert lhs3 == rhs3


def test_cumulant_agrees_with_word_path(mixed):
    words = (("s",), ("p", "p"), ("s", "s"))
    args = tuple(NcPolynomial.from_word(w) for w in words)
    assert mixed.cumulant(args) == mixed.cumulant_words(words)


def test_cumulant_of_ids_matches_cumulant(mixed):
    assert mixed.cumulant_of_ids(("s", "s")) == mixed.cumulant(
        (gen("s"), gen("s"))
    )


# --------------------------------------------------------------------------
# the roundtrip: cumulant table -> moments -> cumulants
# --------------------------------------------------------------------------


def random_joint_spec(rng: random.Random, ids: tuple[str, ...], cap: int):
    table = {}
    for n in range(1, cap + 1):
        for key in product(ids, repeat=n):
            if rng.random() < 0.4:
                table[key] = F(rng.randint(-3, 3), rng.randint(1, 3))
    return table


def test_cumulant_table_recovery_joint_family():
    rng = random.Random(2024)
    ids = ("g1", "g2")
    table = random_joint_spec(rng, ids, 4)
    fn = build_space(
        generators=[Generator(i, "fam") for i in ids],
        families={"fam": table},
        degree_cap=4,
    )
    for n in range(1, 5):
        for key in product(ids, repeat=n):
            assert fn.cumulant_of_ids(key) == table.get(key, F(0))


def test_freeness_forces_product_factorization(mixed):
    s, p = gen("s"), gen("p")
    # phi(xy) = phi(x) phi(y) for free x, y
    assert mixed.phi(s * p) == mixed.phi(s) * mixed.phi(p)
    x = s * s + NcPolynomial.one()
    y = p + NcPolynomial.constant(2)
    assert mixed.phi(x * y) == mixed.phi(x) * mixed.phi(y)
    # the classic degree-4 alternating formula for free x, y
    lhs = mixed.phi(s * p * s * p)
    rhs = (
        mixed.phi(s * s) * mixed.phi(p) ** 2
        + mixed.phi(s) ** 2 * mixed.phi(p * p)
        - mixed.phi(s) ** 2 * mixed.phi(p) ** 2
    )
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(
    st.fractions(min_value=-3, max_value=3, max_denominator=2),
    st.fractions(min_value=-3, max_value=3, max_denominator=2),
)
def test_property_first_slot_linearity(c1, c2):
    fn = build_space(
        {
            "sf": {"s": {"kind": "semicircular", "variance": 1}},
            "pf": {"p": {"kind": "free_poisson", "rate": 1}},
        },
        degree_cap=4,
    )
    s, p = gen("s"), gen("p")
    combo = poly_add(poly_scale(c1, s), poly_scale(c2, p))
    for tail in ((s,), (s, p), (p, p, s)):
        lhs = fn.cumulant((combo, *tail))
        rhs = c1 * fn.cumulant((s, *tail)) + c2 * fn.cumulant((p, *tail))
        assert lhs == rhs
