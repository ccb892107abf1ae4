"""The Toeplitz matricial algebra C^N and its probability space.

A BScalar is an N-tuple of rationals with entrywise sum and the truncated
convolution product whose j-th entry is sum_{k=1}^{j} a_k b_{j+1-k}; it is
isomorphic to the algebra of N x N upper-triangular Toeplitz matrices and
is commutative. A TVariable is an N-tuple of noncommutative polynomials
with the same product shape; the conditional expectation E applies phi
entrywise.

Cumulants of tuples come in two independently computed flavors: the
primary path evaluates scalar multilinear cumulants on the Q-tuples of the
product recursion, and the oracle path runs Möbius inversion over NC(n)
with per-block B-products of moments (valid because every BScalar is
central). The two must always agree; tests enforce it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

from . import nc_lattice
from .errors import (
    DimensionMismatch,
    InternalConsistencyError,
    NonInvertible,
)
from .ncpoly import (
    NcPolynomial,
    RationalLike,
    as_fraction,
    format_rational,
    poly_add,
    poly_mul,
    poly_scale,
)
from .scalar_space import MomentFunctional

IndexWord = tuple[int, ...]


@dataclass(frozen=True)
class BScalar:
    """An element (a_1, ..., a_N) of the Toeplitz matricial algebra."""

    entries: tuple[Fraction, ...]

    @staticmethod
    def of(values: Iterable[RationalLike]) -> "BScalar":
        return BScalar(tuple(as_fraction(v) for v in values))

    @staticmethod
    def one(order: int) -> "BScalar":
        return BScalar((Fraction(1),) + (Fraction(0),) * (order - 1))

    @staticmethod
    def zero(order: int) -> "BScalar":
        return BScalar((Fraction(0),) * order)

    @property
    def order(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def scale(self, c: RationalLike) -> "BScalar":
        frac = as_fraction(c)
        return BScalar(tuple(frac * x for x in self.entries))

    def __add__(self, other: "BScalar") -> "BScalar":
        return b_add(self, other)

    def __sub__(self, other: "BScalar") -> "BScalar":
        return b_add(self, other.scale(-1))

    def __mul__(self, other: "BScalar") -> "BScalar":
        return b_mul(self, other)

    def to_json_obj(self) -> list[str]:
        return [format_rational(x) for x in self.entries]

    def __str__(self) -> str:
        return "(" + ", ".join(format_rational(x) for x in self.entries) + ")"


def _require_same_order(x: BScalar | "TVariable", y: BScalar | "TVariable") -> None:
    if x.order != y.order:
        raise DimensionMismatch(
            f"tuple lengths differ: {x.order} vs {y.order}"
        )


def b_add(x: BScalar, y: BScalar) -> BScalar:
    """Entrywise sum."""
    _require_same_order(x, y)
    return BScalar(tuple(a + b for a, b in zip(x.entries, y.entries)))


def b_mul(x: BScalar, y: BScalar) -> BScalar:
    """Convolution product: j-th entry sum_{k=1}^{j} x_k y_{(j+1)-k}."""
    _require_same_order(x, y)
    return BScalar(
        tuple(
            sum(
                (x.entries[k] * y.entries[j - k] for k in range(j + 1)),
                Fraction(0),
            )
            for j in range(x.order)
        )
    )


def b_pow(x: BScalar, exponent: int) -> BScalar:
    """x to a nonnegative integer power; x^0 is the unit."""
    if exponent < 0:
        raise ValueError("negative powers not supported; use b_inv first")
    result = BScalar.one(x.order)
    for _ in range(exponent):
        result = b_mul(result, x)
    return result


def b_inv(x: BScalar) -> BScalar:
    """Convolution inverse, by forward substitution on the triangular system.

    Requires a nonzero first entry; otherwise the element is not invertible
    (its matrix form has a zero diagonal).
    """
    if x.entries[0] == 0:
        raise NonInvertible("first entry is zero; no convolution inverse")
    inv: list[Fraction] = [Fraction(1) / x.entries[0]]
    for j in range(1, x.order):
        acc = sum(
            (x.entries[k] * inv[j - k] for k in range(1, j + 1)),
            Fraction(0),
        )
        inv.append(-acc / x.entries[0])
    return BScalar(tuple(inv))


@dataclass(frozen=True)
class TVariable:
    """An N-tuple of polynomials: a B-valued random variable."""

    entries: tuple[NcPolynomial, ...]

    @staticmethod
    def of(entries: Iterable[NcPolynomial]) -> "TVariable":
        return TVariable(tuple(entries))

    @staticmethod
    def from_bscalar(b: BScalar) -> "TVariable":
        return TVariable(
            tuple(NcPolynomial.constant(x) for x in b.entries)
        )

    @staticmethod
    def unit(order: int) -> "TVariable":
        return TVariable.from_bscalar(BScalar.one(order))

    @staticmethod
    def zero(order: int) -> "TVariable":
        return TVariable.from_bscalar(BScalar.zero(order))

    @property
    def order(self) -> int:
        return len(self.entries)

    def __add__(self, other: "TVariable") -> "TVariable":
        return t_add(self, other)

    def __mul__(self, other: "TVariable") -> "TVariable":
        return t_mul(self, other)

    def scale(self, c: RationalLike) -> "TVariable":
        return TVariable(tuple(poly_scale(c, p) for p in self.entries))

    def to_json_obj(self) -> list[list[dict[str, object]]]:
        return [p.to_json_obj() for p in self.entries]

    def __str__(self) -> str:
        return "(" + ", ".join(str(p) for p in self.entries) + ")"


def t_add(x: TVariable, y: TVariable) -> TVariable:
    """Entrywise sum."""
    _require_same_order(x, y)
    return TVariable(
        tuple(poly_add(a, b) for a, b in zip(x.entries, y.entries))
    )


def t_mul(x: TVariable, y: TVariable) -> TVariable:
    """Toeplitz product: j-th entry sum_{k=1}^{j} x_k y_{(j+1)-k}.

    Iterating this over a chain of factors produces exactly the P_j
    polynomials of the product recursion.
    """
    _require_same_order(x, y)
    out: list[NcPolynomial] = []
    for j in range(x.order):
        acc = NcPolynomial.zero()
        for k in range(j + 1):
            acc = poly_add(acc, poly_mul(x.entries[k], y.entries[j - k]))
        out.append(acc)
    return TVariable(tuple(out))


def t_mul_oracle(x: TVariable, y: TVariable) -> TVariable:
    """Independent product path through explicit matrix multiplication.

    Embeds both tuples as N x N upper-triangular Toeplitz matrices, runs a
    full matrix product, checks the result is again upper-triangular
    Toeplitz, and reads off its defining tuple. Any shape failure would
    mean the algebra embedding is broken, so it raises an internal error.
    """
    _require_same_order(x, y)
    n = x.order

    def matrix(t: TVariable) -> list[list[NcPolynomial]]:
        return [
            [
                t.entries[c - r] if c >= r else NcPolynomial.zero()
                for c in range(n)
            ]
            for r in range(n)
        ]

    mx, my = matrix(x), matrix(y)
    product = [
        [
            reduce(
                poly_add,
                (poly_mul(mx[r][k], my[k][c]) for k in range(n)),
                NcPolynomial.zero(),
            )
            for c in range(n)
        ]
        for r in range(n)
    ]
    for r in range(n):
        for c in range(n):
            expected = (
                product[0][c - r] if c >= r else NcPolynomial.zero()
            )
            if product[r][c] != expected:
                raise InternalConsistencyError(
                    "matrix product is not upper-triangular Toeplitz"
                )
    return TVariable(tuple(product[0]))


def chain_product(vars_: Sequence[TVariable]) -> TVariable:
    """Left-associated t_mul chain; entries are the P_j polynomials."""
    if not vars_:
        raise ValueError("empty product chain")
    return reduce(t_mul, vars_)


def expect(functional: MomentFunctional, x: TVariable) -> BScalar:
    """E(a_1, ..., a_N) = (phi(a_1), ..., phi(a_N))."""
    return BScalar(tuple(functional.phi(p) for p in x.entries))


def _select(vars_: Sequence[TVariable], idx: Sequence[int]) -> list[TVariable]:
    if not idx:
        raise ValueError("index word must be nonempty")
    chosen: list[TVariable] = []
    for i in idx:
        if not 1 <= i <= len(vars_):
            raise ValueError(
                f"index {i} outside 1..{len(vars_)} in index word {tuple(idx)}"
            )
        chosen.append(vars_[i - 1])
    first = chosen[0]
    for other in chosen[1:]:
        _require_same_order(first, other)
    return chosen


def t_moment(
    functional: MomentFunctional,
    vars_: Sequence[TVariable],
    idx: Sequence[int],
) -> BScalar:
    """The (i_1, ..., i_n)-th moment: E of the product chain."""
    chosen = _select(vars_, idx)
    return expect(functional, chain_product(chosen))


@dataclass(frozen=True)
class QTuple:
    """A formal sum of n-sequences of polynomials with rational weights.

    The sum is formal: sequences are never added pointwise. Appending a
    polynomial maps each summand to a longer sequence; equal sequences
    merge by adding their weights.
    """

    n: int
    terms: tuple[tuple[Fraction, tuple[NcPolynomial, ...]], ...]

    @staticmethod
    def single(poly: NcPolynomial) -> "QTuple":
        return QTuple(1, ((Fraction(1), (poly,)),))

    @staticmethod
    def combine(
        parts: Iterable[tuple[Fraction, tuple[NcPolynomial, ...]]],
        n: int,
    ) -> "QTuple":
        merged: dict[tuple[NcPolynomial, ...], Fraction] = {}
        for coeff, seq in parts:
            merged[seq] = merged.get(seq, Fraction(0)) + coeff
        terms = tuple(
            (coeff, seq) for seq, coeff in merged.items() if coeff
        )
        return QTuple(n, terms)

    def appended(self, poly: NcPolynomial) -> Iterable[
        tuple[Fraction, tuple[NcPolynomial, ...]]
    ]:
        for coeff, seq in self.terms:
            yield coeff, seq + (poly,)


def build_q(
    vars_: Sequence[TVariable], idx: Sequence[int]
) -> tuple[QTuple, ...]:
    """The formal-sum tuples (Q_1, ..., Q_N) of the product recursion.

    Q_j for one factor is the single entry a_j; appending a factor maps
    Q_j to the formal sum over k of Q_k extended by entry (j+1)-k of the
    new factor. Flattening (multiplying out each sequence) recovers the
    entries of the product chain exactly.
    """
    chosen = _select(vars_, idx)
    order = chosen[0].order
    current: list[QTuple] = [
        QTuple.single(chosen[0].entries[j]) for j in range(order)
    ]
    for factor in chosen[1:]:
        nxt: list[QTuple] = []
        arity = current[0].n + 1
        for j in range(order):
            parts: list[tuple[Fraction, tuple[NcPolynomial, ...]]] = []
            for k in range(j + 1):
                parts.extend(current[k].appended(factor.entries[j - k]))
            nxt.append(QTuple.combine(parts, arity))
        current = nxt
    return tuple(current)


def flatten_q(q: QTuple) -> NcPolynomial:
    """Multiply out each sequence of a QTuple and sum with its weights."""
    total = NcPolynomial.zero()
    for coeff, seq in q.terms:
        product = NcPolynomial.one()
        for poly in seq:
            product = poly_mul(product, poly)
        total = poly_add(total, poly_scale(coeff, product))
    return total


def t_cumulant(
    functional: MomentFunctional,
    vars_: Sequence[TVariable],
    idx: Sequence[int],
) -> BScalar:
    """The (i_1, ..., i_n)-th cumulant, via scalar cumulants of Q-tuples.

    Entry j is the scalar multilinear cumulant applied to each sequence of
    Q_j, summed with the formal weights. This is the primary code path;
    ``t_cumulant_mobius`` computes the same value independently.
    """
    qs = build_q(vars_, idx)
    out: list[Fraction] = []
    for q in qs:
        acc = Fraction(0)
        for coeff, seq in q.terms:
            acc += coeff * functional.cumulant(seq)
        out.append(acc)
    return BScalar(tuple(out))


def t_cumulant_mobius(
    functional: MomentFunctional,
    vars_: Sequence[TVariable],
    idx: Sequence[int],
) -> BScalar:
    """Oracle path for the cumulant: Möbius inversion over NC(n) in B.

    K_n = sum over pi of E-hat(pi) mu(pi, 1_n), where E-hat(pi) is the
    plain B-product (blocks ordered by minima) of the per-block moments.
    Plain products are valid because every BScalar is central.
    """
    chosen = _select(vars_, idx)
    order = chosen[0].order
    n = len(idx)
    lat = nc_lattice.lattice(n)
    mu_top = lat.mu_to_top()
    moment_cache: dict[tuple[int, ...], BScalar] = {}

    def block_moment(positions: tuple[int, ...]) -> BScalar:
        cached = moment_cache.get(positions)
        if cached is None:
            sub_idx = tuple(idx[p - 1] for p in positions)
            cached = t_moment(functional, vars_, sub_idx)
            moment_cache[positions] = cached
        return cached

    total = BScalar.zero(order)
    for at, pi in enumerate(lat.elements):
        weight = mu_top[at]
        if not weight:
            continue
        product = BScalar.one(order)
        for block in pi.blocks:
            product = b_mul(product, block_moment(block))
            if product.is_zero():
                break
        total = b_add(total, product.scale(weight))
    return total


def centrality_commutes(
    b: BScalar, x: TVariable
) -> bool:
    """Whether the embedded BScalar commutes with x under t_mul."""
    embedded = TVariable.from_bscalar(b)
    return t_mul(embedded, x) == t_mul(x, embedded)


def variables_from_json(
    obj: Sequence[Sequence[Mapping[str, object]]]
) -> TVariable:
    return TVariable(
        tuple(NcPolynomial.from_json_obj(entry) for entry in obj)
    )
