"""The scalar noncommutative probability space (A, phi).

A distribution is specified by a table of joint free cumulants per family
(cross-family cumulants are identically zero, so distinct families are free
by construction). Moments are derived from cumulants by the lattice sum

    phi(a_1 ... a_n) = sum over pi in NC(n) of prod over blocks V of kappa(V)

and multilinear cumulants are recovered from moments by Möbius inversion

    c(a_1, ..., a_n) = sum over pi in NC(n) of phi_pi(a_1,...,a_n) mu(pi, 1_n).

Block products inside phi_pi are plain scalar products, which is valid
because scalars are central.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from . import nc_lattice
from .errors import DegreeCapExceeded, DimensionMismatch
from .ncpoly import (
    Generator,
    NcPolynomial,
    RationalLike,
    Word,
    as_fraction,
    poly_mul,
)

#: Default truncation degree for moments and series.
DEFAULT_DEGREE = 6
#: Largest supported truncation degree (NC(8) has 1430 elements).
MAX_DEGREE = 8

CumulantTable = Mapping[tuple[str, ...], RationalLike]


def builtin_distribution(
    kind: str,
    gen_id: str,
    degree_cap: int = DEFAULT_DEGREE,
    **params: object,
) -> dict[tuple[str, ...], Fraction]:
    """The cumulant-table fragment of one generator for a named law.

    Kinds: ``semicircular`` (param ``variance``: k_2 = v), ``free_poisson``
    (param ``rate``: k_n = rate for every n <= degree_cap), ``constant``
    (param ``value``: k_1 = c), and ``custom`` (param ``cumulants``: a
    mapping from id-tuples to rationals, passed through).
    """
    if kind == "semicircular":
        variance = as_fraction(params.pop("variance", 1))  # type: ignore[arg-type]
        table = {(gen_id, gen_id): variance}
    elif kind == "free_poisson":
        rate = as_fraction(params.pop("rate", 1))  # type: ignore[arg-type]
        table = {
            (gen_id,) * n: rate for n in range(1, degree_cap + 1)
        }
    elif kind == "constant":
        value = as_fraction(params.pop("value", 0))  # type: ignore[arg-type]
        table = {(gen_id,): value}
    elif kind == "custom":
        raw = params.pop("cumulants", {})
        if not isinstance(raw, Mapping):
            raise ValueError("custom distribution needs a cumulants mapping")
        table = {
            tuple(str(g) for g in key): as_fraction(val)  # type: ignore[arg-type]
            for key, val in raw.items()
        }
    else:
        raise ValueError(f"unknown distribution kind {kind!r}")
    if params:
        raise ValueError(
            f"unexpected parameters for {kind!r}: {sorted(params)}"
        )
    return {key: val for key, val in table.items() if val}


@dataclass(frozen=True)
class CumulantSpec:
    """Per-family joint free cumulant tables, with a degree cap.

    Keys of each family table are tuples of that family's generator ids
    (length 1..degree_cap); missing tuples mean cumulant zero. Cross-family
    joint cumulants are identically zero and are never stored.
    """

    families: Mapping[str, Mapping[tuple[str, ...], Fraction]]
    degree_cap: int = DEFAULT_DEGREE

    @staticmethod
    def build(
        families: Mapping[str, CumulantTable],
        degree_cap: int = DEFAULT_DEGREE,
    ) -> "CumulantSpec":
        frozen = {
            family: {
                tuple(key): as_fraction(val)
                for key, val in table.items()
                if as_fraction(val)
            }
            for family, table in families.items()
        }
        return CumulantSpec(frozen, degree_cap)

    def value(self, family: str, ids: tuple[str, ...]) -> Fraction:
        return self.families.get(family, {}).get(ids, Fraction(0))


class MomentFunctional:
    """The linear functional phi on A, derived from a CumulantSpec.

    Carries the generator table (ids with their families) and per-instance
    memo tables for word moments and multilinear cumulants. Dict mutations
    are single atomic assignments, so shared use across threads yields
    identical results.
    """

    def __init__(
        self,
        generators: Iterable[Generator],
        spec: CumulantSpec,
    ):
        self.generators: dict[str, Generator] = {}
        for gen in generators:
            if gen.id in self.generators:
                raise ValueError(f"duplicate generator id {gen.id!r}")
            self.generators[gen.id] = gen
        if not 1 <= spec.degree_cap <= MAX_DEGREE:
            raise ValueError(
                f"degree cap must be in 1..{MAX_DEGREE}, got {spec.degree_cap}"
            )
        for family, table in spec.families.items():
            for key in table:
                if not 1 <= len(key) <= spec.degree_cap:
                    raise ValueError(
                        f"cumulant key {key} has length outside "
                        f"1..{spec.degree_cap}"
                    )
                for gen_id in key:
                    gen = self.generators.get(gen_id)
                    if gen is None:
                        raise ValueError(
                            f"cumulant key {key} references undeclared "
                            f"generator {gen_id!r}"
                        )
                    if gen.family != family:
                        raise ValueError(
                            f"cumulant key {key} of family {family!r} "
                            f"references generator {gen_id!r} of family "
                            f"{gen.family!r}"
                        )
        self.spec = spec
        self.degree_cap = spec.degree_cap
        self._word_memo: dict[Word, Fraction] = {}
        self._cumulant_memo: dict[tuple[NcPolynomial, ...], Fraction] = {}
        self._word_cumulant_memo: dict[tuple[Word, ...], Fraction] = {}

    # -- moments ---------------------------------------------------------

    def _block_cumulant(self, letters: tuple[str, ...]) -> Fraction:
        """kappa(V): the joint cumulant of a block of generator letters."""
        families = {self.generators[g].family for g in letters}
        if len(families) != 1:
            return Fraction(0)
        return self.spec.value(next(iter(families)), letters)

    def phi_word(self, word: Word) -> Fraction:
        """phi of a single word: the NC(n) lattice sum of block cumulants."""
        word = tuple(word)
        n = len(word)
        if n == 0:
            return Fraction(1)
        if n > self.degree_cap:
            raise DegreeCapExceeded(
                f"word of length {n} exceeds degree cap {self.degree_cap}"
            )
        for gen_id in word:
            if gen_id not in self.generators:
                raise ValueError(f"undeclared generator {gen_id!r} in word")
        cached = self._word_memo.get(word)
        if cached is not None:
            return cached
        total = Fraction(0)
        for pi in nc_lattice.enumerate_nc(n, cap=nc_lattice.HARD_DEGREE_CAP):
            product = Fraction(1)
            for block in pi.blocks:
                product *= self._block_cumulant(
                    tuple(word[i - 1] for i in block)
                )
                if not product:
                    break
            total += product
        self._word_memo[word] = total
        return total

    def phi(self, p: NcPolynomial) -> Fraction:
        """Linear extension of phi_word to polynomials."""
        return sum(
            (coeff * self.phi_word(word) for word, coeff in p.terms),
            Fraction(0),
        )

    def phi_partition(
        self,
        pi: nc_lattice.NcPartition,
        args: Sequence[NcPolynomial],
    ) -> Fraction:
        """phi_pi: the product over blocks of phi of the block products.

        Valid as a plain product because scalars are central.
        """
        if pi.n != len(args):
            raise DimensionMismatch(
                f"partition of {pi.n} points vs {len(args)} arguments"
            )
        total = Fraction(1)
        for block in pi.blocks:
            product = NcPolynomial.one()
            for i in block:
                product = poly_mul(product, args[i - 1])
            total *= self.phi(product)
            if not total:
                return total
        return total

    # -- cumulants --------------------------------------------------------

    def cumulant(self, args: Sequence[NcPolynomial]) -> Fraction:
        """The multilinear free cumulant k_n(args) by Möbius inversion."""
        args = tuple(args)
        n = len(args)
        if n == 0:
            raise ValueError("cumulant needs at least one argument")
        if n > self.degree_cap:
            raise DegreeCapExceeded(
                f"cumulant arity {n} exceeds degree cap {self.degree_cap}"
            )
        cached = self._cumulant_memo.get(args)
        if cached is not None:
            return cached
        # multilinear expansion: every slot splits into its terms, and the
        # cumulant of each word combination is shared across calls
        total = Fraction(0)
        for combo in product(*(p.terms for p in args)):
            coeff = Fraction(1)
            for _, c in combo:
                coeff *= c
            total += coeff * self.cumulant_words(
                tuple(word for word, _ in combo)
            )
        self._cumulant_memo[args] = total
        return total

    def cumulant_words(self, words: tuple[Word, ...]) -> Fraction:
        """The cumulant with one plain word per slot, memoized."""
        cached = self._word_cumulant_memo.get(words)
        if cached is not None:
            return cached
        lat = nc_lattice.lattice(len(words))
        mu_top = lat.mu_to_top()
        total = Fraction(0)
        for idx, pi in enumerate(lat.elements):
            weight = mu_top[idx]
            if not weight:
                continue
            value = weight
            for block in pi.blocks:
                letters: list[str] = []
                for i in block:
                    letters.extend(words[i - 1])
                value *= self.phi_word(tuple(letters))
                if not value:
                    break
            total += value
        self._word_cumulant_memo[words] = total
        return total

    def cumulant_of_ids(self, ids: Sequence[str]) -> Fraction:
        """Convenience: the cumulant of a tuple of single generators."""
        return self.cumulant(
            tuple(NcPolynomial.generator(g) for g in ids)
        )


def build_space(
    family_tables: Mapping[str, Mapping[str, Mapping[str, object]]]
    | None = None,
    degree_cap: int = DEFAULT_DEGREE,
    *,
    families: Mapping[str, CumulantTable] | None = None,
    generators: Iterable[Generator] | None = None,
) -> MomentFunctional:
    """Assemble a MomentFunctional.

    Two entry points: pass ``family_tables`` mapping family name to
    {generator id: {kind, **params}} distribution descriptors (the CLI
    path), or pass explicit ``generators`` plus raw ``families`` cumulant
    tables (the programmatic path).
    """
    if family_tables is not None:
        gens: list[Generator] = []
        merged: dict[str, dict[tuple[str, ...], Fraction]] = {}
        for family, gen_dists in family_tables.items():
            table: dict[tuple[str, ...], Fraction] = {}
            for gen_id, dist in gen_dists.items():
                gens.append(Generator(gen_id, family))
                kind = str(dist.get("kind", ""))
                params = {k: v for k, v in dist.items() if k != "kind"}
                fragment = builtin_distribution(
                    kind, gen_id, degree_cap, **params
                )
                for key, val in fragment.items():
                    table[key] = table.get(key, Fraction(0)) + val
            merged[family] = {k: v for k, v in table.items() if v}
        spec = CumulantSpec.build(merged, degree_cap)
        return MomentFunctional(gens, spec)
    if generators is None or families is None:
        raise ValueError(
            "pass either family_tables or both generators and families"
        )
    spec = CumulantSpec.build(families, degree_cap)
    return MomentFunctional(generators, spec)
