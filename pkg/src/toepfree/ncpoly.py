"""Noncommutative polynomials over abstract generators, plus a parser.

The model algebra A is the free unital algebra on a declared set of
generators: elements are finite rational linear combinations of words
(sequences of generator ids), multiplied by word concatenation. A small
recursive-descent parser turns expression strings into polynomials.

Everything here is immutable and exact; coefficients are ``Fraction``s.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import EngineError

#: A word is a tuple of generator ids; the empty word is the unit of A.
Word = tuple[str, ...]

RationalLike = Fraction | int | str


@dataclass(frozen=True)
class Generator:
    """An abstract generator of the model algebra, tagged with its family."""

    id: str
    family: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("generator id must be nonempty")
        if not self.family:
            raise ValueError(f"generator {self.id!r} has empty family")


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction, or 'p'/'p/q' string to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"not an exact rational: {value!r}")


def parse_rational(text: str) -> Fraction:
    """Parse 'p' or 'p/q' with integer p and positive integer q."""
    body = text.strip()
    num, slash, den = body.partition("/")
    try:
        p = int(num)
    except ValueError:
        raise ValueError(f"bad rational literal {text!r}") from None
    if not slash:
        return Fraction(p)
    try:
        q = int(den)
    except ValueError:
        raise ValueError(f"bad rational literal {text!r}") from None
    if q == 0:
        raise ZeroDenominatorError(f"zero denominator in {text!r}")
    if q < 0:
        raise ValueError(f"denominator must be positive in {text!r}")
    return Fraction(p, q)


def format_rational(value: Fraction) -> str:
    """Render exactly, as 'p' for integers and 'p/q' otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _word_key(word: Word) -> tuple[int, Word]:
    return (len(word), word)


class NcPolynomial:
    """A finite rational linear combination of words, in canonical form.

    Terms are kept with nonzero coefficients only and ordered by degree,
    then lexicographically on letters. Instances are immutable and hashable
    (they serve as memo keys throughout the engine).
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, Fraction] | None = None):
        clean: dict[Word, Fraction] = {}
        if terms:
            for word, coeff in terms.items():
                frac = as_fraction(coeff)
                if frac:
                    clean[tuple(word)] = frac
        object.__setattr__(
            self,
            "_terms",
            tuple(sorted(clean.items(), key=lambda kv: _word_key(kv[0]))),
        )
        object.__setattr__(self, "_hash", hash(self._terms))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("NcPolynomial is immutable")

    @staticmethod
    def zero() -> "NcPolynomial":
        return _ZERO

    @staticmethod
    def one() -> "NcPolynomial":
        return _ONE

    @staticmethod
    def constant(value: RationalLike) -> "NcPolynomial":
        return NcPolynomial({(): as_fraction(value)})

    @staticmethod
    def generator(gen_id: str) -> "NcPolynomial":
        return NcPolynomial({(gen_id,): Fraction(1)})

    @staticmethod
    def from_word(word: Iterable[str], coeff: RationalLike = 1) -> "NcPolynomial":
        return NcPolynomial({tuple(word): as_fraction(coeff)})

    @property
    def terms(self) -> tuple[tuple[Word, Fraction], ...]:
        return self._terms

    def coeff(self, word: Iterable[str]) -> Fraction:
        target = tuple(word)
        for w, c in self._terms:
            if w == target:
                return c
        return Fraction(0)

    def degree(self) -> int:
        """Maximum word length; 0 for constants and for the zero polynomial."""
        return max((len(w) for w, _ in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not w for w, _ in self._terms)

    def constant_value(self) -> Fraction:
        """The coefficient of the empty word (raises unless constant)."""
        if not self.is_constant():
            raise ValueError(f"not a constant polynomial: {self}")
        return self.coeff(())

    def generator_ids(self) -> frozenset[str]:
        return frozenset(g for w, _ in self._terms for g in w)

    def __iter__(self) -> Iterator[tuple[Word, Fraction]]:
        return iter(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NcPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return self._hash

    def __add__(self, other: "NcPolynomial") -> "NcPolynomial":
        return poly_add(self, other)

    def __sub__(self, other: "NcPolynomial") -> "NcPolynomial":
        return poly_add(self, poly_scale(-1, other))

    def __neg__(self) -> "NcPolynomial":
        return poly_scale(-1, self)

    def __mul__(self, other: "NcPolynomial") -> "NcPolynomial":
        return poly_mul(self, other)

    def __rmul__(self, scalar: RationalLike) -> "NcPolynomial":
        return poly_scale(scalar, self)

    def __repr__(self) -> str:
        return f"NcPolynomial({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        for word, coeff in self._terms:
            body = "*".join(word)
            if not word:
                piece = format_rational(abs(coeff))
            elif abs(coeff) == 1:
                piece = body
            else:
                piece = f"{format_rational(abs(coeff))}*{body}"
            if not parts:
                parts.append(piece if coeff > 0 else f"-{piece}")
            else:
                parts.append(f"+ {piece}" if coeff > 0 else f"- {piece}")
        return " ".join(parts)

    def to_json_obj(self) -> list[dict[str, object]]:
        return [
            {"word": list(word), "coeff": format_rational(coeff)}
            for word, coeff in self._terms
        ]

    @staticmethod
    def from_json_obj(obj: Iterable[Mapping[str, object]]) -> "NcPolynomial":
        terms: dict[Word, Fraction] = {}
        for item in obj:
            word = tuple(str(g) for g in item["word"])  # type: ignore[index]
            coeff = as_fraction(str(item["coeff"]))  # type: ignore[index]
            terms[word] = terms.get(word, Fraction(0)) + coeff
        return NcPolynomial(terms)


_ZERO = NcPolynomial()
_ONE = NcPolynomial({(): Fraction(1)})


def poly_add(p: NcPolynomial, q: NcPolynomial) -> NcPolynomial:
    """Coefficientwise sum."""
    terms = dict(p.terms)
    for word, coeff in q.terms:
        terms[word] = terms.get(word, Fraction(0)) + coeff
    return NcPolynomial(terms)


def poly_scale(c: RationalLike, p: NcPolynomial) -> NcPolynomial:
    """Scalar multiple c * p."""
    frac = as_fraction(c)
    return NcPolynomial({word: frac * coeff for word, coeff in p.terms})


def poly_mul(p: NcPolynomial, q: NcPolynomial) -> NcPolynomial:
    """Free-algebra product: word concatenation, extended bilinearly."""
    terms: dict[Word, Fraction] = {}
    for w1, c1 in p.terms:
        for w2, c2 in q.terms:
            word = w1 + w2
            terms[word] = terms.get(word, Fraction(0)) + c1 * c2
    return NcPolynomial(terms)


# --------------------------------------------------------------------------
# Expression parser
#
# expr   := ['-'] term (('+' | '-') term)*
# term   := factor ('*' factor)*
# factor := rational-literal | identifier | '(' expr ')'
#
# Rational literals are 'p' or 'p/q' (integer p, positive integer q);
# identifiers are [A-Za-z_][A-Za-z0-9_]* and must be declared generators.
# Whitespace is insignificant; multiplication preserves written order.
# --------------------------------------------------------------------------


class ExpressionError(EngineError):
    """Base class for expression-string problems; carries a position."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class LexicalError(ExpressionError):
    """A character that belongs to no token."""


class ParseError(ExpressionError):
    """Token stream does not match the grammar."""


class UnknownSymbolError(ExpressionError):
    """An identifier that is not a declared generator."""


class ZeroDenominatorError(ExpressionError):
    """A rational literal with denominator zero."""


@dataclass(frozen=True)
class _Token:
    kind: str  # 'int' | 'ident' | 'op'
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if ch in "+-*/()":
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        raise LexicalError(f"bad character {ch!r} at position {i}", i)
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], symbols: frozenset[str], length: int):
        self.tokens = tokens
        self.symbols = symbols
        self.pos = 0
        self.length = length

    def _peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> _Token | None:
        tok = self._peek()
        if tok is not None:
            self.pos += 1
        return tok

    def _fail(self, message: str) -> None:
        tok = self._peek()
        at = tok.pos if tok is not None else self.length
        raise ParseError(f"{message} at position {at}", at)

    def parse(self) -> NcPolynomial:
        result = self.expr()
        if self._peek() is not None:
            self._fail(f"unexpected {self._peek().text!r}")
        return result

    def expr(self) -> NcPolynomial:
        negate = False
        tok = self._peek()
        if tok is not None and tok.kind == "op" and tok.text == "-":
            self._next()
            negate = True
        total = self.term()
        if negate:
            total = poly_scale(-1, total)
        while True:
            tok = self._peek()
            if tok is None or tok.kind != "op" or tok.text not in "+-":
                return total
            self._next()
            rhs = self.term()
            if tok.text == "-":
                rhs = poly_scale(-1, rhs)
            total = poly_add(total, rhs)

    def term(self) -> NcPolynomial:
        product = self.factor()
        while True:
            tok = self._peek()
            if tok is None or tok.kind != "op" or tok.text != "*":
                return product
            self._next()
            product = poly_mul(product, self.factor())

    def factor(self) -> NcPolynomial:
        tok = self._next()
        if tok is None:
            self._fail("unexpected end of expression")
        if tok.kind == "int":
            return NcPolynomial.constant(self._rational(tok))
        if tok.kind == "ident":
            if tok.text not in self.symbols:
                raise UnknownSymbolError(
                    f"unknown symbol {tok.text!r} at position {tok.pos}",
                    tok.pos,
                )
            return NcPolynomial.generator(tok.text)
        if tok.kind == "op" and tok.text == "(":
            inner = self.expr()
            closing = self._next()
            if closing is None or closing.kind != "op" or closing.text != ")":
                self.pos -= closing is not None
                self._fail("expected ')'")
            return inner
        self.pos -= 1
        self._fail(f"unexpected {tok.text!r}")
        raise AssertionError("unreachable")

    def _rational(self, tok: _Token) -> Fraction:
        numerator = int(tok.text)
        nxt = self._peek()
        if nxt is None or nxt.kind != "op" or nxt.text != "/":
            return Fraction(numerator)
        self._next()
        den_tok = self._next()
        if den_tok is None or den_tok.kind != "int":
            self._fail("expected integer denominator after '/'")
        denominator = int(den_tok.text)
        if denominator == 0:
            raise ZeroDenominatorError(
                f"zero denominator at position {den_tok.pos}", den_tok.pos
            )
        return Fraction(numerator, denominator)


def parse_expr(
    text: str, symbols: Iterable[Generator | str]
) -> NcPolynomial:
    """Parse an expression string over the declared generators.

    ``symbols`` may contain Generator objects or bare id strings. Raises
    LexicalError, ParseError, UnknownSymbolError, or ZeroDenominatorError,
    each carrying the offending position.
    """
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    ids = frozenset(
        s.id if isinstance(s, Generator) else str(s) for s in symbols
    )
    return _Parser(_tokenize(text), ids, len(text)).parse()
