"""Formal *-polynomials in the generators u, v and u_n.

The letter u of the two-generator algebra is identified with u_0 of the chain
algebra, so both kinds of polynomial live in one type. Normal ordering uses
only the covariance rules

    v u_n = u_{n+1} v,    v* u_n = u_{n-1} v*,    v v* = v* v = 1

and, inside each coefficient b_k, the cancellation u_n u_n* = u_n* u_n = 1.
"""

from dataclasses import dataclass, field
from functools import reduce
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from soft_torus.config import DEFAULT_TOLERANCES, INDEX_CAP
from soft_torus.errors import DimensionMismatch, IndexOverflow, InvalidParameter, UnassignedSymbol
from soft_torus.matcore import adjoint as matrix_adjoint
from soft_torus.matcore import as_square


@dataclass(frozen=True)
class Letter:
    """A generator u_n or v, possibly starred. ``index`` is always 0 for v."""

    symbol: str
    index: int = 0
    starred: bool = False

    def __post_init__(self):
        if self.symbol not in ("u", "v"):
            raise InvalidParameter(f"unknown generator '{self.symbol}'")
        if self.symbol == "v" and self.index != 0:
            raise InvalidParameter("v carries no index")
        if abs(self.index) > INDEX_CAP:
            raise IndexOverflow(f"index {self.index} exceeds the cap {INDEX_CAP}")

    @property
    def name(self) -> str:
        """Assignment key: 'v' or 'u_<n>'."""
        return "v" if self.symbol == "v" else f"u_{self.index}"

    def star(self) -> "Letter":
        return Letter(self.symbol, self.index, not self.starred)

    def shifted(self, shift: int) -> "Letter":
        """The same letter with its index moved by shift."""
        return Letter(self.symbol, self.index + shift, self.starred)

    def inverse_of(self, other: "Letter") -> bool:
        return (self.symbol, self.index) == (other.symbol, other.index) and self.starred != other.starred

    def __str__(self) -> str:
        return self.name + ("'" if self.starred else "")


Word = tuple[Letter, ...]


class NCPoly:
    """Finite linear combination of words with complex coefficients.

    Immutable. Terms keep first-insertion order and identical words are merged.
    A merged coefficient is dropped when it is exactly zero or when merging
    cancelled it below ``coeff_cutoff`` times the moduli that went into it, so
    small but genuine coefficients survive.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, complex] | Iterable[tuple[Word, complex]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[Word, complex] = {}
        weight: dict[Word, float] = {}
        for word, coeff in items:
            word, coeff = tuple(word), complex(coeff)
            merged[word] = merged.get(word, 0j) + coeff
            weight[word] = weight.get(word, 0.0) + abs(coeff)
        cutoff = DEFAULT_TOLERANCES.coeff_cutoff
        self._terms = MappingProxyType(
            {w: c for w, c in merged.items() if c != 0 and abs(c) > cutoff * weight[w]}
        )

    # --- Constructors ---

    @classmethod
    def zero(cls) -> "NCPoly":
        return cls()

    @classmethod
    def scalar(cls, coeff: complex) -> "NCPoly":
        return cls({(): coeff})

    @classmethod
    def unit(cls) -> "NCPoly":
        return cls.scalar(1)

    @classmethod
    def generator(cls, symbol: str, index: int = 0, starred: bool = False) -> "NCPoly":
        return cls({(Letter(symbol, index, starred),): 1})

    # --- Inspection ---

    @property
    def terms(self) -> Mapping[Word, complex]:
        return self._terms

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_scalar(self) -> bool:
        return all(not word for word in self._terms)

    def letters(self) -> set[Letter]:
        return {letter for word in self._terms for letter in word}

    def symbols(self) -> set[str]:
        return {letter.name for letter in self.letters()}

    def u_indices(self) -> set[int]:
        """Indices n of every u_n letter, starred or not."""
        return {letter.index for letter in self.letters() if letter.symbol == "u"}

    def uses_only_u(self) -> bool:
        """True when no v letter appears."""
        return all(letter.symbol == "u" for letter in self.letters())

    def allclose(self, other: "NCPoly", atol: float = 1e-12) -> bool:
        words = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(w, 0j) - other._terms.get(w, 0j)) <= atol for w in words)

    # --- Algebra ---

    def adjoint(self) -> "NCPoly":
        return NCPoly(
            (tuple(letter.star() for letter in reversed(word)), np.conj(coeff))
            for word, coeff in self._terms.items()
        )

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return NCPoly([*self._terms.items(), *other._terms.items()])

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly((w, -c) for w, c in self._terms.items())

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return NCPoly(
            (w1 + w2, c1 * c2)
            for w1, c1 in self._terms.items()
            for w2, c2 in other._terms.items()
        )

    def __rmul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCPoly):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    __hash__ = None

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"NCPoly({format_poly(self)!r})"


def _coerce(value):
    if isinstance(value, NCPoly):
        return value
    if isinstance(value, (int, float, complex, np.number)):
        return NCPoly.scalar(value)
    return NotImplemented


def adjoint(p: NCPoly) -> NCPoly:
    """Reverse words, toggle stars, conjugate coefficients."""
    return p.adjoint()


# --- Evaluation ---


def _normalize_key(key: str) -> str:
    return "u_0" if key == "u" else key


def evaluate(p: NCPoly, assign: Mapping[str, np.ndarray], dim: int | None = None) -> np.ndarray:
    """Matrix value of p with each generator replaced by its assigned matrix.

    ``assign`` maps 'v' and 'u_<n>' (or 'u' for u_0) to square matrices of a
    common size; starred letters use the conjugate transpose. ``dim`` is only
    needed when nothing is assigned.

    Raises:
        UnassignedSymbol: If a letter of p has no matrix.
        DimensionMismatch: If assigned matrices differ in size.
    """
    matrices = {_normalize_key(k): as_square(m, k) for k, m in assign.items()}
    sizes = {m.shape[0] for m in matrices.values()}
    if dim is not None:
        sizes.add(dim)
    if len(sizes) > 1:
        raise DimensionMismatch(f"assigned matrices have different sizes {sorted(sizes)}")
    if not sizes:
        raise DimensionMismatch("no matrices assigned and no dimension given")
    n = sizes.pop()

    cache: dict[Letter, np.ndarray] = {}

    def letter_matrix(letter: Letter) -> np.ndarray:
        if letter not in cache:
            if letter.name not in matrices:
                raise UnassignedSymbol(f"no matrix assigned to {letter.name}")
            m = matrices[letter.name]
            cache[letter] = matrix_adjoint(m) if letter.starred else m
        return cache[letter]

    identity = np.eye(n, dtype=complex)
    result = np.zeros((n, n), dtype=complex)
    for word, coeff in p.items():
        product = reduce(lambda acc, letter: acc @ letter_matrix(letter), word, identity)
        result += coeff * product
    return result


# --- Crossed-product normal form ---


def _cancel_inverses(word: Iterable[Letter]) -> Word:
    stack: list[Letter] = []
    for letter in word:
        if stack and stack[-1].inverse_of(letter):
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def _v_power(k: int) -> Word:
    return (Letter("v", 0, k < 0),) * abs(k)


@dataclass(frozen=True)
class CrossedForm:
    """Normal-ordered presentation sum_k b_k v^k with b_k in the u_n letters.

    ``window`` is the minimal (lo, hi) containing every u_n index, or None when
    every component is a scalar.
    """

    components: Mapping[int, NCPoly]
    window: tuple[int, int] | None = field(init=False)

    def __post_init__(self):
        cleaned = {k: b for k, b in sorted(self.components.items()) if not b.is_zero()}
        object.__setattr__(self, "components", MappingProxyType(cleaned))
        indices = set().union(*(b.u_indices() for b in cleaned.values()))
        object.__setattr__(self, "window", (min(indices), max(indices)) if indices else None)

    def component(self, k: int) -> NCPoly:
        return self.components.get(k, NCPoly.zero())

    @property
    def degree(self) -> int:
        return max((abs(k) for k in self.components), default=0)

    @property
    def radius(self) -> int:
        """Smallest N with window inside [-N, N]."""
        if self.window is None:
            return 0
        return max(abs(self.window[0]), abs(self.window[1]))

    def is_zero(self) -> bool:
        return not self.components

    def reassemble(self) -> NCPoly:
        """The polynomial sum_k b_k v^k."""
        return NCPoly(
            (word + _v_power(k), coeff)
            for k, b in self.components.items()
            for word, coeff in b.items()
        )

    def __str__(self) -> str:
        return format_crossed(self)


def normal_order(p: NCPoly) -> CrossedForm:
    """Rewrite p as sum_k b_k v^k.

    Each word is read left to right while tracking the net power k of v
    already passed; a letter u_n met after v^k becomes u_{n+k}.

    Raises:
        IndexOverflow: If a shifted index leaves the cap.
    """
    collected: dict[int, list[tuple[Word, complex]]] = {}
    for word, coeff in p.items():
        shift = 0
        body: list[Letter] = []
        for letter in word:
            if letter.symbol == "v":
                shift += -1 if letter.starred else 1
            else:
                body.append(letter.shifted(shift))
        collected.setdefault(shift, []).append((_cancel_inverses(body), coeff))
    return CrossedForm({k: NCPoly(terms) for k, terms in collected.items()})


def cond_exp(p: NCPoly) -> NCPoly:
    """Conditional expectation onto the chain algebra: the k = 0 component."""
    return normal_order(p).component(0)


def v_degree(p: NCPoly) -> int:
    """Largest |k| with a nonzero component b_k."""
    return normal_order(p).degree


# --- Printing ---


def _format_real(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _format_coeff(c: complex) -> str:
    if c.imag == 0:
        return _format_real(c.real)
    sign = "-" if c.imag < 0 else "+"
    return f"({_format_real(c.real)}{sign}{_format_real(abs(c.imag))}i)"


def _format_word(word: Word) -> str:
    return "*".join(str(letter) for letter in word)


def _format_term(word: Word, coeff: complex) -> str:
    if not word:
        return _format_coeff(coeff)
    if coeff == 1:
        return _format_word(word)
    return f"{_format_coeff(coeff)}*{_format_word(word)}"


def format_poly(p: NCPoly) -> str:
    """Text form that ``poly_parser.parse`` reads back to the same polynomial."""
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for word, coeff in p.items():
        negative = coeff.imag == 0 and coeff.real < 0
        body = _format_term(word, -coeff if negative else coeff)
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f" - {body}" if negative else f" + {body}")
    return "".join(parts)


def format_crossed(cf: CrossedForm) -> str:
    """Sum of components b_k*v^k, each b_k in parentheses when it has several terms."""
    if cf.is_zero():
        return "0"
    parts: list[str] = []
    for k, b in cf.components.items():
        text = format_poly(b)
        needs_parens = len(b) > 1 or text.startswith("-")
        if k == 0:
            parts.append(f"({text})" if parts and needs_parens else text)
            continue
        v_text = _format_word(_v_power(k))
        if b == NCPoly.unit():
            parts.append(v_text)
        else:
            parts.append(f"({text})*{v_text}" if needs_parens else f"{text}*{v_text}")
    return " + ".join(parts)
