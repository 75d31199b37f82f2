"""Exact algebra for multi-mode bosonic ladder-operator polynomials.

Operator polynomials are stored in canonical normal form: within every mode
all creation operators stand to the left of all annihilation operators, so a
monomial is fully described by a pair of exponents per mode.  The unique
normal form makes equality testing exact.

Reordering between the three classical symbols (normal, anti-normal and
symmetric/Weyl) is a finite triangular transformation.  If ``N(zbar, z)`` is
the normal symbol of an operator, the symbol that reproduces the operator
under ordering ``t`` is

    sym_t = exp(kappa_t * sum_i d/dzbar_i d/dz_i) N,
    kappa = 0 (normal), -1/2 (Weyl), -1 (anti-normal),

and quantization inverts the exponential with the opposite sign before
promoting monomials ``zbar^p z^q -> ad^p a^q``.  All transformation weights
(binomials, factorials, powers of 1/2) are computed in exact rational
arithmetic; only the final coefficients are complex floats.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Sequence

from .errors import DegreeCapError, ModeMismatchError

#: per-mode pair (creation exponent, annihilation exponent), one per mode
MonomialKey = tuple[tuple[int, int], ...]

#: reordering is combinatorial; refuse blowups beyond this total degree
DEFAULT_MAX_DEGREE = 16


class Ordering(Enum):
    """Which quantization map reproduces the operator from its symbol."""

    NORMAL = "normal"
    ANTINORMAL = "antinormal"
    WEYL = "weyl"


def _validated_terms(terms: Mapping[MonomialKey, complex], modes: int) -> dict:
    clean: dict[MonomialKey, complex] = {}
    for key, coeff in terms.items():
        key = tuple((int(c), int(a)) for c, a in key)
        if len(key) != modes:
            raise ModeMismatchError(
                f"monomial key {key} has {len(key)} modes, expected {modes}"
            )
        if any(c < 0 or a < 0 for c, a in key):
            raise ValueError(f"negative exponent in monomial key {key}")
        coeff = complex(coeff)
        if coeff != 0:
            clean[key] = coeff
    return clean


class BosonPoly:
    """Polynomial in bosonic creation/annihilation operators, normal form.

    Immutable.  ``terms`` maps a :data:`MonomialKey` to a complex
    coefficient; terms with coefficient exactly zero are never stored
    (comparisons own the epsilons, storage does not).
    """

    __slots__ = ("_terms", "_modes")

    def __init__(self, terms: Mapping[MonomialKey, complex], modes: int = 1):
        if modes < 1:
            raise ValueError("modes must be a positive integer")
        self._modes = int(modes)
        self._terms = _validated_terms(terms, self._modes)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, modes: int = 1) -> "BosonPoly":
        return cls({}, modes)

    @classmethod
    def unit(cls, modes: int = 1) -> "BosonPoly":
        return cls({((0, 0),) * modes: 1.0}, modes)

    @classmethod
    def create(cls, mode: int = 0, modes: int | None = None) -> "BosonPoly":
        """The creation operator ``ad_mode``."""
        modes = mode + 1 if modes is None else modes
        key = tuple((1, 0) if i == mode else (0, 0) for i in range(modes))
        return cls({key: 1.0}, modes)

    @classmethod
    def annihilate(cls, mode: int = 0, modes: int | None = None) -> "BosonPoly":
        """The annihilation operator ``a_mode``."""
        modes = mode + 1 if modes is None else modes
        key = tuple((0, 1) if i == mode else (0, 0) for i in range(modes))
        return cls({key: 1.0}, modes)

    # -- views -------------------------------------------------------------

    @property
    def terms(self) -> Mapping[MonomialKey, complex]:
        return MappingProxyType(self._terms)

    @property
    def modes(self) -> int:
        return self._modes

    def degree(self) -> int:
        """Largest total degree among stored monomials (0 for the zero poly)."""
        if not self._terms:
            return 0
        return max(sum(c + a for c, a in key) for key in self._terms)

    def adjoint(self) -> "BosonPoly":
        """Formal adjoint; swaps exponents per mode, conjugates coefficients.

        The adjoint of a normal-ordered monomial is again normal-ordered, so
        no reordering is involved.
        """
        out = {
            tuple((a, c) for c, a in key): coeff.conjugate()
            for key, coeff in self._terms.items()
        }
        return BosonPoly(out, self._modes)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.equals(self.adjoint(), tol)

    def equals(self, other: "BosonPoly", tol: float = 0.0) -> bool:
        """Term-by-term comparison with absolute tolerance ``tol``."""
        if not isinstance(other, BosonPoly) or self._modes != other._modes:
            return False
        for key in self._terms.keys() | other._terms.keys():
            delta = self._terms.get(key, 0.0) - other._terms.get(key, 0.0)
            if abs(delta) > tol:
                return False
        return True

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = other * BosonPoly.unit(self._modes)
        if not isinstance(other, BosonPoly):
            return NotImplemented
        if self._modes != other._modes:
            raise ModeMismatchError("cannot add polynomials on different mode counts")
        out = dict(self._terms)
        for key, coeff in other._terms.items():
            out[key] = out.get(key, 0.0) + coeff
        return BosonPoly(out, self._modes)

    __radd__ = __add__

    def __neg__(self):
        return BosonPoly({k: -c for k, c in self._terms.items()}, self._modes)

    def __sub__(self, other):
        return self + (-other if isinstance(other, BosonPoly) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return BosonPoly(
                {k: other * c for k, c in self._terms.items()}, self._modes
            )
        if isinstance(other, BosonPoly):
            return multiply(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.__mul__(other)
        return NotImplemented

    def __eq__(self, other):
        return (
            isinstance(other, BosonPoly)
            and self._modes == other._modes
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self._modes, frozenset(self._terms.items())))

    def __repr__(self):
        from .expr import format_operator

        return f"BosonPoly({format_operator(self)!r}, modes={self._modes})"


class SymbolPoly:
    """Classical polynomial in conjugate-pair variables, tagged by ordering.

    The key layout mirrors :class:`BosonPoly`: per mode a pair
    (conjugate-variable exponent, plain-variable exponent).  The tag records
    which quantization map reproduces the originating operator.
    """

    __slots__ = ("_terms", "_modes", "_ordering")

    def __init__(
        self,
        terms: Mapping[MonomialKey, complex],
        modes: int = 1,
        ordering: Ordering = Ordering.NORMAL,
    ):
        if modes < 1:
            raise ValueError("modes must be a positive integer")
        if not isinstance(ordering, Ordering):
            raise TypeError(f"ordering must be an Ordering, got {ordering!r}")
        self._modes = int(modes)
        self._ordering = ordering
        self._terms = _validated_terms(terms, self._modes)

    @property
    def terms(self) -> Mapping[MonomialKey, complex]:
        return MappingProxyType(self._terms)

    @property
    def modes(self) -> int:
        return self._modes

    @property
    def ordering(self) -> Ordering:
        return self._ordering

    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(c + a for c, a in key) for key in self._terms)

    def is_self_conjugate(self, tol: float = 1e-12) -> bool:
        """coeff(p, q) == conj(coeff(q, p)); holds for Hermitian originals."""
        for key, coeff in self._terms.items():
            swapped = tuple((a, c) for c, a in key)
            if abs(self._terms.get(swapped, 0.0) - coeff.conjugate()) > tol:
                return False
        return True

    def evaluate(self, conjugated, plain):
        """Evaluate the symbol on given variable values.

        ``conjugated`` supplies the conjugate-variable values (the caller
        conjugates; nothing is conjugated here) and ``plain`` the plain ones.
        Both may be vectors of length ``modes`` or arrays ``(..., modes)``
        for batch evaluation over many path slices.
        """
        import numpy as np

        zb = np.asarray(conjugated, dtype=complex)
        z = np.asarray(plain, dtype=complex)
        if zb.shape != z.shape or zb.shape[-1] != self._modes:
            raise ModeMismatchError(
                f"argument shape {zb.shape}/{z.shape} incompatible with "
                f"{self._modes} modes"
            )
        total = np.zeros(zb.shape[:-1], dtype=complex)
        for key, coeff in self._terms.items():
            term = np.full(zb.shape[:-1], coeff, dtype=complex)
            for i, (p, q) in enumerate(key):
                if p:
                    term = term * zb[..., i] ** p
                if q:
                    term = term * z[..., i] ** q
            total = total + term
        return total if total.shape else complex(total)

    def equals(self, other: "SymbolPoly", tol: float = 0.0) -> bool:
        if (
            not isinstance(other, SymbolPoly)
            or self._modes != other._modes
            or self._ordering is not other._ordering
        ):
            return False
        for key in self._terms.keys() | other._terms.keys():
            if abs(self._terms.get(key, 0.0) - other._terms.get(key, 0.0)) > tol:
                return False
        return True

    def __add__(self, other):
        if not isinstance(other, SymbolPoly):
            return NotImplemented
        if self._modes != other._modes or self._ordering is not other._ordering:
            raise ModeMismatchError("cannot add symbols with different modes/tags")
        out = dict(self._terms)
        for key, coeff in other._terms.items():
            out[key] = out.get(key, 0.0) + coeff
        return SymbolPoly(out, self._modes, self._ordering)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return SymbolPoly(
                {k: other * c for k, c in self._terms.items()},
                self._modes,
                self._ordering,
            )
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, SymbolPoly)
            and self._modes == other._modes
            and self._ordering is other._ordering
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self._modes, self._ordering, frozenset(self._terms.items())))

    def __repr__(self):
        from .expr import format_symbol

        return (
            f"SymbolPoly({format_symbol(self)!r}, modes={self._modes}, "
            f"ordering={self._ordering.value!r})"
        )


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------


def _mode_products(left: tuple[int, int], right: tuple[int, int]):
    """Normal-order a single-mode product  ad^p1 a^q1 * ad^p2 a^q2.

    a^n ad^m = sum_k  C(n,k) C(m,k) k!  ad^(m-k) a^(n-k), so contracting k
    pairs across the middle yields exponent pair (p1+p2-k, q1+q2-k) with an
    exact integer weight.
    """
    p1, q1 = left
    p2, q2 = right
    for k in range(min(q1, p2) + 1):
        weight = math.comb(q1, k) * math.comb(p2, k) * math.factorial(k)
        yield (p1 + p2 - k, q1 + q2 - k), weight


def multiply(
    p: BosonPoly, q: BosonPoly, max_degree: int = DEFAULT_MAX_DEGREE
) -> BosonPoly:
    """Operator product ``p * q`` re-expressed in canonical normal form.

    Contraction weights are exact integers; coefficients stay complex
    floats.  Raises :class:`DegreeCapError` when the result degree would
    exceed ``max_degree`` and :class:`ModeMismatchError` on different mode
    counts.
    """
    if p.modes != q.modes:
        raise ModeMismatchError(
            f"cannot multiply polynomials on {p.modes} and {q.modes} modes"
        )
    if p.degree() + q.degree() > max_degree:
        raise DegreeCapError(
            f"product degree {p.degree() + q.degree()} exceeds cap {max_degree}"
        )
    out: dict[MonomialKey, complex] = {}
    for key1, c1 in p.terms.items():
        for key2, c2 in q.terms.items():
            coeff = c1 * c2
            per_mode = [
                list(_mode_products(m1, m2)) for m1, m2 in zip(key1, key2)
            ]
            for combo in itertools.product(*per_mode):
                weight = 1
                for _, w in combo:
                    weight *= w
                key = tuple(pair for pair, _ in combo)
                out[key] = out.get(key, 0.0) + coeff * weight
    return BosonPoly(out, p.modes)


def _as_elementary(factor: BosonPoly) -> tuple[complex, MonomialKey]:
    if len(factor.terms) != 1:
        raise ValueError("symmetrizer factors must be single ladder operators")
    ((key, coeff),) = factor.terms.items()
    if sum(c + a for c, a in key) != 1:
        raise ValueError(
            "symmetrizer factors must have total degree 1 (one ladder operator)"
        )
    return coeff, key


def _distinct_arrangements(pool: list[tuple[MonomialKey, int]]):
    """Yield each distinct ordering of a multiset exactly once (lex order)."""
    if all(count == 0 for _, count in pool):
        yield ()
        return
    for i, (key, count) in enumerate(pool):
        if count == 0:
            continue
        reduced = [(k, c - 1 if j == i else c) for j, (k, c) in enumerate(pool)]
        for tail in _distinct_arrangements(reduced):
            yield (key,) + tail


def symmetrize(
    factors: Sequence[BosonPoly],
    modes: int | None = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> BosonPoly:
    """Average of all n! permuted products of the given ladder operators.

    Linear in each slot, so scalar prefactors on the factors multiply out
    front.  An empty factor list yields the unit operator.  Permutations of
    a repeated factor give identical products, so only distinct arrangements
    are multiplied out, each weighted by its multiplicity.
    """
    factors = list(factors)
    if factors:
        inferred = factors[0].modes
        if any(f.modes != inferred for f in factors):
            raise ModeMismatchError("symmetrizer factors live on different mode counts")
        modes = inferred if modes is None else modes
        if modes != inferred:
            raise ModeMismatchError("explicit modes disagrees with factors")
    else:
        modes = 1 if modes is None else modes
        return BosonPoly.unit(modes)

    n = len(factors)
    if n > max_degree:
        raise DegreeCapError(f"symmetrizing {n} factors exceeds degree cap {max_degree}")

    scale = 1.0 + 0.0j
    counts: Counter[MonomialKey] = Counter()
    for f in factors:
        coeff, key = _as_elementary(f)
        scale *= coeff
        counts[key] += 1

    # every distinct arrangement stands for prod(mult!) raw permutations
    multiplicity = 1
    for count in counts.values():
        multiplicity *= math.factorial(count)

    acc = BosonPoly.zero(modes)
    for arrangement in _distinct_arrangements(sorted(counts.items())):
        prod = BosonPoly.unit(modes)
        for key in arrangement:
            prod = multiply(prod, BosonPoly({key: 1.0}, modes), max_degree)
        acc = acc + prod
    return (scale * multiplicity / math.factorial(n)) * acc


# ---------------------------------------------------------------------------
# ordering transforms
# ---------------------------------------------------------------------------

_SYMBOL_KAPPA = {
    Ordering.NORMAL: Fraction(0),
    Ordering.WEYL: Fraction(-1, 2),
    Ordering.ANTINORMAL: Fraction(-1),
}


def _apply_cross_derivatives(
    terms: Mapping[MonomialKey, complex], kappa: Fraction
) -> dict[MonomialKey, complex]:
    """Apply exp(kappa * sum_i d/dzbar_i d/dz_i) to polynomial terms.

    Monomial-wise:  zbar^p z^q  gains  kappa^k C(p,k) C(q,k) k!  times
    zbar^(p-k) z^(q-k)  for every k, independently per mode.  The weight is
    an exact Fraction (dyadic for kappa = +-1/2), converted to float once.
    """
    if kappa == 0:
        return dict(terms)
    out: dict[MonomialKey, complex] = {}
    for key, coeff in terms.items():
        per_mode = []
        for p, q in key:
            choices = []
            for k in range(min(p, q) + 1):
                weight = kappa**k * (math.comb(p, k) * math.comb(q, k) * math.factorial(k))
                choices.append(((p - k, q - k), weight))
            per_mode.append(choices)
        for combo in itertools.product(*per_mode):
            weight = Fraction(1)
            for _, w in combo:
                weight *= w
            new_key = tuple(pair for pair, _ in combo)
            out[new_key] = out.get(new_key, 0.0) + coeff * float(weight)
    return out


def to_ordered_form(p: BosonPoly, target: Ordering) -> SymbolPoly:
    """Classical symbol whose quantization under ``target`` reproduces ``p``.

    The normal symbol is the direct monomial readout of the canonical form;
    the anti-normal and Weyl symbols follow by the triangular cross-derivative
    transform (see module docstring).  For the Weyl case this is equivalent
    to rewriting ``p`` as a sum of symmetrized monomials and demoting the
    operators to commuting variables.
    """
    if not isinstance(target, Ordering):
        raise TypeError(f"target must be an Ordering, got {target!r}")
    terms = _apply_cross_derivatives(p.terms, _SYMBOL_KAPPA[target])
    return SymbolPoly(terms, p.modes, target)


def quantize(s: SymbolPoly) -> BosonPoly:
    """Inverse of :func:`to_ordered_form` for the symbol's own tag.

    The symbol is first pushed to the normal symbol with the opposite
    cross-derivative sign, then monomials map directly:
    ``zbar^p z^q -> ad^p a^q``.
    """
    terms = _apply_cross_derivatives(s.terms, -_SYMBOL_KAPPA[s.ordering])
    return BosonPoly(terms, s.modes)
