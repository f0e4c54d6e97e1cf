"""Adams operations on Koszul classes, as exact Laurent-polynomial identities.

The class of the Koszul complex on p line elements is the product of the
two-term factors (1 - l_i).  The degree-k Adams operation raises every
line element to its k-th power; the verification below checks the exact
factorization psi_k(kos) = kos * cofactor and that the cofactor counts
k^p once every line element is set to 1, which is how the operation acts
on the supported class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

MAX_VARIABLES = 8


@dataclass(frozen=True)
class LaurentPolynomial:
    """Integer Laurent polynomial in ``nvars`` line-element variables.

    ``terms`` maps exponent tuples (entries may be negative) to nonzero
    integer coefficients.
    """

    nvars: int
    terms: Mapping

    def __post_init__(self) -> None:
        if not 0 <= self.nvars <= MAX_VARIABLES:
            raise ValueError(f"variable count must be in [0, {MAX_VARIABLES}]")
        for expo, coeff in self.terms.items():
            if len(expo) != self.nvars:
                raise ValueError("exponent vector length mismatch")
            if coeff == 0:
                raise ValueError("zero coefficient stored")

    @staticmethod
    def from_terms(nvars: int, terms: Mapping) -> "LaurentPolynomial":
        clean = {tuple(e): int(c) for e, c in terms.items() if c}
        return LaurentPolynomial(nvars, clean)

    @staticmethod
    def constant(nvars: int, c: int) -> "LaurentPolynomial":
        return LaurentPolynomial.from_terms(nvars, {(0,) * nvars: c})

    @staticmethod
    def one(nvars: int) -> "LaurentPolynomial":
        return LaurentPolynomial.constant(nvars, 1)

    @staticmethod
    def zero(nvars: int) -> "LaurentPolynomial":
        return LaurentPolynomial(nvars, {})

    @staticmethod
    def variable(nvars: int, i: int, power: int = 1) -> "LaurentPolynomial":
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range")
        expo = tuple(power if j == i else 0 for j in range(nvars))
        return LaurentPolynomial(nvars, {expo: 1})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "LaurentPolynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError("different variable counts")

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPolynomial(self.nvars, out)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return LaurentPolynomial(self.nvars, out)

    def evaluate_at_ones(self) -> int:
        return sum(self.terms.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.nvars == other.nvars and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))


def adams(k: int, f: LaurentPolynomial) -> LaurentPolynomial:
    """Degree-k Adams operation: every line element to its k-th power."""
    if k < 1:
        raise ValueError("Adams degree must be positive")
    return LaurentPolynomial(
        f.nvars,
        {tuple(k * x for x in e): c for e, c in f.terms.items()},
    )


def koszul_class(p: int) -> LaurentPolynomial:
    """Class of the Koszul complex on p line elements: prod (1 - l_i)."""
    if p < 1:
        raise ValueError("need at least one line element")
    out = LaurentPolynomial.one(p)
    for i in range(p):
        out = out * (
            LaurentPolynomial.one(p) - LaurentPolynomial.variable(p, i)
        )
    return out


def cofactor(p: int, k: int) -> LaurentPolynomial:
    """prod_i (1 + l_i + ... + l_i^(k-1)): the ratio psi_k(kos) / kos."""
    if p < 1 or k < 1:
        raise ValueError("need p >= 1 and k >= 1")
    out = LaurentPolynomial.one(p)
    for i in range(p):
        geom = LaurentPolynomial.from_terms(
            p,
            {tuple(j if a == i else 0 for a in range(p)): 1 for j in range(k)},
        )
        out = out * geom
    return out


def verify_adams_koszul(p: int, k: int) -> dict:
    """Check psi_k(kos) = kos * cofactor and cofactor(1,..,1) = k^p.

    Returns a report dict with the two booleans and the evaluated integer;
    ``ok`` is their conjunction.
    """
    kos = koszul_class(p)
    lhs = adams(k, kos)
    cof = cofactor(p, k)
    rhs = kos * cof
    value = cof.evaluate_at_ones()
    factorization_ok = lhs == rhs
    evaluation_ok = value == k ** p
    return {
        "p": p,
        "k": k,
        "factorization_ok": factorization_ok,
        "evaluated_cofactor": value,
        "expected": k ** p,
        "evaluation_ok": evaluation_ok,
        "ok": factorization_ok and evaluation_ok,
    }
