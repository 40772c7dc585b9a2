"""The degree-n part of the normalized bar complex of q-divided polynomials.

Basis elements of ``C_k`` in degree ``n`` are compositions of ``n`` into ``k``
positive parts. The boundary merges two adjacent parts ``a, b`` into ``a + b``
with coefficient ``(-1)^(j+1) [a+b choose a]``. The cohomology of the dual
complex at index ``k`` is ``H_{n-k}`` of the braid group on ``n`` strands
with coefficients in ``K[q^{±1}]``.
"""

from __future__ import annotations

import functools
import itertools
import typing
from dataclasses import dataclass, field

from ._exactla import PolynomialDomain, SparseMatrix
from ._qarith import CoeffRing, q_binomial

if typing.TYPE_CHECKING:
    from sympy.polys.rings import PolyElement as Poly

Composition = typing.Tuple[int, ...]


@functools.lru_cache(maxsize=None)
def enumerate_compositions(n: int, k: int) -> tuple[Composition, ...]:
    """All compositions of ``n`` into ``k`` positive parts, in lexicographic order."""
    if n < 0 or not 0 <= k <= max(n, 0):
        msg = f"Expected n >= 0 and 0 <= k <= n, got n={n}, k={k}"
        raise ValueError(msg)
    if k == 0:
        return ((),) if n == 0 else ()
    if k == 1:
        return ((n,),)
    return tuple(
        (first, *rest)
        for first in range(1, n - k + 2)
        for rest in enumerate_compositions(n - first, k - 1)
    )


@functools.lru_cache(maxsize=None)
def polynomial_domain(coeff: CoeffRing) -> PolynomialDomain:
    return PolynomialDomain(coeff)


@functools.lru_cache(maxsize=None)
def _merge_coefficient(a: int, b: int, coeff: CoeffRing) -> Poly:
    return q_binomial(a + b, a, coeff)


def merges(c: Composition) -> typing.Iterator[tuple[int, Composition]]:
    """Yield ``(sign, merged)`` for each adjacent pair of parts of ``c``."""
    for j in range(len(c) - 1):
        sign = 1 if j % 2 == 0 else -1
        yield sign, (*c[:j], c[j] + c[j + 1], *c[j + 2 :])


def boundary_matrix(n: int, k: int, coeff: CoeffRing) -> SparseMatrix:
    """The boundary ``C_k -> C_{k-1}`` in degree ``n``.

    Rows are indexed by ``enumerate_compositions(n, k - 1)`` and columns by
    ``enumerate_compositions(n, k)``.
    """
    if n < 1 or not 1 <= k <= n:
        msg = f"Expected n >= 1 and 1 <= k <= n, got n={n}, k={k}"
        raise ValueError(msg)
    targets = enumerate_compositions(n, k - 1)
    sources = enumerate_compositions(n, k)
    index = {c: i for i, c in enumerate(targets)}
    matrix = SparseMatrix(len(targets), len(sources), polynomial_domain(coeff))
    for col, c in enumerate(sources):
        for j, (sign, merged) in enumerate(merges(c)):
            value = _merge_coefficient(c[j], c[j + 1], coeff)
            matrix.add_to(index[merged], col, value if sign > 0 else -value)
    return matrix


@dataclass(frozen=True)
class Bigrading:
    n: int
    k: int

    def __post_init__(self) -> None:
        if not 0 <= self.k <= self.n:
            msg = f"Expected 0 <= k <= n, got n={self.n}, k={self.k}"
            raise ValueError(msg)

    @property
    def l(self) -> int:  # noqa: E743
        """Homological index of the braid group class."""
        return self.n - self.k


@dataclass
class GradedComplex:
    """The chain complex ``C_n -> ... -> C_1 -> C_0`` in degree ``n``."""

    n: int
    coeff: CoeffRing
    bases: dict[int, tuple[Composition, ...]]
    boundaries: dict[int, SparseMatrix]

    @classmethod
    def build(cls, n: int, coeff: CoeffRing) -> GradedComplex:
        bases = {k: enumerate_compositions(n, k) for k in range(n + 1)}
        boundaries = {k: boundary_matrix(n, k, coeff) for k in range(1, n + 1)}
        return cls(n, coeff, bases, boundaries)

    def rank(self, k: int) -> int:
        return len(self.bases.get(k, ()))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "coeff": self.coeff.spec,
            "bases": [
                {"k": k, "compositions": [list(c) for c in self.bases[k]]}
                for k in sorted(self.bases)
            ],
            "boundaries": [
                {"k": k, **self.boundaries[k].to_json()} for k in sorted(self.boundaries)
            ],
        }


@dataclass
class CochainComplex:
    """The dual complex; ``differentials[k]`` maps ``C^k`` to ``C^{k+1}``."""

    chains: GradedComplex
    differentials: dict[int, SparseMatrix] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.chains.n

    @property
    def coeff(self) -> CoeffRing:
        return self.chains.coeff

    def bigrading(self, k: int) -> Bigrading:
        return Bigrading(self.n, k)

    def incoming(self, k: int) -> SparseMatrix:
        """``delta_{k-1}``, a zero map when ``C^{k-1}`` is absent."""
        if k - 1 in self.differentials:
            return self.differentials[k - 1]
        domain = polynomial_domain(self.coeff)
        return SparseMatrix(self.chains.rank(k), 0, domain)

    def outgoing(self, k: int) -> SparseMatrix:
        """``delta_k``, a zero map when ``C^{k+1}`` is absent."""
        if k in self.differentials:
            return self.differentials[k]
        domain = polynomial_domain(self.coeff)
        return SparseMatrix(0, self.chains.rank(k), domain)

    def to_json(self) -> dict:
        return self.chains.to_json()


def braid_cochain_complex(n: int, coeff: CoeffRing) -> CochainComplex:
    if n < 0:
        msg = f"Expected n >= 0, got {n}"
        raise ValueError(msg)
    chains = GradedComplex.build(n, coeff)
    differentials = {k - 1: d.transpose() for k, d in chains.boundaries.items()}
    return CochainComplex(chains, differentials)


@dataclass
class Cochain:
    """A cochain of degree ``n`` and dimension ``k`` as values on compositions."""

    n: int
    k: int
    coeff: CoeffRing
    values: dict[Composition, Poly] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = {c: v for c, v in self.values.items() if v}
        for c in self.values:
            if len(c) != self.k or sum(c) != self.n:
                msg = f"{c} is not a composition of {self.n} into {self.k} parts"
                raise ValueError(msg)

    @classmethod
    def unit(cls, coeff: CoeffRing) -> Cochain:
        return cls(0, 0, coeff, {(): coeff.ring.one})

    @classmethod
    def from_vector(
        cls, n: int, k: int, coeff: CoeffRing, vector: dict[int, Poly]
    ) -> Cochain:
        basis = enumerate_compositions(n, k)
        return cls(n, k, coeff, {basis[i]: v for i, v in vector.items()})

    def to_vector(self) -> dict[int, Poly]:
        index = {c: i for i, c in enumerate(enumerate_compositions(self.n, self.k))}
        return {index[c]: v for c, v in self.values.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.n, self.k, self.values) == (other.n, other.k, other.values)

    def __add__(self, other: Cochain) -> Cochain:
        values = dict(self.values)
        for c, v in other.values.items():
            values[c] = values.get(c, self.coeff.ring.zero) + v
        return Cochain(self.n, self.k, self.coeff, values)

    def __rmul__(self, scalar: Poly) -> Cochain:
        return Cochain(
            self.n, self.k, self.coeff, {c: scalar * v for c, v in self.values.items()}
        )

    def is_zero(self) -> bool:
        return not self.values


def coboundary(f: Cochain) -> Cochain:
    """``(delta f)(c) = f(boundary c)`` for compositions ``c`` with ``k + 1`` parts."""
    if f.k + 1 > f.n:
        return Cochain(f.n, f.k + 1, f.coeff)
    values = {}
    zero = f.coeff.ring.zero
    for c in enumerate_compositions(f.n, f.k + 1):
        total = zero
        for j, (sign, merged) in enumerate(merges(c)):
            v = f.values.get(merged)
            if v:
                total += sign * _merge_coefficient(c[j], c[j + 1], f.coeff) * v
        if total:
            values[c] = total
    return Cochain(f.n, f.k + 1, f.coeff, values)


def is_cocycle(f: Cochain) -> bool:
    return f.k >= f.n or coboundary(f).is_zero()


def concat_product(f: Cochain, g: Cochain) -> Cochain:
    """Dual of concatenation: ``(f g)(a + b) = f(a) g(b)`` for the split at ``f.k``."""
    if f.coeff != g.coeff:
        msg = f"Cannot multiply cochains over {f.coeff.label} and {g.coeff.label}"
        raise ValueError(msg)
    values = {
        a + b: va * vb
        for (a, va), (b, vb) in itertools.product(f.values.items(), g.values.items())
    }
    return Cochain(f.n + g.n, f.k + g.k, f.coeff, values)


def generator_x1(coeff: CoeffRing) -> Cochain:
    """The cocycle dual to ``t_1`` in degree 1."""
    return Cochain(1, 1, coeff, {(1,): coeff.ring.one})

