"""Closed-form presentations of braid group homology with twisted coefficients.

Over each localization ``K[q^{±1}]_(phi_m)`` the homology is a ring generated
by symbols ``x_i`` and ``y_i`` with ``deg = i``, ``dim x_1 = 0``,
``dim x_i = i - 1`` and ``dim y_i = i - 2``. Every monomial of a family is
either a module generator ``v`` carrying a summand ``K[q]/(phi^e)``, a source
``w`` paired with a generator one dimension lower, or free (only ``1`` and
``x_1``). This module enumerates those monomials, applies the symbolic
Bockstein and produces predicted tables to compare with direct computation.
"""

from __future__ import annotations

import functools
import itertools
import typing
from dataclasses import dataclass, field

from sympy import primerange

from ._exactla import CyclotomicTorsion, rank_mod_p
from ._homology import (
    HomologyGroup,
    HomologyTable,
    IntegralTable,
    assemble_integral,
    localized_components,
    stable_family,
    trivial_groups,
)
from ._qarith import (
    RATIONALS,
    CoeffRing,
    coefficients,
    cyclotomic_in,
    degree,
    euler_phi,
    reduce,
    split_phi,
)

if typing.TYPE_CHECKING:
    from sympy.polys.rings import PolyElement as Poly


@dataclass(frozen=True, order=True)
class GeneratorSymbol:
    index: int
    kind: typing.Literal["x", "y"]
    exterior: bool = field(default=False, compare=False)

    @property
    def degree(self) -> int:
        return self.index

    @property
    def dimension(self) -> int:
        if self.kind == "y":
            return self.index - 2
        return 0 if self.index == 1 else self.index - 1

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"


def x(i: int, *, exterior: bool = False) -> GeneratorSymbol:
    return GeneratorSymbol(i, "x", exterior)


def y(i: int) -> GeneratorSymbol:
    return GeneratorSymbol(i, "y")


@dataclass(frozen=True)
class Monomial:
    """A product of generator symbols; ``annihilator`` is ``(index, exponent)``."""

    factors: tuple[tuple[GeneratorSymbol, int], ...] = ()
    annihilator: tuple[int, int] | None = field(default=None, compare=False)

    @classmethod
    def of(
        cls,
        exponents: typing.Mapping[GeneratorSymbol, int],
        annihilator: tuple[int, int] | None = None,
    ) -> Monomial:
        return cls(
            tuple(sorted((s, e) for s, e in exponents.items() if e)), annihilator
        )

    @classmethod
    def parse(cls, text: str) -> Monomial:
        """Parse the string form, e.g. ``"x1^2*x6"``; ``"1"`` is the unit."""
        exponents: dict[GeneratorSymbol, int] = {}
        if text.strip() != "1":
            for part in text.split("*"):
                name, _, power = part.strip().partition("^")
                symbol = GeneratorSymbol(int(name[1:]), typing.cast("typing.Any", name[0]))
                exponents[symbol] = exponents.get(symbol, 0) + int(power or 1)
        return cls.of(exponents)

    def exponents(self) -> dict[GeneratorSymbol, int]:
        return dict(self.factors)

    def exponent(self, kind: str, index: int) -> int:
        for s, e in self.factors:
            if s.kind == kind and s.index == index:
                return e
        return 0

    def symbols(self) -> list[GeneratorSymbol]:
        return [s for s, _ in self.factors]

    @property
    def degree(self) -> int:
        return sum(s.degree * e for s, e in self.factors)

    @property
    def dimension(self) -> int:
        return sum(s.dimension * e for s, e in self.factors)

    def shifted(self, changes: typing.Mapping[GeneratorSymbol, int]) -> Monomial:
        exponents = self.exponents()
        for s, delta in changes.items():
            exponents[s] = exponents.get(s, 0) + delta
        return Monomial.of(exponents, self.annihilator)

    def annihilator_poly(self, coeff: CoeffRing) -> Poly | None:
        if self.annihilator is None:
            return None
        index, e = self.annihilator
        return cyclotomic_in(index, coeff) ** e

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(f"{s}^{e}" if e > 1 else str(s) for s, e in self.factors)


@dataclass(frozen=True)
class Family:
    """Generator symbols of the localization at phi_base.

    ``base`` is 1 for the families of phi_2 over F_2 and of phi_p over F_p
    (p odd), whose towers are ``2^i`` and ``p^i``.
    """

    coeff: CoeffRing
    base: int
    symbols: tuple[GeneratorSymbol, ...]
    needs_symbol: bool

    @property
    def index(self) -> int:
        """Index of the cyclotomic polynomial naming this family's summands."""
        if self.base == 1:
            return 2 if self.coeff.characteristic == 2 else self.coeff.characteristic  # noqa: PLR2004
        return self.base

    def tower(self, symbol: GeneratorSymbol) -> int:
        """``j`` with ``symbol.index == base * p^j`` (``p = 2`` over F_2)."""
        p = self.coeff.characteristic
        if p == 0:
            return 0
        ratio, j = symbol.index // self.base, 0
        while ratio > 1:
            ratio //= p
            j += 1
        return j

    def monomials(self, n: int) -> typing.Iterator[Monomial]:
        symbols = [s for s in self.symbols if s.degree <= n]

        def extend(i: int, budget: int, chosen: dict) -> typing.Iterator[dict]:
            if i == len(symbols):
                if budget == 0:
                    yield dict(chosen)
                return
            s = symbols[i]
            cap = 1 if s.exterior else budget // s.degree
            for e in range(min(cap, budget // s.degree) + 1):
                chosen[s] = e
                yield from extend(i + 1, budget - e * s.degree, chosen)
            del chosen[s]

        for exponents in extend(0, n, {}):
            if self.needs_symbol and not any(
                e for s, e in exponents.items() if s.index > 1
            ):
                continue
            yield Monomial.of(exponents)


def families(coeff: CoeffRing, n: int) -> list[Family]:
    """The families whose generators have degree at most ``n``."""
    p = coeff.characteristic
    if coeff.kind == "integers":
        msg = "Closed forms are stated over Q and F_p"
        raise ValueError(msg)
    out = []
    if p == 0:
        out.append(Family(coeff, 2, (x(1), x(2, exterior=True)), needs_symbol=False))
        out.extend(
            Family(coeff, m, (x(1, exterior=True), y(m), x(m, exterior=True)), True)  # noqa: FBT003
            for m in range(3, n + 1)
        )
        return out
    if p == 2:  # noqa: PLR2004
        out.append(
            Family(coeff, 1, tuple(x(2**i) for i in range(_powers(1, 2, n))), False)  # noqa: FBT003
        )
        for m in range(3, n + 1, 2):
            tower = tuple(x(m * 2**i) for i in range(_powers(m, 2, n)))
            out.append(Family(coeff, m, (x(1, exterior=True), y(m), *tower), True))  # noqa: FBT003
        return out

    def odd_tower(m: int, start: int) -> tuple[GeneratorSymbol, ...]:
        return tuple(
            s
            for j in range(start, _powers(m, p, n))
            for s in (y(m * p**j), x(m * p**j, exterior=True))
        )

    out.append(Family(coeff, 1, (x(1, exterior=True), *odd_tower(1, 1)), True))  # noqa: FBT003
    out.append(
        Family(coeff, 2, (x(1), x(2, exterior=True), *odd_tower(2, 1)), False)  # noqa: FBT003
    )
    out.extend(
        Family(coeff, m, (x(1, exterior=True), *odd_tower(m, 0)), True)  # noqa: FBT003
        for m in range(3, n + 1)
        if m % p
    )
    return out


def _powers(m: int, p: int, n: int) -> int:
    """Number of ``j >= 0`` with ``m * p^j <= n``."""
    count = 0
    while m * p**count <= n:
        count += 1
    return count


class Classification(typing.NamedTuple):
    kind: typing.Literal["generator", "source", "free"]
    level: int = 0
    exponent: int = 0


FREE = Classification("free")
SOURCE = Classification("source")


def _tower_exponents(
    family: Family, monomial: Monomial, kind: str
) -> dict[int, int]:
    return {
        family.tower(s): e
        for s, e in monomial.factors
        if s.kind == kind and s.index > 1 and not (family.base == 2 and s.index == 2)  # noqa: PLR2004
    }


def _two_adic(a: dict[int, int], start: int) -> Classification:
    present = [j for j, e in a.items() if e and j >= start]
    if not present:
        return FREE
    k = min(present)
    if a[k] % 2 or a.get(k + 1, 0) % 2:
        return SOURCE
    return Classification("generator", k, 2**k)


def _p_adic(ys: dict[int, int], xs: dict[int, int], start: int) -> int | None:
    present = [j for j in {*ys, *xs} if (ys.get(j) or xs.get(j)) and j >= start]
    return min(present) if present else None


def classify(monomial: Monomial, family: Family) -> Classification:
    """Decide whether a monomial generates a summand, sources one, or is free."""
    p = family.coeff.characteristic
    c = monomial.exponent("x", 1)
    if p == 0:
        if family.base == 2:  # noqa: PLR2004
            if monomial.exponent("x", 2):
                return SOURCE
            return Classification("generator", 0, 1) if c >= 2 else FREE  # noqa: PLR2004
        if monomial.exponent("x", family.base):
            return SOURCE
        return Classification("generator", 0, 1)

    if p == 2:  # noqa: PLR2004
        a = _tower_exponents(family, monomial, "x")
        if family.base == 1:
            if c >= 2:  # noqa: PLR2004
                return SOURCE if a.get(1, 0) % 2 else Classification("generator", 0, 1)
            return _two_adic(a, 1)
        b = monomial.exponent("y", family.base)
        if b:
            return SOURCE if a.get(0, 0) % 2 else Classification("generator", 0, 1)
        if a.get(0):
            if a[0] % 2 or a.get(1, 0) % 2:
                return SOURCE
            return Classification("generator", 0, 1)
        return _two_adic(a, 1)

    ys = _tower_exponents(family, monomial, "y")
    xs = _tower_exponents(family, monomial, "x")
    if family.base == 1:
        k = _p_adic(ys, xs, 1)
        if k is None:
            return FREE
        return SOURCE if xs.get(k) else Classification("generator", k, p ** (k - 1))
    if family.base == 2:  # noqa: PLR2004
        if monomial.exponent("x", 2):
            return SOURCE
        if c >= 2:  # noqa: PLR2004
            return Classification("generator", 0, 1)
        k = _p_adic(ys, xs, 1)
        if k is None:
            return FREE
        return SOURCE if xs.get(k) else Classification("generator", k, euler_phi(p**k))
    k = _p_adic(ys, xs, 0)
    if k is None:
        return FREE
    return SOURCE if xs.get(k) else Classification("generator", k, euler_phi(p**k))


@functools.lru_cache(maxsize=None)
def classified(
    coeff: CoeffRing, n: int
) -> tuple[tuple[Monomial, Family, Classification], ...]:
    """Every family monomial of degree ``n`` with its classification."""
    out = []
    for family in families(coeff, n):
        for monomial in family.monomials(n):
            cls = classify(monomial, family)
            if cls.kind == "generator":
                monomial = Monomial(monomial.factors, (family.index, cls.exponent))  # noqa: PLW2901
            out.append((monomial, family, cls))
    return tuple(out)


def enumerate_basis(coeff: CoeffRing, n: int, l: int) -> list[Monomial]:  # noqa: E741
    """Module generators at degree ``n`` and dimension ``l``, with annihilators."""
    if n < 0 or not 0 <= l <= n:
        msg = f"Expected 0 <= l <= n, got n={n}, l={l}"
        raise ValueError(msg)
    found = [
        m
        for m, _, cls in classified(coeff, n)
        if cls.kind == "generator" and m.dimension == l
    ]
    return sorted(found, key=lambda m: (m.annihilator, str(m)))


def free_monomials(coeff: CoeffRing, n: int, l: int) -> list[Monomial]:  # noqa: E741
    return [
        m for m, _, cls in classified(coeff, n) if cls.kind == "free" and m.dimension == l
    ]


def family_of(monomial: Monomial, coeff: CoeffRing) -> Family | None:
    """The family containing ``monomial``, or None when it mixes families."""
    for family in families(coeff, max(monomial.degree, 1)):
        caps = {(s.kind, s.index): s.exterior for s in family.symbols}
        if all(
            (s.kind, s.index) in caps and not (caps[s.kind, s.index] and e > 1)
            for s, e in monomial.factors
        ):
            specific = [s for s in monomial.symbols() if s.index > 1]
            if specific or not family.needs_symbol:
                return family
    return None


def annihilator(monomial: Monomial, coeff: CoeffRing) -> tuple[int, int] | None:
    """``(index, exponent)`` of a generator; None for mixed, free or source monomials."""
    family = family_of(monomial, coeff)
    if family is None:
        return None
    cls = classify(monomial, family)
    return (family.index, cls.exponent) if cls.kind == "generator" else None


def pairing_defects(coeff: CoeffRing, n: int) -> list[int]:
    """Dimensions ``l`` where sources at ``l + 1`` do not match generators at ``l``."""
    generators: dict[int, int] = {}
    sources: dict[int, int] = {}
    for m, _, cls in classified(coeff, n):
        if cls.kind == "generator":
            generators[m.dimension] = generators.get(m.dimension, 0) + 1
        elif cls.kind == "source":
            sources[m.dimension] = sources.get(m.dimension, 0) + 1
    defects = [l for l in range(n + 1) if sources.get(l + 1, 0) != generators.get(l, 0)]
    if sources.get(0):
        defects.insert(0, -1)
    return defects


def oracle_groups(coeff: CoeffRing, n: int) -> list[HomologyGroup]:
    if n <= 1:
        return trivial_groups(n, coeff)
    torsion: dict[int, list[tuple[int, int]]] = {l: [] for l in range(n + 1)}
    for m, _, cls in classified(coeff, n):
        if cls.kind == "generator":
            assert m.annihilator is not None  # noqa: S101
            torsion[m.dimension].append(m.annihilator)
    return [
        HomologyGroup(n, l, coeff, 0, CyclotomicTorsion.from_pairs(pairs))
        for l, pairs in torsion.items()
    ]


def oracle_table(coeff: CoeffRing, nmax: int) -> HomologyTable:
    return HomologyTable.from_degrees(
        coeff, nmax, (oracle_groups(coeff, n) for n in range(nmax + 1))
    )


def oracle_integral_table(nmax: int) -> IntegralTable:
    rational = oracle_table(RATIONALS, nmax)
    modular = {
        p: oracle_table(CoeffRing.prime_field(p), nmax) for p in primerange(2, nmax + 1)
    }
    table = IntegralTable(nmax)
    for n in range(nmax + 1):
        groups = assemble_integral(
            n,
            rational.degree(n),
            {p: t.degree(n) for p, t in modular.items() if p <= n},
        )
        for g in groups:
            table.groups[n, g.l] = g
    return table


class Mismatch(typing.NamedTuple):
    n: int
    l: int
    expected: CyclotomicTorsion
    actual: CyclotomicTorsion


@dataclass
class ComparisonReport:
    coeff: CoeffRing
    nmax: int
    mismatches: list[Mismatch] = field(default_factory=list)
    cells: int = 0

    @property
    def ok(self) -> bool:
        return not self.mismatches


def compare_with_direct(
    coeff: CoeffRing, nmax: int, direct: HomologyTable
) -> ComparisonReport:
    """Compare predicted and directly computed torsion at every ``(n, l)``."""
    report = ComparisonReport(coeff, nmax)
    for n in range(nmax + 1):
        for g in oracle_groups(coeff, n):
            actual = direct[n, g.l]
            report.cells += 1
            if g.torsion != actual.torsion or g.free_rank != actual.free_rank:
                report.mismatches.append(Mismatch(n, g.l, g.torsion, actual.torsion))
    return report


def _split_level(family: Family, level: int) -> int:
    # phi_{p^0} = phi_1 is not a tower member; x_1^2 is split against phi_p.
    return max(level, 1) if family.base == 1 else level


def symbolic_bockstein(monomial: Monomial, p: int) -> list[tuple[Poly, Monomial]]:
    """The mod-p Bockstein of a module generator as a formal sum.

    Over F_2 it is the derivation ``x_{m 2^j} -> psi x_{m 2^(j-1)}^2`` on
    generators of odd exponent. Over F_p, p odd, each exterior tower symbol
    ``x_{m p^j}`` becomes ``-(-1)^(s-1) psi y_{m p^j}``, ``s`` its position.
    """
    field_ = CoeffRing.prime_field(p)
    family = family_of(monomial, field_)
    if family is None:
        return []
    cls = classify(monomial, family)
    if cls.kind != "generator":
        return []
    target_annihilator = (family.index, cls.exponent)
    split = _split_level(family, cls.level)
    terms = []
    if p == 2:  # noqa: PLR2004
        for s, e in monomial.factors:
            j = family.tower(s) if s.index > 1 else 0
            if s.kind != "x" or s.index == 1 or e % 2 == 0 or j <= split:
                continue
            lower = x(family.base * 2 ** (j - 1))
            psi = reduce(split_phi(family.base, split, j, p).psi, field_)
            target = monomial.shifted({s: -1, lower: 2})
            terms.append((psi, Monomial(target.factors, target_annihilator)))
        return terms
    tail = [
        s
        for s, _ in monomial.factors
        if s.kind == "x" and s.index > 1 and family.tower(s) > cls.level
    ]
    for position, s in enumerate(tail):
        psi = reduce(split_phi(family.base, split, family.tower(s), p).psi, field_)
        sign = 1 if position % 2 else -1
        target = monomial.shifted({s: -1, y(s.index): 1})
        terms.append((psi * sign, Monomial(target.factors, target_annihilator)))
    return terms


def bockstein_squares_to_zero(monomial: Monomial, p: int) -> bool:
    field_ = CoeffRing.prime_field(p)
    totals: dict[Monomial, Poly] = {}
    for c1, m1 in symbolic_bockstein(monomial, p):
        for c2, m2 in symbolic_bockstein(m1, p):
            totals[m2] = totals.get(m2, field_.ring.zero) + c1 * c2
    for m, total in totals.items():
        modulus = m.annihilator_poly(field_)
        if modulus is not None and total % modulus:
            return False
    return True


def _bockstein_matrices(
    p: int, n: int
) -> tuple[dict[int, int], dict[int, list[list[int]]]]:
    field_ = CoeffRing.prime_field(p)
    q = field_.ring.gens[0]
    index: dict[int, dict[tuple[Monomial, int], int]] = {}
    for l in range(n + 1):
        index[l] = {}
        for m in enumerate_basis(field_, n, l):
            modulus = m.annihilator_poly(field_)
            for j in range(degree(modulus)):
                index[l][m, j] = len(index[l])
    dims = {l: len(cells) for l, cells in index.items()}
    matrices = {}
    for l in range(1, n + 1):
        rows = [[0] * dims[l] for _ in range(dims[l - 1])]
        for (m, j), col in index[l].items():
            for coeff_poly, target in symbolic_bockstein(m, p):
                modulus = target.annihilator_poly(field_)
                image = coefficients((coeff_poly * q**j) % modulus)
                for t, c in enumerate(image):
                    if c:
                        rows[index[l - 1][target, t]][col] = int(
                            field_.domain.to_int(c)
                        )
        matrices[l] = rows
    return dims, matrices


def bockstein_echo(p: int, n: int) -> dict[int, tuple[int, int]]:
    """Per ``l``: dimension of ``ker / im`` of the symbolic Bockstein and the
    rational dimension predicted at the same cell."""
    dims, matrices = _bockstein_matrices(p, n)

    def rank(l: int) -> int:
        if l not in matrices or l < 1:
            return 0
        return rank_mod_p(matrices[l], dims[l], p)

    rational = {g.l: g.dimension() for g in oracle_groups(RATIONALS, n)}
    return {
        l: (dims[l] - rank(l) - rank(l + 1), rational[l]) for l in range(n + 1)
    }


def free_type_index(monomial: Monomial, coeff: CoeffRing) -> int | None:
    """``h`` when the monomial lifts to a free ``Z[q]/(phi_h)`` class, else None."""
    exponents = monomial.exponents()
    if exponents.get(x(1), 0) > 1:
        return None
    rest = [(s, e) for s, e in exponents.items() if s.index > 1]
    if len(rest) != 1:
        return None
    (s, e), p = rest[0], coeff.characteristic
    if p == 2:  # noqa: PLR2004
        odd = s.index
        while odd % 2 == 0:
            odd //= 2
        if s.kind == "x" and e % 2 == 0 and (odd > 1 or s.index > 1):
            return 2 * s.index
        return None
    return s.index if s.kind == "y" else None


def is_free_type(monomial: Monomial, coeff: CoeffRing) -> bool:
    return free_type_index(monomial, coeff) is not None


def first_torsion_generator(p: int) -> Monomial:
    """The generator of the first p-torsion class, at ``n = 2p + 2``."""
    if p == 2:  # noqa: PLR2004
        return Monomial.of({x(1): 2, x(2): 2})
    return Monomial.of({x(1): 2, y(2 * p): 1})


def stable_basis(coeff: CoeffRing, l: int) -> list[Monomial]:  # noqa: E741
    """Monomials of dimension ``l`` in the stable homology ring."""
    if l < 0:
        msg = f"Expected l >= 0, got {l}"
        raise ValueError(msg)
    p = coeff.characteristic
    if coeff.kind == "integers":
        msg = "Use stable_integral_presentation for integral coefficients"
        raise ValueError(msg)
    if p == 0:
        return [Monomial()] if l == 0 else []
    if p == 2:  # noqa: PLR2004
        # x_2 only occurs squared
        units = [(x(2), 2)] + [(x(2**i), 1) for i in range(2, l.bit_length() + 2)]
    else:
        units = []
        j = 1
        while 2 * p**j - 2 <= l:
            units += [(y(2 * p**j), 1), (x(2 * p**j, exterior=True), 1)]
            j += 1
    out = []
    for counts in _dimension_splits(units, l):
        exponents: dict[GeneratorSymbol, int] = {}
        for (s, step), k in zip(units, counts):
            if k:
                exponents[s] = step * k
        out.append(Monomial.of(exponents))
    return sorted(out, key=str)


def _dimension_splits(
    units: list[tuple[GeneratorSymbol, int]], total: int
) -> typing.Iterator[tuple[int, ...]]:
    ranges = []
    for s, step in units:
        size = s.dimension * step
        cap = 1 if s.exterior else (total // size if size else 0)
        ranges.append(range(cap + 1))
    for counts in itertools.product(*ranges):
        if sum(k * s.dimension * step for (s, step), k in zip(units, counts)) == total:
            yield counts


def stable_bockstein(monomial: Monomial, p: int) -> list[tuple[int, Monomial]]:
    """``beta_2 x_{2^i} = x_{2^(i-1)}^2`` and ``beta_p x_i = y_i`` as derivations."""
    terms = []
    if p == 2:  # noqa: PLR2004
        for s, e in monomial.factors:
            if s.kind == "x" and s.index >= 4 and e % 2:  # noqa: PLR2004
                terms.append((1, monomial.shifted({s: -1, x(s.index // 2): 2})))
        return terms
    tail = [s for s, _ in monomial.factors if s.kind == "x"]
    for position, s in enumerate(tail):
        sign = 1 if position % 2 == 0 else p - 1
        terms.append((sign, monomial.shifted({s: -1, y(s.index): 1})))
    return terms


def stable_integral_torsion(l: int, primes: typing.Iterable[int]) -> dict[int, int]:  # noqa: E741
    """Number of ``Z_p`` summands in stable integral ``H_l``: the rank of the
    stable Bockstein from dimension ``l + 1``."""
    out = {}
    for p in primes:
        field_ = CoeffRing.prime_field(p)
        source = stable_basis(field_, l + 1)
        target = {m: i for i, m in enumerate(stable_basis(field_, l))}
        rows = [[0] * len(source) for _ in target]
        for col, m in enumerate(source):
            for c, image in stable_bockstein(m, p):
                rows[target[image]][col] = (rows[target[image]][col] + c) % p
        rank = rank_mod_p(rows, len(source), p)
        if rank:
            out[p] = rank
    return out


class StableGenerator(typing.NamedTuple):
    monomial: Monomial
    dimension: int
    order: int


@dataclass(frozen=True)
class StablePresentation:
    coeff: str
    generators: tuple[StableGenerator, ...]
    relations: tuple[str, ...]
    q_acts_as: int = -1

    def generators_in_dimension(self, l: int) -> list[StableGenerator]:  # noqa: E741
        return [g for g in self.generators if g.dimension == l]


def stable_integral_presentation(
    lmax: int = 12, primes: typing.Iterable[int] = (3, 5, 7)
) -> StablePresentation:
    """Generators up to dimension ``lmax`` of the stable integral homology.

    ``y_{2p^i}`` and ``y_{2p^j} x_{2p^j1} ... x_{2p^jh}`` have order p
    (``0 < j < j1 < ...``); ``x_{2^j}^2`` and ``x_{2^i}^2 x_{2^i1} ... x_{2^ih}``
    have order 2 (``0 < i``, ``i + 1 < i1 < ...``).
    """
    generators = []
    top = max(lmax, 1).bit_length() + 1
    for i in range(1, top + 1):
        square = Monomial.of({x(2**i): 2})
        tails = [j for j in range(i + 2, top + 2)]
        for size in range(len(tails) + 1):
            for chosen in itertools.combinations(tails, size):
                m = square.shifted({x(2**j): 1 for j in chosen})
                if m.dimension <= lmax:
                    generators.append(StableGenerator(m, m.dimension, 2))
    for p in primes:
        j = 1
        while 2 * p**j - 2 <= lmax:
            tails = []
            t = j + 1
            while 2 * p**t - 1 <= lmax:
                tails.append(t)
                t += 1
            for size in range(len(tails) + 1):
                for chosen in itertools.combinations(tails, size):
                    m = Monomial.of(
                        {y(2 * p**j): 1, **{x(2 * p**t, exterior=True): 1 for t in chosen}}
                    )
                    if m.dimension <= lmax:
                        generators.append(StableGenerator(m, m.dimension, p))
            j += 1
    relations = ("2 x_{2^i}", "p y_{2p^j}", "x_{2p^j}^2")
    ordered = sorted(generators, key=lambda g: (g.dimension, g.order, str(g.monomial)))
    return StablePresentation("Z", tuple(ordered), relations)


def stable_cross_check(table: HomologyTable, lmax: int = 3) -> dict[int, tuple[int, int]]:
    """Per ``l <= lmax``: stable-local dimension at ``n = nmax`` and stable rank."""
    m = stable_family(table.coeff)
    out = {}
    for l in range(min(lmax, table.nmax) + 1):
        local = localized_components([table[table.nmax, l]], m)[l]
        out[l] = (local.dimension(), len(stable_basis(table.coeff, l)))
    return out


def field_generators(coeff: CoeffRing, n: int) -> dict[int, tuple[GeneratorSymbol, ...]]:
    """Generators of the homology over ``K[q]/(phi_m)``, keyed by the index naming
    each family's summands, restricted to degree at most ``n``."""
    return {family.index: family.symbols for family in families(coeff, n)}
