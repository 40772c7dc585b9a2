"""Exact linear algebra over the Euclidean domains K[q] (K a field) and Z."""

from __future__ import annotations

import abc
import math
import typing
from dataclasses import dataclass, field

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from ._errors import NonExactDivision, NotAComplex, UnfactoredResidual
from ._qarith import (
    CoeffRing,
    coeff_to_str,
    coefficients,
    cyclotomic_in,
    degree,
    euler_phi,
    is_laurent_unit,
    normalize_laurent,
)

if typing.TYPE_CHECKING:
    from sympy.polys.rings import PolyElement as Poly

Entry = typing.Any
Row = typing.Dict[int, Entry]


class EuclideanDomain(abc.ABC):
    zero: Entry
    one: Entry

    @abc.abstractmethod
    def size(self, a: Entry) -> int:
        """Euclidean size; remainders are strictly smaller than the divisor."""

    @abc.abstractmethod
    def divmod(self, a: Entry, b: Entry) -> tuple[Entry, Entry]: ...

    @abc.abstractmethod
    def gcd(self, a: Entry, b: Entry) -> Entry: ...

    @abc.abstractmethod
    def normalize(self, a: Entry) -> Entry:
        """Canonical associate of ``a``."""

    @abc.abstractmethod
    def is_unit(self, a: Entry) -> bool: ...

    @abc.abstractmethod
    def entry_to_json(self, a: Entry) -> str | list[str]: ...

    def exquo(self, a: Entry, b: Entry) -> Entry:
        quo, rem = self.divmod(a, b)
        if rem:
            msg = f"{a} is not divisible by {b}"
            raise NonExactDivision(msg)
        return quo

    def lcm(self, a: Entry, b: Entry) -> Entry:
        return self.normalize(self.exquo(a * b, self.gcd(a, b)))

    def primitive_scale(self, values: typing.Iterable[Entry]) -> Entry | None:  # noqa: ARG002
        """A unit that clears denominators and content from ``values``, if useful."""
        return None

    def scale(self, a: Entry, s: Entry) -> Entry:
        return a * s

    def unit_inverse(self, s: Entry) -> Entry:
        return 1 / s


class PolynomialDomain(EuclideanDomain):
    """K[q] for K one of Q, F_p or Z.

    Z[q] is not Euclidean; it is accepted for matrix arithmetic only and
    rejected by the elimination routines.
    """

    def __init__(self, coeff: CoeffRing) -> None:
        self.coeff = coeff
        self.ring = coeff.ring
        self.zero = self.ring.zero
        self.one = self.ring.one

    def size(self, a: Poly) -> int:
        return degree(a)

    def divmod(self, a: Poly, b: Poly) -> tuple[Poly, Poly]:
        return a.div(b)

    def gcd(self, a: Poly, b: Poly) -> Poly:
        return self.normalize(a.gcd(b))

    def normalize(self, a: Poly) -> Poly:
        return a.monic() if a else a

    def is_unit(self, a: Poly) -> bool:
        return degree(a) == 0

    def entry_to_json(self, a: Poly) -> list[str]:
        return [coeff_to_str(c, self.coeff) for c in coefficients(a)]

    def primitive_scale(self, values: typing.Iterable[Poly]) -> Entry | None:
        if self.coeff.kind != "rationals":
            return None
        den, num = ZZ.one, ZZ.zero
        for f in values:
            for c in f.itercoeffs():
                den = ZZ.lcm(den, QQ.denom(c))
                num = ZZ.gcd(num, QQ.numer(c))
        if not num or (den == 1 and num == 1):
            return None
        return QQ(den, num)

    def scale(self, a: Poly, s: Entry) -> Poly:
        return a.mul_ground(s)

    def unit_inverse(self, s: Entry) -> Entry:
        return self.coeff.domain.one / s

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PolynomialDomain) and other.coeff == self.coeff

    def __hash__(self) -> int:
        return hash(("poly", self.coeff))


class IntegerDomain(EuclideanDomain):
    zero = 0
    one = 1

    def size(self, a: int) -> int:
        return abs(a)

    def divmod(self, a: int, b: int) -> tuple[int, int]:
        return divmod(a, b)

    def gcd(self, a: int, b: int) -> int:
        return math.gcd(a, b)

    def normalize(self, a: int) -> int:
        return abs(a)

    def is_unit(self, a: int) -> bool:
        return abs(a) == 1

    def entry_to_json(self, a: int) -> str:
        return str(a)

    def unit_inverse(self, s: int) -> int:
        return s

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntegerDomain)

    def __hash__(self) -> int:
        return hash("int")


@dataclass
class SparseMatrix:
    """A matrix stored as a dictionary of nonzero rows."""

    nrows: int
    ncols: int
    domain: EuclideanDomain
    rows: dict[int, Row] = field(default_factory=dict)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, domain: EuclideanDomain) -> SparseMatrix:
        return cls(nrows, ncols, domain)

    @classmethod
    def identity(cls, n: int, domain: EuclideanDomain) -> SparseMatrix:
        return cls(n, n, domain, {i: {i: domain.one} for i in range(n)})

    @classmethod
    def from_dense(
        cls,
        data: typing.Sequence[typing.Sequence[Entry]],
        domain: EuclideanDomain,
        ncols: int | None = None,
    ) -> SparseMatrix:
        ncols = len(data[0]) if ncols is None else ncols
        rows = {}
        for i, values in enumerate(data):
            row = {j: v for j, v in enumerate(values) if v}
            if row:
                rows[i] = row
        return cls(len(data), ncols, domain, rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def entry(self, i: int, j: int) -> Entry:
        return self.rows.get(i, {}).get(j, self.domain.zero)

    def add_to(self, i: int, j: int, value: Entry) -> None:
        row = self.rows.setdefault(i, {})
        total = row.get(j, self.domain.zero) + value
        if total:
            row[j] = total
        else:
            row.pop(j, None)
            if not row:
                del self.rows[i]

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def is_zero(self) -> bool:
        return not self.rows

    def copy(self) -> SparseMatrix:
        return SparseMatrix(
            self.nrows,
            self.ncols,
            self.domain,
            {i: dict(r) for i, r in self.rows.items()},
        )

    def transpose(self) -> SparseMatrix:
        out = SparseMatrix(self.ncols, self.nrows, self.domain)
        for i, row in self.rows.items():
            for j, v in row.items():
                out.rows.setdefault(j, {})[i] = v
        return out

    def __matmul__(self, other: SparseMatrix) -> SparseMatrix:
        if self.ncols != other.nrows:
            msg = f"Cannot multiply {self.shape} by {other.shape}"
            raise ValueError(msg)
        out = SparseMatrix(self.nrows, other.ncols, self.domain)
        for i, row in self.rows.items():
            acc: Row = {}
            for k, a in row.items():
                for j, b in other.rows.get(k, {}).items():
                    acc[j] = acc.get(j, self.domain.zero) + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                out.rows[i] = acc
        return out

    def apply(self, vector: Row) -> Row:
        """Multiply by a column vector given as ``{index: entry}``."""
        out = {}
        for i, row in self.rows.items():
            total = self.domain.zero
            for j, a in row.items():
                b = vector.get(j)
                if b:
                    total += a * b
            if total:
                out[i] = total
        return out

    def map(
        self, fn: typing.Callable[[Entry], Entry], domain: EuclideanDomain
    ) -> SparseMatrix:
        out = SparseMatrix(self.nrows, self.ncols, domain)
        for i, row in self.rows.items():
            mapped = {j: fn(v) for j, v in row.items()}
            mapped = {j: v for j, v in mapped.items() if v}
            if mapped:
                out.rows[i] = mapped
        return out

    def to_dense(self) -> list[list[Entry]]:
        return [
            [self.entry(i, j) for j in range(self.ncols)] for i in range(self.nrows)
        ]

    def to_json(self) -> dict:
        entries = [
            [i, j, self.domain.entry_to_json(v)]
            for i in sorted(self.rows)
            for j, v in sorted(self.rows[i].items())
        ]
        return {"shape": [self.nrows, self.ncols], "entries": entries}


@dataclass
class Diagonalization:
    """Result of reducing a matrix to a pivot pattern by unimodular operations.

    ``pivots`` lists ``(row, col, value)`` in the order they were fixed. When
    transforms are tracked, ``U @ M @ V`` has exactly the pivot entries and
    ``U_inv`` is the inverse of ``U``.
    """

    pivots: list[tuple[int, int, Entry]]
    shape: tuple[int, int]
    U: SparseMatrix | None = None  # noqa: N815
    U_inv: SparseMatrix | None = None  # noqa: N815
    V: SparseMatrix | None = None  # noqa: N815

    @property
    def pivot_rows(self) -> dict[int, Entry]:
        return {r: v for r, _, v in self.pivots}


class _Eliminator:
    def __init__(self, matrix: SparseMatrix, *, transforms: bool) -> None:
        self.domain = matrix.domain
        self.rows = {i: dict(r) for i, r in matrix.rows.items() if r}
        self.cols: dict[int, set[int]] = {}
        for i, row in self.rows.items():
            for j in row:
                self.cols.setdefault(j, set()).add(i)
        self.transforms = transforms
        if transforms:
            n, m = matrix.nrows, matrix.ncols
            self.u = {i: {i: self.domain.one} for i in range(n)}
            self.u_inv_cols = {i: {i: self.domain.one} for i in range(n)}
            self.v_cols = {j: {j: self.domain.one} for j in range(m)}

    def _set(self, i: int, j: int, value: Entry) -> None:
        row = self.rows.setdefault(i, {})
        if value:
            row[j] = value
            self.cols.setdefault(j, set()).add(i)
        else:
            row.pop(j, None)
            col = self.cols.get(j)
            if col is not None:
                col.discard(i)
                if not col:
                    del self.cols[j]

    def _row_sub(self, target: int, source: int, factor: Entry) -> None:
        # row[target] -= factor * row[source]
        zero = self.domain.zero
        trow = self.rows.get(target, {})
        for j, v in list(self.rows[source].items()):
            self._set(target, j, trow.get(j, zero) - factor * v)
            trow = self.rows[target]
        scale = self.domain.primitive_scale(self.rows[target].values())
        if scale is not None:
            for j, v in list(self.rows[target].items()):
                self.rows[target][j] = self.domain.scale(v, scale)
        if self.transforms:
            _axpy(self.u[target], self.u[source], -factor, zero)
            _axpy(self.u_inv_cols[source], self.u_inv_cols[target], factor, zero)
            if scale is not None:
                inv = self.domain.unit_inverse(scale)
                self.u[target] = {
                    k: self.domain.scale(v, scale) for k, v in self.u[target].items()
                }
                self.u_inv_cols[target] = {
                    k: self.domain.scale(v, inv)
                    for k, v in self.u_inv_cols[target].items()
                }

    def _col_sub_in_row(self, r: int, target: int, source: int, factor: Entry) -> None:
        # column ops once ``source`` is clean apart from row r
        zero = self.domain.zero
        self._set(r, target, self.rows[r].get(target, zero) - factor * self.rows[r][source])
        if self.transforms:
            _axpy(self.v_cols[target], self.v_cols[source], -factor, zero)

    def _smallest(self, cells: typing.Iterable[tuple[int, int]]) -> tuple[int, int]:
        size = self.domain.size
        return min(cells, key=lambda rc: (size(self.rows[rc[0]][rc[1]]), rc[0], rc[1]))

    def _settle(self, r: int, c: int) -> tuple[int, int]:
        """Clear row and column of the pivot, moving to smaller pivots as needed."""
        while True:
            a = self.rows[r][c]
            for r2 in sorted(self.cols[c] - {r}):
                quo, _ = self.domain.divmod(self.rows[r2][c], a)
                if quo:
                    self._row_sub(r2, r, quo)
            if len(self.cols[c]) > 1:
                r, c = self._smallest((i, c) for i in self.cols[c] if i != r)
                continue
            for c2 in sorted(set(self.rows[r]) - {c}):
                quo, _ = self.domain.divmod(self.rows[r][c2], a)
                if quo:
                    self._col_sub_in_row(r, c2, c, quo)
            if len(self.rows[r]) > 1:
                r, c = self._smallest((r, j) for j in self.rows[r] if j != c)
                continue
            return r, c

    def run(self) -> list[tuple[int, int, Entry]]:
        pivots = []
        while self.cols:
            r, c = self._smallest((i, j) for i, row in self.rows.items() for j in row)
            r, c = self._settle(r, c)
            pivots.append((r, c, self.rows[r][c]))
            del self.rows[r]
            del self.cols[c]
        return pivots


def _axpy(target: Row, source: Row, factor: Entry, zero: Entry) -> None:
    for k, v in source.items():
        value = target.get(k, zero) + factor * v
        if value:
            target[k] = value
        else:
            target.pop(k, None)


def diagonalize(matrix: SparseMatrix, *, transforms: bool = False) -> Diagonalization:
    """Reduce ``matrix`` to a pivot pattern with minimal-size pivoting."""
    domain = matrix.domain
    if isinstance(domain, PolynomialDomain) and not domain.coeff.is_field:
        msg = f"K[q] is Euclidean only over a field, got {domain.coeff.label}"
        raise ValueError(msg)
    elim = _Eliminator(matrix, transforms=transforms)
    pivots = elim.run()
    result = Diagonalization(pivots=pivots, shape=matrix.shape)
    if transforms:
        n, m = matrix.shape
        result.U = SparseMatrix(n, n, domain, {i: r for i, r in elim.u.items() if r})
        result.U_inv = SparseMatrix(n, n, domain)
        for j, col in elim.u_inv_cols.items():
            for i, v in col.items():
                result.U_inv.rows.setdefault(i, {})[j] = v
        result.V = SparseMatrix(m, m, domain)
        for j, col in elim.v_cols.items():
            for i, v in col.items():
                result.V.rows.setdefault(i, {})[j] = v
    return result


def invariant_factors(
    values: typing.Sequence[Entry], domain: EuclideanDomain
) -> list[Entry]:
    """Turn diagonal entries into a divisibility chain ``d_1 | d_2 | ...``."""
    units = [v for v in values if domain.is_unit(v)]
    chain = [domain.normalize(v) for v in values if not domain.is_unit(v)]
    for i in range(len(chain)):
        for j in range(i + 1, len(chain)):
            g = domain.gcd(chain[i], chain[j])
            if g != chain[i]:
                chain[i], chain[j] = g, domain.lcm(chain[i], chain[j])
    chain = [domain.one if domain.is_unit(d) else d for d in chain]
    ordered = sorted(chain, key=domain.size)
    return [domain.one] * len(units) + ordered


def _canonical(value: Entry, domain: EuclideanDomain) -> Entry:
    if isinstance(domain, PolynomialDomain):
        return normalize_laurent(value)
    return domain.normalize(value)


@dataclass
class SmithForm:
    """Invariant factors of a matrix, normalized over K[q^{±1}] (or Z)."""

    divisors: list[Entry]
    domain: EuclideanDomain
    diagonalization: Diagonalization | None = None

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def torsion(self) -> list[Entry]:
        return [d for d in self.divisors if not _is_unit_divisor(d, self.domain)]


def _is_unit_divisor(d: Entry, domain: EuclideanDomain) -> bool:
    if isinstance(domain, PolynomialDomain):
        return is_laurent_unit(d)
    return domain.is_unit(d)


def smith_normal_form(matrix: SparseMatrix, *, transforms: bool = False) -> SmithForm:
    """Smith normal form of ``matrix`` over its Euclidean domain."""
    domain = matrix.domain
    diag = diagonalize(matrix, transforms=transforms)
    chain = invariant_factors([v for _, _, v in diag.pivots], domain)
    divisors = [_canonical(d, domain) for d in chain]
    # q-power divisors become units after Laurent normalization
    units = [d for d in divisors if _is_unit_divisor(d, domain)]
    rest = [d for d in divisors if not _is_unit_divisor(d, domain)]
    one = domain.one
    return SmithForm(
        divisors=[one] * len(units) + rest,
        domain=domain,
        diagonalization=diag if transforms else None,
    )


@dataclass(frozen=True)
class CyclotomicTorsion:
    """A multiset of cyclotomic-power summands ``(m, e, mult)``."""

    summands: tuple[tuple[int, int, int], ...] = ()

    @classmethod
    def from_pairs(cls, pairs: typing.Iterable[tuple[int, int]]) -> CyclotomicTorsion:
        counts: dict[tuple[int, int], int] = {}
        for m, e in pairs:
            counts[m, e] = counts.get((m, e), 0) + 1
        return cls(tuple(sorted((m, e, k) for (m, e), k in counts.items())))

    def pairs(self) -> list[tuple[int, int]]:
        return [(m, e) for m, e, k in self.summands for _ in range(k)]

    def __add__(self, other: CyclotomicTorsion) -> CyclotomicTorsion:
        return CyclotomicTorsion.from_pairs(self.pairs() + other.pairs())

    def __bool__(self) -> bool:
        return bool(self.summands)

    def restrict(self, keep: typing.Callable[[int], bool]) -> CyclotomicTorsion:
        return CyclotomicTorsion(tuple(s for s in self.summands if keep(s[0])))

    def dimension(self) -> int:
        """Dimension over the ground field of the torsion module."""
        return sum(k * e * euler_phi(m) for m, e, k in self.summands)

    def to_json(self) -> list[dict]:
        return [{"m": m, "e": e, "mult": k} for m, e, k in self.summands]

    @classmethod
    def from_json(cls, data: list[dict]) -> CyclotomicTorsion:
        return cls(tuple(sorted((d["m"], d["e"], d["mult"]) for d in data)))


@dataclass(frozen=True)
class ModulePresentation:
    free_rank: int
    torsion: tuple[Poly, ...] = ()

    def cyclotomic(self, nmax: int) -> CyclotomicTorsion:
        out = CyclotomicTorsion()
        for d in self.torsion:
            out = out + factor_into_cyclotomics(d, nmax)
        return out


def coeff_ring_of(f: Poly) -> CoeffRing:
    domain = f.ring.domain
    if domain.is_FiniteField:
        return CoeffRing.prime_field(int(domain.characteristic()))
    if domain.is_QQ:
        return CoeffRing.rationals()
    return CoeffRing.integers()


def factor_into_cyclotomics(d: Poly, nmax: int) -> CyclotomicTorsion:
    """Write ``d`` as a product of cyclotomic powers by trial division.

    Trial divisors are phi_2, ..., phi_nmax and finally phi_1, reduced to the
    ring of ``d``.
    """
    coeff = coeff_ring_of(d)
    rest = normalize_laurent(d)
    pairs = []
    for m in [*range(2, nmax + 1), 1]:
        if degree(rest) <= 0:
            break
        phi = cyclotomic_in(m, coeff)
        e = 0
        while True:
            quo, rem = rest.div(phi)
            if rem:
                break
            rest, e = quo, e + 1
        if e:
            pairs.append((m, e))
    if degree(rest) != 0:
        msg = f"{normalize_laurent(d)} leaves the non-cyclotomic factor {rest}"
        raise UnfactoredResidual(msg)
    return CyclotomicTorsion.from_pairs(pairs)


def homology_of_pair(
    d_in: SparseMatrix,
    d_out: SparseMatrix,
    *,
    snf_in: SmithForm | None = None,
    rank_out: int | None = None,
) -> ModulePresentation:
    """Presentation of ``ker(d_out) / im(d_in)``.

    ``snf_in`` and ``rank_out`` may be passed when the caller has already
    reduced the two maps.
    """
    if d_in.nrows != d_out.ncols:
        msg = f"Incompatible shapes {d_in.shape} and {d_out.shape}"
        raise ValueError(msg)
    if not (d_out @ d_in).is_zero():
        msg = "d_out @ d_in is nonzero"
        raise NotAComplex(msg)
    if snf_in is None:
        snf_in = smith_normal_form(d_in)
    if rank_out is None:
        rank_out = len(diagonalize(d_out).pivots)
    free_rank = d_out.ncols - rank_out - snf_in.rank
    return ModulePresentation(free_rank=free_rank, torsion=tuple(snf_in.torsion))


def rank_mod_p(rows: typing.Sequence[typing.Sequence[int]], ncols: int, p: int) -> int:
    """Rank over F_p of a dense integer matrix."""
    if not rows or not ncols:
        return 0
    domain = CoeffRing.prime_field(p).domain
    data = [[domain(int(v)) for v in row] for row in rows]
    return DomainMatrix(data, (len(rows), ncols), domain).rank()
