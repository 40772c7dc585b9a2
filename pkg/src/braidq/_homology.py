"""Homology of braid groups with coefficients in K[q^{±1}] and Z[q^{±1}].

Field coefficients are computed directly from the Smith normal form of the
cochain differentials. Integral groups are assembled from the rational and
mod-p answers, which is valid because the Bockstein spectral sequence
degenerates (no p^2-torsion), checked separately by ``verify_no_p2_torsion``.
"""

from __future__ import annotations

import concurrent.futures
import time
import typing
from dataclasses import dataclass, field

from sympy import primerange
from sympy.polys.matrices import DomainMatrix

from ._complexes import braid_cochain_complex
from ._errors import InconsistentRanks, NonDivisibleByP, NotFound
from ._exactla import (
    CyclotomicTorsion,
    Diagonalization,
    SparseMatrix,
    diagonalize,
    homology_of_pair,
    rank_mod_p,
    smith_normal_form,
)
from ._qarith import (
    INTEGERS,
    RATIONALS,
    CoeffRing,
    coefficients,
    cyclotomic_in,
    degree,
    invertible_in_localization,
    lift,
    q_factorial,
    reduce,
)

if typing.TYPE_CHECKING:
    from sympy.polys.rings import PolyElement as Poly

    from ._cache import ResultCache

    ProgressCallback = typing.Callable[[int, CoeffRing, float, bool], None]


@dataclass(frozen=True)
class HomologyGroup:
    """``H_l`` of the braid group on ``n`` strands with ``K[q^{±1}]`` coefficients."""

    n: int
    l: int  # noqa: E741
    coeff: CoeffRing
    free_rank: int = 0
    torsion: CyclotomicTorsion = CyclotomicTorsion()

    def dimension(self) -> int:
        """Dimension of the torsion part over the ground field."""
        return self.torsion.dimension()

    def is_zero(self) -> bool:
        return not self.free_rank and not self.torsion

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "free_rank": self.free_rank,
            "torsion": self.torsion.to_json(),
        }


def groups_to_json(n: int, coeff: CoeffRing, groups: list[HomologyGroup]) -> dict:
    return {
        "n": n,
        "coeff": coeff.spec,
        "groups": [g.to_json() for g in sorted(groups, key=lambda g: g.l)],
    }


def groups_from_json(data: dict) -> list[HomologyGroup]:
    coeff = CoeffRing.try_from_specifier(data["coeff"])
    return [
        HomologyGroup(
            n=data["n"],
            l=g["l"],
            coeff=coeff,
            free_rank=g["free_rank"],
            torsion=CyclotomicTorsion.from_json(g["torsion"]),
        )
        for g in data["groups"]
    ]


@dataclass
class HomologyTable:
    coeff: CoeffRing
    nmax: int
    groups: dict[tuple[int, int], HomologyGroup] = field(default_factory=dict)

    @classmethod
    def from_degrees(
        cls, coeff: CoeffRing, nmax: int, degrees: typing.Iterable[list[HomologyGroup]]
    ) -> HomologyTable:
        table = cls(coeff, nmax)
        for groups in degrees:
            for g in groups:
                table.groups[g.n, g.l] = g
        return table

    def __getitem__(self, key: tuple[int, int]) -> HomologyGroup:
        return self.groups[key]

    def degree(self, n: int) -> list[HomologyGroup]:
        return [self.groups[n, l] for l in range(n + 1)]

    def dimension(self, n: int, l: int) -> int:  # noqa: E741
        return self.groups[n, l].dimension()

    def to_json(self) -> dict:
        return {
            "coeff": self.coeff.spec,
            "nmax": self.nmax,
            "degrees": [
                groups_to_json(n, self.coeff, self.degree(n))
                for n in range(self.nmax + 1)
            ],
        }


def _require_field(coeff: CoeffRing) -> None:
    if not coeff.is_field:
        msg = "Homology over Z[q^{±1}] is assembled by integral_assembly"
        raise ValueError(msg)


def _require_prime(p: int) -> CoeffRing:
    return CoeffRing.prime_field(p)


def trivial_groups(n: int, coeff: CoeffRing) -> list[HomologyGroup]:
    """Braid groups on zero or one strand are trivial: only a free H_0."""
    return [
        HomologyGroup(n, l, coeff, free_rank=1 if l == 0 else 0) for l in range(n + 1)
    ]


def compute_homology(n: int, coeff: CoeffRing) -> list[HomologyGroup]:
    """All ``H_l(Br(n); K[q^{±1}])``, ``l = 0..n``, over a field K.

    ``H_l`` is the cohomology of the dual bar complex at index ``n - l``; its
    torsion comes from the nonunit invariant factors of the incoming
    differential, factored into cyclotomic powers.
    """
    _require_field(coeff)
    if n < 0:
        msg = f"Expected n >= 0, got {n}"
        raise ValueError(msg)
    if n <= 1:
        return trivial_groups(n, coeff)

    cochains = braid_cochain_complex(n, coeff)
    # forms[k] is the Smith form of delta_k
    forms = {k: smith_normal_form(d) for k, d in cochains.differentials.items()}
    groups = []
    for k in range(n, -1, -1):
        outgoing = forms.get(k)
        presentation = homology_of_pair(
            cochains.incoming(k),
            cochains.outgoing(k),
            snf_in=forms.get(k - 1),
            rank_out=outgoing.rank if outgoing is not None else 0,
        )
        groups.append(
            HomologyGroup(
                n, n - k, coeff, presentation.free_rank, presentation.cyclotomic(n)
            )
        )
    return groups


def _compute_degree(n: int, spec: str) -> tuple[list[HomologyGroup], float]:
    start = time.perf_counter()
    groups = compute_homology(n, CoeffRing.try_from_specifier(spec))
    return groups, time.perf_counter() - start


def compute_table(
    coeff: CoeffRing,
    nmax: int,
    *,
    jobs: int = 1,
    cache: ResultCache | None = None,
    progress: ProgressCallback | None = None,
) -> HomologyTable:
    """Homology for every ``0 <= l <= n <= nmax``, reusing cached degrees."""
    _require_field(coeff)
    degrees = {n: trivial_groups(n, coeff) for n in range(min(nmax, 1) + 1)}
    missing = []
    for n in range(2, nmax + 1):
        cached = cache.load(n, coeff) if cache is not None else None
        if cached is None:
            missing.append(n)
        else:
            degrees[n] = cached
            if progress is not None:
                progress(n, coeff, 0.0, True)  # noqa: FBT003

    def record(n: int, groups: list[HomologyGroup], seconds: float) -> None:
        degrees[n] = groups
        if cache is not None:
            cache.store(n, coeff, groups, seconds)
        if progress is not None:
            progress(n, coeff, seconds, False)  # noqa: FBT003

    if jobs > 1 and len(missing) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_compute_degree, n, coeff.spec): n for n in missing}
            for future in concurrent.futures.as_completed(futures):
                record(futures[future], *future.result())
    else:
        for n in missing:
            record(n, *_compute_degree(n, coeff.spec))
    return HomologyTable.from_degrees(coeff, nmax, degrees.values())


class CohomologyBasis:
    """F_p basis ``q^j g_t`` of ``H^k`` from a tracked reduction of ``delta_{k-1}``.

    ``g_t`` is the column of ``U^{-1}`` at a pivot row ``t`` with nonunit
    pivot ``d_t``, and ``0 <= j < deg d_t``. Generators are listed by
    increasing pivot degree, then row.
    """

    def __init__(self, k: int, incoming: SparseMatrix) -> None:
        self.k = k
        self.reduction: Diagonalization | None = None
        self.pivots: list[tuple[int, Poly]] = []
        self.pivot_rows: set[int] = set()
        if incoming.ncols and incoming.nrows:
            self.reduction = diagonalize(incoming, transforms=True)
            self.pivot_rows = {r for r, _, _ in self.reduction.pivots}
            nonunit = [(r, d) for r, _, d in self.reduction.pivots if degree(d) > 0]
            self.pivots = sorted(nonunit, key=lambda rd: (degree(rd[1]), rd[0]))

    def __len__(self) -> int:
        return sum(degree(d) for _, d in self.pivots)

    def generator(self, row: int) -> dict[int, Poly]:
        assert self.reduction is not None  # noqa: S101
        assert self.reduction.U_inv is not None  # noqa: S101
        return {
            i: entries[row]
            for i, entries in self.reduction.U_inv.rows.items()
            if row in entries
        }

    def elements(self) -> typing.Iterator[dict[int, Poly]]:
        for row, d in self.pivots:
            g = self.generator(row)
            q = d.ring.gens[0]
            for j in range(degree(d)):
                yield {i: v * q**j for i, v in g.items()}

    def coordinates(self, cocycle: dict[int, Poly], p: int) -> list[int]:
        if not self.pivots:
            return []
        assert self.reduction is not None  # noqa: S101
        assert self.reduction.U is not None  # noqa: S101
        y = self.reduction.U.apply(cocycle)
        stray = set(y) - self.pivot_rows
        if stray:
            msg = f"Cocycle has a component outside the torsion of H^{self.k}"
            raise InconsistentRanks(msg)
        out = []
        for row, d in self.pivots:
            rem = coefficients(y.get(row, d.ring.zero) % d)
            rem += [d.ring.domain.zero] * (degree(d) - len(rem))
            out.extend(int(d.ring.domain.to_int(c)) % p for c in rem)
        return out


def _divide_by_p(vector: dict[int, Poly], p: int, field: CoeffRing) -> dict[int, Poly]:
    out = {}
    for i, w in vector.items():
        if any(c % p for c in w.itercoeffs()):
            msg = f"Lifted coboundary entry {w} is not divisible by {p}"
            raise NonDivisibleByP(msg)
        reduced = reduce(w.quo_ground(p), field)
        if reduced:
            out[i] = reduced
    return out


@dataclass
class BocksteinMap:
    """The mod-p Bockstein ``H_l -> H_{l-1}`` in the generator bases.

    ``matrices[l]`` has ``dims[l - 1]`` rows and ``dims[l]`` columns, with
    entries in ``0..p-1``.
    """

    n: int
    p: int
    dims: dict[int, int]
    matrices: dict[int, list[list[int]]]

    def rank(self, l: int) -> int:  # noqa: E741
        """Rank of the Bockstein leaving ``H_l``."""
        if l not in self.matrices or l - 1 not in self.dims:
            return 0
        return rank_mod_p(self.matrices[l], self.dims[l], self.p)

    def squares_to_zero(self) -> bool:
        for l, outer in self.matrices.items():
            inner = self.matrices.get(l + 1)
            if inner is None:
                continue
            for row in outer:
                for j in range(self.dims[l + 1]):
                    total = sum(row[i] * inner[i][j] for i in range(self.dims[l]))
                    if total % self.p:
                        return False
        return True


def bockstein(n: int, p: int) -> BocksteinMap:
    """Chain-level Bockstein: lift to Z[q], apply delta, divide by p, reduce."""
    if n < 2:  # noqa: PLR2004
        msg = f"Expected n >= 2, got {n}"
        raise ValueError(msg)
    field = _require_prime(p)
    mod_p = braid_cochain_complex(n, field)
    integral = braid_cochain_complex(n, INTEGERS)
    bases = {k: CohomologyBasis(k, mod_p.incoming(k)) for k in range(n + 1)}
    matrices = {}
    for k, delta in integral.differentials.items():
        source, target = bases[k], bases[k + 1]
        columns = []
        for z in source.elements():
            image = delta.apply({i: lift(v) for i, v in z.items()})
            columns.append(target.coordinates(_divide_by_p(image, p, field), p))
        matrices[n - k] = [
            [col[i] for col in columns] for i in range(len(target))
        ]
    dims = {n - k: len(basis) for k, basis in bases.items()}
    return BocksteinMap(n, p, dims, matrices)


def verify_no_p2_torsion(
    n: int,
    p: int,
    *,
    beta: BocksteinMap | None = None,
    rational: list[HomologyGroup] | None = None,
) -> bool:
    """Whether ``ker beta / im beta`` has the rational dimension at every index."""
    beta = bockstein(n, p) if beta is None else beta
    rational = compute_homology(n, RATIONALS) if rational is None else rational
    qdims = {g.l: g.dimension() for g in rational}
    return all(
        beta.dims.get(l, 0) - beta.rank(l) - beta.rank(l + 1) == qdims[l]
        for l in range(n + 1)
    )


@dataclass(frozen=True)
class IntegralGroup:
    """``H_l(Br(n); Z[q^{±1}])`` as an abelian group: ``Z^r`` plus ``Z_p`` summands."""

    n: int
    l: int  # noqa: E741
    free_rank: int = 0
    torsion: tuple[tuple[int, int], ...] = ()

    def is_zero(self) -> bool:
        return not self.free_rank and not self.torsion

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "free_rank": self.free_rank,
            "torsion": [{"p": p, "mult": k} for p, k in self.torsion],
        }


def integral_assembly(
    n: int,
    primes: typing.Iterable[int] | None = None,
    *,
    rational: list[HomologyGroup] | None = None,
    modular: dict[int, list[HomologyGroup]] | None = None,
) -> list[IntegralGroup]:
    """Integral homology from the rational and mod-p dimensions.

    With ``r_l`` the rational dimension and ``t_l`` the number of ``Z_p``
    summands, ``dim H_l(F_p) = r_l + t_l + t_{l-1}``. The recursion must
    stay nonnegative and close with ``t_n = 0``.
    """
    if n <= 1:
        return assemble_integral(n, [], {})
    primes = list(primerange(2, n + 1)) if primes is None else sorted(set(primes))
    rational = compute_homology(n, RATIONALS) if rational is None else rational
    modular = {} if modular is None else modular
    return assemble_integral(
        n,
        rational,
        {
            p: modular.get(p) or compute_homology(n, CoeffRing.prime_field(p))
            for p in primes
        },
    )


def assemble_integral(
    n: int,
    rational: list[HomologyGroup],
    modular: dict[int, list[HomologyGroup]],
) -> list[IntegralGroup]:
    if n <= 1:
        return [IntegralGroup(n, l, free_rank=1 if l == 0 else 0) for l in range(n + 1)]
    r = {g.l: g.dimension() for g in rational}
    torsion: dict[int, list[tuple[int, int]]] = {l: [] for l in range(n + 1)}
    for p in sorted(modular):
        d = {g.l: g.dimension() for g in modular[p]}
        previous = 0
        for l in range(n + 1):
            t = d[l] - r[l] - previous
            if t < 0 or (l == n and t != 0):
                msg = f"No Z_{p} multiplicities fit degree {n} at H_{l} (got {t})"
                raise InconsistentRanks(msg)
            if t:
                torsion[l].append((p, t))
            previous = t
    return [
        IntegralGroup(n, l, free_rank=r[l], torsion=tuple(torsion[l]))
        for l in range(n + 1)
    ]


@dataclass
class IntegralTable:
    nmax: int
    groups: dict[tuple[int, int], IntegralGroup] = field(default_factory=dict)

    def __getitem__(self, key: tuple[int, int]) -> IntegralGroup:
        return self.groups[key]

    def degree(self, n: int) -> list[IntegralGroup]:
        return [self.groups[n, l] for l in range(n + 1)]

    def to_json(self) -> dict:
        return {
            "coeff": "z",
            "nmax": self.nmax,
            "degrees": [
                {
                    "n": n,
                    "coeff": "z",
                    "groups": [g.to_json() for g in self.degree(n)],
                }
                for n in range(self.nmax + 1)
            ],
        }


def integral_table(
    nmax: int,
    *,
    jobs: int = 1,
    cache: ResultCache | None = None,
    progress: ProgressCallback | None = None,
) -> IntegralTable:
    rational = compute_table(RATIONALS, nmax, jobs=jobs, cache=cache, progress=progress)
    modular = {
        p: compute_table(
            CoeffRing.prime_field(p), nmax, jobs=jobs, cache=cache, progress=progress
        )
        for p in primerange(2, nmax + 1)
    }
    table = IntegralTable(nmax)
    for n in range(nmax + 1):
        groups = integral_assembly(
            n,
            [p for p in modular if p <= n],
            rational=rational.degree(n),
            modular={p: t.degree(n) for p, t in modular.items() if p <= n},
        )
        for g in groups:
            table.groups[n, g.l] = g
    return table


def in_local_family(index: int, m: int, p: int = 0) -> bool:
    """Whether phi_index is a unit-free factor in the localization at phi_m.

    Over Q this is ``index == m``; over F_p it is ``index = m p^i``.
    """
    if p == 0:
        return index == m
    if m % p == 0:
        msg = f"Local families over F_{p} are indexed by m prime to {p}, got {m}"
        raise ValueError(msg)
    return not invertible_in_localization(index, m, p) and index % m == 0


def localized_components(
    groups: list[HomologyGroup], m: int
) -> dict[int, CyclotomicTorsion]:
    """The phi_m-local part of each group, keyed by ``l``."""
    return {
        g.l: g.torsion.restrict(
            lambda index: in_local_family(index, m, g.coeff.characteristic)
        )
        for g in groups
    }


def annihilated_by_factorial(group: HomologyGroup) -> bool:
    """Whether ``[n]!`` kills the group, i.e. it is torsion and each phi_m^e divides ``[n]!``."""
    if group.free_rank:
        return False
    factorial = q_factorial(group.n, group.coeff)
    return all(
        not factorial % cyclotomic_in(m, group.coeff) ** e
        for m, e, _ in group.torsion.summands
    )


def stable_family(coeff: CoeffRing) -> int:
    """Index of the localization carrying the stable homology."""
    return 1 if coeff.characteristic == 2 else 2  # noqa: PLR2004


def first_torsion(
    p: int, table: HomologyTable, q_table: HomologyTable
) -> tuple[int, int]:
    """First ``(n, l)`` where the mod-p dimension exceeds the rational one."""
    if table.coeff != CoeffRing.prime_field(p) or q_table.coeff != RATIONALS:
        msg = f"Expected tables over F_{p} and Q"
        raise ValueError(msg)
    nmax = min(table.nmax, q_table.nmax)
    for n in range(nmax + 1):
        for l in range(n + 1):
            if table.dimension(n, l) > q_table.dimension(n, l):
                return n, l
    msg = f"No {p}-torsion up to n = {nmax}"
    raise NotFound(msg)


def stability_scan(table: HomologyTable) -> dict[int, int]:
    """Per ``l``, the smallest n from which the stable local part stays constant.

    Only the computed range is scanned; the result is an observation.
    """
    m = stable_family(table.coeff)
    scan = {}
    for l in range(table.nmax + 1):
        start = max(l, 2)
        if start > table.nmax:
            continue

        def local(n: int, l: int = l) -> CyclotomicTorsion:
            return localized_components([table[n, l]], m)[l]

        last = local(table.nmax)
        n0 = table.nmax
        while n0 - 1 >= start and local(n0 - 1) == last:
            n0 -= 1
        scan[l] = n0
    return scan


@dataclass(frozen=True)
class EulerCheck:
    n: int
    coeff: CoeffRing
    m: int
    direct: tuple[int, ...]
    predicted: tuple[int, ...]
    chain_characteristic: int

    @property
    def homology_characteristic(self) -> int:
        return sum((-1) ** k * d for k, d in enumerate(self.direct))

    @property
    def ok(self) -> bool:
        return (
            self.direct == self.predicted
            and self.homology_characteristic == self.chain_characteristic
        )


def _evaluate(matrix: SparseMatrix, root: int, coeff: CoeffRing) -> int:
    domain = coeff.domain
    if not matrix.nrows or not matrix.ncols:
        return 0
    dense = [[domain.zero] * matrix.ncols for _ in range(matrix.nrows)]
    for i, row in matrix.rows.items():
        for j, v in row.items():
            dense[i][j] = v(domain(root))
    return DomainMatrix(dense, matrix.shape, domain).rank()


def euler_characteristic(
    n: int,
    coeff: CoeffRing,
    m: int,
    groups: list[HomologyGroup] | None = None,
) -> EulerCheck:
    """Compare the cohomology of the complex reduced modulo phi_m with the
    universal coefficient prediction from ``groups``.

    Only the linear cyclotomics phi_1 and phi_2 are supported, so that
    ``K(m)`` is the ground field and reduction is evaluation at ``q = ±1``.
    """
    _require_field(coeff)
    if m not in (1, 2):
        msg = f"Reduction is implemented for phi_1 and phi_2 only, got phi_{m}"
        raise ValueError(msg)
    if n < 2:  # noqa: PLR2004
        msg = f"Expected n >= 2, got {n}"
        raise ValueError(msg)
    root = 1 if m == 1 else -1
    groups = compute_homology(n, coeff) if groups is None else groups
    by_k = {n - g.l: g for g in groups}

    def vanishing(g: HomologyGroup) -> int:
        hits = sum(
            k for index, _, k in g.torsion.summands
            if not cyclotomic_in(index, coeff)(coeff.domain(root))
        )
        return g.free_rank + hits

    cochains = braid_cochain_complex(n, coeff)
    ranks = {
        k: _evaluate(d, root, coeff) for k, d in cochains.differentials.items()
    }
    direct, predicted = [], []
    for k in range(n + 1):
        size = cochains.chains.rank(k)
        direct.append(size - ranks.get(k, 0) - ranks.get(k - 1, 0))
        tor = vanishing(by_k[k + 1]) - by_k[k + 1].free_rank if k + 1 in by_k else 0
        predicted.append(vanishing(by_k[k]) + tor)
    chain = sum((-1) ** k * cochains.chains.rank(k) for k in range(n + 1))
    return EulerCheck(n, coeff, m, tuple(direct), tuple(predicted), chain)
