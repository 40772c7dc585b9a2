"""Verification suites run by ``braidq verify``.

Each check returns a :class:`CheckResult`; a suite passes when all its checks
do. Internal inconsistencies are not caught here and reach the CLI.
"""

from __future__ import annotations

import functools
import time
import typing
from dataclasses import dataclass, field

from sympy import divisors, isprime, primerange

from . import _closedform as closedform
from ._homology import (
    HomologyTable,
    IntegralTable,
    annihilated_by_factorial,
    bockstein,
    compute_table,
    euler_characteristic,
    first_torsion,
    integral_table,
    stability_scan,
    verify_no_p2_torsion,
)
from ._qarith import (
    INTEGERS,
    RATIONALS,
    CoeffRing,
    binomial_unit_table,
    cyclotomic,
    qlucas_predicts_unit,
    split_phi,
    verify_congruence,
    verify_cyclotomic_gcd,
)

if typing.TYPE_CHECKING:
    from ._cache import ResultCache

SUITES = ("lemmas", "bockstein", "closedform", "stable", "all")

# Largest cyclotomic index built by the congruence and splitting checks.
INDEX_CAP = 1000
# Largest index for the pairwise gcd classification.
GCD_CAP = 60
# Largest i + j in the q-Lucas comparison.
QLUCAS_TOTAL = 64


@dataclass
class CheckResult:
    name: str
    ok: bool
    seconds: float
    detail: str = ""


@dataclass
class VerifyOptions:
    coeff: CoeffRing
    nmax: int
    p: int | None = None
    mmax: int = 200
    jobs: int = 1
    cache: ResultCache | None = None
    primes: tuple[int, ...] = field(default=(2, 3, 5))

    def __post_init__(self) -> None:
        if self.p is not None and not isprime(self.p):
            msg = f"--p must be prime, got {self.p}"
            raise ValueError(msg)
        if self.mmax < 3:  # noqa: PLR2004
            msg = f"--mmax must be at least 3, got {self.mmax}"
            raise ValueError(msg)

    @property
    def selected_primes(self) -> tuple[int, ...]:
        if self.p is not None:
            return (self.p,)
        if self.coeff.kind == "prime_field":
            return (self.coeff.characteristic,)
        return self.primes


Check = typing.Callable[[], typing.Tuple[bool, str]]


class Verifier:
    def __init__(
        self,
        options: VerifyOptions,
        on_check: typing.Callable[[str], None] | None = None,
    ) -> None:
        self.options = options
        self.on_check = on_check
        self.results: list[CheckResult] = []

    @functools.lru_cache(maxsize=None)  # noqa: B019
    def table(self, coeff: CoeffRing) -> HomologyTable:
        return compute_table(
            coeff, self.options.nmax, jobs=self.options.jobs, cache=self.options.cache
        )

    @functools.cached_property
    def integral(self) -> IntegralTable:
        return integral_table(
            self.options.nmax, jobs=self.options.jobs, cache=self.options.cache
        )

    def check(self, name: str, run: Check) -> CheckResult:
        if self.on_check is not None:
            self.on_check(name)
        start = time.perf_counter()
        ok, detail = run()
        result = CheckResult(name, ok, time.perf_counter() - start, detail)
        self.results.append(result)
        return result

    def run(self, suite: str) -> list[CheckResult]:
        if suite not in SUITES:
            msg = f"Unknown suite '{suite}' (expected one of {', '.join(SUITES)})"
            raise ValueError(msg)
        suites = SUITES[:-1] if suite == "all" else (suite,)
        for name in suites:
            getattr(self, f"suite_{name}")()
        return self.results

    def suite_lemmas(self) -> None:
        mmax = self.options.mmax
        ring = INTEGERS.ring
        q = ring.gens[0]

        def product_formula() -> tuple[bool, str]:
            bad = []
            for m in range(1, mmax + 1):
                product = ring.one
                for d in divisors(m):
                    product *= cyclotomic(d)
                if product != q**m - 1:
                    bad.append(m)
            return not bad, f"m <= {mmax}" if not bad else f"fails at m = {bad}"

        def gcd_classification() -> tuple[bool, str]:
            pairs = 0
            for n in range(3, min(mmax, GCD_CAP) + 1):
                for m in range(2, n):
                    verify_cyclotomic_gcd(m, n)
                    pairs += 1
            return True, f"{pairs} pairs"

        def congruences() -> tuple[bool, str]:
            bad, count = [], 0
            for m, p, i in _tower_range():
                count += 1
                if not verify_congruence(m, p, i):
                    bad.append((m, p, i))
            return not bad, f"{count} cases" if not bad else f"fails at {bad}"

        def splittings() -> tuple[bool, str]:
            count = 0
            for m, p, j in _tower_range():
                for i in range(1 if m == 1 else 0, j):
                    split_phi(m, i, j, p)
                    count += 1
            return True, f"{count} splittings"

        def qlucas() -> tuple[bool, str]:
            bad = []
            for p in (2, 3, 5):
                for m in (1, 2, 3, 4, 5, 6):
                    if m % p == 0:
                        continue
                    table = binomial_unit_table(QLUCAS_TOTAL, p, m)
                    bad.extend(
                        (i, j, p, m)
                        for (i, j), unit in table.items()
                        if unit != qlucas_predicts_unit(i, j, p, m)
                    )
            return not bad, f"i + j <= {QLUCAS_TOTAL}" if not bad else f"fails at {bad[:5]}"

        self.check("cyclotomic product formula", product_formula)
        self.check("cyclotomic gcd classification", gcd_classification)
        self.check("cyclotomic congruence mod p", congruences)
        self.check("cyclotomic splitting", splittings)
        self.check("q-Lucas unit prediction", qlucas)

    def suite_bockstein(self) -> None:
        nmax = self.options.nmax
        fields = [RATIONALS, *(CoeffRing.prime_field(p) for p in self.options.selected_primes)]

        def h0() -> tuple[bool, str]:
            bad = [
                (n, coeff.label)
                for coeff in fields
                for n in range(2, nmax + 1)
                if self.table(coeff)[n, 0].torsion.pairs() != [(2, 1)]
            ]
            return not bad, "H_0 = φ_2" if not bad else f"fails at {bad}"

        def annihilation() -> tuple[bool, str]:
            bad = [
                (n, l, coeff.label)
                for coeff in fields
                for (n, l), g in self.table(coeff).groups.items()
                if n >= 2 and not annihilated_by_factorial(g)  # noqa: PLR2004
            ]
            return not bad, "torsion divides [n]!" if not bad else f"fails at {bad}"

        def euler() -> tuple[bool, str]:
            bad = [
                (n, coeff.label, m)
                for coeff in fields
                for n in range(2, nmax + 1)
                for m in (1, 2)
                if not euler_characteristic(n, coeff, m, self.table(coeff).degree(n)).ok
            ]
            return not bad, "phi_1 and phi_2 reductions" if not bad else f"fails at {bad}"

        self.check("H_0 = A/(q+1)", h0)
        self.check("annihilation by [n]!", annihilation)
        self.check("reduction at q = ±1", euler)

        rational = self.table(RATIONALS)
        for p in self.options.selected_primes:

            def no_p2(p: int = p) -> tuple[bool, str]:
                bad = []
                for n in range(2, nmax + 1):
                    beta = bockstein(n, p)
                    if not beta.squares_to_zero():
                        bad.append((n, "beta^2"))
                    elif not verify_no_p2_torsion(
                        n, p, beta=beta, rational=rational.degree(n)
                    ):
                        bad.append((n, "ranks"))
                return not bad, f"n <= {nmax}" if not bad else f"fails at {bad}"

            self.check(f"no {p}^2-torsion", no_p2)

        def assembly() -> tuple[bool, str]:
            predicted = closedform.oracle_integral_table(nmax)
            bad = [
                key for key, g in self.integral.groups.items() if predicted[key] != g
            ]
            torsion = sum(len(g.torsion) for g in self.integral.groups.values())
            return not bad, f"{torsion} torsion cells" if not bad else f"fails at {bad}"

        self.check("integral assembly", assembly)

    def suite_closedform(self) -> None:
        nmax = self.options.nmax
        coeffs = (
            [self.options.coeff]
            if self.options.coeff.kind != "integers"
            else [RATIONALS, *(CoeffRing.prime_field(p) for p in self.options.selected_primes)]
        )
        for coeff in coeffs:
            self.check(
                f"closed form matches direct over {coeff.label}",
                functools.partial(self._compare, coeff),
            )
            self.check(
                f"source/generator pairing over {coeff.label}",
                functools.partial(self._pairing, coeff),
            )
            self.check(
                f"free-type classes over {coeff.label}",
                functools.partial(self._free_type, coeff),
            )
            if coeff.kind == "prime_field":
                self.check(
                    f"symbolic Bockstein over {coeff.label}",
                    functools.partial(self._symbolic_bockstein, coeff.characteristic),
                )
        if self.options.coeff.kind == "integers":

            def integral() -> tuple[bool, str]:
                predicted = closedform.oracle_integral_table(nmax)
                bad = [
                    key for key, g in self.integral.groups.items()
                    if predicted[key] != g
                ]
                return not bad, f"n <= {nmax}" if not bad else f"fails at {bad}"

            self.check("closed form matches direct over Z", integral)

    def _compare(self, coeff: CoeffRing) -> tuple[bool, str]:
        report = closedform.compare_with_direct(coeff, self.options.nmax, self.table(coeff))
        if report.ok:
            return True, f"{report.cells} cells"
        shown = ", ".join(f"({m.n}, {m.l})" for m in report.mismatches[:5])
        return False, f"{len(report.mismatches)} mismatches: {shown}"

    def _pairing(self, coeff: CoeffRing) -> tuple[bool, str]:
        bad = {
            n: defects
            for n in range(2, self.options.nmax + 1)
            if (defects := closedform.pairing_defects(coeff, n))
        }
        return not bad, "w(l + 1) = v(l)" if not bad else f"fails at {bad}"

    def _free_type(self, coeff: CoeffRing) -> tuple[bool, str]:
        rational = self.table(RATIONALS)
        bad, count = [], 0
        for n in range(2, self.options.nmax + 1):
            for m, _, _ in closedform.classified(coeff, n):
                h = closedform.free_type_index(m, coeff)
                if h is None:
                    continue
                count += 1
                if h not in {index for index, _, _ in rational[n, m.dimension].torsion.summands}:
                    bad.append(str(m))
        return not bad, f"{count} classes" if not bad else f"fails at {bad[:5]}"

    def _symbolic_bockstein(self, p: int) -> tuple[bool, str]:
        field_ = CoeffRing.prime_field(p)
        bad = []
        for n in range(2, self.options.nmax + 1):
            for l in range(n + 1):
                bad.extend(
                    (n, str(m))
                    for m in closedform.enumerate_basis(field_, n, l)
                    if not closedform.bockstein_squares_to_zero(m, p)
                )
            bad.extend(
                (n, l)
                for l, (homology, rational) in closedform.bockstein_echo(p, n).items()
                if homology != rational
            )
        return not bad, "squares to zero, echoes Q" if not bad else f"fails at {bad[:5]}"

    def suite_stable(self) -> None:
        nmax = self.options.nmax
        rational = self.table(RATIONALS)

        for p in self.options.selected_primes:
            field_ = CoeffRing.prime_field(p)

            def first(p: int = p, field_: CoeffRing = field_) -> tuple[bool, str]:
                expected = (2 * p + 2, 2 * p - 2)
                generator = closedform.first_torsion_generator(p)
                if expected[0] > nmax:
                    return True, f"beyond n = {nmax}"
                found = first_torsion(p, self.table(field_), rational)
                listed = generator in closedform.enumerate_basis(field_, *expected)
                ok = found == expected and listed
                return ok, f"first {p}-torsion at {found}: {generator}"

            def cross(field_: CoeffRing = field_) -> tuple[bool, str]:
                pairs = closedform.stable_cross_check(
                    self.table(field_), lmax=min(3, (nmax - 2) // 2)
                )
                bad = [l for l, (local, stable) in pairs.items() if local != stable]
                shown = ", ".join(f"H_{l} {a}/{b}" for l, (a, b) in pairs.items())
                return not bad, shown

            def scan(field_: CoeffRing = field_) -> tuple[bool, str]:
                found = stability_scan(self.table(field_))
                return True, ", ".join(f"H_{l} from n={n0}" for l, n0 in found.items())

            self.check(f"first {p}-torsion", first)
            self.check(f"stable range over F_{p}", cross)
            self.check(f"observed stabilization over F_{p}", scan)

        def stable_q() -> tuple[bool, str]:
            pairs = closedform.stable_cross_check(rational)
            return all(a == b for a, b in pairs.values()), "concentrated in H_0"

        def integral() -> tuple[bool, str]:
            primes = list(primerange(2, nmax + 1))
            bad = []
            for l in range(max(nmax // 2 - 1, 0) + 1):
                expected = closedform.stable_integral_torsion(l, primes)
                found = dict(self.integral[nmax, l].torsion)
                if expected != found:
                    bad.append((l, expected, found))
            return not bad, f"l <= {nmax // 2 - 1}" if not bad else f"fails at {bad}"

        self.check("stable range over Q", stable_q)
        self.check("stable integral torsion", integral)


def _tower_range() -> typing.Iterator[tuple[int, int, int]]:
    for p in (2, 3, 5, 7):
        for m in range(1, 21):
            if m % p == 0:
                continue
            for i in range(1, 4):
                if m * p**i <= INDEX_CAP:
                    yield m, p, i


def run_suite(
    suite: str,
    options: VerifyOptions,
    on_check: typing.Callable[[str], None] | None = None,
) -> list[CheckResult]:
    return Verifier(options, on_check).run(suite)
