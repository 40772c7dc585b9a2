from __future__ import annotations

import dataclasses

import pytest

from braidq import _verify, cli
from braidq._exactla import CyclotomicTorsion
from braidq._homology import HomologyGroup, IntegralGroup, compute_table, integral_table
from braidq._qarith import RATIONALS, CoeffRing
from braidq._verify import CheckResult, VerifyOptions, run_suite


def by_name(results: list[CheckResult]) -> dict[str, CheckResult]:
    return {r.name: r for r in results}


def test_verify_defaults() -> None:
    assert VerifyOptions(RATIONALS, 4).mmax == 200
    (mmax,) = [p for p in cli.commands["verify"].params if p.name == "mmax"]
    assert mmax.default == 200


def test_lemmas_report_bounds() -> None:
    results = by_name(run_suite("lemmas", VerifyOptions(RATIONALS, 4, mmax=12)))
    assert all(r.ok for r in results.values())
    assert results["cyclotomic product formula"].detail == "m <= 12"
    assert results["q-Lucas unit prediction"].detail == f"i + j <= {_verify.QLUCAS_TOTAL}"
    assert _verify.QLUCAS_TOTAL == 64


def test_bockstein_suite_passes() -> None:
    results = by_name(run_suite("bockstein", VerifyOptions(RATIONALS, 5, p=2)))
    assert results["annihilation by [n]!"].ok
    assert results["integral assembly"].ok
    assert results["no 2^2-torsion"].ok


def test_annihilation_check_detects_extra_torsion(monkeypatch: pytest.MonkeyPatch) -> None:
    def tampered(coeff: CoeffRing, nmax: int, **kwargs: object):  # noqa: ANN202
        table = compute_table(coeff, nmax)
        if coeff != RATIONALS:
            return table
        bad = HomologyGroup(5, 2, RATIONALS, 0, CyclotomicTorsion.from_pairs([(3, 2)]))
        return dataclasses.replace(table, groups={**table.groups, (5, 2): bad})

    monkeypatch.setattr("braidq._verify.compute_table", tampered)
    results = by_name(run_suite("bockstein", VerifyOptions(RATIONALS, 5, p=2)))
    check = results["annihilation by [n]!"]
    assert not check.ok
    assert "(5, 2, 'Q')" in check.detail


def test_integral_assembly_check_detects_mismatch(monkeypatch: pytest.MonkeyPatch) -> None:
    def tampered(nmax: int, **kwargs: object):  # noqa: ANN202
        table = integral_table(nmax)
        return dataclasses.replace(
            table, groups={**table.groups, (5, 3): IntegralGroup(5, 3, free_rank=3)}
        )

    monkeypatch.setattr("braidq._verify.integral_table", tampered)
    results = by_name(run_suite("bockstein", VerifyOptions(RATIONALS, 5, p=2)))
    check = results["integral assembly"]
    assert not check.ok
    assert "(5, 3)" in check.detail
