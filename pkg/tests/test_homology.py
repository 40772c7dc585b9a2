from __future__ import annotations

import functools
import pathlib

import pytest
from inline_snapshot import snapshot

from braidq._cache import ResultCache, dump_json
from braidq._errors import InconsistentRanks, NotFound
from braidq._exactla import CyclotomicTorsion, homology_of_pair
from braidq._homology import (
    HomologyGroup,
    HomologyTable,
    annihilated_by_factorial,
    assemble_integral,
    bockstein,
    compute_homology,
    compute_table,
    euler_characteristic,
    first_torsion,
    groups_to_json,
    integral_assembly,
    integral_table,
    localized_components,
    stability_scan,
    verify_no_p2_torsion,
)
from braidq._qarith import INTEGERS, RATIONALS, CoeffRing
from braidq._render import field_cell, integral_cell

SELF_DIR = pathlib.Path(__file__).parent
F2 = CoeffRing.prime_field(2)
F3 = CoeffRing.prime_field(3)
F5 = CoeffRing.prime_field(5)


def golden_cells(name: str) -> dict[tuple[int, int], str]:
    lines = (SELF_DIR / "golden" / name).read_text(encoding="utf-8").splitlines()
    columns = [int(c) for c in lines[2].split("|")[1:]]
    cells = {}
    for line in lines[3:]:
        label, *row = (c.strip() for c in line.split("|"))
        for n, text in zip(columns, row):
            cells[n, int(label[2:])] = text
    return cells


@functools.lru_cache(maxsize=None)
def table(spec: str, nmax: int) -> HomologyTable:
    return compute_table(CoeffRing.try_from_specifier(spec), nmax)


def torsion(*pairs: tuple[int, int]) -> CyclotomicTorsion:
    return CyclotomicTorsion.from_pairs(pairs)


def test_compute_homology_two_strands() -> None:
    assert compute_homology(2, RATIONALS) == [
        HomologyGroup(2, 0, RATIONALS, 0, torsion((2, 1))),
        HomologyGroup(2, 1, RATIONALS),
        HomologyGroup(2, 2, RATIONALS),
    ]


def test_compute_homology_trivial_groups() -> None:
    assert compute_homology(1, F2) == [
        HomologyGroup(1, 0, F2, free_rank=1),
        HomologyGroup(1, 1, F2),
    ]


def test_compute_homology_requires_field() -> None:
    with pytest.raises(ValueError, match="integral_assembly"):
        compute_homology(3, INTEGERS)


def test_compute_homology_reduces_each_pair(monkeypatch: pytest.MonkeyPatch) -> None:
    calls = []

    def spy(d_in: object, d_out: object, **kwargs: object) -> object:
        calls.append(kwargs["snf_in"] is not None)
        return homology_of_pair(d_in, d_out, **kwargs)

    monkeypatch.setattr("braidq._homology.homology_of_pair", spy)
    groups = compute_homology(4, F2)
    # no incoming map at k = 0
    assert calls == [True, True, True, True, False]
    assert [g.torsion.pairs() for g in groups] == [[(2, 1)], [(3, 1)], [(2, 2)], [], []]


@pytest.mark.parametrize(
    ("spec", "n", "l", "expected"),
    [
        ("fp:2", 6, 2, torsion((2, 1), (3, 1))),
        ("fp:2", 6, 3, torsion((2, 1), (5, 1))),
        ("fp:3", 6, 4, torsion((2, 2))),
        ("q", 6, 4, torsion((6, 1))),
        ("q", 4, 2, torsion((4, 1))),
    ],
)
def test_compute_homology_cells(spec: str, n: int, l: int, expected: CyclotomicTorsion) -> None:  # noqa: E741
    groups = compute_homology(n, CoeffRing.try_from_specifier(spec))
    assert groups[l].torsion == expected
    assert groups[l].free_rank == 0


@pytest.mark.parametrize(
    ("spec", "golden"),
    [("fp:2", "table_fp2.txt"), ("fp:3", "table_fp3.txt"), ("q", "table_q.txt")],
)
def test_table_matches_golden(spec: str, golden: str) -> None:
    cells = golden_cells(golden)
    result = table(spec, 8)
    for n in range(2, 9):
        for l in range(n + 1):
            assert field_cell(result[n, l]) == cells[n, l], (n, l)


@pytest.mark.slow
@pytest.mark.parametrize(
    ("spec", "golden"),
    [("fp:2", "table_fp2.txt"), ("fp:3", "table_fp3.txt"), ("q", "table_q.txt")],
)
def test_table_matches_golden_large(spec: str, golden: str) -> None:
    cells = golden_cells(golden)
    result = table(spec, 10)
    for n in (9, 10):
        for l in range(n + 1):
            assert field_cell(result[n, l]) == cells.get((n, l), "."), (n, l)


def test_degree_json() -> None:
    data = groups_to_json(2, F2, compute_homology(2, F2))
    assert dump_json(data) == snapshot("""\
{
  "coeff": "fp:2",
  "groups": [
    {
      "free_rank": 0,
      "l": 0,
      "torsion": [
        {
          "e": 1,
          "m": 2,
          "mult": 1
        }
      ]
    },
    {
      "free_rank": 0,
      "l": 1,
      "torsion": []
    },
    {
      "free_rank": 0,
      "l": 2,
      "torsion": []
    }
  ],
  "n": 2
}
""")


def test_compute_table_uses_cache(tmp_path: pathlib.Path) -> None:
    cache = ResultCache(tmp_path, version="test")
    calls = []

    def progress(n: int, coeff: CoeffRing, seconds: float, cached: bool) -> None:  # noqa: ARG001, FBT001
        calls.append((n, cached))

    first = compute_table(F2, 4, cache=cache, progress=progress)
    assert calls == [(2, False), (3, False), (4, False)]
    calls.clear()
    second = compute_table(F2, 4, cache=cache, progress=progress)
    assert calls == [(2, True), (3, True), (4, True)]
    assert first.groups == second.groups


def test_compute_table_in_parallel() -> None:
    assert compute_table(F2, 5, jobs=2).groups == table("fp:2", 5).groups


def test_bockstein_rank() -> None:
    beta = bockstein(6, 2)
    assert beta.dims[2] == 3
    assert beta.dims[3] == 5
    assert beta.rank(3) == 1
    assert beta.squares_to_zero()


@pytest.mark.parametrize(("n", "p"), [(4, 2), (5, 2), (6, 2), (5, 3), (6, 3), (5, 5), (6, 5)])
def test_no_p2_torsion(n: int, p: int) -> None:
    beta = bockstein(n, p)
    assert beta.squares_to_zero()
    assert verify_no_p2_torsion(n, p, beta=beta)


@pytest.mark.slow
@pytest.mark.parametrize("p", [2, 3, 5])
def test_no_p2_torsion_large(p: int) -> None:
    rational = table("q", 10)
    for n in range(2, 11):
        beta = bockstein(n, p)
        assert beta.squares_to_zero(), n
        assert verify_no_p2_torsion(n, p, beta=beta, rational=rational.degree(n)), n


def test_integral_assembly() -> None:
    groups = integral_assembly(6)
    assert [(g.free_rank, g.torsion) for g in groups] == [
        (1, ()),
        (0, ()),
        (2, ((2, 1),)),
        (4, ()),
        (2, ()),
        (0, ()),
        (0, ()),
    ]


def test_assemble_integral_rejects_negative_multiplicity() -> None:
    rational = [HomologyGroup(2, 0, RATIONALS, 0, torsion((2, 1)))] + [
        HomologyGroup(2, l, RATIONALS) for l in (1, 2)
    ]
    modular = {2: [HomologyGroup(2, l, F2) for l in range(3)]}
    with pytest.raises(InconsistentRanks):
        assemble_integral(2, rational, modular)


def test_integral_table_matches_golden() -> None:
    cells = golden_cells("table_z.txt")
    result = integral_table(8)
    for n in range(2, 9):
        for l in range(n + 1):
            assert integral_cell(result[n, l]) == cells[n, l], (n, l)


@pytest.mark.slow
def test_integral_table_matches_golden_large() -> None:
    cells = golden_cells("table_z.txt")
    result = integral_table(10)
    for n in (9, 10):
        for l in range(n + 1):
            assert integral_cell(result[n, l]) == cells[n, l], (n, l)


def test_localized_components() -> None:
    local = localized_components(compute_homology(6, F2), 3)
    assert {l: t.pairs() for l, t in local.items() if t} == {2: [(3, 1)], 4: [(3, 1)]}
    local = localized_components(compute_homology(6, RATIONALS), 6)
    assert {l: t.pairs() for l, t in local.items() if t} == {4: [(6, 1)]}


def local_indices(coeff: CoeffRing, n: int) -> list[int]:
    p = coeff.characteristic
    return [m for m in range(1, n + 1) if not p or m % p]


def assert_localized_partition(coeff: CoeffRing, n: int) -> None:
    groups = compute_homology(n, coeff)
    parts = [localized_components(groups, m) for m in local_indices(coeff, n)]
    for g in groups:
        pairs = [pair for local in parts for pair in local[g.l].pairs()]
        assert sorted(pairs) == sorted(g.torsion.pairs()), (n, g.l)


@pytest.mark.parametrize("coeff", [RATIONALS, F2, F3, F5])
def test_localized_components_partition(coeff: CoeffRing) -> None:
    for n in range(2, 9):
        assert_localized_partition(coeff, n)


@pytest.mark.slow
@pytest.mark.parametrize("coeff", [RATIONALS, F2, F3])
def test_localized_components_partition_large(coeff: CoeffRing) -> None:
    for n in (9, 10):
        assert_localized_partition(coeff, n)


@pytest.mark.parametrize("spec", ["q", "fp:2", "fp:3", "fp:5"])
def test_groups_annihilated_by_factorial(spec: str) -> None:
    for (n, degree), g in table(spec, 8).groups.items():
        if n >= 2:
            assert annihilated_by_factorial(g), (n, degree)


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["q", "fp:2", "fp:3", "fp:5"])
def test_groups_annihilated_by_factorial_large(spec: str) -> None:
    for (n, degree), g in table(spec, 10).groups.items():
        if n >= 2:
            assert annihilated_by_factorial(g), (n, degree)


@pytest.mark.parametrize(
    ("group", "expected"),
    [
        (HomologyGroup(5, 2, RATIONALS, 0, torsion((3, 1))), True),
        (HomologyGroup(5, 2, RATIONALS, 0, torsion((3, 2))), False),
        (HomologyGroup(4, 2, F2, 0, torsion((2, 2))), True),
        (HomologyGroup(3, 1, F2, 0, torsion((5, 1))), False),
        (HomologyGroup(1, 0, RATIONALS, 1), False),
    ],
)
def test_annihilated_by_factorial(group: HomologyGroup, expected: bool) -> None:
    assert annihilated_by_factorial(group) is expected


@pytest.mark.parametrize(("p", "expected"), [(2, (6, 2)), (3, (8, 4))])
def test_first_torsion(p: int, expected: tuple[int, int]) -> None:
    assert first_torsion(p, table(f"fp:{p}", 8), table("q", 8)) == expected


@pytest.mark.slow
def test_first_torsion_five() -> None:
    assert first_torsion(5, table("fp:5", 12), table("q", 12)) == (12, 8)


def test_first_torsion_not_found() -> None:
    with pytest.raises(NotFound):
        first_torsion(3, table("fp:3", 5), table("q", 5))


def test_stability_scan() -> None:
    scan = stability_scan(table("fp:2", 8))
    assert scan[0] == 2
    assert scan[1] == 2
    assert scan[2] == 6


@pytest.mark.parametrize(
    ("n", "spec", "m"), [(5, "fp:2", 1), (6, "q", 2), (6, "fp:3", 2), (4, "q", 1)]
)
def test_euler_characteristic(n: int, spec: str, m: int) -> None:
    check = euler_characteristic(n, CoeffRing.try_from_specifier(spec), m)
    assert check.ok, check
