from __future__ import annotations

import random

import pytest

from braidq._complexes import braid_cochain_complex
from braidq._errors import NotAComplex, UnfactoredResidual
from braidq._exactla import (
    CyclotomicTorsion,
    IntegerDomain,
    PolynomialDomain,
    SparseMatrix,
    diagonalize,
    factor_into_cyclotomics,
    homology_of_pair,
    rank_mod_p,
    smith_normal_form,
)
from braidq._qarith import INTEGERS, RATIONALS, CoeffRing, q_binomial

F2 = CoeffRing.prime_field(2)
F3 = CoeffRing.prime_field(3)


def test_smith_normal_form_integers() -> None:
    snf = smith_normal_form(SparseMatrix.from_dense([[2, 4], [6, 8]], IntegerDomain()))
    assert snf.divisors == [2, 4]
    assert snf.rank == 2


def test_smith_normal_form_makes_divisibility_chain() -> None:
    snf = smith_normal_form(SparseMatrix.from_dense([[2, 0], [0, 3]], IntegerDomain()))
    assert snf.divisors == [1, 6]
    assert snf.torsion == [6]


def test_smith_normal_form_rank_deficient() -> None:
    m = SparseMatrix.from_dense([[1, 2, 3], [2, 4, 6]], IntegerDomain())
    assert smith_normal_form(m).divisors == [1]


def test_smith_normal_form_laurent_normalizes() -> None:
    q = RATIONALS.ring.gens[0]
    domain = PolynomialDomain(RATIONALS)
    m = SparseMatrix.from_dense([[2 * q**3 + 2 * q**2, q**2], [0, 0]], domain)
    # q^2 is a unit in K[q^{±1}]
    assert smith_normal_form(m).divisors == [RATIONALS.ring.one]


def test_smith_normal_form_over_polynomials() -> None:
    q = RATIONALS.ring.gens[0]
    domain = PolynomialDomain(RATIONALS)
    m = SparseMatrix.from_dense([[q + 1, 0], [0, q**2 - 1]], domain)
    snf = smith_normal_form(m)
    assert snf.divisors == [q + 1, q**2 - 1]


def test_diagonalize_transforms() -> None:
    q, one = RATIONALS.ring.gens[0], RATIONALS.ring.one
    domain = PolynomialDomain(RATIONALS)
    m = SparseMatrix.from_dense(
        [[q, q + 1, one], [q**2, one, q], [2 * q, 0, 3 * one]], domain
    )
    diag = diagonalize(m, transforms=True)
    assert diag.U is not None
    assert diag.U_inv is not None
    assert diag.V is not None
    reduced = diag.U @ m @ diag.V
    assert reduced.rows == {r: {c: v} for r, c, v in diag.pivots}
    assert (diag.U_inv @ diag.U).rows == SparseMatrix.identity(3, domain).rows


def test_diagonalize_rejects_integer_polynomials() -> None:
    q = INTEGERS.ring.gens[0]
    m = SparseMatrix.from_dense([[q + 1]], PolynomialDomain(INTEGERS))
    with pytest.raises(ValueError, match="Euclidean only over a field"):
        diagonalize(m)


def test_factor_into_cyclotomics_rationals() -> None:
    q = RATIONALS.ring.gens[0]
    torsion = factor_into_cyclotomics((q**2 - 1) * (q**2 + q + 1), 6)
    assert torsion.summands == ((1, 1, 1), (2, 1, 1), (3, 1, 1))


def test_factor_into_cyclotomics_prefers_phi2_over_f2() -> None:
    # phi_4 = phi_2^2 over F_2; the trial order reports the latter
    q = F2.ring.gens[0]
    assert factor_into_cyclotomics(q**2 + 1, 10).pairs() == [(2, 2)]


def test_factor_into_cyclotomics_phi1_last() -> None:
    q = F3.ring.gens[0]
    assert factor_into_cyclotomics((q - 1) ** 3, 6).pairs() == [(1, 1), (3, 1)]


def test_factor_into_cyclotomics_residual() -> None:
    q = RATIONALS.ring.gens[0]
    with pytest.raises(UnfactoredResidual):
        factor_into_cyclotomics(q**2 + 2, 6)


def test_cyclotomic_torsion() -> None:
    torsion = CyclotomicTorsion.from_pairs([(2, 1), (3, 1), (2, 1)])
    assert torsion.summands == ((2, 1, 2), (3, 1, 1))
    assert torsion.dimension() == 4
    assert torsion.restrict(lambda m: m == 3).summands == ((3, 1, 1),)
    assert not CyclotomicTorsion()


def test_homology_of_pair() -> None:
    q = RATIONALS.ring.gens[0]
    domain = PolynomialDomain(RATIONALS)
    d_in = SparseMatrix.from_dense([[q + 1]], domain)
    d_out = SparseMatrix.zeros(0, 1, domain)
    presentation = homology_of_pair(d_in, d_out)
    assert presentation.free_rank == 0
    assert presentation.cyclotomic(4).pairs() == [(2, 1)]


def test_homology_of_pair_free() -> None:
    domain = PolynomialDomain(RATIONALS)
    d_in = SparseMatrix.zeros(2, 0, domain)
    d_out = SparseMatrix.zeros(0, 2, domain)
    assert homology_of_pair(d_in, d_out).free_rank == 2


def test_homology_of_pair_not_a_complex() -> None:
    one = RATIONALS.ring.one
    domain = PolynomialDomain(RATIONALS)
    d_in = SparseMatrix.from_dense([[one]], domain)
    d_out = SparseMatrix.from_dense([[one]], domain)
    with pytest.raises(NotAComplex):
        homology_of_pair(d_in, d_out)


@pytest.mark.parametrize(
    ("rows", "p", "expected"),
    [
        ([[1, 1], [1, 1]], 2, 1),
        ([[1, 2], [2, 1]], 3, 1),
        ([[1, 2], [2, 1]], 5, 2),
        ([[2, 4], [6, 8]], 2, 0),
        ([], 2, 0),
    ],
)
def test_rank_mod_p(rows: list[list[int]], p: int, expected: int) -> None:
    assert rank_mod_p(rows, 2, p) == expected


def random_unimodular(
    rng: random.Random, size: int, domain: PolynomialDomain
) -> SparseMatrix:
    """A product of elementary row operations and a row permutation."""
    ring = domain.coeff.ring
    q = ring.gens[0]
    rows = [[ring.one if i == j else ring.zero for j in range(size)] for i in range(size)]
    for _ in range(3 * size):
        i, j = rng.sample(range(size), 2)
        factor = sum((rng.randint(-2, 2) * q**e for e in range(2)), ring.zero)
        rows[i] = [a + factor * b for a, b in zip(rows[i], rows[j])]
    rng.shuffle(rows)
    return SparseMatrix.from_dense(rows, domain)


def binomial_matrix(rng: random.Random, nrows: int, ncols: int, coeff: CoeffRing) -> list:
    return [
        [rng.choice([0, 1]) * q_binomial(rng.randint(2, 6), rng.randint(1, 2), coeff) for _ in range(ncols)]
        for _ in range(nrows)
    ]


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("coeff", [RATIONALS, F3])
def test_smith_normal_form_invariant_under_unimodular_change(
    seed: int, coeff: CoeffRing
) -> None:
    rng = random.Random(seed)
    domain = PolynomialDomain(coeff)
    m = SparseMatrix.from_dense(binomial_matrix(rng, 4, 5, coeff), domain)
    u, v = random_unimodular(rng, 4, domain), random_unimodular(rng, 5, domain)
    assert smith_normal_form(u @ m @ v).divisors == smith_normal_form(m).divisors


@pytest.mark.parametrize("seed", range(3))
def test_diagonalize_random_binomial_matrix(seed: int) -> None:
    rng = random.Random(seed)
    domain = PolynomialDomain(RATIONALS)
    m = SparseMatrix.from_dense(binomial_matrix(rng, 8, 7, RATIONALS), domain)
    diag = diagonalize(m, transforms=True)
    assert diag.U is not None
    assert diag.U_inv is not None
    assert diag.V is not None
    assert (diag.U @ m @ diag.V).rows == {r: {c: v} for r, c, v in diag.pivots}
    assert (diag.U_inv @ diag.U).rows == SparseMatrix.identity(8, domain).rows


def permuted(matrix: SparseMatrix, rows: list[int], cols: list[int]) -> SparseMatrix:
    return SparseMatrix(
        matrix.nrows,
        matrix.ncols,
        matrix.domain,
        {rows[i]: {cols[j]: v for j, v in row.items()} for i, row in matrix.rows.items()},
    )


@pytest.mark.parametrize(("n", "k"), [(5, 3), (6, 3), (6, 4)])
def test_homology_of_pair_ignores_basis_order(n: int, k: int) -> None:
    rng = random.Random(n * 10 + k)
    cochains = braid_cochain_complex(n, F2)
    d_in, d_out = cochains.incoming(k), cochains.outgoing(k)
    before, middle, after = (
        rng.sample(range(size), size) for size in (d_in.ncols, d_in.nrows, d_out.nrows)
    )
    shuffled = homology_of_pair(
        permuted(d_in, middle, before), permuted(d_out, after, middle)
    )
    assert shuffled == homology_of_pair(d_in, d_out)


def test_homology_of_pair_four_strands_f2() -> None:
    # H_2 of the four-strand braid group sits at cochain index 4 - 2
    cochains = braid_cochain_complex(4, F2)
    presentation = homology_of_pair(cochains.incoming(2), cochains.outgoing(2))
    assert presentation.free_rank == 0
    assert presentation.cyclotomic(4).pairs() == [(2, 2)]
