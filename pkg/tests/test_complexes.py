from __future__ import annotations

import math
import random
import typing

import pytest

from braidq._complexes import (
    Bigrading,
    Cochain,
    GradedComplex,
    boundary_matrix,
    braid_cochain_complex,
    coboundary,
    concat_product,
    enumerate_compositions,
    generator_x1,
    is_cocycle,
    merges,
)
from braidq._exactla import SparseMatrix, diagonalize, homology_of_pair
from braidq._qarith import INTEGERS, RATIONALS, CoeffRing, cyclotomic_in, q_binomial

if typing.TYPE_CHECKING:
    from sympy.polys.rings import PolyElement as Poly


def test_enumerate_compositions() -> None:
    assert enumerate_compositions(4, 2) == ((1, 3), (2, 2), (3, 1))
    assert enumerate_compositions(3, 3) == ((1, 1, 1),)
    assert enumerate_compositions(0, 0) == ((),)
    assert enumerate_compositions(3, 0) == ()


@pytest.mark.parametrize("n", range(1, 9))
def test_enumerate_compositions_count(n: int) -> None:
    for k in range(1, n + 1):
        assert len(enumerate_compositions(n, k)) == math.comb(n - 1, k - 1)


def test_enumerate_compositions_invalid() -> None:
    with pytest.raises(ValueError, match="0 <= k <= n"):
        enumerate_compositions(3, 4)


def test_merges_alternate_sign() -> None:
    assert list(merges((1, 2, 3))) == [(1, (3, 3)), (-1, (1, 5))]


def test_boundary_matrix_n3() -> None:
    q = RATIONALS.ring.gens[0]
    top = boundary_matrix(3, 3, RATIONALS)
    assert top.shape == (2, 1)
    # rows (1, 2) and (2, 1); merging the first pair is positive
    assert top.to_dense() == [[-(1 + q)], [1 + q]]

    middle = boundary_matrix(3, 2, RATIONALS)
    assert middle.to_dense() == [[q**2 + q + 1, q**2 + q + 1]]


@pytest.mark.parametrize("n", range(2, 7))
def test_boundary_squares_to_zero(n: int) -> None:
    for k in range(2, n + 1):
        product = boundary_matrix(n, k - 1, INTEGERS) @ boundary_matrix(n, k, INTEGERS)
        assert product.is_zero(), (n, k)


def test_graded_complex_json() -> None:
    data = GradedComplex.build(2, RATIONALS).to_json()
    assert data == {
        "n": 2,
        "coeff": "q",
        "bases": [
            {"k": 0, "compositions": []},
            {"k": 1, "compositions": [[2]]},
            {"k": 2, "compositions": [[1, 1]]},
        ],
        "boundaries": [
            {"k": 1, "shape": [0, 1], "entries": []},
            {"k": 2, "shape": [1, 1], "entries": [[0, 0, ["1", "1"]]]},
        ],
    }


def test_cochain_complex_shapes() -> None:
    cochains = braid_cochain_complex(4, RATIONALS)
    assert sorted(cochains.differentials) == [0, 1, 2, 3]
    for k, delta in cochains.differentials.items():
        assert delta.shape == (cochains.chains.rank(k + 1), cochains.chains.rank(k))
    assert cochains.incoming(0).shape == (0, 0)
    assert cochains.outgoing(4).shape == (0, 1)
    assert cochains.bigrading(1).l == 3


def test_bigrading() -> None:
    assert Bigrading(5, 2).l == 3
    with pytest.raises(ValueError, match="0 <= k <= n"):
        Bigrading(2, 3)


def test_generator_x1_is_cocycle() -> None:
    x1 = generator_x1(RATIONALS)
    assert is_cocycle(x1)
    assert concat_product(x1, x1).values == {(1, 1): RATIONALS.ring.one}


@pytest.mark.parametrize("coeff", [RATIONALS, CoeffRing.prime_field(2)])
def test_coboundary_squares_to_zero(coeff: CoeffRing) -> None:
    f = Cochain(5, 2, coeff, {(2, 3): coeff.ring.one, (4, 1): coeff.ring.gens[0]})
    assert coboundary(coboundary(f)).is_zero()


def test_coboundary_is_dual_to_boundary() -> None:
    f = Cochain(3, 1, RATIONALS, {(3,): RATIONALS.ring.one})
    assert coboundary(f).values == {
        (1, 2): q_binomial(3, 1, RATIONALS),
        (2, 1): q_binomial(3, 2, RATIONALS),
    }


def test_concat_product_leibniz() -> None:
    q = RATIONALS.ring.gens[0]
    f = Cochain(3, 1, RATIONALS, {(3,): RATIONALS.ring.one})
    g = Cochain(2, 1, RATIONALS, {(2,): q})
    lhs = coboundary(concat_product(f, g))
    rhs = concat_product(coboundary(f), g) + (-1) * concat_product(f, coboundary(g))
    assert lhs == rhs
    assert not lhs.is_zero()


def test_cochain_rejects_wrong_shape() -> None:
    with pytest.raises(ValueError, match="is not a composition"):
        Cochain(3, 2, RATIONALS, {(3,): RATIONALS.ring.one})


def test_cochain_vector_round_trip() -> None:
    f = Cochain(4, 2, RATIONALS, {(3, 1): RATIONALS.ring.one})
    assert f.to_vector() == {2: RATIONALS.ring.one}
    assert Cochain.from_vector(4, 2, RATIONALS, f.to_vector()) == f


def random_cochain(rng: random.Random, n: int, k: int, coeff: CoeffRing) -> Cochain:
    q = coeff.ring.gens[0]
    return Cochain(
        n,
        k,
        coeff,
        {
            c: sum((rng.randint(-3, 3) * q**i for i in range(3)), coeff.ring.zero)
            for c in enumerate_compositions(n, k)
        },
    )


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("coeff", [RATIONALS, CoeffRing.prime_field(3)])
def test_concat_product_leibniz_random(seed: int, coeff: CoeffRing) -> None:
    rng = random.Random(seed)
    n1 = rng.randint(1, 4)
    n2 = rng.randint(1, 8 - n1)
    k1, k2 = rng.randint(1, n1), rng.randint(1, n2)
    f = random_cochain(rng, n1, k1, coeff)
    g = random_cochain(rng, n2, k2, coeff)
    lhs = coboundary(concat_product(f, g))
    rhs = concat_product(coboundary(f), g) + (-1) ** k1 * concat_product(
        f, coboundary(g)
    )
    assert lhs == rhs


@pytest.mark.parametrize("seed", range(4))
def test_concat_product_of_cocycles_is_cocycle(seed: int) -> None:
    rng = random.Random(seed)
    f = coboundary(random_cochain(rng, 4, 2, RATIONALS))
    g = coboundary(random_cochain(rng, 3, 1, RATIONALS))
    assert is_cocycle(f)
    assert is_cocycle(g)
    assert is_cocycle(concat_product(f, g))


def in_image(matrix: SparseMatrix, vector: dict[int, Poly]) -> bool:
    diag = diagonalize(matrix, transforms=True)
    assert diag.U is not None
    pivots = {r: d for r, _, d in diag.pivots}
    return all(
        r in pivots and not v % pivots[r] for r, v in diag.U.apply(vector).items()
    )


def scaled(factor: Poly, f: Cochain) -> dict[int, Poly]:
    return {i: factor * v for i, v in f.to_vector().items()}


def test_x1_squared_generates_h0_of_two_strands() -> None:
    cochains = braid_cochain_complex(2, RATIONALS)
    square = concat_product(generator_x1(RATIONALS), generator_x1(RATIONALS))
    assert (square.n, square.k) == (2, 2)
    # H_0(Br(2)) = H^2 is spanned by the dual of (1, 1) modulo (1 + q)
    assert cochains.chains.bases[2] == ((1, 1),)
    assert square.to_vector() == {0: RATIONALS.ring.one}
    assert not in_image(cochains.incoming(2), square.to_vector())
    presentation = homology_of_pair(cochains.incoming(2), cochains.outgoing(2))
    assert presentation.cyclotomic(2).pairs() == [(2, 1)]


def test_x1_product_injects_h1_of_three_strands() -> None:
    one = RATIONALS.ring.one
    phi3 = cyclotomic_in(3, RATIONALS)
    z = Cochain(3, 2, RATIONALS, {(1, 2): one, (2, 1): one})
    small = braid_cochain_complex(3, RATIONALS)
    assert is_cocycle(z)
    assert not in_image(small.incoming(2), z.to_vector())
    assert in_image(small.incoming(2), scaled(phi3, z))

    product = concat_product(generator_x1(RATIONALS), z)
    large = braid_cochain_complex(4, RATIONALS)
    assert is_cocycle(product)
    assert not in_image(large.incoming(3), product.to_vector())
    assert in_image(large.incoming(3), scaled(phi3, product))


@pytest.mark.parametrize("spec", ["q", "fp:2", "fp:3", "fp:5"])
@pytest.mark.parametrize("n", [7, 8])
def test_boundary_squares_to_zero_over_fields(spec: str, n: int) -> None:
    coeff = CoeffRing.try_from_specifier(spec)
    for k in range(2, n + 1):
        product = boundary_matrix(n, k - 1, coeff) @ boundary_matrix(n, k, coeff)
        assert product.is_zero(), (n, k)


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["q", "fp:2", "fp:3", "fp:5"])
@pytest.mark.parametrize("n", range(9, 13))
def test_boundary_squares_to_zero_large(spec: str, n: int) -> None:
    coeff = CoeffRing.try_from_specifier(spec)
    for k in range(2, n + 1):
        product = boundary_matrix(n, k - 1, coeff) @ boundary_matrix(n, k, coeff)
        assert product.is_zero(), (n, k)
