"""Exact polynomial arithmetic over Z, Q and F_p in the variable q."""

from __future__ import annotations

import functools
import typing
from dataclasses import dataclass

from sympy import isprime, totient
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.rings import PolyRing

from ._errors import (
    ClassificationMismatch,
    NonExactDivision,
    RemainderNotDivisibleByP,
)

if typing.TYPE_CHECKING:
    from sympy.polys.domains.domain import Domain
    from sympy.polys.rings import PolyElement

    Poly = PolyElement

CoeffKind = typing.Literal["integers", "rationals", "prime_field"]


@dataclass(frozen=True)
class CoeffRing:
    """A coefficient ring K, one of Z, Q or F_p."""

    kind: CoeffKind
    p: int = 0

    def __post_init__(self) -> None:
        if self.kind == "prime_field":
            if not isprime(self.p):
                msg = f"Characteristic must be prime, got {self.p}"
                raise ValueError(msg)
        elif self.p != 0:
            msg = f"Only prime fields carry a characteristic, got {self.p}"
            raise ValueError(msg)

    @classmethod
    def integers(cls) -> CoeffRing:
        return cls("integers")

    @classmethod
    def rationals(cls) -> CoeffRing:
        return cls("rationals")

    @classmethod
    def prime_field(cls, p: int) -> CoeffRing:
        return cls("prime_field", p)

    @classmethod
    def try_from_specifier(cls, value: str) -> CoeffRing:
        """Parse a coefficient specifier: ``z``, ``q`` or ``fp:<p>``."""
        spec = value.strip().lower()
        if spec == "z":
            return cls.integers()
        if spec == "q":
            return cls.rationals()
        if spec.startswith("fp:") and spec[3:].isdigit():
            p = int(spec[3:])
            if isprime(p):
                return cls.prime_field(p)
            msg = f"Invalid coefficient specifier: {value} ({p} is not prime)"
            raise ValueError(msg)
        msg = f"Invalid coefficient specifier: {value} (expected z, q or fp:<p>)"
        raise ValueError(msg)

    @property
    def spec(self) -> str:
        if self.kind == "integers":
            return "z"
        if self.kind == "rationals":
            return "q"
        return f"fp:{self.p}"

    @property
    def label(self) -> str:
        if self.kind == "integers":
            return "Z"
        if self.kind == "rationals":
            return "Q"
        return f"F_{self.p}"

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def is_field(self) -> bool:
        return self.kind != "integers"

    @property
    def domain(self) -> Domain:
        if self.kind == "integers":
            return ZZ
        if self.kind == "rationals":
            return QQ
        return GF(self.p, symmetric=False)

    @property
    def ring(self) -> PolyRing:
        return poly_ring(self)

    def __str__(self) -> str:
        return self.spec


INTEGERS = CoeffRing.integers()
RATIONALS = CoeffRing.rationals()


@functools.lru_cache(maxsize=None)
def poly_ring(coeff: CoeffRing) -> PolyRing:
    return PolyRing("q", coeff.domain)


def from_coeffs(coeffs: typing.Iterable[int], coeff: CoeffRing) -> Poly:
    """Build a polynomial from its coefficients, lowest degree first."""
    ring = coeff.ring
    return ring.from_dict({(i,): c for i, c in enumerate(coeffs) if c})


def coefficients(f: Poly) -> list:
    """Dense coefficient list of ``f``, lowest degree first; ``[]`` for zero."""
    if not f:
        return []
    domain = f.ring.domain
    out = [domain.zero] * (degree(f) + 1)
    for (e,), c in f.iterterms():
        out[e] = c
    return out


def degree(f: Poly) -> int:
    """Degree of ``f``, with -1 for the zero polynomial."""
    return -1 if not f else int(f.degree())


def monomial(e: int, coeff: CoeffRing, c: int = 1) -> Poly:
    return coeff.ring.from_dict({(e,): c})


def reduce(f: Poly, coeff: CoeffRing) -> Poly:
    """Map ``f`` into the polynomial ring over ``coeff``."""
    return f.set_ring(coeff.ring)


def lift(f: Poly) -> Poly:
    """Lift ``f`` to Z[q], taking coefficients in ``{0, ..., p - 1}`` over F_p."""
    return f.set_ring(INTEGERS.ring)


def inflate(f: Poly, k: int) -> Poly:
    """Substitute ``q -> q**k``."""
    return f.ring.from_dict({(e * k,): c for (e,), c in f.iterterms()})


def at_one(f: Poly) -> typing.Any:  # noqa: ANN401
    return sum(f.itercoeffs(), f.ring.domain.zero)


def normalize_laurent(f: Poly) -> Poly:
    """Canonical associate of ``f`` in K[q^{±1}].

    Strips the power of q dividing ``f`` and makes the result monic (over a
    field) or gives it a positive leading coefficient (over Z).
    """
    if not f:
        return f
    shift = int(f.tail_degree())
    if shift:
        f = f.ring.from_dict({(e - shift,): c for (e,), c in f.iterterms()})
    if f.ring.domain.is_Field:
        return f.monic()
    return -f if f.LC < 0 else f


def is_laurent_unit(f: Poly) -> bool:
    return bool(f) and len(f) == 1 and (
        f.ring.domain.is_Field or abs(f.LC) == 1
    )


def coeff_to_str(c: typing.Any, coeff: CoeffRing) -> str:  # noqa: ANN401
    if coeff.kind == "prime_field":
        return str(coeff.domain.to_int(c))
    return str(c)


def poly_to_json(f: Poly, coeff: CoeffRing) -> dict:
    return {
        "ring": coeff.spec,
        "coeffs": [coeff_to_str(c, coeff) for c in coefficients(f)],
    }


def poly_from_json(data: dict) -> Poly:
    coeff = CoeffRing.try_from_specifier(data["ring"])
    domain = coeff.domain
    values = []
    for c in data["coeffs"]:
        num, _, den = c.partition("/")
        if coeff.kind == "rationals":
            values.append(QQ(int(num), int(den or 1)))
        else:
            values.append(domain(int(num)))
    return from_coeffs(values, coeff)


def q_integer(i: int, coeff: CoeffRing) -> Poly:
    """The q-analog ``[i] = 1 + q + ... + q**(i-1)``; ``[0] = 0``."""
    if i < 0:
        msg = f"q-integers are defined for i >= 0, got {i}"
        raise ValueError(msg)
    return from_coeffs([1] * i, coeff)


def q_factorial(i: int, coeff: CoeffRing) -> Poly:
    """``[i]! = [2][3]...[i]`` with ``[0]! = [1]! = 1``."""
    if i < 0:
        msg = f"q-factorials are defined for i >= 0, got {i}"
        raise ValueError(msg)
    out = coeff.ring.one
    for k in range(2, i + 1):
        out *= q_integer(k, coeff)
    return out


def exact_quotient(f: Poly, g: Poly) -> Poly:
    quo, rem = f.div(g)
    if rem:
        msg = f"Division of {f} by {g} left remainder {rem}"
        raise NonExactDivision(msg)
    return quo


def q_binomial(n: int, k: int, coeff: CoeffRing) -> Poly:
    """Gaussian binomial ``[n]! / ([k]! [n-k]!)``."""
    if not 0 <= k <= n:
        msg = f"q-binomial needs 0 <= k <= n, got n={n}, k={k}"
        raise ValueError(msg)
    k = min(k, n - k)
    # [n][n-1]...[n-k+1] / [k]! keeps the numerator small
    num = coeff.ring.one
    for j in range(n - k + 1, n + 1):
        num *= q_integer(j, coeff)
    return exact_quotient(num, q_factorial(k, coeff))


def q_pascal_rows(
    nmax: int, coeff: CoeffRing, modulus: Poly | None = None
) -> typing.Iterator[list[Poly]]:
    """Yield the rows of the q-Pascal triangle, optionally reduced mod ``modulus``.

    Uses ``[n, k] = [n-1, k-1] + q**k [n-1, k]``.
    """
    ring = coeff.ring
    powers = [ring.one]
    for _ in range(nmax):
        nxt = powers[-1] * ring.gens[0]
        powers.append(nxt % modulus if modulus is not None else nxt)
    row = [ring.one if modulus is None else ring.one % modulus]
    yield row
    for n in range(1, nmax + 1):
        new = [row[0]]
        for k in range(1, n):
            entry = row[k - 1] + powers[k] * row[k]
            new.append(entry % modulus if modulus is not None else entry)
        new.append(row[0])
        row = new
        yield row


def radical(m: int) -> int:
    out, d, rest = 1, 2, m
    while d * d <= rest:
        if rest % d == 0:
            out *= d
            while rest % d == 0:
                rest //= d
        d += 1
    return out * rest if rest > 1 else out


@functools.lru_cache(maxsize=None)
def cyclotomic(m: int) -> Poly:
    """The m-th cyclotomic polynomial over Z, from ``q**m - 1 = prod phi_d``."""
    if m < 1:
        msg = f"Cyclotomic polynomials are indexed by m >= 1, got {m}"
        raise ValueError(msg)
    ring = INTEGERS.ring
    rad = radical(m)
    if rad != m:
        return inflate(cyclotomic(rad), m // rad)
    out = ring.gens[0] ** m - ring.one
    for d in range(1, m):
        if m % d == 0:
            out = exact_quotient(out, cyclotomic(d))
    return out


@functools.lru_cache(maxsize=None)
def cyclotomic_in(m: int, coeff: CoeffRing) -> Poly:
    return reduce(cyclotomic(m), coeff)


def euler_phi(n: int) -> int:
    return int(totient(n))


def prime_power_ratio(m: int, n: int) -> tuple[int, int] | None:
    """Return ``(p, i)`` with ``n == m * p**i`` and ``i >= 1``, if any."""
    if n <= m or n % m:
        return None
    r = n // m
    for p in range(2, r + 1):
        if r % p == 0:
            i = 0
            while r % p == 0:
                r //= p
                i += 1
            return (p, i) if r == 1 else None
    return None


@dataclass(frozen=True)
class Unit:
    """gcd(phi_m, phi_n) is a unit over every prime field."""


@dataclass(frozen=True)
class SharedModP:
    """phi_m and phi_n share a factor modulo ``p`` only."""

    p: int


GcdClassification = typing.Union[Unit, SharedModP]


def verify_cyclotomic_gcd(m: int, n: int) -> GcdClassification:
    """Classify gcd(phi_m, phi_n) and check the classification computationally."""
    if not 2 <= m < n:  # noqa: PLR2004
        msg = f"Expected 2 <= m < n, got m={m}, n={n}"
        raise ValueError(msg)
    ratio = prime_power_ratio(m, n)
    expected: GcdClassification = Unit() if ratio is None else SharedModP(ratio[0])

    g = cyclotomic_in(m, RATIONALS).gcd(cyclotomic_in(n, RATIONALS))
    if degree(g) > 0:
        msg = f"phi_{m} and phi_{n} share the factor {g} over Q"
        raise ClassificationMismatch(msg)

    for p in range(2, n + 1):
        if not isprime(p):
            continue
        field = CoeffRing.prime_field(p)
        shared = degree(cyclotomic_in(m, field).gcd(cyclotomic_in(n, field))) > 0
        if shared != (expected == SharedModP(p)):
            msg = (
                f"gcd(phi_{m}, phi_{n}) mod {p} is "
                f"{'nontrivial' if shared else 'a unit'}, "
                f"expected {expected}"
            )
            raise ClassificationMismatch(msg)
    return expected


def _require_coprime(m: int, p: int) -> None:
    if not isprime(p):
        msg = f"{p} is not prime"
        raise ValueError(msg)
    if m < 1 or m % p == 0:
        msg = f"Expected m >= 1 coprime to p, got m={m}, p={p}"
        raise ValueError(msg)


def verify_congruence(m: int, p: int, i: int) -> bool:
    """Check ``phi_{m p^i} = phi_m^{phi(p^i)} (mod p)``.

    For ``m == 1`` this also checks ``phi_{p^i} = phi_p^{p^(i-1)} (mod p)``.
    """
    _require_coprime(m, p)
    if i < 1:
        msg = f"Expected i >= 1, got {i}"
        raise ValueError(msg)
    field = CoeffRing.prime_field(p)
    lhs = cyclotomic_in(m * p**i, field)
    if lhs != cyclotomic_in(m, field) ** euler_phi(p**i):
        return False
    if m == 1:
        return lhs == cyclotomic_in(p, field) ** (p ** (i - 1))
    return True


class PhiSplit(typing.NamedTuple):
    omega: Poly
    psi: Poly


@functools.lru_cache(maxsize=None)
def split_phi(m: int, i: int, j: int, p: int) -> PhiSplit:
    """Write ``phi_{m p^j} = phi_{m p^i} * omega + p * psi`` over Z.

    ``omega`` and ``psi`` come from Euclidean division by the monic
    ``phi_{m p^i}``; ``psi`` is invertible modulo ``(p, phi_{m p^i})``.
    """
    _require_coprime(m, p)
    if not 0 <= i < j or (m == 1 and i < 1):
        msg = f"Expected 0 <= i < j (i >= 1 when m = 1), got i={i}, j={j}"
        raise ValueError(msg)
    big = cyclotomic(m * p**j)
    small = cyclotomic(m * p**i)
    omega, rem = big.div(small)
    if any(c % p for c in rem.itercoeffs()):
        msg = f"Remainder of phi_{m * p**j} by phi_{m * p**i} is not divisible by {p}"
        raise RemainderNotDivisibleByP(msg)
    psi = rem.quo_ground(p)

    field = CoeffRing.prime_field(p)
    if degree(reduce(psi, field).gcd(reduce(small, field))) != 0:
        msg = f"psi is not invertible modulo ({p}, phi_{m * p**i})"
        raise RemainderNotDivisibleByP(msg)
    return PhiSplit(omega, psi)


def _carry_free(a: int, b: int, p: int) -> bool:
    while a or b:
        if a % p + b % p >= p:
            return False
        a, b = a // p, b // p
    return True


def qlucas_predicts_unit(i: int, j: int, p: int, m: int = 1) -> bool:
    """Predict whether ``[i+j choose i]`` is prime to phi_p (m = 1) or phi_m mod p."""
    _require_coprime(m, p)
    if i < 0 or j < 0:
        msg = f"Expected i, j >= 0, got i={i}, j={j}"
        raise ValueError(msg)
    if m == 1:
        return _carry_free(i, j, p)
    return i % m + j % m < m and _carry_free(i // m, j // m, p)


def binomial_unit_table(total: int, p: int, m: int = 1) -> dict[tuple[int, int], bool]:
    """For all ``i + j <= total``, whether phi ∤ ``[i+j choose i]`` over F_p.

    phi is phi_p when ``m == 1`` and phi_m otherwise; the q-Pascal triangle is
    built directly modulo phi.
    """
    _require_coprime(m, p)
    field = CoeffRing.prime_field(p)
    modulus = cyclotomic_in(p if m == 1 else m, field)
    table = {}
    for n, row in enumerate(q_pascal_rows(total, field, modulus)):
        for i, entry in enumerate(row):
            table[i, n - i] = bool(entry)
    return table


def invertible_in_localization(m: int, n: int, p: int = 0) -> bool:
    """Whether phi_m is a unit in the localization of K[q^{±1}] at phi_n."""
    if m == n:
        return False
    if p == 0:
        return True
    lo, hi = min(m, n), max(m, n)
    ratio = prime_power_ratio(lo, hi)
    return ratio is None or ratio[0] != p
