"""Closed-form avalanche-size distributions, their limit law, and tail analysis.

The three finite-population laws (avalanche, abelian, conditional) are
evaluated in exact rational arithmetic and are required to sum to exactly 1
at construction time; the large-population limit law is floating point,
computed in log space, with its truncation deficit reported rather than
hidden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import DomainError

# Consistency slack allowed between a floating Pmf's mass and its declared
# truncation deficit; purely a guard against construction bugs.
_FLOAT_MASS_TOL = 1e-9


def rational_pow(base: int | Fraction, exp: int) -> Fraction:
    """base**exp as an exact Fraction, with x^0 == 1 for every x (including 0
    and negatives) so boundary factors raised to the zeroth power are inert."""
    if exp == 0:
        return Fraction(1)
    return Fraction(base) ** exp


def _as_exact(p) -> Fraction:
    if isinstance(p, float):
        raise DomainError("exact models need a rational p, not a float")
    return Fraction(p)


@dataclass(frozen=True)
class AvalancheParams:
    """Population size N and per-coordinate excitation probability p.

    The natural domain is 0 <= p < 1/N; the closed right endpoint p == 1/N
    is additionally accepted because the avalanche and conditional laws
    extend continuously to it (every factor that could go negative appears
    only with exponent zero there).  Operations that divide by 1 - N*p
    enforce the strict inequality themselves.
    """

    N: int
    p: Fraction

    def __post_init__(self) -> None:
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        object.__setattr__(self, "p", _as_exact(self.p))
        if self.p < 0 or self.N * self.p > 1:
            raise DomainError(f"p must satisfy 0 <= p <= 1/N, got p={self.p}, N={self.N}")

    def require_subcritical(self) -> None:
        if self.N * self.p >= 1:
            raise DomainError(f"this model needs 0 <= p < 1/N, got p={self.p}, N={self.N}")


@dataclass(frozen=True)
class LimitParams:
    """Limit-law parameters: alpha = N*p held fixed as N grows, plus a support cap."""

    alpha: float
    a_max: int

    def __post_init__(self) -> None:
        if not 0 <= self.alpha <= 1:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.a_max < 0:
            raise DomainError(f"a_max must be >= 0, got {self.a_max}")


@dataclass(frozen=True)
class Pmf:
    """A finite probability mass function over integer support.

    ``exact`` declares whether probs are Fractions (mass must be exactly 1)
    or floats (mass must be 1 up to the declared truncation ``deficit``).
    """

    support: tuple[int, ...]
    probs: tuple
    exact: bool
    label: str
    deficit: float | None = None

    def __post_init__(self) -> None:
        if len(self.support) != len(self.probs):
            raise DomainError("support and probs must have equal length")
        if any(p < 0 for p in self.probs):
            raise DomainError(f"negative probability in {self.label}")
        total = sum(self.probs)
        if self.exact:
            if total != 1:
                raise DomainError(f"exact pmf {self.label} sums to {total}, not 1")
        else:
            declared = self.deficit if self.deficit is not None else 0.0
            if abs((1.0 - float(total)) - declared) > _FLOAT_MASS_TOL:
                raise DomainError(
                    f"floating pmf {self.label} has mass {total} vs deficit {declared}"
                )

    def prob(self, a: int):
        """P(a); zero off the support."""
        for s, p in zip(self.support, self.probs):
            if s == a:
                return p
        return Fraction(0) if self.exact else 0.0

    def items(self):
        return zip(self.support, self.probs)


def avalanche_prob(params: AvalancheParams, a: int) -> Fraction:
    """Exact P(A = a) = (a+1)^(a-1) C(N,a) p^a (1-(a+1)p)^(N-a), one entry.

    Exposed separately from the full pmf so single entries stay cheap at
    very large N (the growth checks at N = 10^4 use this).
    """
    N, p = params.N, params.p
    if not 0 <= a <= N:
        raise DomainError(f"a must lie in 0..{N}, got {a}")
    return (
        rational_pow(a + 1, a - 1)
        * comb(N, a)
        * rational_pow(p, a)
        * rational_pow(1 - (a + 1) * p, N - a)
    )


def avalanche_pmf(params: AvalancheParams) -> Pmf:
    """Exact avalanche-size law on 0..N; sums to exactly 1 on the whole domain."""
    probs = tuple(avalanche_prob(params, a) for a in range(params.N + 1))
    return Pmf(
        support=tuple(range(params.N + 1)),
        probs=probs,
        exact=True,
        label=f"avalanche(N={params.N},p={params.p})",
    )


def abelian_pmf(params: AvalancheParams) -> Pmf:
    """Exact normalized avalanche law on 1..N with prefactor (1-Np)/(1-(N-1)p).

    p_k = pref * k^(k-2) C(N-1,k-1) p^(k-1) (1-kp)^(N-k-1).  Needs strict
    p < 1/N: the k = N term carries (1-Np)^(-1).
    """
    params.require_subcritical()
    N, p = params.N, params.p
    pref = (1 - N * p) / (1 - (N - 1) * p)
    probs = tuple(
        pref
        * rational_pow(k, k - 2)
        * comb(N - 1, k - 1)
        * rational_pow(p, k - 1)
        * rational_pow(1 - k * p, N - k - 1)
        for k in range(1, N + 1)
    )
    return Pmf(
        support=tuple(range(1, N + 1)),
        probs=probs,
        exact=True,
        label=f"abelian(N={N},p={p})",
    )


def conditional_pmf(params: AvalancheParams) -> Pmf:
    """Exact law of the avalanche size given one seed coordinate, on 1..N.

    P(A=a) = a^(a-2) C(N-1,a-1) p^(a-1) (1-ap)^(N-a).  Note the last
    exponent is N-a, not the N-a-1 of the abelian law; the two are kept as
    distinct models.
    """
    N, p = params.N, params.p
    probs = tuple(
        rational_pow(a, a - 2)
        * comb(N - 1, a - 1)
        * rational_pow(p, a - 1)
        * rational_pow(1 - a * p, N - a)
        for a in range(1, N + 1)
    )
    return Pmf(
        support=tuple(range(1, N + 1)),
        probs=probs,
        exact=True,
        label=f"conditional(N={N},p={p})",
    )


def pmf_mean(pmf: Pmf):
    """Sum of a * P(a); a Fraction when the pmf is exact, else a float."""
    if pmf.exact:
        return sum((Fraction(a) * p for a, p in pmf.items()), Fraction(0))
    return sum(a * p for a, p in pmf.items())


def abelian_mean_closed_form(params: AvalancheParams) -> Fraction:
    """1 / (1 - (N-1)p), the closed-form mean of the abelian law."""
    params.require_subcritical()
    return 1 / (1 - (params.N - 1) * params.p)


def expectation_identity_check(params: AvalancheParams) -> bool:
    """Verify, in exact arithmetic, that

        (1-Np)/(1-(N-1)p) * sum_k k^(k-1) C(N-1,k-1) p^(k-1) (1-kp)^(N-k-1)
            == 1/(1-(N-1)p).

    The left side is evaluated literally (not via abelian_pmf), so this is a
    second, independent route to the mean identity.
    """
    params.require_subcritical()
    N, p = params.N, params.p
    total = Fraction(0)
    for k in range(1, N + 1):
        total += (
            rational_pow(k, k - 1)
            * comb(N - 1, k - 1)
            * rational_pow(p, k - 1)
            * rational_pow(1 - k * p, N - k - 1)
        )
    lhs = (1 - N * p) / (1 - (N - 1) * p) * total
    rhs = 1 / (1 - (N - 1) * p)
    return lhs == rhs


def limit_pmf(params: LimitParams) -> Pmf:
    """Floating limit law P(a) = e^(-alpha(a+1)) alpha^a (a+1)^(a-1) / a!
    on 0..a_max, computed in log space; the truncation deficit 1 - sum is
    reported on the Pmf, never silently dropped.

    This is the N -> infinity law of avalanche_pmf at p = alpha/N (a Borel
    law shifted to start at 0); it is validated against the exact pmf at
    large N by the test suite rather than trusted on its own.
    """
    alpha, a_max = params.alpha, params.a_max
    probs = []
    for a in range(a_max + 1):
        if alpha == 0.0:
            probs.append(1.0 if a == 0 else 0.0)
            continue
        logp = (
            -alpha * (a + 1)
            + a * math.log(alpha)
            + (a - 1) * math.log(a + 1)
            - math.lgamma(a + 1)
        )
        probs.append(math.exp(logp))
    deficit = 1.0 - math.fsum(probs)
    return Pmf(
        support=tuple(range(a_max + 1)),
        probs=tuple(probs),
        exact=False,
        label=f"limit(alpha={alpha})",
        deficit=deficit,
    )


def tail_log_ratio(pmf: Pmf, a: int) -> float:
    """log(P(a) / P(a+1)); the step-down rate of the tail."""
    supp = set(pmf.support)
    if a not in supp or a + 1 not in supp:
        raise DomainError(f"both {a} and {a + 1} must be in the support")
    pa, pb = float(pmf.prob(a)), float(pmf.prob(a + 1))
    if pb <= 0.0 or pa <= 0.0:
        raise DomainError(f"log ratio needs positive mass at {a} and {a + 1}")
    return math.log(pa) - math.log(pb)


def powerlaw_slope(pmf: Pmf, a_min: int, a_max: int) -> float:
    """Ordinary least-squares slope of log P(a) against log a on [a_min, a_max].

    A pure power law a^s gives back s exactly; the critical limit law gives
    about -3/2 on windows like [50, 500].
    """
    if a_min >= a_max:
        raise DomainError(f"window needs a_min < a_max, got [{a_min}, {a_max}]")
    if a_min < 1:
        raise DomainError("window must start at a >= 1 (log a undefined at 0)")
    xs, ys = [], []
    for a, p in pmf.items():
        if a_min <= a <= a_max:
            if p <= 0:
                raise DomainError(f"nonpositive probability at a={a} in fit window")
            xs.append(math.log(a))
            ys.append(math.log(float(p)))
    if len(xs) < 2:
        raise DomainError(f"window [{a_min}, {a_max}] covers {len(xs)} support points")
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / sxx


def local_maxima(pmf: Pmf) -> list[int]:
    """Support points whose mass strictly exceeds every existing neighbor,
    in ascending order.  Boundary points compare against their one neighbor."""
    if not pmf.support:
        raise DomainError("empty support")
    out = []
    probs = pmf.probs
    last = len(probs) - 1
    for i, a in enumerate(pmf.support):
        left_ok = i == 0 or probs[i] > probs[i - 1]
        right_ok = i == last or probs[i] > probs[i + 1]
        if left_ok and right_ok:
            out.append(a)
    return out


def avalanche_params(N: int, p) -> AvalancheParams:
    """Convenience constructor accepting ints, Fractions, or 'num/den' strings."""
    if isinstance(p, str):
        p = Fraction(p)
    return AvalancheParams(N=N, p=_as_exact(p))
