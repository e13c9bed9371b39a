"""Constructors and combinators for certified envelopes.

Affine envelope functions, numeric inversion of forward-only monotone
functions, pointwise minima of envelope families with correct inverses,
promotion of eventually-decreasing families to fully decreasing ones, and
the optimal affine certificate that witnesses tightness of the index bound
at the last maximizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    Envelope,
    EnvelopeFn,
    Monotonicity,
    PeakseqError,
    PreconditionViolated,
    TermSource,
)

BISECTION_MAX_ITER = 200


class OutOfRange(PeakseqError):
    """A value to invert lies outside the function's range on [0, 1]."""


class EmptyFamily(PeakseqError):
    """A family combinator received no envelopes."""


class InvalidBracket(PeakseqError):
    """Certificate inputs are inconsistent with the claimed maximizer."""


def affine_fn(a: float, c: float) -> EnvelopeFn:
    """The envelope function x -> a*x + c on [0, 1] with its exact inverse."""
    if a <= 0.0:
        raise PreconditionViolated("affine scale must be positive")
    return EnvelopeFn(
        eval=lambda x: a * x + c,
        inverse=lambda y: (y - c) / a,
        lo=c,
        hi=a + c,
    )


def invert_numeric(f, y: float, tol: float = 1e-14) -> float:
    """Invert a strictly increasing f: [0, 1] -> R at y by bisection.

    Monotonicity is the only structure assumed, so bisection rather than a
    derivative method; the bracket is narrowed to width ``tol`` (absolute on
    x) and the midpoint returned.  Values outside [f(0), f(1)] beyond a
    1e-12 slack raise :class:`OutOfRange`; within the slack they clamp.
    """
    f0 = f(0.0)
    f1 = f(1.0)
    slack = 1e-12 * max(1.0, abs(f0), abs(f1) if math.isfinite(f1) else 0.0)
    if y < f0 - slack or (math.isfinite(f1) and y > f1 + slack):
        raise OutOfRange(f"{y!r} outside [{f0!r}, {f1!r}]")
    if y <= f0:
        return 0.0
    if y >= f1:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def envelope_fn_from_forward(f) -> EnvelopeFn:
    """Wrap a forward-only strictly increasing function with a bisection inverse."""
    return EnvelopeFn(
        eval=f,
        inverse=lambda y: invert_numeric(f, y),
        lo=f(0.0),
        hi=f(1.0),
    )


def _min_fn(fns: list[EnvelopeFn]) -> EnvelopeFn:
    def forward(x: float) -> float:
        return min(fn.eval(x) for fn in fns)

    def inverse(y: float) -> float:
        # Only functions whose range reaches down to y may be inverted;
        # the min's inverse is the max of those inverses.
        eligible = [fn for fn in fns if fn.lo <= y]
        if not eligible:
            raise OutOfRange(f"{y!r} below every branch of the pointwise min")
        return max(min(fn.inverse(y), 1.0) for fn in eligible)

    return EnvelopeFn(
        eval=forward,
        inverse=inverse,
        lo=min(fn.lo for fn in fns),
        hi=min(fn.hi for fn in fns),
    )


def _max_fn(fns: list[EnvelopeFn]) -> EnvelopeFn:
    def forward(x: float) -> float:
        return max(fn.eval(x) for fn in fns)

    def inverse(y: float) -> float:
        eligible = [fn for fn in fns if y <= fn.hi]
        if not eligible:
            raise OutOfRange(f"{y!r} above every branch of the pointwise max")
        return min(max(fn.inverse(y), 0.0) for fn in eligible)

    return EnvelopeFn(
        eval=forward,
        inverse=inverse,
        lo=max(fn.lo for fn in fns),
        hi=max(fn.hi for fn in fns),
    )


def env_min(envs: list[Envelope]) -> Envelope:
    """Pointwise minimum of finitely many envelopes over a shared index domain.

    The combined family keeps h_k = min_i h_(i),k with the inverse taken as
    the max over branches defined at the queried value, and beta_k =
    max_i beta_(i),k, which stays valid for every branch simultaneously.
    The result decreases from the largest of the inputs' decreasing-from
    indices; it is constant-from only when every input is.
    """
    if not envs:
        raise EmptyFamily("env_min of an empty family")
    if len(envs) == 1:
        return envs[0]
    m = max(e.mono.decreasing_from for e in envs)
    cs = [e.mono.constant_from for e in envs]
    c = max(cs) if all(ci is not None for ci in cs) else None
    return Envelope(
        h=lambda k: _min_fn([e.h(k) for e in envs]),
        beta=lambda k: max(e.beta(k) for e in envs),
        mono=Monotonicity(m, c),
    )


def promote_to_decreasing(env: Envelope) -> Envelope:
    """Turn an eventually decreasing envelope into a fully decreasing one.

    Indices up to decreasing_from are replaced by the pointwise max of the
    prefix functions (inverse: min over branches whose range reaches the
    value) and the max of the prefix ratios; later indices are unchanged.
    Usefulness is preserved; the index bound can only grow on the replaced
    prefix.
    """
    m = env.mono.decreasing_from
    if m == 0:
        return env
    prefix_fns = [env.h(i) for i in range(m + 1)]
    prefix_fn = _max_fn(prefix_fns)
    prefix_beta = max(env.beta(i) for i in range(m + 1))
    c = env.mono.constant_from
    if c is not None and c <= m:
        # The original is already constant somewhere inside the replaced
        # prefix; the promoted family is constant once the prefix ends.
        c = m + 1
    return Envelope(
        h=lambda k: prefix_fn if k <= m else env.h(k),
        beta=lambda k: prefix_beta if k <= m else env.beta(k),
        mono=Monotonicity(0, c),
    )


@dataclass(frozen=True)
class AffineParams:
    """Parameters of an affine certificate u_k <= a*b^k + c."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if self.a <= 0.0:
            raise PreconditionViolated("certificate scale a must be positive")
        if not 0.0 < self.b < 1.0:
            raise PreconditionViolated("certificate ratio b must lie in (0,1)")

    def bound_at(self, k: int) -> float:
        return self.a * self.b**k + self.c

    def constant_envelope(self) -> Envelope:
        """The constant envelope (x -> a*x + c, beta = b) induced by the certificate."""
        fn = affine_fn(self.a, self.c)
        return Envelope(h=lambda k: fn, beta=lambda k: self.b, mono=Monotonicity.constant())


def optimal_affine_certificate(
    source: TermSource, k_s: int, c: float, n_c: int
) -> AffineParams:
    """Fit the affine certificate that is tight at the last maximizer k_s.

    The caller certifies: k_s is the last maximizer, c lies strictly
    between the limsup and the sup of the sequence, and u_k <= c for all
    k >= n_c with n_c > k_s.  The slope of the steepest secant from
    (k_s, u_{k_s}) over (k_s, n_c] fixes the ratio b and scale a so that
    the bound touches the sequence exactly at k_s; the touching makes the
    index bound evaluate to k_s there.  The finished certificate is
    checked directly on [0, n_c].
    """
    if n_c <= k_s:
        raise PreconditionViolated("n_c must exceed k_s")
    u_star = source.eval(k_s)
    if c >= u_star:
        raise InvalidBracket(f"c={c!r} must lie strictly below u_[k_s]={u_star!r}")
    gamma = max(
        (u_star - source.eval(k)) / (k_s - k) for k in range(k_s + 1, n_c + 1)
    )
    if gamma >= 0.0:
        raise InvalidBracket(
            "a later term matches the claimed maximum; k_s is not the last maximizer"
        )
    b = math.exp(gamma / (u_star - c))
    a = (u_star - c) * math.exp(-k_s * gamma / (u_star - c))
    params = AffineParams(a=a, b=b, c=c)
    for k in range(n_c + 1):
        u_k = source.eval(k)
        if u_k > params.bound_at(k) + 1e-12 * max(1.0, abs(u_k)):
            raise InvalidBracket(
                f"certificate fails the direct check at k={k}: "
                f"u_k={u_k!r} > {params.bound_at(k)!r}"
            )
    return params


def nonconstant_decreasing_family(params: AffineParams, sup_value: float) -> Envelope:
    """A non-constant decreasing envelope built on top of an affine certificate.

    h_k(x) = x/(k+1) + a*x + g_k with offsets g_k = min(c + 1/(k+1),
    (sup + c)/2) and ratios beta_k = min(b + 1/(k+1), (b+1)/2).  Both
    families decrease in k, every h_k dominates the certificate bound at
    beta_k^k, and the offsets stay strictly below the supremum, which keeps
    the envelope useful.
    """
    if sup_value <= params.c:
        raise PreconditionViolated("sup_value must exceed the certificate offset c")
    a, b, c = params.a, params.b, params.c

    def fn_at(k: int) -> EnvelopeFn:
        slope = 1.0 / (k + 1) + a
        offset = min(c + 1.0 / (k + 1), 0.5 * (sup_value + c))
        return affine_fn(slope, offset)

    def beta_at(k: int) -> float:
        return min(b + 1.0 / (k + 1), 0.5 * (b + 1.0))

    return Envelope(h=fn_at, beta=beta_at, mono=Monotonicity.decreasing())
