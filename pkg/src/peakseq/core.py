"""Finite-time peak computation for real sequences from certified envelopes.

A sequence u is analyzed through a certified envelope: a family of strictly
increasing continuous functions h_k on [0, 1] together with ratios beta_k in
(0, 1) such that u_k <= h_k(beta_k^k) for every index k.  Whenever a term
satisfies u_k > h_k(0), inverting h_k converts the term into the index bound

    log(h_k^{-1}(u_k)) / log(beta_k),

and for envelopes that are (eventually) pointwise decreasing in k this bound
dominates every maximizer of u.  The solver scans terms while shrinking the
bound until the scan index passes it, which pins down the supremum and a
maximizer after finitely many term evaluations.

Everything in this module is deterministic and immutable after construction;
term sources are required to be pure, so read-only sharing across threads is
safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

DEFAULT_SCAN_LIMIT = 10_000_000

# Relative slack absorbing float roundoff in adapters whose envelopes hold
# with equality by construction.
MEMBERSHIP_RTOL = 1e-12

# Added before flooring the index bound; only ever enlarges the truncation,
# which is the safe direction.
FLOOR_GUARD = 1e-9


class PeakseqError(Exception):
    """Base class for all library errors."""


class EnvelopeViolation(PeakseqError):
    """A term exceeded its certified bound h_k(beta_k^k) beyond roundoff."""

    def __init__(self, k: int, term: float, bound: float):
        super().__init__(
            f"envelope violated at k={k}: u_k={term!r} > h_k(beta_k^k)={bound!r}"
        )
        self.k = k
        self.term = term
        self.bound = bound


class NoUsefulIndex(PeakseqError):
    """No index with u_k > h_k(0) was found before the scan limit.

    Without such an index the solver loop can never assign a truncation
    bound and would not terminate; usefulness is semi-decidable for
    black-box sources, so the scan is capped.
    """


class InvalidTailBound(PeakseqError):
    """The certified tail bound exceeds every prefix term: inconclusive."""


class PreconditionViolated(PeakseqError):
    """An operation was called outside its documented domain."""


@dataclass(frozen=True)
class TermSource:
    """A deterministic map k -> u_k for the analyzed real sequence.

    ``eval`` must be pure: repeated calls with the same k return the
    identical value, and it must be defined for every k >= 0.  ``exact``
    optionally exposes integer-valued terms without float conversion.
    """

    eval: Callable[[int], float]
    description: str = ""
    exact: Callable[[int], int] | None = None


@dataclass(frozen=True)
class EnvelopeFn:
    """A strictly increasing continuous function on [0, 1] with an inverse.

    ``inverse`` is only guaranteed on [lo, hi] = [eval(0), eval(1)].
    """

    eval: Callable[[float], float]
    inverse: Callable[[float], float]
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise PreconditionViolated(f"need lo < hi, got [{self.lo!r}, {self.hi!r}]")


@dataclass(frozen=True)
class Monotonicity:
    """Monotonicity metadata of an envelope family.

    ``decreasing_from`` is the index from which both h_k and beta_k are
    pointwise decreasing; ``constant_from``, when set, is an index from
    which the pair (h_k, beta_k) no longer changes.  Only this metadata
    unlocks the argmax guarantees; it is trusted here and checked by
    :func:`validate_envelope`.
    """

    decreasing_from: int = 0
    constant_from: int | None = None

    def __post_init__(self) -> None:
        if self.decreasing_from < 0:
            raise PreconditionViolated("decreasing_from must be >= 0")
        if self.constant_from is not None and self.constant_from < self.decreasing_from:
            raise PreconditionViolated("constant_from must be >= decreasing_from")

    @classmethod
    def constant(cls) -> "Monotonicity":
        return cls(0, 0)

    @classmethod
    def decreasing(cls) -> "Monotonicity":
        return cls(0, None)

    @classmethod
    def eventually_decreasing(cls, m: int) -> "Monotonicity":
        return cls(m, None)

    @classmethod
    def eventually_constant(cls, m: int, c: int) -> "Monotonicity":
        return cls(m, c)


@dataclass(frozen=True)
class Envelope:
    """An indexed family (h_k, beta_k) certifying u_k <= h_k(beta_k^k)."""

    h: Callable[[int], EnvelopeFn]
    beta: Callable[[int], float]
    mono: Monotonicity


@dataclass(frozen=True)
class UpperBoundValue:
    """A nonnegative real or the distinguished infinite branch.

    The infinite branch is a dedicated variant, never a float sentinel.
    """

    value: float | None = None

    @classmethod
    def finite(cls, v: float) -> "UpperBoundValue":
        if not math.isfinite(v) or v < 0.0:
            raise PreconditionViolated(f"finite bound must be a nonnegative real, got {v!r}")
        return cls(v)

    @classmethod
    def infinite(cls) -> "UpperBoundValue":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.value is not None


class Tie(Enum):
    """Which maximizer to report when the supremum is attained more than once."""

    MIN_ARGMAX = "min"
    MAX_ARGMAX = "max"


@dataclass(frozen=True)
class PeakSolution:
    """Result of a finite-time peak computation.

    ``argmax_min`` holds the reported maximizer: the smallest one under
    ``Tie.MIN_ARGMAX``, the largest under ``Tie.MAX_ARGMAX`` (recorded in
    ``argmax_max_requested``).
    """

    sup_value: float
    argmax_min: int
    truncation_index: int
    terms_evaluated: int
    argmax_max_requested: bool = False


def is_useful_at(source: TermSource, env: Envelope, k: int) -> bool:
    """True when u_k > h_k(0), i.e. index k carries bound information."""
    return source.eval(k) > env.h(k).lo


def argmax_bound(k: int, source: TermSource, env: Envelope) -> UpperBoundValue:
    """Convert the term u_k into an index bound through the envelope at k.

    Returns the infinite branch when u_k <= h_k(0) (the strict inequality
    is exact, no epsilon).  Raises :class:`EnvelopeViolation` when u_k
    exceeds h_k(beta_k^k) beyond a 1e-12 relative slack; membership is
    assumed, not trusted.
    """
    u_k = source.eval(k)
    fn = env.h(k)
    b = env.beta(k)
    cert = fn.eval(b**k)
    if u_k > cert + MEMBERSHIP_RTOL * max(1.0, abs(u_k)):
        raise EnvelopeViolation(k, u_k, cert)
    if u_k <= fn.lo:
        return UpperBoundValue.infinite()
    x = fn.inverse(min(u_k, fn.hi))
    # Clamp into (0, 1]: roundoff just past either end would otherwise feed
    # log a nonpositive value or produce a slightly negative bound.
    if x > 1.0:
        x = 1.0
    if x <= 0.0:
        return UpperBoundValue.infinite()
    return UpperBoundValue.finite(math.log(x) / math.log(b))


def truncation_from(k: int, source: TermSource, env: Envelope) -> int | None:
    """Floor of the index bound at k, or None on the infinite branch."""
    ub = argmax_bound(k, source, env)
    if not ub.is_finite:
        return None
    return math.floor(ub.value + FLOOR_GUARD)


def stopping_index(
    k: int, source: TermSource, env: Envelope, limit: int = 100_000
) -> int | None:
    """Smallest j <= limit with h_k(beta_k^j) < u_k, by direct search.

    Independent oracle for the identity floor(bound) + 1 == stopping index.
    The comparison carries a 1e-12 relative slack so that points where the
    envelope holds with equality resolve the way exact arithmetic would.
    """
    u_k = source.eval(k)
    fn = env.h(k)
    b = env.beta(k)
    # Slack proportional to the term itself: equality points must not read
    # as drops, while terms far below 1 keep a usable comparison scale.
    margin = MEMBERSHIP_RTOL * abs(u_k)
    for j in range(limit + 1):
        if fn.eval(b**j) < u_k - margin:
            return j
    return None


def brute_force_peak(source: TermSource, n: int) -> tuple[float, int, int]:
    """Exhaustive max over u_0..u_n: (max, first argmax, last argmax)."""
    if n < 0:
        raise PreconditionViolated("prefix length must be >= 0")
    best = source.eval(0)
    first = last = 0
    for k in range(1, n + 1):
        u = source.eval(k)
        if u > best:
            best, first, last = u, k, k
        elif u == best:
            last = k
    return best, first, last


def prefix_index_sets(
    source: TermSource, n: int, tail_bound: float
) -> tuple[list[int], list[int], int | None, int | None]:
    """Dominance index sets of the prefix u_0..u_n under a certified tail bound.

    The caller certifies sup_{j>n} u_j <= tail_bound (e.g. h_{n+1}(beta^{n+1})
    for a decreasing envelope).  Returns the indices k <= n whose prefix max
    dominates everything after k (weakly, then strictly), together with the
    minima of the two sets: the first maximizer and the last maximizer of u.
    Raises :class:`InvalidTailBound` when even k = n fails the weak test,
    which means the scan was inconclusive.
    """
    if n < 0:
        raise PreconditionViolated("prefix length must be >= 0")
    terms = [source.eval(k) for k in range(n + 1)]
    suffix_max = [tail_bound] * (n + 2)
    for k in range(n, -1, -1):
        suffix_max[k] = max(terms[k], suffix_max[k + 1])
    weak: list[int] = []
    strict: list[int] = []
    prefix_max = -math.inf
    for k in range(n + 1):
        prefix_max = max(prefix_max, terms[k])
        if prefix_max >= suffix_max[k + 1]:
            weak.append(k)
        if prefix_max > suffix_max[k + 1]:
            strict.append(k)
    if not weak:
        raise InvalidTailBound(
            f"tail bound {tail_bound!r} exceeds the whole prefix max "
            f"{prefix_max!r}; scanning to n={n} was inconclusive"
        )
    first_argmax = weak[0]
    last_argmax = strict[0] if strict else None
    return weak, strict, first_argmax, last_argmax


def solve(
    source: TermSource,
    env: Envelope,
    tie: Tie = Tie.MIN_ARGMAX,
    scan_limit: int = DEFAULT_SCAN_LIMIT,
    on_step: Callable[[int, float, UpperBoundValue | None, int | None], None] | None = None,
) -> PeakSolution:
    """Compute sup u and a maximizer in finite time from a certified envelope.

    Dispatches on the envelope's monotonicity class.  With a constant-from
    index the truncation bound is recomputed only when the running maximum
    improves (it can only shrink along new maxima there); otherwise it is
    intersected at every index k >= decreasing_from with u_k > h_k(0).  The
    scan below decreasing_from performs plain comparisons without bounds.

    The reported supremum is the max over the whole scanned prefix
    u_0..u_K.  ``on_step`` receives (k, u_k, bound, running K) once per
    evaluated term; the bound argument is None when it was not needed at
    that index and the infinite variant when u_k <= h_k(0).
    """
    m = env.mono.decreasing_from
    constant_mode = env.mono.constant_from is not None

    terms: list[float] = []
    trunc: int | None = None
    vmax = -math.inf
    k = 0
    while True:
        if trunc is not None and k > trunc:
            break
        if trunc is None and k > m + scan_limit:
            raise NoUsefulIndex(
                f"no index in [{m}, {m + scan_limit}] has u_k > h_k(0); "
                "increase the scan limit only if the envelope is known useful"
            )
        u_k = source.eval(k)
        terms.append(u_k)
        improved = u_k > vmax or (tie is Tie.MAX_ARGMAX and u_k == vmax)
        bound: UpperBoundValue | None = None
        if k >= m:
            if u_k > env.h(k).lo:
                # In constant mode a fresh bound is needed when the running
                # max improves, and also while no bound exists yet (the
                # pre-m prefix may dominate forever).
                if not constant_mode or trunc is None or improved:
                    bound = argmax_bound(k, source, env)
                    if bound.is_finite:
                        step = math.floor(bound.value + FLOOR_GUARD)
                        trunc = step if trunc is None else min(trunc, step)
            else:
                bound = UpperBoundValue.infinite()
        if improved:
            vmax = u_k
        if on_step is not None:
            on_step(k, u_k, bound, trunc)
        k += 1

    # Final rescan: the reported maximizer must honor the tie rule over the
    # whole prefix, including ties below decreasing_from that the running
    # comparison does not cover.
    sup = max(terms)
    if tie is Tie.MAX_ARGMAX:
        arg = len(terms) - 1 - terms[::-1].index(sup)
    else:
        arg = terms.index(sup)
    return PeakSolution(
        sup_value=sup,
        argmax_min=arg,
        truncation_index=trunc,
        terms_evaluated=len(terms),
        argmax_max_requested=(tie is Tie.MAX_ARGMAX),
    )


@dataclass(frozen=True)
class EnvelopeFinding:
    """One inconsistency surfaced by :func:`validate_envelope`."""

    k: int
    kind: str
    detail: str


_SAMPLE_GRID = tuple(i / 16.0 for i in range(17))


def validate_envelope(
    source: TermSource,
    env: Envelope,
    horizon: int,
    samples: tuple[float, ...] = _SAMPLE_GRID,
) -> list[EnvelopeFinding]:
    """Check envelope membership and monotonicity metadata on [0, horizon].

    Returns every finding (empty list when clean).  A clean result proves
    nothing beyond the horizon.
    """
    if horizon < 1:
        raise PreconditionViolated("horizon must be >= 1")
    findings: list[EnvelopeFinding] = []
    m = env.mono.decreasing_from
    c = env.mono.constant_from
    base_fn = env.h(c) if c is not None else None
    base_beta = env.beta(c) if c is not None else None
    for k in range(horizon + 1):
        u_k = source.eval(k)
        fn = env.h(k)
        b = env.beta(k)
        if not 0.0 < b < 1.0:
            findings.append(EnvelopeFinding(k, "beta-range", f"beta_k={b!r} not in (0,1)"))
            continue
        cert = fn.eval(b**k)
        if u_k > cert + MEMBERSHIP_RTOL * max(1.0, abs(u_k)):
            findings.append(
                EnvelopeFinding(k, "membership", f"u_k={u_k!r} > h_k(beta_k^k)={cert!r}")
            )
        if k >= m and k < horizon:
            nxt_fn = env.h(k + 1)
            nxt_b = env.beta(k + 1)
            if nxt_b > b + 1e-12:
                findings.append(
                    EnvelopeFinding(k + 1, "beta-decrease", f"beta rises {b!r} -> {nxt_b!r}")
                )
            for x in samples:
                lhs, rhs = nxt_fn.eval(x), fn.eval(x)
                if lhs > rhs + MEMBERSHIP_RTOL * max(1.0, abs(rhs)):
                    findings.append(
                        EnvelopeFinding(
                            k + 1, "h-decrease", f"h_{k+1}({x}) = {lhs!r} > h_{k}({x}) = {rhs!r}"
                        )
                    )
                    break
        if c is not None and k >= c:
            if abs(b - base_beta) > 1e-12:
                findings.append(
                    EnvelopeFinding(k, "beta-constant", f"beta_k={b!r} != beta_c={base_beta!r}")
                )
            for x in samples:
                lhs, rhs = fn.eval(x), base_fn.eval(x)
                if not (lhs == rhs or abs(lhs - rhs) <= MEMBERSHIP_RTOL * max(1.0, abs(rhs))):
                    findings.append(
                        EnvelopeFinding(k, "h-constant", f"h_{k}({x}) = {lhs!r} != h_c({x}) = {rhs!r}")
                    )
                    break
    return findings
