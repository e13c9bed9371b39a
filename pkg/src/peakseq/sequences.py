"""Ready-made adapters pairing classic sequences with certified envelopes.

Each adapter packages a pure term source together with the envelope(s) whose
certificates are known in closed form: the factorial ratio a^n/n!, the ratio
of consecutive terms of generalized Fibonacci sequences, logistic iterations
with r < 1, and the accelerated Syracuse iteration (terms only; the only
envelope statement available there is conjecture-equivalent, so it is
exposed as a finite-horizon checker).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    Envelope,
    EnvelopeFn,
    Monotonicity,
    PeakSolution,
    PeakseqError,
    PreconditionViolated,
    TermSource,
    Tie,
    brute_force_peak,
    solve,
)

PHI = (1.0 + math.sqrt(5.0)) / 2.0

U128_MAX = 2**128 - 1


class UnsupportedParameter(PeakseqError):
    """The parameter regime has no useful envelope in this library."""


class FactorialRatioAdapter:
    """The sequence u_n = a^n / n! for a positive integer a.

    ``seq_env`` is the tight family h_n(t) = t * (a+1)^n / n! with ratio
    a/(a+1), an equality envelope (u_n = h_n(beta^n) exactly) decreasing
    from index a.  ``const_env`` freezes the family at its largest member
    g(t) = t * (a+1)^a, trading tightness for a constant class.
    """

    def __init__(self, a: int):
        if a < 1:
            raise PreconditionViolated("factorial ratio needs integer a >= 1")
        self.a = a
        self.beta = a / (a + 1)
        self.source = TermSource(
            eval=lambda n: (a**n) / math.factorial(n),
            description=f"a^n/n!, a={a}",
        )
        self.seq_env = Envelope(
            h=self._seq_fn,
            beta=lambda n: self.beta,
            mono=Monotonicity.eventually_decreasing(a),
        )
        const = float((a + 1) ** a)
        const_fn = EnvelopeFn(
            eval=lambda t, s=const: t * s,
            inverse=lambda y, s=const: y / s,
            lo=0.0,
            hi=const,
        )
        self.const_env = Envelope(
            h=lambda n: const_fn,
            beta=lambda n: self.beta,
            mono=Monotonicity.constant(),
        )

    def _seq_fn(self, n: int) -> EnvelopeFn:
        slope = ((self.a + 1) ** n) / math.factorial(n)
        return EnvelopeFn(
            eval=lambda t: t * slope,
            inverse=lambda y: y / slope,
            lo=0.0,
            hi=slope,
        )


def factorial_solve(a: int, envelope: str = "sequence", tie: Tie = Tie.MIN_ARGMAX) -> PeakSolution:
    """Peak of a^n/n! via the tight family ("sequence") or the frozen one ("constant")."""
    adapter = FactorialRatioAdapter(a)
    if envelope == "sequence":
        env = adapter.seq_env
    elif envelope == "constant":
        env = adapter.const_env
    else:
        raise PreconditionViolated(f"unknown envelope choice {envelope!r}")
    return solve(adapter.source, env, tie=tie)


class FibonacciRatioAdapter:
    """Ratios w_n = u_{n+1}/u_n of the recurrence u_{n+2} = u_{n+1} + u_n.

    Requires u1 > u0 * phi, which makes the ratios oscillate around phi
    (below for odd n, above for even n >= 2).  Terms come from exact
    integer arithmetic; the constant envelope is the rational function
    whose even-index values match the ratios exactly, with ratio phi^-2.
    """

    def __init__(self, u0: int, u1: int):
        if u0 < 0 or u1 < 1:
            raise PreconditionViolated("need u0 >= 0 and u1 >= 1")
        if u1 <= u0 * PHI:
            raise PreconditionViolated(f"need u1 > u0*phi, got {u1} <= {u0 * PHI!r}")
        self.u0 = u0
        self.u1 = u1
        denom = 1.0 + PHI * PHI
        self.A = (u0 + u1 * PHI) / denom
        self.B = (u0 * PHI - u1) * PHI / denom
        # Cancellation-free form of -(B*phi^-2 + B); positive when B < 0.
        self.C = (u1 - u0 * PHI) / PHI
        hi = u1 / u0 if u0 > 0 else math.inf
        self.env = Envelope(
            h=lambda n: EnvelopeFn(eval=self._h, inverse=self._h_inv, lo=PHI, hi=hi),
            beta=lambda n: PHI**-2,
            mono=Monotonicity.constant(),
        )
        self.source = TermSource(eval=self.ratio, description=f"fibonacci ratio u0={u0} u1={u1}")

    def term_pair(self, n: int) -> tuple[int, int]:
        """(u_n, u_{n+1}) in exact integers."""
        a, b = self.u0, self.u1
        for _ in range(n):
            a, b = b, a + b
        return a, b

    def ratio(self, n: int) -> float:
        if n == 0:
            return self.u1 / self.u0 if self.u0 > 0 else 0.0
        a, b = self.term_pair(n)
        return b / a

    def _h(self, x: float) -> float:
        if x == 0.0:
            return PHI
        denom = self.A / x + self.B
        if denom <= 0.0:
            # u0 = 0 puts the pole exactly at x = 1.
            return math.inf
        return PHI * (1.0 + self.C / denom)

    def _h_inv(self, y: float) -> float:
        if y <= PHI:
            return 0.0
        d = self.C * PHI / (y - PHI)
        return self.A / (d - self.B)


def fibonacci_solve(u0: int, u1: int, tie: Tie = Tie.MIN_ARGMAX) -> PeakSolution:
    """Peak of the Fibonacci ratio sequence.

    For u0 > 0 the envelope attains the first term at its right endpoint,
    w_0 = h(1), so every later term is strictly smaller and the answer is
    immediate.  For u0 = 0 the solver runs with the constant envelope.
    """
    adapter = FibonacciRatioAdapter(u0, u1)
    if u0 > 0:
        w0 = adapter.ratio(0)
        h1 = adapter._h(1.0)
        if abs(w0 - h1) > 1e-12 * max(1.0, abs(w0)):
            raise PeakseqError(
                f"right-endpoint equality w_0 = h(1) failed: {w0!r} vs {h1!r}"
            )
        return PeakSolution(
            sup_value=w0,
            argmax_min=0,
            truncation_index=0,
            terms_evaluated=1,
            argmax_max_requested=(tie is Tie.MAX_ARGMAX),
        )
    return solve(adapter.source, adapter.env, tie=tie)


class LogisticAdapter:
    """The logistic iteration y_{n+1} = r * y_n * (1 - y_n) for r in (0, 1).

    The closed-form bound y_n <= y0 / (t^-1 + n*y0) at t = r^n gives a
    decreasing envelope whose first function attains y0 at its right
    endpoint, so the peak sits at index 0.  For r in [1, 4] the only
    ready-made bound is constant above the whole sequence and carries no
    index information, hence that regime is rejected.
    """

    def __init__(self, r: float, y0: float):
        if 1.0 <= r <= 4.0:
            raise UnsupportedParameter(
                f"r={r!r}: no useful envelope is available for r in [1, 4]"
            )
        if not 0.0 < r < 1.0:
            raise PreconditionViolated("need r in (0, 1)")
        if not 0.0 < y0 < 1.0:
            raise PreconditionViolated("need y0 in (0, 1)")
        self.r = r
        self.y0 = y0
        self.source = TermSource(eval=self.term, description=f"logistic r={r} y0={y0}")
        self.env = Envelope(
            h=self._fn, beta=lambda n: r, mono=Monotonicity.decreasing()
        )

    def term(self, n: int) -> float:
        y = self.y0
        for _ in range(n):
            y = self.r * y * (1.0 - y)
        return y

    def _fn(self, n: int) -> EnvelopeFn:
        y0 = self.y0

        def forward(t: float) -> float:
            if t == 0.0:
                return 0.0
            return y0 / (1.0 / t + n * y0)

        def inverse(y: float) -> float:
            if y <= 0.0:
                return 0.0
            return y / (y0 * (1.0 - n * y))

        return EnvelopeFn(eval=forward, inverse=inverse, lo=0.0, hi=y0 / (1.0 + n * y0))


def logistic_solve(r: float, y0: float, tie: Tie = Tie.MIN_ARGMAX) -> PeakSolution:
    """Peak of the logistic iteration: (y0, 0), cross-checked by brute force."""
    adapter = LogisticAdapter(r, y0)
    h0_right = adapter._fn(0).hi
    if abs(adapter.y0 - h0_right) > 1e-12:
        raise PeakseqError("right-endpoint equality y0 = h_0(1) failed")
    mx, first, _last = brute_force_peak(adapter.source, 100)
    if mx != adapter.y0 or first != 0:
        raise PeakseqError(
            f"brute-force cross-check disagreed: ({mx!r}, {first}) vs ({adapter.y0!r}, 0)"
        )
    return PeakSolution(
        sup_value=adapter.y0,
        argmax_min=0,
        truncation_index=0,
        terms_evaluated=101,
        argmax_max_requested=(tie is Tie.MAX_ARGMAX),
    )


class SyracuseAdapter:
    """Accelerated Syracuse iteration: y/2 on even terms, (3y+1)/2 on odd.

    Terms are exact unsigned integers; anything past 128 bits is reported
    as overflow rather than silently carried (trajectories stay tiny in
    practice, the cap mirrors a fixed-width implementation contract).
    """

    def __init__(self, n0: int):
        if n0 < 1:
            raise PreconditionViolated("need a starting integer N0 >= 1")
        self.n0 = n0
        self.source = TermSource(
            eval=lambda k: float(self.term(k)),
            description=f"syracuse N0={n0}",
            exact=self.term,
        )

    @staticmethod
    def step(y: int) -> int:
        nxt = y // 2 if y % 2 == 0 else (3 * y + 1) // 2
        if nxt > U128_MAX:
            raise OverflowError(f"syracuse term exceeds 128-bit range: {nxt}")
        return nxt

    def term(self, k: int) -> int:
        y = self.n0
        for _ in range(k):
            y = self.step(y)
        return y


def syracuse_excursion(n0: int, max_steps: int = 1_000_000) -> tuple[int, int, bool]:
    """Largest term of the Syracuse trajectory from n0 and its first index.

    Iterates until the value 1 is reached (after which the trajectory is the
    fixed {1, 2} cycle, accounted for in the maximum) or max_steps runs out.
    Returns (max, first argmax, reached_cycle).
    """
    adapter = SyracuseAdapter(n0)
    y = adapter.n0
    best, arg = y, 0
    for k in range(max_steps + 1):
        if y == 1:
            if best < 2:
                # The continuation 1 -> 2 -> 1 -> ... contributes a 2.
                return 2, k + 1, True
            return best, arg, True
        y = adapter.step(y)
        if y > best:
            best, arg = y, k + 1
    return best, arg, False


@dataclass(frozen=True)
class CollatzCheck:
    """Outcome of a finite-horizon geometric-bound check on a trajectory."""

    consistent: bool
    violated_at: int | None = None


def collatz_envelope_check(
    n0: int, a: float, b: float, c: float, horizon: int
) -> CollatzCheck:
    """Check y_n <= a*b^n + c for the Syracuse trajectory up to a horizon.

    A bound of this shape with c in (4, 5] holding for every n is
    equivalent to the trajectory reaching the terminal cycle; this checker
    only falsifies on [0, horizon], a Consistent outcome proves nothing
    beyond it.
    """
    if a < 0.0:
        raise PreconditionViolated("need a >= 0")
    if not 0.0 < b < 1.0:
        raise PreconditionViolated("need b in (0, 1)")
    if not 4.0 < c <= 5.0:
        raise PreconditionViolated("need c in (4, 5]")
    if horizon < 0:
        raise PreconditionViolated("horizon must be >= 0")
    adapter = SyracuseAdapter(n0)
    y = adapter.n0
    for n in range(horizon + 1):
        if y > a * b**n + c:
            return CollatzCheck(consistent=False, violated_at=n)
        y = adapter.step(y)
    return CollatzCheck(consistent=True)
