"""Peak of the squared spectral norms of matrix powers via quadratic certificates.

For a stable d x d matrix A, any symmetric P with P > 0 and P - A^T P A > 0
certifies the constant envelope

    ||A^k||_2^2  <=  (lmax(P)/lmin(P)) * (||A||_P^2)^k,

where ||A||_P is the operator norm induced by x -> sqrt(x^T P x) and is
strictly below 1.  That envelope feeds the core solver, which turns the
transient-growth question max_k ||A^k||_2^2 into a finite scan.

The module carries its own small dense kernel (multiplication, Cholesky,
cyclic Jacobi eigenvalues) sized for the d <= ~50 matrices this problem
meets; no external numerical library is involved.  The benchmark family
lambda*Id + U (single 1 in the top-right corner) has closed forms for all
quantities and drives the golden tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    Envelope,
    Monotonicity,
    PeakSolution,
    PeakseqError,
    PreconditionViolated,
    TermSource,
    Tie,
    solve,
    truncation_from,
)
from .algebra import affine_fn

JACOBI_SWEEPS = 60
OFF_DIAG_TARGET = 1e-13
SYMMETRY_RTOL = 1e-10
PIVOT_RTOL = 1e-12


class NotSymmetric(PeakseqError):
    """A symmetric-only operation received an asymmetric matrix."""


class NotPositiveDefinite(PeakseqError):
    """Cholesky failed: the matrix is not positive definite."""


class NotLyapunov(PeakseqError):
    """P does not certify stability: P > 0 and P - A^T P A > 0 must both hold."""


class QTooSmall(PeakseqError):
    """The diagonal certificate needs q strictly above (1 - lambda^2)^-2."""


@dataclass(frozen=True)
class Matrix:
    """A dense d x d real matrix, row-major, immutable."""

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        d = len(self.rows)
        if d < 1 or any(len(r) != d for r in self.rows):
            raise PreconditionViolated("matrix must be square with d >= 1")
        if any(not math.isfinite(x) for r in self.rows for x in r):
            raise PreconditionViolated("matrix entries must be finite")

    @property
    def dim(self) -> int:
        return len(self.rows)

    @classmethod
    def from_rows(cls, rows) -> "Matrix":
        return cls(tuple(tuple(float(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, d: int) -> "Matrix":
        return cls.from_rows([[1.0 if i == j else 0.0 for j in range(d)] for i in range(d)])

    @classmethod
    def diagonal(cls, values) -> "Matrix":
        vals = [float(v) for v in values]
        d = len(vals)
        return cls.from_rows([[vals[i] if i == j else 0.0 for j in range(d)] for i in range(d)])


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    d = a.dim
    if b.dim != d:
        raise PreconditionViolated("dimension mismatch")
    bt = list(zip(*b.rows))
    return Matrix.from_rows(
        [[sum(ra[t] * cb[t] for t in range(d)) for cb in bt] for ra in a.rows]
    )


def mat_transpose(a: Matrix) -> Matrix:
    return Matrix.from_rows(list(zip(*a.rows)))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return Matrix.from_rows(
        [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a.rows, b.rows)]
    )


def mat_pow(a: Matrix, k: int) -> Matrix:
    """A^k by binary exponentiation."""
    if k < 0:
        raise PreconditionViolated("power must be >= 0")
    result = Matrix.identity(a.dim)
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def _max_abs(a: Matrix) -> float:
    return max(abs(x) for r in a.rows for x in r)


def _symmetrize(a: Matrix) -> Matrix:
    d = a.dim
    return Matrix.from_rows(
        [[0.5 * (a.rows[i][j] + a.rows[j][i]) for j in range(d)] for i in range(d)]
    )


def sym_eig_bounds(m: Matrix) -> tuple[float, float]:
    """Extreme eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius
    norm drops below 1e-13 times the matrix norm.
    """
    d = m.dim
    scale = _max_abs(m)
    tol = SYMMETRY_RTOL * max(1.0, scale)
    for i in range(d):
        for j in range(i + 1, d):
            if abs(m.rows[i][j] - m.rows[j][i]) > tol:
                raise NotSymmetric(f"entries ({i},{j}) and ({j},{i}) differ beyond {tol!r}")
    if d == 1:
        return m.rows[0][0], m.rows[0][0]

    a = [list(r) for r in m.rows]
    frob = math.sqrt(sum(x * x for r in a for x in r))
    target = OFF_DIAG_TARGET * max(frob, 1e-300)
    for _ in range(JACOBI_SWEEPS):
        off = math.sqrt(sum(a[i][j] ** 2 for i in range(d) for j in range(d) if i != j))
        if off <= target:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                diff = a[q][q] - a[p][p]
                if abs(apq) * 1e15 < abs(diff):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app, aqq = a[p][p], a[q][q]
                a[p][p] = app - t * apq
                a[q][q] = aqq + t * apq
                a[p][q] = a[q][p] = 0.0
                for i in range(d):
                    if i == p or i == q:
                        continue
                    aip, aiq = a[i][p], a[i][q]
                    a[i][p] = a[p][i] = aip - s * (aiq + tau * aip)
                    a[i][q] = a[q][i] = aiq + s * (aip - tau * aiq)
    eigs = [a[i][i] for i in range(d)]
    return min(eigs), max(eigs)


def cholesky_lower(m: Matrix) -> list[list[float]] | None:
    """Lower Cholesky factor of m, or None when a pivot falls below
    1e-12 * trace (the numerical cutoff standing in for strict positivity)."""
    d = m.dim
    trace = sum(m.rows[i][i] for i in range(d))
    floor = PIVOT_RTOL * max(trace, 0.0)
    lower = [[0.0] * d for _ in range(d)]
    for i in range(d):
        for j in range(i + 1):
            acc = m.rows[i][j] - sum(lower[i][t] * lower[j][t] for t in range(j))
            if i == j:
                if acc <= floor:
                    return None
                lower[i][j] = math.sqrt(acc)
            else:
                lower[i][j] = acc / lower[j][j]
    return lower


def _forward_solve(lower: list[list[float]], b: Matrix) -> Matrix:
    """Solve L X = B for X with L lower triangular."""
    d = b.dim
    x = [[0.0] * d for _ in range(d)]
    for col in range(d):
        for i in range(d):
            acc = b.rows[i][col] - sum(lower[i][t] * x[t][col] for t in range(i))
            x[i][col] = acc / lower[i][i]
    return Matrix.from_rows(x)


def is_lyapunov(a: Matrix, p: Matrix) -> bool:
    """True iff P > 0 and P - A^T P A > 0 (both via Cholesky)."""
    if a.dim != p.dim:
        raise PreconditionViolated("dimension mismatch")
    if cholesky_lower(p) is None:
        return False
    residual = _symmetrize(mat_sub(p, mat_mul(mat_transpose(a), mat_mul(p, a))))
    return cholesky_lower(residual) is not None


def op_norm_sq(a: Matrix, p: Matrix) -> float:
    """Squared operator norm of A under the quadratic norm of P > 0.

    Computed as the largest eigenvalue of L^-1 (A^T P A) L^-T with
    P = L L^T, which whitens the generalized eigenproblem.
    """
    lower = cholesky_lower(p)
    if lower is None:
        raise NotPositiveDefinite("P must be positive definite")
    m = mat_mul(mat_transpose(a), mat_mul(p, a))
    half = _forward_solve(lower, m)
    whitened = _forward_solve(lower, mat_transpose(half))
    return sym_eig_bounds(_symmetrize(whitened))[1]


def spectral_norm_sq_power(a: Matrix, k: int) -> float:
    """||A^k||_2^2 as the top eigenvalue of (A^k)^T A^k; 1 at k = 0."""
    if k == 0:
        return 1.0
    pw = mat_pow(a, k)
    gram = _symmetrize(mat_mul(mat_transpose(pw), pw))
    return sym_eig_bounds(gram)[1]


@dataclass(frozen=True)
class LyapunovCertificate:
    """A quadratic stability certificate with its derived envelope data."""

    p: Matrix
    lambda_min: float
    lambda_max: float
    beta: float
    slope: float


def lyapunov_certificate(a: Matrix, p: Matrix) -> LyapunovCertificate:
    if not is_lyapunov(a, p):
        raise NotLyapunov("P fails P > 0 or P - A^T P A > 0")
    lo, hi = sym_eig_bounds(p)
    beta = op_norm_sq(a, p)
    if not 0.0 < beta < 1.0:
        raise NotLyapunov(f"certified contraction ratio {beta!r} not in (0,1)")
    return LyapunovCertificate(p=p, lambda_min=lo, lambda_max=hi, beta=beta, slope=hi / lo)


def power_norm_source(a: Matrix) -> TermSource:
    """Term source k -> ||A^k||_2^2 through the generic kernel."""
    return TermSource(
        eval=lambda k: spectral_norm_sq_power(a, k),
        description=f"||A^k||_2^2, d={a.dim}",
    )


def envelope_from_certificate(a: Matrix, p: Matrix) -> Envelope:
    """Constant envelope (t -> slope * t, beta = ||A||_P^2) for ||A^k||_2^2.

    The envelope function vanishes at 0 while every squared norm is
    positive, so every index carries bound information.
    """
    cert = lyapunov_certificate(a, p)
    fn = affine_fn(cert.slope, 0.0)
    return Envelope(h=lambda k: fn, beta=lambda k: cert.beta, mono=Monotonicity.constant())


# --- the lambda*Id + U benchmark family ---------------------------------


def a_lambda(lam: float, d: int = 2) -> Matrix:
    """lambda on the diagonal plus a single 1 in the top-right corner."""
    if not abs(lam) < 1.0:
        raise PreconditionViolated("need |lambda| < 1")
    if d < 2:
        raise PreconditionViolated("need dimension >= 2")
    rows = [[lam if i == j else 0.0 for j in range(d)] for i in range(d)]
    rows[0][d - 1] = 1.0
    return Matrix.from_rows(rows)


def q_threshold(lam: float) -> float:
    return (1.0 - lam * lam) ** -2


def p_q(lam: float, d: int = 2, q: float | None = None) -> Matrix:
    """Diag(1, ..., 1, q); valid iff q > (1 - lambda^2)^-2 (default: twice that)."""
    if q is None:
        q = 2.0 * q_threshold(lam)
    if q <= q_threshold(lam):
        raise QTooSmall(f"q={q!r} must exceed {q_threshold(lam)!r}")
    return Matrix.diagonal([1.0] * (d - 1) + [q])


def a_lambda_norm_sq_closed(lam: float, k: int) -> float:
    """Closed form of ||(lambda*Id + U)^k||_2^2, independent of the dimension."""
    if k == 0:
        return 1.0
    return lam ** (2 * k - 2) * (
        lam * lam + 0.5 * k * k + 0.5 * k * math.sqrt(4.0 * lam * lam + k * k)
    )


def a_lambda_op_norm_sq_closed(lam: float, q: float) -> float:
    """Closed form of ||lambda*Id + U||_{P_q}^2."""
    return (1.0 + 2.0 * q * lam * lam + math.sqrt(1.0 + 4.0 * lam * lam * q)) / (2.0 * q)


def a_lambda_source(lam: float, d: int = 2, generic: bool = False) -> TermSource:
    """Squared power norms of the benchmark matrix: closed form or generic kernel."""
    if generic:
        return power_norm_source(a_lambda(lam, d))
    return TermSource(
        eval=lambda k: a_lambda_norm_sq_closed(lam, k),
        description=f"||A_lambda^k||_2^2 closed form, lambda={lam}",
    )


@dataclass(frozen=True)
class TableRow:
    lam: float
    k_s: int
    max_norm_sq: float
    f_floor: int


TABLE_LAMBDAS = (0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 0.99995)


def table_run(
    lambdas,
    d: int = 2,
    q: float | None = None,
    generic: bool = False,
    scan_limit: int | None = None,
) -> list[TableRow]:
    """Benchmark rows (lambda, last maximizer, peak value, floored bound).

    For each lambda the certificate P_q (default q) induces the constant
    envelope, the solver runs with the max-argmax tie rule so the reported
    index is the last maximizer, and the bound column is the floored index
    bound evaluated there.  Rows are computed in input order.
    """
    rows: list[TableRow] = []
    for lam in lambdas:
        if not 0.0 < lam < 1.0:
            raise PreconditionViolated(f"lambda={lam!r} must lie in (0, 1)")
        matrix = a_lambda(lam, d)
        env = envelope_from_certificate(matrix, p_q(lam, d, q))
        source = a_lambda_source(lam, d, generic)
        kwargs = {} if scan_limit is None else {"scan_limit": scan_limit}
        sol: PeakSolution = solve(source, env, tie=Tie.MAX_ARGMAX, **kwargs)
        f_floor = truncation_from(sol.argmax_min, source, env)
        rows.append(TableRow(lam=lam, k_s=sol.argmax_min, max_norm_sq=sol.sup_value, f_floor=f_floor))
    return rows


def rows_to_csv(rows: list[TableRow]) -> str:
    """CSV with the fixed header lambda,k_s,max_norm_sq,f_floor (6 significant digits)."""
    lines = ["lambda,k_s,max_norm_sq,f_floor"]
    for r in rows:
        lines.append(f"{r.lam:.6g},{r.k_s},{r.max_norm_sq:.6g},{r.f_floor}")
    return "\n".join(lines) + "\n"


def rows_to_json_obj(rows: list[TableRow]) -> list[dict]:
    return [
        {"lambda": r.lam, "k_s": r.k_s, "max_norm_sq": r.max_norm_sq, "f_floor": r.f_floor}
        for r in rows
    ]
