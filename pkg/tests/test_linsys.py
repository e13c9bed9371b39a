"""Dense kernel, Lyapunov certificates, and the benchmark matrix family."""

import math
import random

import pytest

from peakseq import PreconditionViolated, Tie, solve
from peakseq.linsys import (
    Matrix,
    NotLyapunov,
    NotPositiveDefinite,
    NotSymmetric,
    QTooSmall,
    a_lambda,
    a_lambda_norm_sq_closed,
    a_lambda_op_norm_sq_closed,
    a_lambda_source,
    cholesky_lower,
    envelope_from_certificate,
    is_lyapunov,
    lyapunov_certificate,
    mat_pow,
    op_norm_sq,
    p_q,
    power_norm_source,
    q_threshold,
    rows_to_csv,
    rows_to_json_obj,
    spectral_norm_sq_power,
    sym_eig_bounds,
    table_run,
)


def analytic_2x2_sym_eigs(a, b, d):
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), b)
    return mean - radius, mean + radius


class TestMatrix:
    def test_shape_checks(self):
        with pytest.raises(PreconditionViolated):
            Matrix.from_rows([[1.0, 2.0]])
        with pytest.raises(PreconditionViolated):
            Matrix.from_rows([[math.nan]])

    def test_power(self):
        a = a_lambda(0.5, 3)
        assert mat_pow(a, 0).rows == Matrix.identity(3).rows
        sq = mat_pow(a, 2)
        # (lam*Id + U)^2 = lam^2*Id + 2*lam*U since U^2 = 0.
        assert sq.rows[0][2] == pytest.approx(1.0)
        assert sq.rows[0][0] == pytest.approx(0.25)
        assert sq.rows[1][1] == pytest.approx(0.25)


class TestSymEig:
    def test_identity(self):
        assert sym_eig_bounds(Matrix.identity(3)) == (1.0, 1.0)

    def test_diagonal(self):
        assert sym_eig_bounds(Matrix.diagonal([1.0, 4.0])) == (1.0, 4.0)

    def test_hand_2x2(self):
        lo, hi = sym_eig_bounds(Matrix.from_rows([[2.0, 1.0], [1.0, 2.0]]))
        assert lo == pytest.approx(1.0, abs=1e-12)
        assert hi == pytest.approx(3.0, abs=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(NotSymmetric):
            sym_eig_bounds(Matrix.from_rows([[1.0, 2.0], [0.0, 1.0]]))

    def test_random_2x2_against_analytic(self):
        rng = random.Random(7)
        for _ in range(100):
            a, b, d = rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)
            lo, hi = sym_eig_bounds(Matrix.from_rows([[a, b], [b, d]]))
            elo, ehi = analytic_2x2_sym_eigs(a, b, d)
            assert abs(lo - elo) <= 1e-12 * max(1.0, abs(elo))
            assert abs(hi - ehi) <= 1e-12 * max(1.0, abs(ehi))

    def test_5x5_invariants(self):
        rng = random.Random(11)
        for _ in range(20):
            raw = [[rng.uniform(-1, 1) for _ in range(5)] for _ in range(5)]
            sym = Matrix.from_rows(
                [[0.5 * (raw[i][j] + raw[j][i]) for j in range(5)] for i in range(5)]
            )
            lo, hi = sym_eig_bounds(sym)
            trace = sum(sym.rows[i][i] for i in range(5))
            assert lo - 1e-10 <= trace / 5.0 <= hi + 1e-10


class TestCholeskyAndLyapunov:
    def test_contraction(self):
        assert is_lyapunov(Matrix.diagonal([0.5, 0.5]), Matrix.identity(2))

    def test_identity_map_is_not(self):
        assert not is_lyapunov(Matrix.identity(2), Matrix.identity(2))

    def test_benchmark_default_q(self):
        assert is_lyapunov(a_lambda(0.5), p_q(0.5))

    def test_threshold_q_fails(self):
        # det(P - A^T P A) = 0 exactly at the threshold.
        lam = 0.5
        p = Matrix.diagonal([1.0, q_threshold(lam)])
        assert not is_lyapunov(a_lambda(lam), p)

    def test_cholesky_rejects_indefinite(self):
        assert cholesky_lower(Matrix.from_rows([[1.0, 2.0], [2.0, 1.0]])) is None


class TestOpNormSq:
    def test_scaled_identity(self):
        assert op_norm_sq(Matrix.diagonal([0.5, 0.5]), Matrix.identity(2)) == pytest.approx(0.25, abs=1e-14)

    def test_rotation_is_isometry(self):
        rot = Matrix.from_rows([[0.0, -1.0], [1.0, 0.0]])
        assert op_norm_sq(rot, Matrix.identity(2)) == pytest.approx(1.0, abs=1e-12)

    def test_benchmark_closed_form(self):
        value = op_norm_sq(a_lambda(0.5), p_q(0.5))
        assert abs(value - a_lambda_op_norm_sq_closed(0.5, 32.0 / 9.0)) <= 1e-10
        assert value == pytest.approx(0.690771, abs=1e-6)

    def test_closed_form_grid(self):
        for lam in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]:
            q = 2.0 * q_threshold(lam)
            got = op_norm_sq(a_lambda(lam), p_q(lam))
            assert abs(got - a_lambda_op_norm_sq_closed(lam, q)) <= 1e-10

    def test_requires_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            op_norm_sq(Matrix.identity(2), Matrix.diagonal([1.0, -1.0]))

    def test_submultiplicative(self):
        rng = random.Random(3)
        for _ in range(5):
            rows = [[rng.uniform(-0.4, 0.4) for _ in range(3)] for _ in range(3)]
            a = Matrix.from_rows(rows)
            p = Matrix.identity(3)
            norms = {k: math.sqrt(op_norm_sq(mat_pow(a, k), p)) for k in range(11)}
            for j in range(1, 6):
                for k in range(1, 6):
                    assert norms[j + k] <= norms[j] * norms[k] + 1e-12


class TestSpectralNormPower:
    def test_k0(self):
        assert spectral_norm_sq_power(a_lambda(0.7), 0) == 1.0

    def test_k1_closed(self):
        got = spectral_norm_sq_power(a_lambda(0.5), 1)
        expected = 0.25 + 0.5 + 0.5 * math.sqrt(2.0)
        assert got == pytest.approx(expected, rel=1e-14)

    def test_closed_form_cross_check(self):
        for lam in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]:
            for k in range(0, 51):
                got = spectral_norm_sq_power(a_lambda(lam), k)
                want = a_lambda_norm_sq_closed(lam, k)
                assert abs(got - want) <= 1e-9 * want


class TestBenchmarkFamily:
    def test_a_lambda_structure(self):
        assert a_lambda(0.0, 2).rows == ((0.0, 1.0), (0.0, 0.0))
        with pytest.raises(PreconditionViolated):
            a_lambda(1.0)
        with pytest.raises(PreconditionViolated):
            a_lambda(0.5, 1)

    def test_p_q_default(self):
        assert p_q(0.0).rows == ((1.0, 0.0), (0.0, 2.0))
        assert p_q(0.5).rows[1][1] == pytest.approx(32.0 / 9.0)

    def test_q_too_small(self):
        with pytest.raises(QTooSmall):
            p_q(0.5, q=q_threshold(0.5))

    def test_certificate_fields(self):
        cert = lyapunov_certificate(a_lambda(0.9), p_q(0.9))
        assert 0.0 < cert.beta < 1.0
        assert cert.lambda_min <= cert.lambda_max
        assert cert.slope == pytest.approx(cert.lambda_max / cert.lambda_min)

    def test_invalid_p_raises(self):
        with pytest.raises(NotLyapunov):
            envelope_from_certificate(a_lambda(0.9), Matrix.diagonal([1.0, 1.0]))

    def test_tight_geometric_case(self):
        env = envelope_from_certificate(Matrix.diagonal([0.5, 0.5]), Matrix.identity(2))
        src = power_norm_source(Matrix.diagonal([0.5, 0.5]))
        from peakseq import argmax_bound

        for k in range(1, 8):
            ub = argmax_bound(k, src, env)
            assert ub.value == pytest.approx(float(k), abs=1e-9)

    def test_envelope_soundness(self):
        for lam in [0.5, 0.75, 0.9]:
            cert = lyapunov_certificate(a_lambda(lam), p_q(lam))
            env = envelope_from_certificate(a_lambda(lam), p_q(lam))
            src = a_lambda_source(lam)
            sol = solve(src, env, tie=Tie.MAX_ARGMAX)
            for k in range(0, 2 * sol.truncation_index + 1):
                z_k = src.eval(k)
                assert z_k <= cert.slope * cert.beta**k * (1.0 + 1e-12)


class TestTableRun:
    def test_row_05(self):
        row = table_run([0.5])[0]
        assert (row.k_s, row.f_floor) == (1, 2)
        assert row.max_norm_sq == pytest.approx(1.4571, abs=1e-4)

    def test_generic_matches_closed_form(self):
        for lam in [0.25, 0.5, 0.75, 0.9]:
            generic = table_run([lam], generic=True)[0]
            closed = table_run([lam])[0]
            assert generic.k_s == closed.k_s
            assert generic.f_floor == closed.f_floor
            assert generic.max_norm_sq == pytest.approx(closed.max_norm_sq, rel=1e-9)

    def test_dimension_independent(self):
        lams = [0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999]
        rows2 = table_run(lams, d=2, generic=True)
        rows5 = table_run(lams, d=5, generic=True)
        for r2, r5 in zip(rows2, rows5):
            assert (r2.k_s, r2.f_floor) == (r5.k_s, r5.f_floor)
            assert r5.max_norm_sq == pytest.approx(r2.max_norm_sq, rel=1e-9)

    def test_rejects_bad_lambda(self):
        with pytest.raises(PreconditionViolated):
            table_run([1.5])

    def test_csv_shape(self):
        text = rows_to_csv(table_run([0.5, 0.75]))
        lines = text.strip().splitlines()
        assert lines[0] == "lambda,k_s,max_norm_sq,f_floor"
        assert lines[1].startswith("0.5,1,")
        assert len(lines) == 3

    def test_json_obj(self):
        objs = rows_to_json_obj(table_run([0.5]))
        assert objs[0]["k_s"] == 1
        assert set(objs[0]) == {"lambda", "k_s", "max_norm_sq", "f_floor"}
