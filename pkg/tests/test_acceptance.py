"""Acceptance criteria, one test per criterion.

Each test records a ``[PASS]``/``[FAIL]`` line that is echoed in the
terminal summary, then asserts at the stated tolerance.
"""

import math
import subprocess
import sys

import numpy as np

import conftest
from cli_cases import CASES, FIXTURES, GOLDEN, run_case
from qschur.jsonio import dumps, load_json, realization_from_json, signal_from_json
from qschur.kernels import certify_multiplier, default_points, difference_residual, hardy_gram
from qschur.linsys import impulse_response, transfer_consistency
from qschur.qlinalg import QMatrix, min_eigenvalue, operator_norm, range_basis, singular_values
from qschur.quaternion import QI, QJ, Quaternion, random_in_ball, random_quaternion
from qschur.realization import (
    Realization,
    inverse,
    markov_sequence,
    minimal_realization,
    product,
    transfer_series,
    unitary_equivalence,
)
from qschur.scalc import neumann_vs_closed, pencil, resolvent_residual
from qschur.schur import blaschke, blaschke_product, coisometry_kernel_check, schur_algorithm, schur_transform
from qschur.series import MatrixQSeries, QSeries, matrix_star_mul, star_mul, star_reciprocal


def verdict(n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_resolvent_equations():
    rng = np.random.default_rng(101)
    worst_l = worst_r = 0.0
    cases = 0
    while cases < 50:
        A = QMatrix.random(rng, 3, 3)
        r = random_quaternion(rng, 1.5)
        if singular_values(pencil(A, r)).min() <= 1e-6:
            continue
        worst_l = max(worst_l, resolvent_residual("left", r, A))
        worst_r = max(worst_r, resolvent_residual("right", r, A))
        cases += 1
    ok = worst_l < 1e-9 and worst_r < 1e-9
    verdict(1, ok, f"S-resolvent equations, 50 cases, left {worst_l:.2e} right {worst_r:.2e} < 1e-9")


def test_criterion_2_neumann_identity():
    rng = np.random.default_rng(102)
    bound = 2 * 0.6**61 / 0.4
    worst = 0.0
    for _ in range(20):
        A = QMatrix.random(rng, 3, 3)
        A = A * (rng.uniform(0.5, 1.5) / operator_norm(A))
        p = random_quaternion(rng)
        p = p * (rng.uniform(0.1, 0.6) / (p.norm() * operator_norm(A)))
        worst = max(worst, neumann_vs_closed(p, A, 60).gap)
    verdict(2, worst < bound, f"Neumann sum vs closed form, 20 cases, gap {worst:.2e} < {bound:.2e}")


def test_criterion_3_star_algebra():
    rng = np.random.default_rng(103)
    worst = 0.0
    for _ in range(100):
        f, g, h = (QSeries.random(rng, 16) for _ in range(3))
        worst = max(
            worst,
            star_mul(star_mul(f, g), h).max_abs_diff(star_mul(f, star_mul(g, h))),
            star_mul(f, g + h).max_abs_diff(star_mul(f, g) + star_mul(f, h)),
            star_mul(f + g, h).max_abs_diff(star_mul(f, h) + star_mul(g, h)),
        )
    unit = QSeries.unit(16)
    worst_inv = 0.0
    for _ in range(50):
        # tail entries of size ~0.5; heavier tails make the reciprocal's coefficients
        # grow past 1e6 and the residual floor eps * max|g| * ||f|| exceeds 1e-10
        coeffs = rng.normal(size=(17, 4)) * 0.25
        coeffs[0] = rng.normal(size=4)
        coeffs[0] *= rng.uniform(0.5, 2.0) / np.linalg.norm(coeffs[0])
        f = QSeries(coeffs)
        g = star_reciprocal(f)
        worst_inv = max(worst_inv, star_mul(f, g).max_abs_diff(unit), star_mul(g, f).max_abs_diff(unit))
    ok = worst < 1e-12 and worst_inv < 1e-10
    verdict(3, ok, f"star algebra, 100 triples {worst:.2e} < 1e-12, 50 reciprocals {worst_inv:.2e} < 1e-10")


def invertible_member(rng, n, m):
    # unitary D and ||A|| + ||B|| ||C|| <= 0.7 keep ||A - B D^-1 C|| <= 0.7 as well
    R = Realization.random(rng, n, m, m, a_norm=rng.uniform(0.1, 0.5))
    budget = rng.uniform(0.05, 0.2)
    B = R.B * (math.sqrt(budget) / operator_norm(R.B))
    C = R.C * (math.sqrt(budget) / operator_norm(R.C))
    return Realization(R.A, B, C, range_basis(QMatrix.random(rng, m, m)))


def test_criterion_4_realization_algebra():
    rng = np.random.default_rng(104)
    N = 16
    worst_prod = worst_inv = 0.0
    for _ in range(30):
        n1, n2 = (int(v) for v in rng.integers(0, 5, size=2))
        m, k, l = (int(v) for v in rng.integers(1, 3, size=3))
        R1 = Realization.random(rng, n1, k, m, a_norm=rng.uniform(0.1, 0.7))
        R2 = Realization.random(rng, n2, l, k, a_norm=rng.uniform(0.1, 0.7))
        conv = matrix_star_mul(transfer_series(R1, N), transfer_series(R2, N))
        worst_prod = max(worst_prod, transfer_series(product(R1, R2), N).max_abs_diff(conv))
        R = invertible_member(rng, max(n1, 1), m)
        G = matrix_star_mul(transfer_series(inverse(R), N), transfer_series(R, N))
        worst_inv = max(worst_inv, G.max_abs_diff(MatrixQSeries.identity(m, N)))
    ok = worst_prod < 1e-10 and worst_inv < 1e-10
    verdict(4, ok, f"realization product {worst_prod:.2e}, inverse {worst_inv:.2e} < 1e-10 over 30 pairs")


def test_criterion_5_system_transfer_agreement():
    rng = np.random.default_rng(105)
    exact = 0
    for _ in range(50):
        n, m, k = (int(v) for v in rng.integers(1, 4, size=3))
        R = Realization.random(rng, n, m, k)
        exact += impulse_response(R, 12) == markov_sequence(R, 11)
    R = realization_from_json(load_json(FIXTURES / "realization_generic.json"))
    u1 = signal_from_json(load_json(FIXTURES / "u1.json"))
    u2 = signal_from_json(load_json(FIXTURES / "u2.json"))
    rep = transfer_consistency(R, u1, u2, N=32, p_sample=Quaternion(0, 0.5))
    ok = exact == 50 and rep.degree >= 16 and rep.star_gap < 1e-9 and rep.pointwise_gap > 1e-3
    verdict(
        5,
        ok,
        f"impulse == markov in {exact}/50; star quotient gap {rep.star_gap:.2e} < 1e-9 "
        f"through degree {rep.degree}, pointwise gap {rep.pointwise_gap:.3f} > 1e-3",
    )


def test_criterion_6_ho_kalman():
    rng = np.random.default_rng(106)
    worst = 0.0
    dims_ok = 0
    for i in range(20):
        n = 1 + i % 3
        m, k = (int(v) for v in rng.integers(1, 3, size=2))
        R = Realization.random(rng, n, m, k)
        f = markov_sequence(R, 24)
        M = minimal_realization(f, T=12)
        dims_ok += M.state_dim == n
        worst = max(worst, max((a - b).max_abs() for a, b in zip(f, markov_sequence(M, 24))))
    R = Realization.random(rng, 3, 1, 2)
    W = range_basis(QMatrix.random(rng, 3, 3))
    U = unitary_equivalence(R, R.conjugate_by(W))
    defect = math.inf if U is None else operator_norm(U @ U.H - QMatrix.eye(3))
    ok = worst < 1e-8 and dims_ok == 20 and defect < 1e-8
    verdict(6, ok, f"Ho-Kalman 24 coefficients {worst:.2e} < 1e-8, dims {dims_ok}/20, ||UU*-I|| {defect:.2e} < 1e-8")


def test_criterion_7_kernel_suite():
    rng = np.random.default_rng(107)
    G = hardy_gram([random_in_ball(rng, 0.9) for _ in range(8)])
    lam = min_eigenvalue(G)
    psd = lam >= -1e-8 * max(1.0, operator_norm(G))
    s = blaschke_product([Quaternion(0, 0.4), Quaternion(0.2, 0, -0.3, 0.1)], 48)
    diff_ok = True
    for _ in range(10):
        resid, bound = difference_residual(s, random_in_ball(rng, 0.8), random_in_ball(rng, 0.8), 40)
        diff_ok &= resid <= bound
    worst_block = worst_id = 0.0
    for a in (QI * 0.6, (QI + QJ) * (1 / math.sqrt(8)), Quaternion(0.3, 0, 0, 0.4)):
        _, R = blaschke(a)
        M = R.block()
        worst_block = max(worst_block, (M @ M.H - QMatrix.eye(2)).max_abs(), (M.H @ M - QMatrix.eye(2)).max_abs())
        worst_id = max(worst_id, coisometry_kernel_check(R, N=40).identity_residual)
    ok = psd and diff_ok and worst_block < 1e-12 and worst_id < 1e-8
    verdict(
        7,
        ok,
        f"Hardy Gram min eigenvalue {lam:.2e}, k_s difference under bound {diff_ok}, "
        f"Blaschke block {worst_block:.2e} < 1e-12, coisometry identity {worst_id:.2e} < 1e-8",
    )


def circle_schur_oracle(zeros, radius=0.5, M=128, kmax=16):
    """Classical Schur algorithm on sampled boundary values of a real Blaschke product.

    s_k(0) is the mean over the circle; the transform is applied pointwise
    in complex arithmetic.
    """
    z = radius * np.exp(2j * np.pi * np.arange(M) / M)
    s = np.ones(M, dtype=complex)
    for a in zeros:
        s *= (z - a) / (1 - a * z)
    rho = []
    for _ in range(kmax):
        r = s.mean()
        rho.append(r)
        if abs(abs(r) - 1) < 1e-12:
            break
        s = (s - r) / (z * (1 - np.conj(r) * s))
    return np.array(rho)


def test_criterion_8_schur_oracle():
    rng = np.random.default_rng(108)
    worst = 0.0
    lengths_ok = True
    for _ in range(10):
        zeros = rng.uniform(-0.7, 0.7, size=int(rng.integers(1, 5)))
        s = blaschke_product([float(a) for a in zeros], 32)
        got = schur_algorithm(s, kmax=16)
        ref = circle_schur_oracle(zeros)
        lengths_ok &= len(got) == len(ref) and got.stop == "unimodular"
        for q, c in zip(got.rho, ref):
            worst = max(worst, (q - Quaternion(c.real, c.imag)).norm())
    ok = lengths_ok and worst < 1e-10
    verdict(8, ok, f"Schur coefficients vs complex oracle on C_i, 10 products, gap {worst:.2e} < 1e-10")


def test_criterion_9_schwarz_lemma():
    rng = np.random.default_rng(109)
    pts = default_points()
    n_ok = 0
    for _ in range(10):
        factors = [random_in_ball(rng, 0.7) for _ in range(int(rng.integers(1, 4)))]
        sigma = blaschke_product(factors, 64)
        s = QSeries(np.vstack([np.zeros((1, 4)), sigma.coeffs]))
        if not certify_multiplier(s, pts).certified:
            continue
        deflated = schur_transform(s)
        n_ok += certify_multiplier(deflated, pts).certified and deflated.max_abs_diff(sigma.truncate(64)) < 1e-14
    verdict(9, n_ok == 10, f"deflated multiplier certified at the 8 standard points in {n_ok}/10 cases")


def test_criterion_10_cli():
    stable = all(
        dumps(run_case(name)[1]) == (GOLDEN / f"{name}.json").read_text() for name in sorted(CASES)
    )
    repeat = run_case("certify_random") == run_case("certify_random")

    def code(*argv):
        return subprocess.run(
            [sys.executable, "-m", "qschur.cli", *argv], cwd=FIXTURES, capture_output=True, text=True
        ).returncode

    codes = (
        code("certify", "--s", "s_shift.json"),
        code("certify", "--s", "s_two.json"),
        code("certify", "--s", "malformed.json"),
    )
    ok = stable and repeat and codes == (0, 1, 2)
    verdict(10, ok, f"{len(CASES)} goldens byte-stable {stable}, seeded rerun stable {repeat}, exit codes {codes}")
