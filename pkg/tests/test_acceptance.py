"""Acceptance suite: one test per criterion.

Each ``check_N`` raises ``AssertionError`` on failure and returns a short
detail string.  Under pytest the conftest hook prints one ``criterion N:
PASS/FAIL`` line per test; running this file directly prints the same
lines together with the details.
"""
import math
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))

from conicsens.cones import Cone, Orthant, SecondOrder, contains, dual  # noqa: E402
from conicsens.problem import ConicProgram, Perturbation  # noqa: E402
from conicsens.sensitivity import (fd_verify, in_range, lipschitz_probe, phi,  # noqa: E402
                                   phi_dir_deriv, phi_increment_bounds,
                                   phi_increment_exact_polyhedral, phi_subdiff_contains,
                                   psi, psi_dir_deriv, psi_increment_bounds,
                                   psi_increment_exact_polyhedral)
from conicsens.solver import (OPTIMAL, PRIMAL_INFEASIBLE, UNBOUNDED,  # noqa: E402
                              certify_strict_dual, certify_strict_primal, solve_any,
                              verify_certificate)

from instances import (as_inequalities, infeasible_conic, strictly_feasible_conic,  # noqa: E402
                       strictly_feasible_lp, strictly_feasible_polyhedral, unbounded_conic)
from lp_oracle import lp_value  # noqa: E402

SEED = 2024
FD_GRID = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


def soc_example():
    return ConicProgram([[0, 0], [0, 1], [1, 0]], [-1, 0, 0], [1, 0], Cone((SecondOrder(3),)))


def soc_unattained():
    return ConicProgram([[1], [0], [0]], [0, 0, -1], [1], Cone((SecondOrder(3),)))


def unbounded_solutions():
    return ConicProgram([[1, 0], [0, 0]], [1, -1], [1, 0], Cone((Orthant(2),)))


def close(a, b, tol):
    return abs(float(a) - b) <= tol


def check_1():
    start = time.perf_counter()
    P = soc_example()
    d = np.array([1.0, 2.0, 3.0])
    sol = solve_any(P)
    assert sol.status == OPTIMAL and close(sol.value, 1.0, 1e-6)
    assert phi_subdiff_contains(P, [-1, 0, 1])
    assert not phi_subdiff_contains(P, [0, 0, 1])
    assert close(phi_dir_deriv(P, d), 2.0, 1e-5)
    assert close(phi(P, P.b + 0.05 * d), 1.1, 1e-6)
    bounds = phi_increment_bounds(P, d, 0.05)
    assert close(bounds.upper_slope, 4.0, 1e-5)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"runtime {elapsed:.2f} s"
    return f"runtime {elapsed:.3f} s"


def check_2():
    P = soc_unattained()
    d = np.array([0.0, 1.0, -1.0])
    for t in (0.1, 0.5):
        val = float(phi(P, P.b + t * d))
        assert close(val, -math.sqrt(2 * t + 1), 1e-6)
        bounds = phi_increment_bounds(P, d, t)
        assert close(bounds.lower, -1 - t, 1e-5) and close(bounds.upper, -1.0, 1e-5)
        assert float(bounds.lower) <= val <= float(bounds.upper)
        assert close(bounds.upper_slope, 0.0, 1e-5) and not bounds.upper_attained
    return f"F(D) supremum {float(bounds.upper_slope):.2e}, unattained"


def check_3():
    P = soc_example()
    h = np.array([0.0, -1.0])
    for t in (0.1, 0.5, 0.9):
        assert close(psi(P, P.c + t * h), math.sqrt(1 - t * t), 1e-6)
    assert close(psi_dir_deriv(P, h), 0.0, 1e-5)
    lower, upper = psi_increment_bounds(P, h, 0.5)
    assert lower.tag == "-inf" and close(upper, 1.0, 1e-5)
    return "lower -inf, upper 1"


def check_4():
    P = unbounded_solutions()
    cert = certify_strict_dual(P)
    y0 = np.array([1.0, 1.0])
    assert cert.strictly_feasible and verify_certificate(P, cert)
    assert np.allclose(P.A.T @ y0, P.c) and contains(dual(P.K), y0, 0.0)
    sol = solve_any(P)
    assert sol.status == OPTIMAL and close(sol.value, 1.0, 1e-6)
    for x in ([1.0, 0.0], [1.0, 5.0]):
        x = np.array(x)
        assert contains(P.K, P.A @ x - P.b, 1e-9) and close(P.c @ x, float(sol.value), 1e-6)
    ok, _ = in_range(P.A, [0, 1])
    assert not ok and psi_dir_deriv(P, [0, 1]).tag == "-inf"
    return "psi'(c; (0,1)) = -inf"


def _polyhedral_instance(rng, i):
    kind = i % 3
    if kind == 0:
        return strictly_feasible_lp(rng), kind
    if kind == 1:
        return strictly_feasible_lp(rng, integer=True), kind
    return strictly_feasible_polyhedral(rng), kind


def check_5():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    failures = []
    for i in range(200):
        P, kind = _polyhedral_instance(rng, i)
        A, b = as_inequalities(P)
        v = lp_value(A, b, P.c)
        tol = 1e-6 * (1 + abs(v))
        if not close(phi(P, P.b), v, tol):
            failures.append((i, "value"))
            continue
        d = rng.integers(-2, 3, P.m).astype(float) if kind == 1 else rng.standard_normal(P.m)
        slope, tau = phi_increment_exact_polyhedral(P, d)
        for t in (tau, tau / 2, tau / 8, tau * 1e-3):
            A2, b2 = as_inequalities(P.replace(b=P.b + t * d))
            if abs(lp_value(A2, b2, P.c) - (v + t * float(slope))) > tol:
                failures.append((i, "rhs", t))
        h = P.A.T @ rng.standard_normal(P.m)
        slope, tau = psi_increment_exact_polyhedral(P, h)
        for t in (tau, tau / 2, tau / 8, tau * 1e-3):
            if abs(lp_value(A, b, P.c + t * h) - (v + t * float(slope))) > tol:
                failures.append((i, "obj", t))
    elapsed = time.perf_counter() - start
    assert not failures, f"{len(failures)} failures, first {failures[:3]}"
    assert elapsed < 60.0, f"runtime {elapsed:.1f} s"
    return f"200 instances in {elapsed:.1f} s"


def check_6():
    rng = np.random.default_rng(SEED)
    failures, worst = [], 0.0
    for i in range(100):
        P = strictly_feasible_conic(rng)
        d = rng.standard_normal(P.m)
        h = rng.standard_normal(P.n)
        d /= np.linalg.norm(d)
        h /= np.linalg.norm(h)
        for deriv, table in ((phi_dir_deriv(P, d), fd_verify(P, Perturbation.rhs(d), FD_GRID)),
                             (psi_dir_deriv(P, h), fd_verify(P, Perturbation.obj(h), FD_GRID))):
            err = abs(float(table.rows[-1][1]) - float(deriv))
            worst = max(worst, err)
            if not table.monotone() or err > 1e-4:
                failures.append((i, table.kind, err, table.monotone()))
    assert not failures, f"{len(failures)} failures: {failures}"
    return f"worst |q(1e-5) - derivative| = {worst:.2e}"


def _gap_instances(rng):
    for _ in range(40):
        yield strictly_feasible_conic(rng)
    for _ in range(20):
        yield strictly_feasible_lp(rng)
    for _ in range(10):
        yield strictly_feasible_polyhedral(rng)
    yield soc_example()
    yield unbounded_solutions()


def check_7():
    rng = np.random.default_rng(SEED)
    checked = 0
    for P in _gap_instances(rng):
        cp, cd = certify_strict_primal(P), certify_strict_dual(P)
        for cert in (cp, cd):
            if cert.strictly_feasible:
                assert verify_certificate(P, cert, 1e-6)
        if cp.t_star >= 1e-3 and cd.t_star >= 1e-3:
            sol = solve_any(P)
            assert sol.status == OPTIMAL
            v = float(sol.value)
            gap = abs(P.c @ sol.x_opt - P.b @ sol.y_opt)
            assert gap <= 1e-7 * (1 + abs(v)), f"gap {gap:.2e} at v={v:.3g}"
            checked += 1
    assert checked >= 50
    rays = 0
    for make in [infeasible_conic] * 20 + [unbounded_conic] * 20:
        P = make(rng)
        sol = solve_any(P)
        if make is infeasible_conic:
            assert sol.status == PRIMAL_INFEASIBLE
            y = sol.certificate
            assert contains(dual(P.K), y, 1e-6) and P.b @ y > 0
            assert np.linalg.norm(P.A.T @ y) <= 1e-6 * (P.b @ y)
        else:
            assert sol.status == UNBOUNDED
            r = sol.ray / np.linalg.norm(sol.ray)
            assert contains(P.K, P.A @ r, 1e-6) and P.c @ r < 0
        rays += 1
    return f"gap checked on {checked} instances, {rays} certificates re-verified"


def check_8():
    rng = np.random.default_rng(SEED)
    programs = [soc_example()] + [strictly_feasible_conic(rng) for _ in range(20)]
    worst = 0.0
    for P in programs:
        a = lipschitz_probe(P, 0.1, 50, seed=1)
        b = lipschitz_probe(P, 0.1, 50, seed=2)
        assert a.finite_everywhere and b.finite_everywhere
        assert math.isfinite(a.modulus_estimate) and math.isfinite(b.modulus_estimate)
        top = max(a.modulus_estimate, b.modulus_estimate)
        spread = abs(a.modulus_estimate - b.modulus_estimate) / top if top > 0 else 0.0
        worst = max(worst, spread)
        assert spread <= 0.10, f"seed spread {spread:.1%}"
    return f"worst seed spread {worst:.1%}"


def test_criterion_1_soc_golden_values():
    check_1()


def test_criterion_2_unattained_dual_bound():
    check_2()


def test_criterion_3_cost_perturbation():
    check_3()


def test_criterion_4_unbounded_solution_set():
    check_4()


def test_criterion_5_polyhedral_exactness():
    check_5()


def test_criterion_6_fd_consistency():
    check_6()


def test_criterion_7_duality_and_certificates():
    check_7()


def test_criterion_8_lipschitz_probe():
    check_8()


if __name__ == "__main__":
    status = 0
    for n, fn in enumerate((check_1, check_2, check_3, check_4,
                            check_5, check_6, check_7, check_8), start=1):
        try:
            print(f"criterion {n}: PASS ({fn()})")
        except AssertionError as exc:
            status = 1
            print(f"criterion {n}: FAIL ({exc})")
    sys.exit(status)
