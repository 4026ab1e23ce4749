import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from conicsens.cones import Cone, Orthant, PolyhedralH, SecondOrder, contains
from conicsens.errors import DimensionError, NotPolyhedral, SchemaError
from conicsens.problem import (ConicProgram, Perturbation, build_dual, load_problem,
                               parse_problem, perturb, reduce_polyhedral, serialize_problem)
from conicsens.solver import solve_any

from lp_oracle import lp_value


def test_dimension_checks():
    with pytest.raises(DimensionError):
        ConicProgram([[1, 0]], [1, 2], [1, 0], Cone((Orthant(2),)))
    with pytest.raises(DimensionError):
        ConicProgram([[1]], [np.inf], [1], Cone((Orthant(1),)))


class TestDual:
    def test_orthant_example(self, unbounded_solutions):
        D = build_dual(unbounded_solutions)
        assert D.form == "dual"
        assert D.is_feasible([1, 1])
        assert D.is_feasible([1, 0])
        assert not D.is_feasible([0.5, 1])

    def test_soc_example(self, soc_example):
        D = build_dual(soc_example)
        for y1 in (-1, -0.3, 0, 1):
            assert D.is_feasible([y1, 0, 1])
        assert not D.is_feasible([1.2, 0, 1])
        assert not D.is_feasible([0, 0.1, 1])

    def test_weak_duality_sampled(self, soc_example):
        rng = np.random.default_rng(5)
        P = soc_example
        for _ in range(200):
            x = rng.uniform(-3, 3, 2)
            y1 = rng.uniform(-1, 1)
            if P.is_feasible(x):
                assert P.c @ x >= P.b @ np.array([y1, 0, 1]) - 1e-12


class TestReduction:
    def test_orthant_unchanged(self, box_lp):
        assert reduce_polyhedral(box_lp) is box_lp

    def test_identity_h(self):
        P = ConicProgram(np.eye(2), [1, 0], [1, 1], Cone((PolyhedralH(np.eye(2)),)))
        R = reduce_polyhedral(P)
        assert R.K == Cone((Orthant(2),))
        assert_array_equal(R.A, P.A)

    def test_two_row_h(self):
        B = np.array([[1.0, 0.0], [1.0, 1.0]])
        P = ConicProgram(np.eye(2), [1, 0], [1, 1], Cone((PolyhedralH(B),)))
        R = reduce_polyhedral(P)
        assert_allclose(R.A, B)
        assert_allclose(R.b, [1, 1])
        assert lp_value(R.A, R.b, R.c) == pytest.approx(1.0)
        assert float(solve_any(P).value) == pytest.approx(1.0, abs=1e-7)
        assert float(solve_any(R).value) == pytest.approx(1.0, abs=1e-7)

    def test_rejects_soc(self, soc_example):
        with pytest.raises(NotPolyhedral):
            reduce_polyhedral(soc_example)

    def test_random_soundness(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            B = rng.standard_normal((4, 3))
            B *= np.sign(B @ np.ones(3))[:, None]
            A = rng.standard_normal((3, 2))
            b = A @ rng.standard_normal(2) - np.ones(3)
            c = A.T @ (B.T @ rng.uniform(0.1, 1, 4))
            P = ConicProgram(A, b, c, Cone((PolyhedralH(B),)))
            v1, v2 = solve_any(P).value, solve_any(reduce_polyhedral(P)).value
            assert abs(float(v1) - float(v2)) <= 1e-7 * (1 + abs(float(v1)))


class TestPerturb:
    def test_zero_step(self, soc_example):
        assert perturb(soc_example, Perturbation.rhs([1, 0, 0], 0.0)) == soc_example

    def test_rhs_and_obj(self, soc_example):
        assert_allclose(perturb(soc_example, Perturbation.rhs([1, 0, 0], 0.1)).b, [-0.9, 0, 0])
        assert_allclose(perturb(soc_example, Perturbation.obj([0, -1], 0.5)).c, [1, -0.5])

    def test_affine_in_t(self, soc_example):
        d = np.array([0.3, -1.0, 2.0])
        once = perturb(soc_example, Perturbation.rhs(d, 0.75))
        twice = perturb(perturb(soc_example, Perturbation.rhs(d, 0.5)), Perturbation.rhs(d, 0.25))
        assert_allclose(once.b, twice.b, atol=1e-15)

    def test_validation(self, soc_example):
        with pytest.raises(DimensionError):
            perturb(soc_example, Perturbation.obj([1, 2, 3], 1.0))
        with pytest.raises(ValueError):
            Perturbation.rhs([1.0], -1.0)


class TestJson:
    def test_round_trip_bit_exact(self):
        rng = np.random.default_rng(2)
        P = ConicProgram(rng.standard_normal((5, 3)), rng.standard_normal(5),
                         rng.standard_normal(3), Cone((Orthant(2), SecondOrder(3))))
        Q = parse_problem(serialize_problem(P))
        assert Q == P

    def test_minimal_document(self):
        P = parse_problem('{"n":1,"m":1,"A":[[1]],"b":[0],"c":[1],'
                          '"cone":{"blocks":[{"type":"orthant","dim":1}]}}')
        assert P.m == P.n == 1

    def test_dimension_error(self):
        doc = {"n": 1, "m": 2, "A": [[1], [2]], "b": [0, 0], "c": [1],
               "cone": {"blocks": [{"type": "orthant", "dim": 3}]}}
        with pytest.raises(DimensionError):
            parse_problem(json.dumps(doc))

    def test_schema_diagnostics(self):
        text = '{\n  "n": 1,\n  "m": "two",\n  "A": [[1]],\n  "b": [0],\n  "c": [1],\n' \
               '  "cone": {"blocks": [{"type": "orthant", "dim": 1}]}\n}'
        with pytest.raises(SchemaError) as err:
            parse_problem(text)
        assert err.value.field == "m"
        assert err.value.line == 3
        with pytest.raises(SchemaError) as err:
            parse_problem('{"n": 1,\n "m": }')
        assert err.value.line == 2
        with pytest.raises(SchemaError):
            parse_problem('{"n": 1}')

    def test_fixture_loads(self, fixtures_dir):
        P = load_problem(f"{fixtures_dir}/example_5_1.json")
        assert float(solve_any(P).value) == pytest.approx(1.0, abs=1e-7)
        assert P.K == Cone((SecondOrder(3),))
        assert contains(P.K, P.A @ [1.0, 0.0] - P.b, 1e-12)
