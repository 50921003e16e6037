"""Model definitions: right-hand sides, Jacobians, equilibria, stability tables."""

import numpy as np
import pytest

from sepkit import models
from sepkit.models import (
    NON_HYPERBOLIC,
    SADDLE,
    STABLE,
    UNSTABLE,
    ThreePopParams,
    TwoPopParams,
)

from conftest import THREE_POP, TWO_POP


def random_two_pop(rng):
    return TwoPopParams(*rng.uniform(0.1, 5.0, 6), b=rng.uniform(0, 1))


def random_three_pop(rng):
    return ThreePopParams(*rng.uniform(0.1, 5.0, 10),
                          b=rng.uniform(0, 1), e=rng.uniform(0, 1))


class TestParams:
    def test_positivity_enforced(self):
        with pytest.raises(ValueError):
            TwoPopParams(p=-1, r=1, a=2, c=3, u=1, z=3, b=0.5)
        with pytest.raises(ValueError):
            TwoPopParams(p=2, r=1, a=2, c=3, u=0.0, z=3, b=0.5)

    def test_niche_fraction_range(self):
        with pytest.raises(ValueError):
            TwoPopParams(p=2, r=1, a=2, c=3, u=1, z=3, b=1.5)
        with pytest.raises(ValueError):
            ThreePopParams(**{**THREE_POP, "e": -0.1})

    def test_dims(self, p2, p3):
        assert p2.dim == 2
        assert p3.dim == 3


class TestRhs:
    def test_origin_is_equilibrium(self, p2, p3):
        assert np.array_equal(models.rhs(p2, [0.0, 0.0]), [0.0, 0.0])
        assert np.array_equal(models.rhs(p3, [0.0, 0.0, 0.0]), [0.0, 0.0, 0.0])

    def test_carrying_capacity_axis_point(self, p2):
        # (u, 0) is an equilibrium of the two-population model
        assert np.array_equal(models.rhs(p2, [p2.u, 0.0]), [0.0, 0.0])

    def test_hand_evaluated_interior_point(self, p2):
        # p(1-1/u)*1 - a*1*(1-b)*1 = -1;  r(1-1/z)*1 - c*1*(1-b)*1 = 2/3 - 3/2
        got = models.rhs(p2, [1.0, 1.0])
        assert np.allclose(got, [-1.0, 2.0 / 3.0 - 1.5], rtol=0, atol=1e-15)

    def test_dimension_mismatch(self, p2, p3):
        with pytest.raises(ValueError):
            models.rhs(p2, [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            models.jacobian(p3, [1.0, 2.0])


class TestJacobian:
    @pytest.mark.parametrize("model", ["two_pop", "three_pop"])
    def test_matches_finite_differences(self, model, p2, p3):
        params = p2 if model == "two_pop" else p3
        rng = np.random.default_rng(101)
        h = 1e-6
        for _ in range(100):
            x = rng.uniform(0.0, 10.0, params.dim)
            J = models.jacobian(params, x)
            Jfd = np.empty_like(J)
            for k in range(params.dim):
                e = np.zeros(params.dim)
                e[k] = h
                Jfd[:, k] = (models.rhs(params, x + e)
                             - models.rhs(params, x - e)) / (2 * h)
            scale = max(1.0, np.max(np.abs(J)))
            assert np.max(np.abs(J - Jfd)) / scale < 1e-6

    def test_origin_eigenvalues_are_growth_rates(self, p2):
        eig = sorted(np.linalg.eigvals(models.jacobian(p2, [0.0, 0.0])).real)
        assert eig == pytest.approx([1.0, 2.0], abs=1e-14)


class TestEquilibria2D:
    def test_reference_locations(self, p2):
        eqs = {e.label: e for e in models.equilibria(p2)}
        assert np.array_equal(eqs["E1"].location, [0.0, 3.0])
        assert np.array_equal(eqs["E2"].location, [1.0, 0.0])
        assert np.max(np.abs(eqs["E3"].location - [0.4, 1.2])) < 1e-12

    def test_reference_classification(self, p2):
        eqs = {e.label: e for e in models.equilibria(p2)}
        assert eqs["E0"].stability == UNSTABLE
        assert eqs["E1"].stability == STABLE
        assert eqs["E2"].stability == STABLE
        assert eqs["E3"].stability == SADDLE
        assert all(e.feasible for e in eqs.values())

    def test_saddle_has_mixed_real_parts(self, p2):
        e3 = models.equilibria(p2)[3]
        re = e3.eigenvalues.real
        assert re.min() < 0 < re.max()

    def test_niche_one_decouples(self):
        # b=1 removes all coupling; E3 = (u, z), the pair of logistic equilibria
        params = TwoPopParams(**{**TWO_POP, "b": 1.0})
        e3 = {e.label: e for e in models.equilibria(params)}["E3"]
        assert np.array_equal(e3.location, [params.u, params.z])
        assert e3.feasible and e3.stability == STABLE


class TestEquilibria3D:
    def test_reference_stable_pair(self, p3):
        eqs = {e.label: e for e in models.equilibria(p3)}
        assert np.array_equal(eqs["E3"].location, [1.5, 2.0, 0.0])
        assert np.array_equal(eqs["E4"].location, [0.0, 0.0, 3.0])
        assert eqs["E3"].stability == STABLE
        assert eqs["E4"].stability == STABLE

    def test_reference_infeasible_pair(self, p3):
        eqs = {e.label: e for e in models.equilibria(p3)}
        assert not eqs["E5"].feasible
        assert not eqs["E6"].feasible

    def test_interior_point_is_saddle(self, p3):
        e7 = {e.label: e for e in models.equilibria(p3)}["E7"]
        assert e7.feasible
        assert e7.stability == SADDLE
        # location from the coexistence closed form
        assert np.max(np.abs(e7.location
                             - [1.4171270718232044, 1.8895027624309392,
                                0.008287292817679558])) < 1e-12

    def test_all_locations_are_fixed_points(self, p3):
        for eq in models.equilibria(p3):
            assert np.max(np.abs(models.rhs(p3, eq.location))) < 1e-10


class TestEquilibriaProperties:
    @pytest.mark.parametrize("draw", [random_two_pop, random_three_pop])
    def test_rhs_vanishes_at_equilibria(self, draw):
        # the 1e-10 bound is stated for populations O(1-10); near-degenerate
        # denominators push equilibria far out, so scale by the coordinate size
        rng = np.random.default_rng(7)
        for _ in range(200):
            params = draw(rng)
            for eq in models.equilibria(params):
                if eq.degenerate:
                    continue
                scale = max(1.0, np.max(np.abs(eq.location)))
                assert np.max(np.abs(models.rhs(params, eq.location))) < 1e-10 * scale

    @pytest.mark.parametrize("draw", [random_two_pop, random_three_pop])
    def test_boundary_rows_always_feasible(self, draw):
        always = {2: ("E0", "E1", "E2"), 3: ("E0", "E1", "E2", "E3", "E4")}
        rng = np.random.default_rng(8)
        for _ in range(200):
            params = draw(rng)
            eqs = {e.label: e for e in models.equilibria(params)}
            for label in always[params.dim]:
                assert eqs[label].feasible

    def test_degenerate_denominator_flagged_not_dropped(self):
        # p*r == a*u*c*z*(1-b)^2 makes the interior denominator vanish
        params = TwoPopParams(p=2.0, r=2.0, a=1.0, c=4.0, u=1.0, z=1.0, b=0.0)
        eqs = models.equilibria(params)
        assert len(eqs) == 4
        e3 = eqs[3]
        assert e3.degenerate
        assert not e3.feasible
        assert e3.label == "E3"
        # degenerate point is excluded from the attractor list
        assert "E3" not in [e.label for e in models.stable_attractors(params)]

    def test_non_hyperbolic_detected(self):
        # p = a*z*(1-b) zeroes one eigenvalue at E1
        params = TwoPopParams(p=2.0, r=1.0, a=1.0, c=3.0, u=1.0, z=2.0, b=0.0)
        e1 = {e.label: e for e in models.equilibria(params)}["E1"]
        assert e1.stability == NON_HYPERBOLIC

    def test_separatrix_saddle_selects_interior_point(self, p2, p3):
        assert models.separatrix_saddle(p2).label == "E3"
        assert models.separatrix_saddle(p3).label == "E7"
        # decoupled model has no interior saddle at all
        params = TwoPopParams(**{**TWO_POP, "b": 1.0})
        with pytest.raises(ValueError):
            models.separatrix_saddle(params)

    def test_record_is_json_ready(self, p2):
        import json

        for eq in models.equilibria(p2):
            rec = eq.to_record()
            json.dumps(rec)
            assert set(rec) == {"label", "location", "feasible", "stability",
                                "eigenvalues", "degenerate"}


class TestTableConditions:
    def test_reference_rows_2d(self, p2):
        table = models.table_conditions(p2)
        # p=2 < a*z*(1-b)=3 and r=1 < c*u*(1-b)=1.5
        assert table["E1"]["stable"]
        assert table["E2"]["stable"]
        assert not table["E3"]["stable"]
        assert table["E3"]["feasible"]

    def test_reference_rows_3d(self, p3):
        table = models.table_conditions(p3)
        # r=9 < f*u*(1-b) + v*g*(1-e) = 4.5 + 5
        assert table["E3"]["stable"]
        assert table["E4"]["stable"]
        assert not table["E5"]["feasible"]
        assert not table["E6"]["feasible"]
        assert "E7" not in table  # interior point is classified numerically only

    @pytest.mark.parametrize("draw", [random_two_pop, random_three_pop])
    def test_agrees_with_eigenvalues_when_feasible_hyperbolic(self, draw):
        rng = np.random.default_rng(9)
        for _ in range(300):
            params = draw(rng)
            table = models.table_conditions(params)
            for eq in models.equilibria(params):
                row = table.get(eq.label)
                if row is None or eq.degenerate or not eq.feasible:
                    continue
                if eq.stability == NON_HYPERBOLIC:
                    continue
                assert row["feasible"] == eq.feasible
                assert row["stable"] == (eq.stability == STABLE), (
                    f"{eq.label} at {params}"
                )

    @pytest.mark.parametrize("draw", [random_two_pop, random_three_pop])
    def test_feasibility_column_matches_closed_forms(self, draw):
        rng = np.random.default_rng(10)
        for _ in range(300):
            params = draw(rng)
            table = models.table_conditions(params)
            for eq in models.equilibria(params):
                row = table.get(eq.label)
                if row is None or eq.degenerate:
                    continue
                assert row["feasible"] == eq.feasible
