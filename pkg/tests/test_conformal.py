import numpy as np
import pytest

from twistbench import (
    ConformalFactor,
    DomainError,
    GraphField,
    SolveConfig,
    conformal_laplacian_check,
    default_model,
    maximal_power_check,
    random_trig_graph,
    slice_mean_curvature,
    slice_shape_transform,
    solve,
    static_laplacian_check,
    transform_mean_curvature,
)

from conftest import random_trig_field, ripple


class TestTransformMeanCurvature:
    def test_constant_factor_rescales(self):
        model = default_model(1, twist="separable_gauss")
        graph = random_trig_graph(model, seed=1, amplitude=0.08)
        from twistbench import mean_curvature

        H1 = mean_curvature(graph)
        H2 = transform_mean_curvature(graph, ConformalFactor.constant(0.7))
        assert np.max(np.abs(H2 - np.exp(-0.7) * H1)) <= 1e-13

    def test_static_picture_makes_slices_geodesic(self):
        model = default_model(1, twist="separable_gauss")
        graph = GraphField.constant(model, 0.35)
        H2 = transform_mean_curvature(graph, ConformalFactor.static_picture(model.twist))
        assert np.max(np.abs(H2)) <= 1e-13

    def test_generalized_solution_has_tiny_static_curvature(self):
        model = default_model(1, twist="separable_gauss")
        cfg = SolveConfig(
            target="generalized",
            initial={"kind": "random_trig", "seed": 2, "amplitude": 0.08, "center": 0.3},
        )
        outcome = solve(model, cfg)
        assert outcome.tag == "converged"
        H2 = transform_mean_curvature(
            outcome.graph, ConformalFactor.static_picture(model.twist)
        )
        assert np.max(np.abs(H2)) <= 1e-8


class TestSliceShapeTransform:
    def test_static_picture_kills_umbilic_factor(self):
        model = default_model(1, twist="separable_gauss")
        lam2 = slice_shape_transform(model, 0.4, ConformalFactor.static_picture(model.twist))
        assert np.max(np.abs(lam2)) <= 1e-14

    def test_constant_factor_rescales_umbilic_factor(self):
        model = default_model(1, twist="separable_gauss")
        lam1 = -slice_mean_curvature(model, 0.4)
        lam2 = slice_shape_transform(model, 0.4, ConformalFactor.constant(0.5))
        assert np.max(np.abs(lam2 - np.exp(-0.5) * lam1)) <= 1e-14

    def test_fiber_only_factor_rescales_pointwise(self):
        model = default_model(1, twist="separable_gauss")
        phi = ConformalFactor.fiber_only(ripple(model.fiber, coeff=0.3))
        lam1 = -slice_mean_curvature(model, 0.4)
        phi_vals = phi.value(0.4, model.fiber)
        lam2 = slice_shape_transform(model, 0.4, phi)
        assert np.max(np.abs(lam2 - np.exp(-phi_vals) * lam1)) <= 1e-14


def catalog(model):
    return [
        ConformalFactor.constant(0.3),
        ConformalFactor.static_picture(model.twist),
        ConformalFactor.static_picture(model.twist, power=2.0),
        ConformalFactor.fiber_only(ripple(model.fiber, coeff=0.3, phase=0.4)),
    ]


class TestConformalLaplacian:
    def test_trivial_factor_gives_roundoff_defect(self):
        model = default_model(2, resolution=16, twist="separable_gauss")
        graph = random_trig_graph(model, seed=3, amplitude=0.08)
        h = random_trig_field(model.fiber, seed=4)
        check = conformal_laplacian_check(h, ConformalFactor.constant(0.0), graph)
        assert check.max_defect <= 1e-12

    def test_dimension_two_is_exact_for_all_factors(self):
        model = default_model(2, resolution=32, twist="separable_gauss")
        graph = random_trig_graph(model, seed=5, amplitude=0.08)
        h = random_trig_field(model.fiber, seed=6)
        for phi in catalog(model):
            assert conformal_laplacian_check(h, phi, graph).max_defect <= 1e-10

    @pytest.mark.parametrize("dim,base", [(1, 32), (3, 8)])
    def test_defect_decays_at_second_order(self, dim, base):
        worst = []
        for factor in (1, 2, 4):
            model = default_model(dim, resolution=base * factor, twist="separable_gauss")
            graph = random_trig_graph(model, seed=7, amplitude=0.05, max_mode=1)
            h = random_trig_field(model.fiber, seed=8)
            worst.append(
                max(conformal_laplacian_check(h, phi, graph).max_defect for phi in catalog(model))
            )
        assert np.log2(worst[-2] / worst[-1]) >= 1.9


class TestStaticPicture:
    def test_slice_defects_vanish(self):
        model = default_model(2, resolution=16, twist="separable_gauss")
        checks = static_laplacian_check(GraphField.constant(model, 0.3))
        assert checks.main.max_defect <= 1e-12
        assert checks.laplacian_relation.max_defect <= 1e-12
        assert checks.gradient_pairing.max_defect <= 1e-12

    def test_grw_normal_term_reduces_to_boost_only(self):
        model = default_model(1, twist="grw_gauss")
        graph = random_trig_graph(model, seed=9, amplitude=0.08)
        checks = static_laplacian_check(graph)
        # fiber partials vanish, so all three identities still close at O(h^2)
        assert checks.main.max_defect <= 1e-2
        assert checks.gradient_pairing.max_defect <= 1e-3

    def test_separable_defects_decay_at_second_order(self):
        defects = {"main": [], "relation": [], "pairing": []}
        for m in (16, 32, 64):
            model = default_model(2, resolution=m, twist="separable_gauss")
            graph = random_trig_graph(model, seed=10, amplitude=0.05, max_mode=1)
            checks = static_laplacian_check(graph)
            defects["main"].append(checks.main.max_defect)
            defects["relation"].append(checks.laplacian_relation.max_defect)
            defects["pairing"].append(checks.gradient_pairing.max_defect)
        for values in defects.values():
            assert np.log2(values[-2] / values[-1]) >= 1.9


class TestMaximalPowerRescaling:
    def test_maximal_slice_in_transition_model(self):
        model = default_model(3, resolution=10, twist="separable_gauss")
        graph = GraphField.constant(model, 0.0)  # transition slice: H = 0
        check = maximal_power_check(graph)
        assert check.max_defect <= 1e-13

    def test_requires_three_dimensional_fiber(self):
        model = default_model(2, resolution=16, twist="separable_gauss")
        with pytest.raises(DomainError):
            maximal_power_check(GraphField.constant(model, 0.0))

    def test_rejects_non_maximal_input(self):
        model = default_model(3, resolution=10, twist="separable_gauss")
        with pytest.raises(DomainError):
            maximal_power_check(GraphField.constant(model, 0.4))

    def test_chained_power_factors_decay_at_second_order(self):
        # the nondegenerate content routes through the rescaling law with
        # phi = -log f and phi = -p log f, p = 2/(n-2) = 2 in dimension 3
        worst = []
        for m in (16, 32, 64):
            model = default_model(3, resolution=m, twist="separable_gauss")
            graph = random_trig_graph(model, seed=11, amplitude=0.05, max_mode=1)
            h = random_trig_field(model.fiber, seed=12)
            worst.append(
                max(
                    conformal_laplacian_check(
                        h, ConformalFactor.static_picture(model.twist, power=p), graph
                    ).max_defect
                    for p in (1.0, 2.0)
                )
            )
        assert np.log2(worst[-2] / worst[-1]) >= 1.9
