import json

import numpy as np
import pytest

import twistbench.solver as solver_mod
from twistbench import (
    DomainError,
    GraphField,
    SolveConfig,
    SpacelikeError,
    certificate_check,
    default_model,
    residual_field,
    rigidity_report,
    solve,
)

from conftest import flat_grw_model


def transition_model(resolution=128):
    return default_model(1, resolution=resolution, twist="separable_gauss")


class TestResidual:
    def test_slice_at_matching_target_is_zero(self):
        model = default_model(1, twist="grw_exp", interval=(-1.0, 1.0))
        graph = GraphField.constant(model, 0.3)
        R = residual_field(graph, target=1.0)
        assert np.max(np.abs(R)) == 0.0

    def test_transition_slice_is_maximal(self):
        model = default_model(1, twist="grw_gauss")
        R = residual_field(GraphField.constant(model, 0.0), target=0.0)
        assert np.max(np.abs(R)) == 0.0

    def test_offset_slice_closed_form(self):
        # f = exp(-t^2): d/dt log f = -2t, so u = 0.5 gives R = -n
        model = default_model(1, twist="grw_gauss")
        R = residual_field(GraphField.constant(model, 0.5), target=0.0)
        assert np.max(np.abs(R + 1.0)) <= 1e-12

    def test_nonspacelike_input_raises(self):
        model = flat_grw_model()
        grid = model.fiber
        h = grid.spacing[0]
        amp = 1.01 * h / np.sin(2 * np.pi * h)
        graph = GraphField(model, amp * np.sin(2 * np.pi * grid.coords[0]))
        with pytest.raises(SpacelikeError):
            residual_field(graph, target=0.0)


class TestCertificates:
    def test_exponential_model_excludes_low_targets(self):
        model = default_model(1, twist="grw_exp", interval=(-1.0, 1.0))
        cert = certificate_check(model, -0.5)
        assert cert is not None
        assert cert["reason"] == "bound"
        assert abs(cert["inf_dlog_f"] - 1.0) <= 1e-12
        assert abs(cert["sup_dlog_f"] - 1.0) <= 1e-12
        assert "interval" in cert and "note" in cert

    def test_matching_target_has_no_certificate(self):
        model = default_model(1, twist="grw_exp", interval=(-1.0, 1.0))
        assert certificate_check(model, 1.0) is None

    def test_gaussian_interval_bound(self):
        model = default_model(1, twist="grw_gauss", interval=(-2.0, 2.0))
        cert = certificate_check(model, 5.0)
        assert cert is not None
        assert cert["sup_dlog_f"] < 4.0
        assert certificate_check(model, 3.0) is None


class TestSolve:
    def test_transition_model_converges_to_transition_slice(self):
        model = transition_model()
        grid = model.fiber
        u0 = 0.3 + 0.1 * np.sin(2 * np.pi * grid.coords[0])
        cfg = SolveConfig(target=0.0, initial=GraphField(model, u0))
        outcome = solve(model, cfg)
        assert outcome.tag == "converged"
        assert outcome.residual_norm <= 1e-10
        assert np.max(np.abs(outcome.graph.u)) <= 1e-6
        assert outcome.report is not None

    def test_converged_outcome_passes_both_curvature_paths(self):
        model = transition_model()
        cfg = SolveConfig(target=0.0, initial={"kind": "random_trig", "seed": 4, "amplitude": 0.1})
        outcome = solve(model, cfg)
        assert outcome.tag == "converged"
        assert outcome.diagnostics["residual_primary"] <= 2e-10
        assert outcome.diagnostics["residual_secondary"] <= 2e-10
        assert outcome.diagnostics["max_margin"] <= 0.99

    def test_extremum_inequalities_on_converged(self):
        model = transition_model()
        cfg = SolveConfig(target=0.0, initial={"kind": "random_trig", "seed": 5, "amplitude": 0.1})
        outcome = solve(model, cfg)
        assert outcome.diagnostics["extremum_gap_min"] >= -1e-8
        assert outcome.diagnostics["extremum_gap_max"] >= -1e-8

    def test_grw_slice_family_converges_to_a_constant(self):
        model = default_model(1, twist="grw_exp", interval=(-1.0, 1.0))
        cfg = SolveConfig(target=1.0, initial={"kind": "random_trig", "seed": 8, "amplitude": 0.1})
        outcome = solve(model, cfg)
        assert outcome.tag == "converged"
        assert float(outcome.graph.u.max() - outcome.graph.u.min()) <= 1e-6

    def test_bound_certificate_returned_before_iterating(self):
        model = default_model(1, twist="grw_exp", interval=(-1.0, 1.0))
        cfg = SolveConfig(target=-0.5, initial={"kind": "constant", "value": 0.0})
        outcome = solve(model, cfg)
        assert outcome.tag == "nonexistence"
        assert outcome.certificate["reason"] == "bound"
        assert all(entry["phase"] != "newton" for entry in outcome.log)

    def test_nonspacelike_initializer_raises_constraint_error(self):
        model = flat_grw_model()
        cfg = SolveConfig(
            target=0.0,
            initial={"kind": "random_trig", "seed": 1, "amplitude": 3.0, "rescale": False},
        )
        with pytest.raises(SpacelikeError):
            solve(model, cfg)

    def test_budget_exhaustion_returns_not_converged(self):
        model = default_model(1, twist="separable_exp", interval=(-1.0, 1.0))
        cfg = SolveConfig(
            target=0.0,
            initial={"kind": "random_trig", "seed": 2, "amplitude": 0.1},
            check_certificate=False,
            max_newton_iters=2,
            fallback_chunk=3,
            fallback_max_sweeps=3,
        )
        outcome = solve(model, cfg)
        assert outcome.tag == "not_converged"
        assert "best_residual" in outcome.diagnostics

    def test_expanding_model_yields_drift_diagnostic(self):
        model = default_model(1, twist="separable_exp", interval=(-1.0, 1.0))
        cfg = SolveConfig(
            target=0.0,
            initial={"kind": "random_trig", "seed": 3, "amplitude": 0.1},
            check_certificate=False,
        )
        outcome = solve(model, cfg)
        assert outcome.tag in ("nonexistence", "not_converged")
        if outcome.tag == "nonexistence":
            assert outcome.certificate["reason"] == "drift"
            assert "note" in outcome.certificate

    def test_deterministic_iteration_log(self):
        model = transition_model()

        def run():
            cfg = SolveConfig(
                target=0.0,
                initial={"kind": "random_trig", "seed": 5, "amplitude": 0.1, "center": 0.3},
            )
            return solve(model, cfg)

        log_a = json.dumps(run().log, sort_keys=True)
        log_b = json.dumps(run().log, sort_keys=True)
        assert log_a == log_b

    def test_fallback_area_is_monotone_nondecreasing(self, monkeypatch):
        # force the fallback path by making Newton directions unavailable
        monkeypatch.setattr(solver_mod, "_krylov_step", lambda driver, u, R: None)
        model = transition_model()
        cfg = SolveConfig(
            target=0.0,
            initial={"kind": "random_trig", "seed": 6, "amplitude": 0.2, "center": 0.4},
            max_newton_iters=3,
            fallback_chunk=30,
            fallback_max_sweeps=60,
        )
        outcome = solve(model, cfg)
        areas = [e["area"] for e in outcome.log if e["phase"] == "fallback"]
        assert len(areas) >= 10
        assert all(b >= a - 1e-12 for a, b in zip(areas, areas[1:]))

    def test_fallback_products_have_descent_sign_in_transition_model(self, monkeypatch):
        # (d/dt f) H stays nonnegative along the relaxation toward the
        # transition slice, matching the sign hypothesis that forces slices
        monkeypatch.setattr(solver_mod, "_krylov_step", lambda driver, u, R: None)
        model = transition_model()
        cfg = SolveConfig(
            target=0.0,
            initial={"kind": "constant", "value": 0.4},
            max_newton_iters=3,
            fallback_chunk=30,
            fallback_max_sweeps=60,
        )
        outcome = solve(model, cfg)
        fallback = [e for e in outcome.log if e["phase"] == "fallback"]
        assert fallback
        assert all(e["dtf_H_min"] >= -1e-10 for e in fallback)


class TestRigidityReport:
    def test_transition_solution_report(self):
        model = transition_model()
        cfg = SolveConfig(target=0.0, initial={"kind": "random_trig", "seed": 7, "amplitude": 0.1})
        outcome = solve(model, cfg)
        report = rigidity_report(outcome)
        assert report.constancy_defect <= 1e-6
        assert report.max_abs_dtf_at_mean <= 1e-6
        assert report.transition_time is not None
        assert report.transition_gap <= 1e-6

    def test_requires_converged_maximal_outcome(self):
        model = default_model(1, twist="grw_exp", interval=(-1.0, 1.0))
        outcome = solve(model, SolveConfig(target=-0.5, initial={"kind": "constant", "value": 0.0}))
        with pytest.raises(DomainError):
            rigidity_report(outcome)
        cmc = solve(model, SolveConfig(target=1.0, initial={"kind": "constant", "value": 0.0}))
        assert cmc.tag == "converged"
        with pytest.raises(DomainError):
            rigidity_report(cmc)
