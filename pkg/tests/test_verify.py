import numpy as np
import pytest

from twistbench import FiberGrid, default_model
from twistbench.verify import (
    DEFAULT_THRESHOLDS,
    IDENTITY_KINDS,
    run_convergence_study,
    run_identity_suite,
)


class TestIdentitySuite:
    def test_default_suite_passes_on_standard_2d_model(self):
        model = default_model(2, resolution=64, twist="separable_gauss")
        rows = run_identity_suite(model, count=3, seed0=100)
        assert rows
        failing = [r["identity"] for r in rows if not r["pass"]]
        assert failing == []

    def test_rows_carry_grid_and_threshold_metadata(self):
        model = default_model(1, resolution=64, twist="separable_gauss")
        rows = run_identity_suite(model, count=2, identities=["support_identity"])
        row = rows[0]
        assert row["dim"] == 1
        assert row["resolution"] == [64]
        assert row["kind"] == "exact"
        assert row["max_defect"] <= row["threshold"]

    def test_unknown_identity_rejected(self):
        model = default_model(1, resolution=32, twist="separable_gauss")
        with pytest.raises(KeyError):
            run_identity_suite(model, identities=["nonsense"])

    def test_threshold_override(self):
        model = default_model(1, resolution=128, twist="separable_gauss")
        rows = run_identity_suite(
            model,
            count=2,
            identities=["mean_curvature_two_path"],
            thresholds={"mean_curvature_two_path": 1e-30},
        )
        assert not rows[0]["pass"]

    def test_corrupted_stencil_fails_with_named_identity(self, monkeypatch):
        # negative control: break the central difference and expect the
        # stencil-sensitive identities to fail while exact ones survive
        def lopsided(self, field, axis):
            h = self.spacing[axis]
            return (np.roll(field, -1, axis=axis) - field) / h

        monkeypatch.setattr(FiberGrid, "diff", lopsided)
        model = default_model(1, resolution=128, twist="separable_gauss")
        rows = run_identity_suite(
            model,
            count=2,
            identities=["fiber_gradient_accuracy", "support_identity"],
        )
        by_name = {r["identity"]: r for r in rows}
        assert not by_name["fiber_gradient_accuracy"]["pass"]
        assert by_name["support_identity"]["pass"]

    def test_conformal_identity_is_exact_only_in_dimension_two(self):
        rows2 = run_identity_suite(
            default_model(2, resolution=16, twist="separable_gauss"),
            count=1,
            identities=["conformal_laplacian"],
        )
        assert rows2[0]["kind"] == "exact"
        rows1 = run_identity_suite(
            default_model(1, resolution=32, twist="separable_gauss"),
            count=1,
            identities=["conformal_laplacian"],
        )
        assert rows1[0]["kind"] == "order2"


class TestConvergenceStudy:
    def test_orders_and_exact_skips(self):
        model = default_model(1, resolution=32, twist="separable_gauss")
        rows = run_convergence_study(
            model,
            quantities=[
                "mean_curvature_two_path",
                "laplacian_tau_two_path",
                "support_identity",
            ],
            count=2,
        )
        by_name = {r["identity"]: r for r in rows}
        for name in ("mean_curvature_two_path", "laplacian_tau_two_path"):
            row = by_name[name]
            assert row["observed_order"] >= 1.9
            assert row["pass"]
            assert len(row["defects"]) == 3
        exact = by_name["support_identity"]
        assert exact["orders"] is None
        assert exact["pass"]
        assert "skipped" in exact["note"]

    def test_levels_report_the_refined_resolutions(self):
        model = default_model(1, resolution=32, twist="separable_gauss")
        rows = run_convergence_study(model, quantities=["product_rule"], count=1)
        assert rows[0]["levels"] == [[32], [64], [128]]

    def test_registry_kinds_are_consistent(self):
        assert IDENTITY_KINDS["support_identity"] == "exact"
        assert IDENTITY_KINDS["mean_curvature_two_path"] == "order2"
        assert set(DEFAULT_THRESHOLDS) >= set(IDENTITY_KINDS)
