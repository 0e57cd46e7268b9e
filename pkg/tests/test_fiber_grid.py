import numpy as np
import pytest

from twistbench import FiberGrid

from conftest import random_trig_field, unit_torus


def observed_order(defects):
    return np.log2(defects[-2] / defects[-1])


class TestGradient:
    def test_constant_field_gives_exact_zero(self, grid1d):
        grad = grid1d.gradient(np.full(grid1d.shape, 3.7))
        assert np.all(grad == 0.0)

    def test_sine_matches_analytic_derivative(self):
        defects = []
        for m in (32, 64, 128):
            grid = unit_torus(1, m)
            x = grid.coords[0]
            phi = np.sin(2.0 * np.pi * x)
            exact = 2.0 * np.pi * np.cos(2.0 * np.pi * x)
            defects.append(np.max(np.abs(grid.gradient(phi)[..., 0] - exact)))
        assert observed_order(defects) >= 1.9
        assert defects[-1] <= 5e-3

    def test_2d_product_field_within_refinement_constant(self):
        # constant C estimated from the coarsest level, then checked on finer
        defects = []
        spacings = []
        for m in (32, 64, 128):
            grid = unit_torus(2, m)
            x, y = grid.coords
            phi = np.sin(2.0 * np.pi * x) * np.sin(2.0 * np.pi * y)
            exact_x = 2.0 * np.pi * np.cos(2.0 * np.pi * x) * np.sin(2.0 * np.pi * y)
            exact_y = 2.0 * np.pi * np.sin(2.0 * np.pi * x) * np.cos(2.0 * np.pi * y)
            grad = grid.gradient(phi)
            defect = max(
                np.max(np.abs(grad[..., 0] - exact_x)),
                np.max(np.abs(grad[..., 1] - exact_y)),
            )
            defects.append(defect)
            spacings.append(grid.spacing[0])
        C = defects[0] / spacings[0] ** 2
        for defect, h in zip(defects[1:], spacings[1:]):
            assert defect <= 1.1 * C * h * h


class TestDivergence:
    def test_constant_vector_field_on_flat_torus(self, grid2d):
        V = np.ones(grid2d.shape + (2,))
        assert np.max(np.abs(grid2d.divergence(V))) <= 1e-13

    def test_gradient_of_sine_recovers_eigenvalue(self):
        defects = []
        for m in (32, 64, 128):
            grid = unit_torus(1, m)
            phi = np.sin(2.0 * np.pi * grid.coords[0])
            lap = grid.divergence(grid.gradient(phi))
            defects.append(np.max(np.abs(lap + (2.0 * np.pi) ** 2 * phi)))
        assert observed_order(defects) >= 1.9

    def test_product_rule_defect_is_second_order(self):
        defects = []
        for m in (32, 64, 128):
            grid = unit_torus(2, m)
            r = 1.5 + random_trig_field(grid, seed=5)
            u = random_trig_field(grid, seed=6)
            lhs = grid.divergence(r[..., None] * grid.gradient(u))
            rhs = grid.inner(grid.gradient(r), grid.gradient(u)) + r * grid.laplacian(u)
            defects.append(np.max(np.abs(lhs - rhs)))
        assert observed_order(defects) >= 1.9


class TestLaplacian:
    def test_constant_field(self, grid2d):
        assert np.max(np.abs(grid2d.laplacian(np.full(grid2d.shape, -2.0)))) <= 1e-13

    def test_eigenfunction(self):
        # composed central differences: eigenvalue error k^2 (kh)^2 / 3
        grid = unit_torus(1, 128)
        k = 2.0 * np.pi
        phi = np.sin(k * grid.coords[0])
        lap = grid.laplacian(phi)
        bound = 1.2 * k**2 * (k * grid.spacing[0]) ** 2 / 3.0
        assert np.max(np.abs(lap + k * k * phi)) <= bound

    def test_curved_metric_matches_closed_form(self):
        # diagonal metric G = 1 + 0.2 cos(2 pi x):
        # lap phi = phi'' / G - G' phi' / (2 G^2)
        defects = []
        for m in (32, 64, 128):
            grid = unit_torus(1, m, curved=True)
            x = grid.coords[0]
            k = 2.0 * np.pi
            phi = np.sin(k * x)
            G = 1.0 + 0.2 * np.cos(k * x)
            Gp = -0.2 * k * np.sin(k * x)
            exact = -k * k * phi / G - Gp * k * np.cos(k * x) / (2.0 * G * G)
            defects.append(np.max(np.abs(grid.laplacian(phi) - exact)))
        assert observed_order(defects) >= 1.9


class TestInnerProduct:
    def test_zero_field(self, grid2d):
        V = np.zeros(grid2d.shape + (2,))
        assert np.all(grid2d.norm_sq(V) == 0.0)

    def test_unit_axis_field_on_flat_torus(self, grid2d):
        V = np.zeros(grid2d.shape + (2,))
        V[..., 0] = 1.0
        assert np.max(np.abs(grid2d.norm_sq(V) - 1.0)) == 0.0

    def test_norm_sq_matches_per_node_bruteforce(self):
        grid = unit_torus(2, 16, curved=True)
        rng = np.random.default_rng(3)
        V = rng.normal(size=grid.shape + (2,))
        fast = grid.norm_sq(V)
        slow = np.empty(grid.shape)
        for i in range(grid.shape[0]):
            for j in range(grid.shape[1]):
                acc = 0.0
                for a in range(2):
                    acc += grid.metric_diag[i, j, a] * V[i, j, a] ** 2
                slow[i, j] = acc
        assert np.max(np.abs(fast - slow)) <= 1e-14


class TestGlobalIdentities:
    @pytest.mark.parametrize("curved", [False, True])
    def test_laplacian_self_adjointness(self, curved):
        grid = unit_torus(2, 32, curved=curved)
        phi = random_trig_field(grid, seed=11)
        psi = random_trig_field(grid, seed=12)
        w = grid.weights
        lhs = float(np.sum(phi * grid.laplacian(psi) * w))
        rhs = float(np.sum(psi * grid.laplacian(phi) * w))
        norm_phi = np.sqrt(np.sum(phi * phi * w))
        norm_psi = np.sqrt(np.sum(psi * psi * w))
        assert abs(lhs - rhs) <= 1e-10 * norm_phi * norm_psi

    @pytest.mark.parametrize("curved", [False, True])
    def test_closed_fiber_integral_of_laplacian_vanishes(self, curved):
        grid = unit_torus(2, 32, curved=curved)
        phi = random_trig_field(grid, seed=13)
        assert abs(grid.integrate(grid.laplacian(phi))) <= 1e-10

    def test_shift_equivariance_is_bitwise(self):
        grid = unit_torus(2, 16)
        phi = random_trig_field(grid, seed=14)
        for shift in (1, 5, grid.shape[0]):
            rolled_then_lap = grid.laplacian(np.roll(phi, shift, axis=0))
            lap_then_rolled = np.roll(grid.laplacian(phi), shift, axis=0)
            assert np.array_equal(rolled_then_lap, lap_then_rolled)


class TestValidation:
    def test_rejects_low_resolution(self):
        with pytest.raises(ValueError):
            FiberGrid(1, (1.0,), (4,))

    def test_rejects_nonpositive_metric(self):
        with pytest.raises(ValueError):
            FiberGrid(1, (1.0,), (16,), metric_coeffs=[lambda x: np.cos(2 * np.pi * x)])

    def test_rejects_wrong_field_shape(self, grid1d):
        with pytest.raises(ValueError):
            grid1d.check_scalar(np.zeros(7))
        with pytest.raises(ValueError):
            grid1d.check_vector(np.zeros(grid1d.shape))

    def test_rejects_non_finite_values(self, grid1d):
        bad = np.zeros(grid1d.shape)
        bad[3] = np.nan
        with pytest.raises(ValueError):
            grid1d.check_scalar(bad)
