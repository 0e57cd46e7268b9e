"""Conformal rescaling laws, verified as executable identities.

Under g -> e^{2 phi} g a hypersurface keeps its umbilic character, its mean
curvature transforms as H' = e^{-phi}(H + g(N, grad phi)), and Laplacians
of functions pick up a (n-2) gradient coupling.  Every operation here
evaluates both sides of such a law through genuinely different code paths
and returns the pointwise defect, so the identities double as discretization
diagnostics.  The factor phi = -log f produces the static picture in which
level slices become totally geodesic; that special case is wired in as its
own check.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .graphs import (
    _kit,
    coordinate_laplacian,
    laplacian_tau_fiber,
    mean_curvature,
)
from .profiles import TrigPolynomial

__all__ = [
    "ConformalFactor",
    "ConformalCheck",
    "StaticFrameChecks",
    "transform_mean_curvature",
    "slice_shape_transform",
    "conformal_laplacian_check",
    "static_laplacian_check",
    "maximal_power_check",
]

_KINDS = ("constant", "neg_log_twist", "fiber")


class ConformalFactor:
    """Closed-form conformal exponent phi on the spacetime.

    Kinds
    -----
    constant        phi = c
    neg_log_twist   phi = -power * log f   (power 1 is the static picture)
    fiber           phi = s(x), a fiber-only trig polynomial
    """

    def __init__(self, kind, value=0.0, power=1.0, twist=None, fiber_profile=None):
        if kind not in _KINDS:
            raise ValueError(f"unknown conformal factor kind {kind!r}")
        self.kind = kind
        self.const = float(value)
        self.power = float(power)
        self.twist = twist
        self.fiber_profile = fiber_profile
        if kind == "neg_log_twist" and twist is None:
            raise ValueError("neg_log_twist factor needs the twist function")
        if kind == "fiber" and not isinstance(fiber_profile, TrigPolynomial):
            raise ValueError("fiber factor needs a TrigPolynomial")

    @staticmethod
    def constant(c):
        return ConformalFactor("constant", value=c)

    @staticmethod
    def static_picture(twist, power=1.0):
        """phi = -power log f; power 1 rescales the model onto -f^-2 dt^2 + g_F."""
        return ConformalFactor("neg_log_twist", power=power, twist=twist)

    @staticmethod
    def fiber_only(profile):
        return ConformalFactor("fiber", fiber_profile=profile)

    def value(self, t, grid):
        if self.kind == "constant":
            return np.full(np.broadcast(np.asarray(t), grid.coords[0]).shape, self.const)
        if self.kind == "neg_log_twist":
            return -self.power * np.log(self.twist.value(t, grid))
        return np.broadcast_to(
            self.fiber_profile.value(*grid.coords),
            np.broadcast(np.asarray(t), grid.coords[0]).shape,
        ).copy()

    def dt(self, t, grid):
        if self.kind == "neg_log_twist":
            return -self.power * self.twist.dlog_dt(t, grid)
        return np.zeros(np.broadcast(np.asarray(t), grid.coords[0]).shape)

    def fiber_partials(self, t, grid):
        shape = np.broadcast(np.asarray(t), grid.coords[0]).shape
        out = np.zeros(shape + (grid.dim,))
        if self.kind == "neg_log_twist":
            f = self.twist.value(t, grid)
            return -self.power * self.twist.fiber_partials(t, grid) / f[..., None]
        if self.kind == "fiber":
            for i in range(grid.dim):
                out[..., i] = self.fiber_profile.partial(i, *grid.coords)
        return out


def _normal_derivative(kit, phi):
    """g(N, grad phi) = (d/dt phi) cosh(theta) + d_F phi (N_F), exact factors."""
    dt_part = phi.dt(kit.u, kit.grid) * kit.cosh
    fiber_part = np.sum(
        phi.fiber_partials(kit.u, kit.grid) * kit.rho[..., None] * kit.grad_u, axis=-1
    )
    return dt_part + fiber_part


def transform_mean_curvature(graph, phi):
    """Mean curvature of the graph after rescaling the ambient metric.

    H' = e^{-phi} (H + g(N, grad phi)), evaluated with the graph's future
    unit normal.  With phi = -log f this measures the defect from the
    condition H = g(N, grad log f): inputs satisfying it to epsilon give
    |H'| <= max(f) * epsilon.
    """
    kit = _kit(graph)
    H1 = mean_curvature(graph)
    phi_vals = phi.value(kit.u, kit.grid)
    return np.exp(-phi_vals) * (H1 + _normal_derivative(kit, phi))


def slice_shape_transform(model, t0, phi):
    """Umbilic factor of the slice {t = t0} after rescaling.

    Slices have shape operator lambda Id with lambda = -d/dt log f; the
    rescaled slice stays umbilic with factor
    e^{-phi} (lambda - d phi(normal)) where the normal is the comoving unit.
    Returns the rescaled factor field; identically zero for the static
    picture phi = -log f.
    """
    t0 = float(model.require_inside(t0, "slice time t0"))
    grid = model.fiber
    lam1 = -model.twist.dlog_dt(t0, grid)
    phi_vals = phi.value(t0, grid)
    return np.exp(-phi_vals) * (lam1 - phi.dt(t0, grid))


@dataclass
class ConformalCheck:
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def defect(self):
        return self.lhs - self.rhs

    @property
    def max_defect(self):
        return float(np.max(np.abs(self.defect)))


def conformal_laplacian_check(h, phi, graph):
    """Laplacian rescaling law on the graph, both sides independently.

    lhs: coordinate Laplacian of h under e^{2 phi} g (phi restricted to the
    graph).  rhs: e^{-2 phi}(lap h + (n-2) g^{-1}(d phi, d h)) from the
    unrescaled metric, with d phi the discrete differential of the sampled
    restriction.  In dimension 2 the coupling drops and the two sides agree
    to roundoff; otherwise the defect decays at second order.
    """
    kit = _kit(graph)
    grid = kit.grid
    h = grid.check_scalar(h, "h")
    g1 = kit.metric()
    phi_vals = phi.value(kit.u, grid)
    g2 = np.exp(2.0 * phi_vals)[..., None, None] * g1
    lhs = coordinate_laplacian(grid, g2, h)

    lap1 = coordinate_laplacian(grid, g1, h)
    dphi = grid.partials(phi_vals)
    dh = grid.partials(h)
    pairing = np.einsum(
        "...i,...i->...", dphi, np.linalg.solve(g1, dh[..., None])[..., 0]
    )
    rhs = np.exp(-2.0 * phi_vals) * (lap1 + (grid.dim - 2) * pairing)
    return ConformalCheck(lhs=lhs, rhs=rhs)


@dataclass
class StaticFrameChecks:
    """Defects of the three static-picture identities on one graph.

    main:              time-height Laplacian under alpha^2 g versus the
                       boost/mean-curvature closed form.
    laplacian_relation: same Laplacian versus the rescaling law applied to
                       the fiber-form time-height Laplacian.
    gradient_pairing:  induced-metric pairing <grad log alpha, grad tau>
                       versus its boost closed form.
    """

    main: ConformalCheck
    laplacian_relation: ConformalCheck
    gradient_pairing: ConformalCheck


def static_laplacian_check(graph):
    """Verify the static-picture (alpha = 1/f) identities on a graph.

    The graph is re-read as a hypersurface of the rescaled model with metric
    -alpha^2 dt^2 + g_F.  Each identity is evaluated through two unrelated
    code paths; see ``StaticFrameChecks`` for the breakdown.
    """
    kit = _kit(graph)
    grid = kit.grid
    n = grid.dim

    alpha = 1.0 / kit.f
    dlog_alpha_dt = -kit.dlogf
    # Exact ambient fiber partials of log alpha evaluated along the graph.
    fiber_dlog_alpha = -kit.fiber_df / kit.f[..., None]

    g1 = kit.metric()
    g_tilde = (alpha * alpha)[..., None, None] * g1
    lap_tilde = coordinate_laplacian(grid, g_tilde, kit.u)

    phi_static = ConformalFactor.static_picture(graph.model.twist)
    H_tilde = transform_mean_curvature(graph, phi_static)
    normal_log_alpha = kit.f * (
        kit.cosh * dlog_alpha_dt
        + np.sum(fiber_dlog_alpha * kit.rho[..., None] * kit.grad_u, axis=-1)
    )

    rhs_main = alpha ** -2 * (
        (1.0 + kit.cosh ** 2) * dlog_alpha_dt
        + n * H_tilde * alpha * kit.cosh
        - 2.0 * alpha * kit.cosh * normal_log_alpha
    )
    main = ConformalCheck(lhs=lap_tilde, rhs=rhs_main)

    # Discrete differential of the sampled restriction of log alpha; an
    # independent route from the exact chain-rule partials used above.
    dlog_alpha_cov = grid.partials(np.log(alpha))
    pairing = np.einsum(
        "...i,...i->...",
        dlog_alpha_cov,
        np.linalg.solve(g1, kit.du[..., None])[..., 0],
    )

    lap_fiber = laplacian_tau_fiber(graph)
    relation = ConformalCheck(
        lhs=lap_tilde, rhs=alpha ** -2 * (lap_fiber + (n - 2) * pairing)
    )

    rhs_pairing = -dlog_alpha_dt + alpha * kit.cosh * normal_log_alpha
    gradient_pairing = ConformalCheck(lhs=pairing, rhs=rhs_pairing)

    return StaticFrameChecks(
        main=main, laplacian_relation=relation, gradient_pairing=gradient_pairing
    )


def maximal_power_check(graph, h_tol=1e-8):
    """Power-law rescaling that isolates the boost term for maximal graphs.

    With alpha = 1/f and exponent p = 2/(n-2), the time-height Laplacian of
    a maximal graph under alpha^{2p+2} g reduces to
    alpha^{-2p-2} sinh^2(theta) d/dt log alpha; this evaluates both sides.
    Needs a three-dimensional fiber (the exponent degenerates at n = 2) and
    a maximal input (sup |H| <= h_tol).
    """
    kit = _kit(graph)
    grid = kit.grid
    n = grid.dim
    if n != 3:
        raise DomainError("the power rescaling check needs a 3-dimensional fiber")
    h_max = float(np.max(np.abs(mean_curvature(graph))))
    if h_max > h_tol:
        raise DomainError(
            f"input is not maximal: sup |H| = {h_max:.3e} exceeds {h_tol:.1e}"
        )
    p = 2.0 / (n - 2)
    alpha = 1.0 / kit.f
    g_hat = (alpha ** (2.0 * p + 2.0))[..., None, None] * kit.metric()
    lhs = coordinate_laplacian(grid, g_hat, kit.u)
    rhs = alpha ** (-2.0 * p - 2.0) * kit.sinh_sq * (-kit.dlogf)
    return ConformalCheck(lhs=lhs, rhs=rhs)
