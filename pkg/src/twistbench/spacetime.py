"""Twisted product spacetimes over a torus fiber.

A model is an open time interval I crossed with a ``FiberGrid``, glued by a
positive twist function f(t, x); the Lorentzian metric is
``-dt^2 + f^2 g_F``.  The twist comes from a small closed-form catalog so
that every time derivative the solver needs is exact.  When f depends on t
only, the model degenerates to a warped (GRW) product; the ``is_grw``
predicate and the torqued one-form detect that situation numerically.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .profiles import TimeProfile, TrigPolynomial

__all__ = [
    "TwistedFunction",
    "SpacetimeModel",
    "ExpansionClass",
    "classify",
    "is_grw",
    "torqued_one_form",
    "slice_mean_curvature",
    "slice_umbilicity",
]

_FAMILIES = ("pure_time", "separable", "additive", "traveling")

SIGN_TOL = 1e-12  # |d/dt f| below this counts as zero in classifications


class TwistedFunction:
    """Closed-form twist f(t, x) with exact derivative evaluators.

    Families
    --------
    pure_time   f = g(t)                       (GRW / warped)
    separable   f = g(t) (1 + eps s(x))
    additive    f = g(t) + eps s(x) q(t)
    traveling   f = 1 + a sin(2 pi (t + x)/T)  (one-dimensional fiber only)

    with g, q drawn from the ``TimeProfile`` catalog and s a
    ``TrigPolynomial``.  All evaluators take a time argument (scalar or an
    array broadcastable against the grid shape) and the fiber grid, and
    return node arrays.
    """

    def __init__(self, family, g=None, eps=0.0, s=None, q=None, amp=0.0, period=1.0):
        if family not in _FAMILIES:
            raise ValueError(f"unknown twist family {family!r}")
        self.family = family
        self.g = g
        self.q = q
        self.s = s
        self.eps = float(eps)
        self.amp = float(amp)
        self.period = float(period)
        if family in ("pure_time", "separable", "additive") and g is None:
            raise ValueError(f"family {family!r} needs a time profile g")
        if family in ("separable", "additive") and s is None:
            raise ValueError(f"family {family!r} needs a fiber profile s")
        if family == "additive" and q is None:
            raise ValueError("family 'additive' needs a time profile q")
        if family == "traveling" and not abs(amp) < 1.0:
            raise ValueError("traveling twist needs |amp| < 1")

    # -- fiber-profile samples -------------------------------------------

    def _s_values(self, grid):
        return self.s.value(*grid.coords)

    def _s_partial(self, grid, axis):
        return self.s.partial(axis, *grid.coords)

    def _traveling_phase(self, t, grid):
        if grid.dim != 1:
            raise DomainError("traveling twist is defined on one-dimensional fibers")
        w = 2.0 * np.pi / self.period
        return w, w * (np.asarray(t, dtype=float) + grid.coords[0])

    # -- evaluators --------------------------------------------------------

    def value(self, t, grid):
        t = np.asarray(t, dtype=float)
        if self.family == "pure_time":
            return np.broadcast_to(self.g.value(t), np.broadcast(t, grid.coords[0]).shape).copy()
        if self.family == "separable":
            return self.g.value(t) * (1.0 + self.eps * self._s_values(grid))
        if self.family == "additive":
            return self.g.value(t) + self.eps * self._s_values(grid) * self.q.value(t)
        w, phase = self._traveling_phase(t, grid)
        return 1.0 + self.amp * np.sin(phase)

    def dt(self, t, grid):
        t = np.asarray(t, dtype=float)
        if self.family == "pure_time":
            return np.broadcast_to(self.g.deriv(t), np.broadcast(t, grid.coords[0]).shape).copy()
        if self.family == "separable":
            return self.g.deriv(t) * (1.0 + self.eps * self._s_values(grid))
        if self.family == "additive":
            return self.g.deriv(t) + self.eps * self._s_values(grid) * self.q.deriv(t)
        w, phase = self._traveling_phase(t, grid)
        return self.amp * w * np.cos(phase)

    def dt2(self, t, grid):
        t = np.asarray(t, dtype=float)
        if self.family == "pure_time":
            return np.broadcast_to(self.g.deriv2(t), np.broadcast(t, grid.coords[0]).shape).copy()
        if self.family == "separable":
            return self.g.deriv2(t) * (1.0 + self.eps * self._s_values(grid))
        if self.family == "additive":
            return self.g.deriv2(t) + self.eps * self._s_values(grid) * self.q.deriv2(t)
        w, phase = self._traveling_phase(t, grid)
        return -self.amp * w * w * np.sin(phase)

    def fiber_partials(self, t, grid):
        """Exact partials (d f / d x_i), shape ``grid.shape + (n,)``."""
        t = np.asarray(t, dtype=float)
        shape = np.broadcast(t, grid.coords[0]).shape
        out = np.zeros(shape + (grid.dim,))
        if self.family == "pure_time":
            return out
        if self.family == "separable":
            for i in range(grid.dim):
                out[..., i] = self.g.value(t) * self.eps * self._s_partial(grid, i)
            return out
        if self.family == "additive":
            for i in range(grid.dim):
                out[..., i] = self.eps * self._s_partial(grid, i) * self.q.value(t)
            return out
        w, phase = self._traveling_phase(t, grid)
        out[..., 0] = self.amp * w * np.cos(phase)
        return out

    def dt_fiber_partials(self, t, grid):
        """Exact mixed partials (d^2 f / dt dx_i)."""
        t = np.asarray(t, dtype=float)
        shape = np.broadcast(t, grid.coords[0]).shape
        out = np.zeros(shape + (grid.dim,))
        if self.family == "pure_time":
            return out
        if self.family == "separable":
            for i in range(grid.dim):
                out[..., i] = self.g.deriv(t) * self.eps * self._s_partial(grid, i)
            return out
        if self.family == "additive":
            for i in range(grid.dim):
                out[..., i] = self.eps * self._s_partial(grid, i) * self.q.deriv(t)
            return out
        w, phase = self._traveling_phase(t, grid)
        out[..., 0] = -self.amp * w * w * np.sin(phase)
        return out

    # -- conveniences -------------------------------------------------------

    def dlog_dt(self, t, grid):
        return self.dt(t, grid) / self.value(t, grid)

    def fiber_gradient(self, t, grid):
        """Metric gradient of f on the fiber, (grad f)^i = G_i^{-1} d_i f."""
        return self.fiber_partials(t, grid) / grid.metric_diag

    def fiber_grad_norm(self, t, grid):
        """Pointwise |grad_F f| with respect to the fiber metric."""
        partials = self.fiber_partials(t, grid)
        return np.sqrt(np.sum(partials * partials / grid.metric_diag, axis=-1))


@dataclass
class SpacetimeModel:
    """Twisted product of an open interval with a torus fiber."""

    interval: tuple
    fiber: object
    twist: TwistedFunction

    def __post_init__(self):
        t_min, t_max = (float(v) for v in self.interval)
        if not t_min < t_max:
            raise ValueError("interval must satisfy t_min < t_max")
        self.interval = (t_min, t_max)
        if self.twist.family == "traveling":
            ratio = self.fiber.periods[0] / self.twist.period
            if abs(ratio - round(ratio)) > 1e-12 or round(ratio) < 1:
                raise ValueError(
                    "traveling twist needs the fiber period to be a multiple of the wave period"
                )
        self._check_positive()

    def _check_positive(self, t_samples=64):
        for t in self.time_samples(t_samples):
            values = self.twist.value(t, self.fiber)
            if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
                raise ValueError(f"twist function is not positive near t={t:.6g}")
        if self.twist.family == "separable":
            s_max = float(np.max(np.abs(self.twist._s_values(self.fiber))))
            if abs(self.twist.eps) * s_max >= 1.0:
                raise ValueError("separable twist needs |eps| * max|s| < 1")

    def time_samples(self, count):
        """Midpoint lattice over the open interval (endpoints excluded)."""
        t_min, t_max = self.interval
        step = (t_max - t_min) / count
        return t_min + (np.arange(count) + 0.5) * step

    def require_inside(self, t, what="time value"):
        t = np.asarray(t, dtype=float)
        t_min, t_max = self.interval
        if np.any(t <= t_min) or np.any(t >= t_max):
            raise DomainError(
                f"{what} outside the open interval ({t_min:g}, {t_max:g})"
            )
        return t

    @property
    def span(self):
        return self.interval[1] - self.interval[0]


@dataclass
class ExpansionClass:
    """Classification of the sign behaviour of d/dt f over the model."""

    tag: str  # "expanding" | "contracting" | "transition" | "mixed"
    t0: float = None
    evidence: dict = field(default_factory=dict)

    def __str__(self):
        if self.tag == "transition":
            return f"transition(t0={self.t0:.12g})"
        return self.tag


def classify(model, t_samples=64):
    """Classify the model as expanding, contracting, transition or mixed.

    Signs of d/dt f are sampled on a ``t_samples`` x nodes lattice.  A
    transition verdict needs a single +/- sign change at the same time for
    every fiber node; the change point is located by bisection to 1e-10.
    Spatially varying change points are reported as mixed.
    """
    if t_samples < 16:
        raise ValueError("t_samples must be at least 16")
    grid = model.fiber
    times = model.time_samples(t_samples)
    dft = np.stack([model.twist.dt(t, grid) for t in times])

    min_dt = float(dft.min())
    max_dt = float(dft.max())
    pos = dft > SIGN_TOL
    neg = dft < -SIGN_TOL
    evidence = {
        "t_samples": int(t_samples),
        "min_dt": min_dt,
        "max_dt": max_dt,
        "frac_positive": float(pos.mean()),
        "frac_negative": float(neg.mean()),
    }

    if min_dt > SIGN_TOL:
        return ExpansionClass("expanding", evidence=evidence)
    if max_dt < -SIGN_TOL:
        return ExpansionClass("contracting", evidence=evidence)

    any_pos = pos.any(axis=0)
    any_neg = neg.any(axis=0)
    if np.all(any_pos) and np.all(any_neg):
        last_pos = (t_samples - 1) - np.argmax(pos[::-1], axis=0)
        first_neg = np.argmax(neg, axis=0)
        if np.all(last_pos < first_neg):
            lo = times[last_pos].astype(float)
            hi = times[first_neg].astype(float)
            for _ in range(64):
                mid = 0.5 * (lo + hi)
                take_lo = model.twist.dt(mid, grid) > 0.0
                lo = np.where(take_lo, mid, lo)
                hi = np.where(take_lo, hi, mid)
                if float(np.max(hi - lo)) < 1e-10:
                    break
            roots = 0.5 * (lo + hi)
            spread = float(roots.max() - roots.min())
            evidence["root_spread"] = spread
            if spread <= 1e-8:
                return ExpansionClass(
                    "transition", t0=float(roots.mean()), evidence=evidence
                )
    return ExpansionClass("mixed", evidence=evidence)


def is_grw(model, t_samples=33):
    """True iff the twist is numerically independent of the fiber point.

    Checks max |grad_F f| / f <= 1e-12 on a sampled time lattice; the fiber
    gradient comes from the exact partial evaluators, so genuinely warped
    twists give an exact zero.
    """
    grid = model.fiber
    worst = 0.0
    for t in model.time_samples(t_samples):
        ratio = model.twist.fiber_grad_norm(t, grid) / model.twist.value(t, grid)
        worst = max(worst, float(ratio.max()))
    return worst <= 1e-12


def torqued_one_form(model, t, V):
    """Pair the one-form d(log f) restricted to the fiber with a field V.

    Returns the node field sum_i (d_i log f) V^i at time t; identically zero
    exactly when the product is warped.
    """
    model.require_inside(t)
    grid = model.fiber
    V = grid.check_vector(V, "V")
    partials = model.twist.fiber_partials(t, grid)
    return np.sum(partials * V, axis=-1) / model.twist.value(t, grid)


def slice_mean_curvature(model, t0):
    """Mean curvature of the level slice {t = t0}: d/dt log f at (t0, x)."""
    t0 = float(model.require_inside(t0, "slice time t0"))
    return model.twist.dlog_dt(t0, model.fiber)


def slice_umbilicity(model, t0):
    """Umbilic factor of the slice {t = t0}; its shape operator is this times Id."""
    return -slice_mean_curvature(model, t0)
