"""Closed-form geometry of the state manifold.

Everything in this module is formula evaluation: metric components,
scalar curvature, angular defects and Euler characteristic, speed of
evolution and its extrema, curvature expressed through the speed,
thermodynamic-limit values, the field-dressed metric and the
minimal-speed field conditions.  The numeric oracle lives in
:mod:`spinmanifold.fs_metric` and never feeds back into these formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.integrate import quad

from .evolution import chi_period
from .fs_metric import MetricTensor
from .spin_ops import Direction, FieldConfig, SpinSystem

TWO_PI = 2.0 * math.pi


class SingularPoint(ValueError):
    """Curvature requested at a conical singularity (theta = 0 or pi)."""


class OutOfRange(ValueError):
    """Speed argument outside the valid branch range."""


class DegenerateDirection(ValueError):
    """Both field scalar products vanish; the minimizing ratio is undefined."""


def _field_scalar_products(theta, phi, direction: Direction):
    """The two projections of n' used by the dressed metric.

    Returns (n'.n(theta + pi/2), n'.n(theta = pi/2, phi + pi/2)).
    """
    tp, pp = direction.polar, direction.azimuth
    a = math.cos(theta) * math.sin(tp) * math.cos(phi - pp) - math.sin(theta) * math.cos(tp)
    b = -math.sin(tp) * math.sin(phi - pp)
    return a, b


def _g_chi_chi_bare(n: int, s: float, theta: float) -> float:
    """Zero-field g_chichi / gamma^2."""
    st2 = math.sin(theta) ** 2
    a = 2.0 * s * (n - 1)
    return n * (n - 1) * s**2 * st2 * (a - (a - 0.5) * st2)


def metric_closed_form(sys: SpinSystem, theta: float) -> MetricTensor:
    """Zero-field metric; every component depends on theta alone."""
    n, s, g2 = sys.n_sites, sys.s, sys.gamma**2
    st2 = math.sin(theta) ** 2
    g = np.zeros((3, 3))
    g[0, 0] = g2 * n * s / 2.0
    g[1, 1] = g2 * n * s / 2.0 * st2
    g[2, 2] = g2 * _g_chi_chi_bare(n, s, theta)
    g[1, 2] = g[2, 1] = g2 * n * (n - 1) * s**2 * math.cos(theta) * st2
    return MetricTensor(g, gamma=sys.gamma)


def metric_closed_form_field(
    sys: SpinSystem, theta: float, phi: float, field: FieldConfig
) -> MetricTensor:
    """Metric dressed by a uniform field of strength ratio h/J along n'.

    Reduces to the zero-field form at h/J = 0; the field couples the
    metric to phi through the two scalar products of n' with the rotated
    frame vectors.
    """
    n, s, g2 = sys.n_sites, sys.s, sys.gamma**2
    r = field.ratio_h_over_j
    st, ct = math.sin(theta), math.cos(theta)
    a, b = _field_scalar_products(theta, phi, field.direction)
    g = np.zeros((3, 3))
    g[0, 0] = g2 * n * s / 2.0
    g[1, 1] = g2 * n * s / 2.0 * st**2
    g[2, 2] = g2 * (
        _g_chi_chi_bare(n, s, theta)
        + r**2 * n * s / 2.0 * (a**2 + b**2)
        - 2.0 * r * n * (n - 1) * s**2 * a * ct * st
    )
    g[0, 2] = g[2, 0] = g2 * r * n * s / 2.0 * b
    g[1, 2] = g[2, 1] = g2 * (n * (n - 1) * s**2 * ct * st**2 - r * n * s / 2.0 * a * st)
    return MetricTensor(g, gamma=sys.gamma)


def scalar_curvature(sys: SpinSystem, theta: float) -> float:
    """Scalar curvature of the fixed-phi (theta, chi) submanifold.

    The poles are conical singularities whenever N > 2 or s > 1/2; there
    the curvature is undefined and a SingularPoint is raised.  The lone
    smooth case N = 2, s = 1/2 admits the endpoints.
    """
    n, s = sys.n_sites, sys.s
    at_pole = theta <= 0.0 or theta >= math.pi
    if at_pole and not (n == 2 and sys.two_s == 1):
        raise SingularPoint(f"curvature undefined at theta={theta} for N={n}, s={s}")
    c2 = math.cos(theta) ** 2
    k = 4.0 * (n - 1) * s - 1.0
    return (
        8.0
        / (sys.gamma**2 * n * s)
        * (2.0 - (k * c2 + 2.0 * (n - 1) * s + 1.0) / (k * c2 + 1.0) ** 2)
    )


def curvature_min(sys: SpinSystem) -> float:
    """Minimal curvature, attained on the waist at theta = pi/2."""
    n, s = sys.n_sites, sys.s
    return 8.0 / (sys.gamma**2 * n * s) * (1.0 - 2.0 * (n - 1) * s)


def curvature_numeric_from_profile(
    g_thth: float,
    g_chichi: Callable[[float], float],
    theta: float,
    step: float = 1e-4,
) -> float:
    """Curvature from a g_chichi(theta) profile by central differences.

    Used where no closed form exists (field along z); R = 2 R_tctc /
    (g_thth * g_chichi) with the theta derivatives of the profile taken
    at the given step.
    """
    f0 = g_chichi(theta)
    fp, fp2 = g_chichi(theta + step), g_chichi(theta + 2.0 * step)
    fm, fm2 = g_chichi(theta - step), g_chichi(theta - 2.0 * step)
    if min(f0, fp, fm, fp2, fm2) <= 0.0:
        raise ValueError("g_chichi must be positive at all stencil points")
    # fourth-order central differences: the profile is smooth enough that
    # truncation, not round-off, would dominate a three-point stencil here
    d1 = (-fp2 + 8.0 * fp - 8.0 * fm + fm2) / (12.0 * step)
    d2 = (-fp2 + 16.0 * fp - 30.0 * f0 + 16.0 * fm - fm2) / (12.0 * step**2)
    riemann = -0.5 * d2 + d1**2 / (4.0 * f0)
    return 2.0 * riemann / (g_thth * f0)


def chi_max_for(two_s: int, field: Optional[FieldConfig] = None) -> float:
    """Evolution period: 2*pi (half-integer s) or pi (integer s).

    A field along z with declared rational ratio p/q stretches the period
    by q.  An undeclared (irrational) nonzero ratio leaves chi unbounded,
    and a generic field direction has no known period; both are rejected.
    """
    base = chi_period(two_s)
    if field is None or field.ratio_h_over_j == 0.0:
        return base
    if not field.along_z:
        raise ValueError("chi period is only defined for a field along z")
    if field.rational_ratio is None:
        raise ValueError("irrational h/J along z leaves the manifold unbounded in chi")
    return base * field.rational_ratio[1]


@dataclass(frozen=True)
class ManifoldSpec:
    """A closed (theta, chi) manifold: system plus its chi period."""

    sys: SpinSystem
    chi_max: float

    def __post_init__(self):
        base = chi_period(self.sys.two_s)
        mult = self.chi_max / base
        if self.chi_max <= 0.0 or abs(mult - round(mult)) > 1e-9 or round(mult) < 1:
            raise ValueError(
                f"chi_max={self.chi_max} is not a positive multiple of the base period {base}"
            )

    @classmethod
    def for_system(cls, sys: SpinSystem, field: Optional[FieldConfig] = None) -> "ManifoldSpec":
        return cls(sys, chi_max_for(sys.two_s, field))


def angular_defect(spec: ManifoldSpec) -> float:
    """Total deficit angle of the two conical poles."""
    n, s = spec.sys.n_sites, spec.sys.s
    return 2.0 * (TWO_PI - 2.0 * (n - 1) * s * spec.chi_max)


def curvature_integral(spec: ManifoldSpec, eps: float = 1e-4) -> float:
    """Quadrature of (R/2) sqrt(g) over the manifold minus the pole cones."""
    sys = spec.sys
    g_thth = sys.gamma**2 * sys.n_sites * sys.s / 2.0

    def integrand(theta: float) -> float:
        g_cc = sys.gamma**2 * _g_chi_chi_bare(sys.n_sites, sys.s, theta)
        return 0.5 * scalar_curvature(sys, theta) * math.sqrt(g_thth * max(g_cc, 0.0))

    val, err = quad(integrand, eps, math.pi - eps, limit=200)
    if abs(err) > 1e-6 * max(1.0, abs(val)):
        raise RuntimeError(f"curvature quadrature did not converge (err={err:.3e})")
    return spec.chi_max * val


def gauss_bonnet_euler(spec: ManifoldSpec, eps: float = 1e-4) -> float:
    """Euler characteristic from the curvature integral plus the defects."""
    return (curvature_integral(spec, eps) + angular_defect(spec)) / TWO_PI


def speed_closed_form(sys: SpinSystem, theta: float) -> float:
    """v = |J| sqrt(g_chichi); independent of phi and chi."""
    return abs(sys.coupling_j) * sys.gamma * math.sqrt(
        max(_g_chi_chi_bare(sys.n_sites, sys.s, theta), 0.0)
    )


@dataclass(frozen=True)
class SpeedExtrema:
    """Zero-field speed landscape over theta.

    theta_max is reported in (0, pi/2]; the mirror point pi - theta_max is
    implied by symmetry.
    """

    v_min: float
    v_half_pi: float
    theta_max: float
    v_max: float


def speed_extrema(sys: SpinSystem) -> SpeedExtrema:
    """Extrema of the zero-field speed: poles, equator, and the two maxima."""
    n, s = sys.n_sites, sys.s
    jg = abs(sys.coupling_j) * sys.gamma
    v_half_pi = jg * s * math.sqrt(n * (n - 1) / 2.0)
    if n == 2 and sys.two_s == 1:
        # single maximum sitting on the equator
        return SpeedExtrema(0.0, v_half_pi, math.pi / 2.0, v_half_pi)
    denom = 2.0 * (n - 1) * s - 0.5
    theta_max = math.asin(math.sqrt((n - 1) * s / denom))
    v_max = jg * (n - 1) * s**2 * math.sqrt(n * (n - 1) / denom)
    return SpeedExtrema(0.0, v_half_pi, theta_max, v_max)


def curvature_from_speed(sys: SpinSystem, v: float, branch: str) -> float:
    """Scalar curvature expressed through the speed of evolution.

    branch "upper" covers theta in [0, theta_max] (v from 0 to v_max);
    branch "lower" covers theta in [theta_max, pi - theta_max] (v between
    v_half_pi and v_max).  The two agree at v = v_max.
    """
    if branch not in ("upper", "lower"):
        raise ValueError(f"branch must be 'upper' or 'lower', got {branch!r}")
    ext = speed_extrema(sys)
    tol = 1e-9 * max(ext.v_max, 1.0)
    if v < -tol or v > ext.v_max + tol:
        raise OutOfRange(f"v={v} outside [0, v_max={ext.v_max}]")
    if branch == "lower" and v < ext.v_half_pi - tol:
        raise OutOfRange(f"lower branch needs v >= v_half_pi={ext.v_half_pi}, got {v}")
    ratio2 = min((v / ext.v_max) ** 2, 1.0)
    u = math.sqrt(1.0 - ratio2)
    sign = 1.0 if branch == "upper" else -1.0
    n, s = sys.n_sites, sys.s
    return (
        8.0
        / (sys.gamma**2 * n * s)
        * (2.0 - (2.0 + sign * u) / (2.0 * (n - 1) * s * (1.0 + sign * u) ** 2))
    )


@dataclass(frozen=True)
class ThermoLimit:
    """Thermodynamic-limit quantities for the J -> J/N rescaled model."""

    coupling_j: float
    gamma: float
    s: float
    curvature_equator: float  # waist curvature as N -> infinity
    curvature_large_s_line: float  # waist curvature as s -> infinity, N fixed
    v_half_pi: float  # equator speed limit
    theta_max: float  # location of the speed maximum in the limit

    def v_max(self, n: int) -> float:
        """Maximal speed at finite N under the rescaled coupling."""
        return abs(self.coupling_j) * self.gamma * self.s**1.5 * math.sqrt(n / 2.0)

    def speed(self, theta: float, n: int) -> float:
        """Divergence profile of the speed away from the equator."""
        return self.v_max(n) * math.sin(2.0 * theta)


def thermo_limit(sys_template: SpinSystem) -> ThermoLimit:
    """Limit values for a model with J divided by N (finite energy per spin).

    The rescaling multiplies g_chichi by 1/N^2 and g_phichi by 1/N and
    leaves the curvature untouched, so the waist curvature limit follows
    directly from the minimal-curvature formula.
    """
    n, s, g2 = sys_template.n_sites, sys_template.s, sys_template.gamma**2
    jg = abs(sys_template.coupling_j) * sys_template.gamma
    return ThermoLimit(
        coupling_j=sys_template.coupling_j,
        gamma=sys_template.gamma,
        s=s,
        curvature_equator=-16.0 / g2,
        curvature_large_s_line=-16.0 * (n - 1) / (g2 * n),
        v_half_pi=jg * s / math.sqrt(2.0),
        theta_max=math.pi / 4.0,
    )


def rescaled_metric_closed_form(sys: SpinSystem, theta: float) -> MetricTensor:
    """Zero-field metric of the J/N-rescaled model (thermodynamic bookkeeping)."""
    g = metric_closed_form(sys, theta).components.copy()
    n = sys.n_sites
    g[2, 2] /= n**2
    g[1, 2] /= n
    g[2, 1] /= n
    g[0, 2] /= n
    g[2, 0] /= n
    return MetricTensor(g, gamma=sys.gamma)


class MinSpeedField(NamedTuple):
    ratio: float
    v_min: float
    reduction_applied: bool


def min_speed_field(
    sys: SpinSystem, theta: float, phi: float, direction: Direction
) -> MinSpeedField:
    """Field ratio minimizing the speed for a fixed (theta, phi, n').

    g_chichi is a quadratic in h/J; the returned ratio is its minimizer
    and v_min the speed there.  When the second scalar product vanishes
    the pair reduces to the minimal-possible-speed form (flagged by
    ``reduction_applied``).
    """
    n, s = sys.n_sites, sys.s
    a, b = _field_scalar_products(theta, phi, direction)
    den = a**2 + b**2
    if den < 1e-24:
        raise DegenerateDirection("both field scalar products vanish for this geometry")
    ratio = (n - 1) * s * math.sin(2.0 * theta) * a / den
    jg = abs(sys.coupling_j) * sys.gamma
    v_min = (
        jg
        * s
        * math.sqrt(n * (n - 1) / 2.0)
        * math.sqrt(
            math.sin(theta) ** 4
            + (n - 1) * s * math.sin(2.0 * theta) ** 2 * b**2 / den
        )
    )
    return MinSpeedField(ratio, v_min, abs(b) < 1e-12)


def special_case_speed(sys: SpinSystem, case: str, field: FieldConfig, phi: float = 0.0) -> float:
    """Speed for the two analytically simple initial states.

    "pole": theta in {0, pi}, v = |J| gamma |h/J| sqrt(Ns/2) sin(theta').
    "equator": theta = pi/2,
    v = |J| gamma sqrt(Ns/2) sqrt((N-1)s + (h/J)^2 (1 - sin^2(theta') cos^2(phi'-phi))).
    """
    n, s = sys.n_sites, sys.s
    jg = abs(sys.coupling_j) * sys.gamma
    r = field.ratio_h_over_j
    tp, pp = field.direction.polar, field.direction.azimuth
    if case == "pole":
        return jg * abs(r) * math.sqrt(n * s / 2.0) * math.sin(tp)
    if case == "equator":
        return jg * math.sqrt(n * s / 2.0) * math.sqrt(
            (n - 1) * s + r**2 * (1.0 - math.sin(tp) ** 2 * math.cos(pp - phi) ** 2)
        )
    raise ValueError(f"case must be 'pole' or 'equator', got {case!r}")
