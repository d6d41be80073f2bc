"""Explicit symplectic groupoids of the local TSS models, with numerical checks.

Each model integrates a Poisson structure ``f(u) d_u ^ d_v`` on a 2-dimensional
base, with points ``(u, v, p, q)`` of the groupoid and

    s(u, v, p, q) = (u, v)
    t(u, v, p, q) = (phi(u, p), v + q f(u))

where ``phi(., p)`` is the time-``p`` flow of ``f d_u``.  Multiplication adds
``p`` and transports ``q'`` by the flow derivative ``d phi / d u``; for the
affine plane this is exactly ``(x, y, p + p', q + e^p q')``.

Every derivative below is differentiated by hand from the closed-form maps.
Finite differences appear only in the exterior-derivative check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-9
DEFAULT_SAMPLES = 1000


class ChartError(ValueError):
    """A point left the coordinate chart of a model."""


class DegenerateZeroError(ValueError):
    pass


class RampError(ValueError):
    pass


def wrap(a):
    """Reduce an angle difference to ``(-pi, pi]``."""
    return (np.asarray(a) + math.pi) % TWO_PI - math.pi


# ------------------------------------------------------------------ alpha

def _alpha_parts(r, p):
    e = math.exp(2.0 * p)
    num = (r + 1.0) + (r - 1.0) * e
    den = (r + 1.0) - (r - 1.0) * e
    if abs(den) <= 1e-9:
        raise ChartError(f"alpha({r}, {p}) leaves the chart (denominator {den:.3g})")
    return e, num, den


def alpha_flow(r: float, p: float) -> float:
    """Time-``p`` flow of ``(r^2 - 1) d_r``."""
    _, num, den = _alpha_parts(r, p)
    return num / den


def alpha_dr(r: float, p: float) -> float:
    e, _, den = _alpha_parts(r, p)
    return 4.0 * e / den ** 2


def alpha_dp(r: float, p: float) -> float:
    e, _, den = _alpha_parts(r, p)
    return 4.0 * (r * r - 1.0) * e / den ** 2


# ----------------------------------------------------------------- models

@dataclass(frozen=True)
class GroupoidModel:
    name: str
    coords: tuple[str, str, str, str]
    profile: Callable[[float], float]
    profile_du: Callable[[float], float]
    flow: Callable[[float, float], float]
    flow_du: Callable[[float, float], float]
    flow_dp: Callable[[float, float], float]
    u_domain: tuple[float, float]
    periodic_v: bool = False
    # closed-form leaf primitive is known: omega = du ^ dv / f(u)
    has_leaf_form: bool = False
    sample_u: tuple[float, float] = (-1.0, 1.0)
    sample_p: tuple[float, float] = (-0.5, 0.5)
    u_exclusion: float = 0.0
    drop_q_transport: bool = False
    wrong_q_transport: bool = False

    # structure maps -------------------------------------------------
    def in_domain(self, u: float) -> bool:
        lo, hi = self.u_domain
        return lo < u < hi

    def _check(self, pt):
        if not self.in_domain(pt[0]):
            raise ChartError(f"{self.name}: {self.coords[0]}={pt[0]} outside {self.u_domain}")

    def _v(self, v):
        return v % TWO_PI if self.periodic_v else v

    def source(self, pt) -> np.ndarray:
        self._check(pt)
        return np.array([pt[0], self._v(pt[1])])

    def target(self, pt) -> np.ndarray:
        self._check(pt)
        u, v, p, q = pt
        u2 = self.flow(u, p)
        if not self.in_domain(u2):
            raise ChartError(f"{self.name}: target leaves the chart")
        return np.array([u2, self._v(v + q * self.profile(u))])

    def unit(self, base) -> np.ndarray:
        return np.array([base[0], base[1], 0.0, 0.0])

    def composable(self, g, h, tol: float = 1e-12) -> bool:
        d = self.target(g) - self.source(h)
        if self.periodic_v:
            d[1] = wrap(d[1])
        return bool(np.max(np.abs(d)) <= tol)

    def multiply(self, g, h, check: bool = True) -> np.ndarray:
        """``g . h`` for ``t(g) = s(h)``; ``h`` is snapped onto the fiber of ``t(g)``."""
        if check and not self.composable(g, h):
            raise ValueError(f"{self.name}: points are not composable")
        self._check(g)
        u, v, p, q = g
        if self.drop_q_transport:
            q_new = q
        elif self.wrong_q_transport:
            q_new = q + self.flow_du(u, h[2]) * h[3]
        else:
            q_new = q + self.flow_du(u, p) * h[3]
        return np.array([u, self._v(v), p + h[2], q_new])

    def inverse(self, g) -> np.ndarray:
        u, v, p, q = g
        b = self.target(g)
        return np.array([b[0], b[1], -p, -q / self.flow_du(u, p)])

    # differential data -------------------------------------------------
    def jac_source(self, pt) -> np.ndarray:
        return np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])

    def jac_target(self, pt) -> np.ndarray:
        u, v, p, q = pt
        return np.array([
            [self.flow_du(u, p), 0.0, self.flow_dp(u, p), 0.0],
            [q * self.profile_du(u), 1.0, 0.0, self.profile(u)],
        ])

    def omega_matrix(self, pt) -> np.ndarray:
        """``Omega(d_i, d_j)`` for ``-q f' du^dp + du^dq - dv^dp + f dp^dq``."""
        u, v, p, q = pt
        W = np.zeros((4, 4))
        W[0, 2] = -q * self.profile_du(u)
        W[0, 3] = 1.0
        W[1, 2] = -1.0
        W[2, 3] = self.profile(u)
        return W - W.T

    def pi_matrix(self, pt) -> np.ndarray:
        """``Pi(dx_i, dx_j)`` for ``-f d_u^d_v + d_u^d_q - d_v^d_p - q f' d_v^d_q``."""
        u, v, p, q = pt
        P = np.zeros((4, 4))
        P[0, 1] = -self.profile(u)
        P[0, 3] = 1.0
        P[1, 2] = -1.0
        P[1, 3] = -q * self.profile_du(u)
        return P - P.T

    def base_poisson(self, base) -> np.ndarray:
        f = self.profile(base[0])
        return np.array([[0.0, f], [-f, 0.0]])

    def leaf_form(self, base) -> np.ndarray:
        w = 1.0 / self.profile(base[0])
        return np.array([[0.0, w], [-w, 0.0]])

    # sampling ---------------------------------------------------------
    def _draw(self, rng, base=None):
        if base is None:
            u = rng.uniform(*self.sample_u)
            v = rng.uniform(0.0, TWO_PI) if self.periodic_v else rng.uniform(-2.0, 2.0)
        else:
            u, v = base
        return np.array([u, v, rng.uniform(*self.sample_p), rng.uniform(-2.0, 2.0)])

    def sample_point(self, rng, base=None, tries: int = 1000) -> np.ndarray:
        for _ in range(tries):
            g = self._draw(rng, base)
            if abs(g[0]) < self.u_exclusion:
                continue
            try:
                self.target(g)
            except ChartError:
                continue
            return g
        raise ChartError(f"{self.name}: could not sample a point in the chart")

    def sample_chain(self, rng, n: int = 3) -> list:
        """``n`` consecutively composable points."""
        for _ in range(1000):
            try:
                chain = [self.sample_point(rng)]
                for _ in range(n - 1):
                    chain.append(self.sample_point(rng, base=self.target(chain[-1]), tries=50))
                return chain
            except ChartError:
                continue
        raise ChartError(f"{self.name}: could not sample a composable chain")


AFFINE_PLANE = GroupoidModel(
    name="AffinePlane",
    coords=("x", "y", "p", "q"),
    profile=lambda x: x,
    profile_du=lambda x: 1.0,
    flow=lambda x, p: x * math.exp(p),
    flow_du=lambda x, p: math.exp(p),
    flow_dp=lambda x, p: x * math.exp(p),
    u_domain=(-math.inf, math.inf),
    has_leaf_form=True,
    sample_u=(-2.0, 2.0),
    sample_p=(-1.0, 1.0),
    u_exclusion=0.05,
)

CYLINDER_ONE = GroupoidModel(
    name="CylinderOne",
    coords=("r", "theta", "p", "q"),
    profile=lambda r: r,
    profile_du=lambda r: 1.0,
    flow=lambda r, p: r * math.exp(p),
    flow_du=lambda r, p: math.exp(p),
    flow_dp=lambda r, p: r * math.exp(p),
    u_domain=(-1.0, 1.0),
    periodic_v=True,
    has_leaf_form=True,
    sample_u=(-0.35, 0.35),
    sample_p=(-0.3, 0.3),
    u_exclusion=0.02,
)

CYLINDER_TWO = GroupoidModel(
    name="CylinderTwo",
    coords=("r", "theta", "p", "q"),
    profile=lambda r: r * r - 1.0,
    profile_du=lambda r: 2.0 * r,
    flow=alpha_flow,
    flow_du=alpha_dr,
    flow_dp=alpha_dp,
    u_domain=(-2.0, 2.0),
    periodic_v=True,
    sample_u=(-1.6, 1.6),
    sample_p=(-0.3, 0.3),
)

MODELS = {"affine": AFFINE_PLANE, "cyl1": CYLINDER_ONE, "cyl2": CYLINDER_TWO}


def get_model(name: str) -> GroupoidModel:
    key = name.lower()
    for alias, m in MODELS.items():
        if key in (alias, m.name.lower()):
            return m
    raise KeyError(f"unknown model {name!r}; choose from {sorted(MODELS)}")


def perturbed(model: GroupoidModel, mode: str = "drop_q") -> GroupoidModel:
    """Negative-control copy with a broken multiplication.

    ``drop_q`` forgets the ``q'`` term entirely (breaks ``t(gh) = t(h)``);
    ``wrong_q`` rescales ``q'`` with ``h``'s own flow time (breaks associativity).
    """
    if mode == "drop_q":
        return replace(model, name=model.name + "[q' dropped]", drop_q_transport=True)
    if mode == "wrong_q":
        return replace(model, name=model.name + "[q' misscaled]", wrong_q_transport=True)
    raise ValueError(mode)


# ---------------------------------------------------------------- reports

@dataclass
class Check:
    name: str
    samples: int
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tol)

    def to_json(self) -> dict:
        return {"name": self.name, "samples": self.samples, "max_residual": float(self.max_residual),
                "tol": self.tol, "pass": self.passed}


@dataclass
class VerificationReport:
    model: str
    checks: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_json(self) -> dict:
        d = {"model": self.model, "checks": [c.to_json() for c in self.checks], "pass": self.passed}
        if self.constants:
            d["constants"] = self.constants
        return d


class _Acc:
    """Running maximum of residuals per named check."""

    def __init__(self):
        self.res: dict[str, float] = {}
        self.n: dict[str, int] = {}

    def add(self, name, residual):
        r = float(np.max(np.abs(residual))) if np.size(residual) else 0.0
        if not np.isfinite(r):
            r = math.inf
        self.res[name] = max(self.res.get(name, 0.0), r)
        self.n[name] = self.n.get(name, 0) + 1

    def checks(self, tols):
        return [Check(k, self.n[k], self.res[k], tols.get(k, tols.get("*"))) for k in self.res]


def _rng(seed: int, i: int) -> np.random.Generator:
    # per-sample stream derived by counter: independent of evaluation order
    return np.random.default_rng([seed, i])


def _diff(model: GroupoidModel, a, b) -> np.ndarray:
    d = np.asarray(a, float) - np.asarray(b, float)
    if model.periodic_v:
        d[1] = wrap(d[1])
    return d


def verify_groupoid_axioms(model: GroupoidModel, n_samples: int = DEFAULT_SAMPLES,
                           tol: float = DEFAULT_TOL, seed: int = 0) -> VerificationReport:
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    acc = _Acc()
    for i in range(n_samples):
        rng = _rng(seed, i)
        g1, g2, g3 = model.sample_chain(rng, 3)
        mul = lambda a, b: model.multiply(a, b, check=False)
        g12 = mul(g1, g2)
        acc.add("associativity", _diff(model, mul(g12, g3), mul(g1, mul(g2, g3))))
        acc.add("source_of_product", _diff(model, model.source(g12), model.source(g1)))
        acc.add("target_of_product", _diff(model, model.target(g12), model.target(g2)))
        acc.add("left_unit", _diff(model, mul(model.unit(model.source(g1)), g1), g1))
        acc.add("right_unit", _diff(model, mul(g1, model.unit(model.target(g1))), g1))
        inv = model.inverse(g1)
        acc.add("inverse_right", _diff(model, mul(g1, inv), model.unit(model.source(g1))))
        acc.add("inverse_left", _diff(model, mul(inv, g1), model.unit(model.target(g1))))
    return VerificationReport(model.name, acc.checks({"*": tol}))


def exterior_derivative(omega: Callable, pt, h: float = 1e-5) -> np.ndarray:
    """Components ``(d Omega)_{ijk}``, ``i<j<k``, by central differences."""
    pt = np.asarray(pt, float)
    n = len(pt)
    grads = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        grads.append((omega(pt + e) - omega(pt - e)) / (2 * h))
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                out.append(grads[i][j, k] + grads[j][k, i] + grads[k][i, j])
    return np.array(out)


def verify_symplectic_compatibility(model: GroupoidModel, n_samples: int = DEFAULT_SAMPLES,
                                    tol: float = DEFAULT_TOL, seed: int = 0,
                                    fd_step: float = 1e-5, fd_tol: float = 1e-6) -> VerificationReport:
    """Checks (a) Omega Pi = sigma I, (b) Omega = t*w - s*w, (c) dOmega = 0,
    (d) s and t are Poisson maps of opposite sign.

    The signs sigma and tau (``J_s Pi J_s^T = tau pi``) are read off the first
    sample, then held fixed; both are listed in the report.
    """
    acc = _Acc()
    sigma = tau = None
    for i in range(n_samples):
        rng = _rng(seed, i)
        g = model.sample_point(rng)
        W, P = model.omega_matrix(g), model.pi_matrix(g)
        if abs(np.linalg.det(W)) < 1e-12:
            continue
        prod = W @ P
        if sigma is None:
            sigma = 1.0 if prod[0, 0] > 0 else -1.0
        acc.add("(a) omega_pi_inverse", prod - sigma * np.eye(4))

        Js, Jt = model.jac_source(g), model.jac_target(g)
        bs, bt = model.source(g), model.target(g)
        if model.has_leaf_form:
            pull = Jt.T @ model.leaf_form(bt) @ Jt - Js.T @ model.leaf_form(bs) @ Js
            acc.add("(b) pullback_difference", pull - W)

        acc.add("(c) closedness", exterior_derivative(model.omega_matrix, g, fd_step))

        ps = Js @ P @ Js.T
        pt_ = Jt @ P @ Jt.T
        if tau is None:
            tau = 1.0 if ps[0, 1] * model.base_poisson(bs)[0, 1] > 0 else -1.0
        acc.add("(d) source_poisson", ps - tau * model.base_poisson(bs))
        acc.add("(d) target_anti_poisson", pt_ + tau * model.base_poisson(bt))
    tols = {"*": tol, "(c) closedness": fd_tol}
    return VerificationReport(model.name, acc.checks(tols), {"sigma": sigma, "tau": tau})


def hamiltonian_vector(model: GroupoidModel, pt, coord: int) -> np.ndarray:
    """``Pi(dx_coord, .)`` as a vector field."""
    return model.pi_matrix(pt)[coord]


def verify_modular_lift(model: GroupoidModel = AFFINE_PLANE, n_samples: int = DEFAULT_SAMPLES,
                        tol: float = 1e-10, seed: int = 0, use_q: bool = False) -> VerificationReport:
    """Both moment maps push ``H_p`` to ``d_v``.  ``use_q`` swaps in ``H_q`` (negative control)."""
    acc = _Acc()
    coord = 3 if use_q else 2
    target_field = np.array([0.0, 1.0])
    for i in range(n_samples):
        g = model.sample_point(_rng(seed, i))
        H = hamiltonian_vector(model, g, coord)
        acc.add("source_pushforward", model.jac_source(g) @ H - target_field)
        acc.add("target_pushforward", model.jac_target(g) @ H - target_field)
    name = model.name + (" [H_q]" if use_q else "")
    return VerificationReport(name, acc.checks({"*": tol}))


def verify_isotropy(model: GroupoidModel = CYLINDER_ONE, n_samples: int = DEFAULT_SAMPLES,
                    tol: float = DEFAULT_TOL, seed: int = 0) -> VerificationReport:
    """Isotropy away from the zero curve: ``s = t`` forces ``p = 0`` and ``q r in 2 pi Z``."""
    acc = _Acc()
    for i in range(n_samples):
        rng = _rng(seed, i)
        r = model.sample_point(rng)[0]
        theta = rng.uniform(0.0, TWO_PI)
        k = int(rng.integers(-5, 6))
        g = np.array([r, theta, 0.0, TWO_PI * k / r])
        acc.add("isotropy_s_equals_t", _diff(model, model.source(g), model.target(g)))
        # converse: a point with s = t has q r a multiple of 2 pi
        q = rng.uniform(-20.0, 20.0)
        h = np.array([r, theta, 0.0, q])
        if np.max(np.abs(_diff(model, model.source(h), model.target(h)))) <= tol:
            acc.add("isotropy_quantized", [q * r / TWO_PI - round(q * r / TWO_PI)])
        else:
            acc.add("isotropy_quantized", [0.0])
    return VerificationReport(model.name, acc.checks({"*": tol}))


def verify_alpha_group_law(n_samples: int = 10_000, tol: float = 1e-12, seed: int = 0) -> VerificationReport:
    acc = _Acc()
    for i in range(n_samples):
        rng = _rng(seed, i)
        while True:
            r = rng.uniform(-1.9, 1.9)
            p, p2 = rng.uniform(-0.5, 0.5, size=2)
            try:
                a1 = alpha_flow(r, p)
                if not -2.0 < a1 < 2.0:
                    continue
                lhs = alpha_flow(a1, p2)
                rhs = alpha_flow(r, p + p2)
            except ChartError:
                continue
            if -2.0 < rhs < 2.0:
                break
        acc.add("group_law", lhs - rhs)
        acc.add("identity_time", alpha_flow(r, 0.0) - r)
        acc.add("fixed_points", [alpha_flow(1.0, p) - 1.0, alpha_flow(-1.0, p) + 1.0])
    return VerificationReport("alpha", acc.checks({"*": tol}))


# ------------------------------------------------------- modular periods

def modular_period_numeric(f: Callable[[float], float], r0: float, h: float = 1e-5) -> float:
    """Period ``2 pi / |f'(r0)|`` of the modular flow on the zero circle ``r = r0``
    of ``f(r) d_r ^ d_theta``; ``f'`` by central difference."""
    if abs(f(r0)) > 1e-10:
        raise ValueError(f"r0={r0} is not a zero of the profile (f(r0)={f(r0):.3g})")
    slope = (f(r0 + h) - f(r0 - h)) / (2.0 * h)
    if abs(slope) < 1e-8:
        raise DegenerateZeroError(f"zero at r0={r0} is not linear (f'={slope:.3g})")
    return TWO_PI / abs(slope)


# ------------------------------------------------------------ Dehn twist

def _bump(t):
    return math.exp(-1.0 / t) if t > 0 else 0.0


def _bump_d(t):
    return math.exp(-1.0 / t) / (t * t) if t > 0 else 0.0


@dataclass(frozen=True)
class RampProfile:
    """Smooth monotone ramp, 0 for ``r <= 1`` and ``2 pi`` for ``r >= 2``, times ``scale``."""

    scale: int = 1

    def __call__(self, r: float) -> float:
        a, b = _bump(r - 1.0), _bump(2.0 - r)
        return self.scale * TWO_PI * a / (a + b)

    def derivative(self, r: float) -> float:
        a, b = _bump(r - 1.0), _bump(2.0 - r)
        da, db = _bump_d(r - 1.0), -_bump_d(2.0 - r)
        return self.scale * TWO_PI * (da * b - a * db) / (a + b) ** 2

    def times(self, k: int) -> "RampProfile":
        return RampProfile(self.scale * k)


def check_ramp(profile: Callable[[float], float], n: int = 400) -> None:
    """Sample the three ramp conditions; raise RampError on violation."""
    left = np.linspace(0.0, 1.0, n)
    right = np.linspace(2.0, 3.0, n)
    mid = np.linspace(0.9, 2.1, 4 * n)
    if any(abs(profile(x)) > 1e-12 for x in left):
        raise RampError("profile must vanish for r <= 1")
    if any(abs(profile(x) - TWO_PI) > 1e-12 for x in right):
        raise RampError("profile must equal 2 pi for r >= 2")
    vals = [profile(x) for x in mid]
    if any(b < a - 1e-12 for a, b in zip(vals, vals[1:])):
        raise RampError("profile must be nondecreasing")


def dehn_twist_map(profile: Callable[[float], float] | None = None, check: bool = True):
    """``(r, theta) -> (r, theta + f(r))`` on the annulus; theta is returned mod 2 pi."""
    profile = profile or RampProfile()
    if check:
        check_ramp(profile)

    def phi(r, theta):
        return r, (theta + profile(r)) % TWO_PI

    phi.profile = profile
    return phi


def verify_twist(n_samples: int = DEFAULT_SAMPLES, tol: float = 1e-10, seed: int = 0,
                 k: int = 2, compose_tol: float = 1e-12, profile: RampProfile | None = None) -> VerificationReport:
    profile = profile or RampProfile()
    phi = dehn_twist_map(profile)
    phi_k = dehn_twist_map(profile.times(k), check=False)
    acc = _Acc()
    h = 1e-4
    for i in range(n_samples):
        rng = _rng(seed, i)
        theta = rng.uniform(0.0, TWO_PI)
        r_in, r_out = rng.uniform(0.5, 1.0), rng.uniform(2.0, 2.5)
        acc.add("inner_boundary_identity", wrap(phi(r_in, theta)[1] - theta))
        acc.add("outer_boundary_identity", wrap(phi(r_out, theta)[1] - theta))

        r = rng.uniform(0.8, 2.2)
        # unwrapped map for differencing
        F = lambda rr, tt: np.array([rr, tt + profile(rr)])
        J = np.column_stack([(F(r + h, theta) - F(r - h, theta)) / (2 * h),
                             (F(r, theta + h) - F(r, theta - h)) / (2 * h)])
        acc.add("unit_jacobian_determinant", np.linalg.det(J) - 1.0)

        rr, tt = r, theta
        for _ in range(k):
            rr, tt = phi(rr, tt)
        ref = phi_k(r, theta)
        acc.add(f"power_{k}_matches_scaled_profile", [rr - ref[0], wrap(tt - ref[1])])
    tols = {"*": tol, f"power_{k}_matches_scaled_profile": compose_tol}
    return VerificationReport("DehnTwist", acc.checks(tols))
