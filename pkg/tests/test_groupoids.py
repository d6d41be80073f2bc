import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsspic import groupoids as gd
from tsspic.groupoids import AFFINE_PLANE as AP
from tsspic.groupoids import CYLINDER_ONE as C1
from tsspic.groupoids import CYLINDER_TWO as C2

MODELS = [AP, C1, C2]


def printed_omega(model, pt):
    """Coordinate forms as printed, assembled entry by entry."""
    u, v, p, q = pt
    W = np.zeros((4, 4))
    if model is C2:
        W[0, 2], W[0, 3], W[1, 2], W[2, 3] = -2 * q * u, 1, -1, u * u - 1
    else:
        W[0, 2], W[0, 3], W[1, 2], W[2, 3] = -q, 1, -1, u
    return W - W.T


def printed_pi_affine(pt):
    x, y, p, q = pt
    P = np.zeros((4, 4))
    P[0, 1], P[0, 3], P[1, 2], P[1, 3] = -x, 1, -1, -q
    return P - P.T


def fd_jacobian(f, pt, h=1e-6):
    pt = np.asarray(pt, float)
    cols = []
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        cols.append((np.asarray(f(pt + e), float) - np.asarray(f(pt - e), float)) / (2 * h))
    return np.column_stack(cols)


def test_affine_printed_values():
    assert np.allclose(AP.source((1, 0, 0, 0)), (1, 0))
    assert np.allclose(AP.target((1, 0, 0, 0)), (1, 0))
    assert np.allclose(AP.target((1, 2, math.log(2), 3)), (2, 5), atol=1e-15)
    g = np.array([1.5, -2.0, 0.7, 0.3])
    assert np.allclose(AP.inverse(g), (1.5 * math.exp(0.7), -2 + 1.5 * 0.3, -0.7, -0.3 * math.exp(-0.7)))
    h = np.array([*AP.target(g), -0.2, 1.1])
    assert np.allclose(AP.multiply(g, h), (1.5, -2.0, 0.5, 0.3 + math.exp(0.7) * 1.1))


def test_affine_inverse_residual():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        g = AP.sample_point(rng)
        r = AP.multiply(g, AP.inverse(g)) - np.array([g[0], g[1], 0, 0])
        worst = max(worst, np.max(np.abs(r)))
    assert worst < 1e-12


def test_cylinder_targets_printed():
    r, th, p, q = 0.3, 6.0, 0.2, 1.5
    assert np.allclose(C1.target((r, th, p, q)), (r * math.exp(p), (th + q * r) % (2 * math.pi)))
    a = ((r + 1) + (r - 1) * math.exp(2 * p)) / ((r + 1) - (r - 1) * math.exp(2 * p))
    assert np.allclose(C2.target((r, th, p, q)), (a, (th + q * (r * r - 1)) % (2 * math.pi)))


def test_domains_and_composability():
    with pytest.raises(gd.ChartError):
        C1.source((1.2, 0, 0, 0))
    with pytest.raises(gd.ChartError):
        C1.target((0.9, 0, 1.0, 0))
    with pytest.raises(gd.ChartError):
        gd.alpha_flow(3.0, math.log(2) / 2)  # denominator vanishes
    g = np.array([0.5, 1.0, 0.1, 0.2])
    with pytest.raises(ValueError):
        AP.multiply(g, np.array([9.0, 9.0, 0, 0]))
    # theta agrees mod 2 pi
    b = C1.target(g)
    assert C1.composable(g, np.array([b[0], b[1] + 2 * math.pi, 0.3, 0.1]))


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.name)
def test_omega_matches_printed_form(model):
    rng = np.random.default_rng(1)
    for _ in range(50):
        g = model.sample_point(rng)
        assert np.allclose(model.omega_matrix(g), printed_omega(model, g), atol=1e-15)


def test_affine_omega_entries_at_unit():
    W = AP.omega_matrix((1, 0, 0, 0))
    assert (W[0, 2], W[0, 3], W[1, 2], W[2, 3]) == (0, 1, -1, 1)


def test_affine_pi_printed():
    rng = np.random.default_rng(2)
    for _ in range(50):
        g = AP.sample_point(rng)
        assert np.allclose(AP.pi_matrix(g), printed_pi_affine(g))


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.name)
def test_analytic_jacobians_match_finite_differences(model):
    rng = np.random.default_rng(3)
    for _ in range(100):
        g = model.sample_point(rng)
        # unwrapped target for differencing
        t = lambda x: (model.flow(x[0], x[2]), x[1] + x[3] * model.profile(x[0]))
        assert np.allclose(model.jac_target(g), fd_jacobian(t, g), atol=1e-7)
        assert np.allclose(model.jac_source(g), fd_jacobian(lambda x: x[:2], g), atol=1e-9)


@pytest.mark.parametrize("model", [AP, C1], ids=lambda m: m.name)
def test_full_suites_pass(model):
    for rep in (gd.verify_groupoid_axioms(model, 1000, 1e-9), gd.verify_symplectic_compatibility(model, 1000, 1e-9)):
        assert rep.passed, rep.to_json()
        assert all(c.samples == 1000 for c in rep.checks)


def test_cylinder_two_checks():
    rep = gd.verify_symplectic_compatibility(C2, 1000, 1e-12)
    names = {c.name for c in rep.checks}
    assert not any(n.startswith("(b)") for n in names)
    assert rep.passed, rep.to_json()
    assert gd.verify_groupoid_axioms(C2, 1000, 1e-9).passed


def test_sign_constants():
    rep = gd.verify_symplectic_compatibility(AP, 20)
    assert rep.constants == {"sigma": -1.0, "tau": -1.0}


def test_poisson_check_affine_tolerance():
    rep = gd.verify_symplectic_compatibility(AP, 1000, tol=1e-8)
    assert rep.check("(d) source_poisson").passed and rep.check("(d) target_anti_poisson").passed


def test_negative_controls():
    drop = gd.verify_groupoid_axioms(gd.perturbed(AP, "drop_q"), 200)
    assert not drop.passed and not drop.check("target_of_product").passed
    wrong = gd.verify_groupoid_axioms(gd.perturbed(AP, "wrong_q"), 200)
    assert not wrong.check("associativity").passed
    assert not gd.verify_modular_lift(AP, 200, use_q=True).passed


def test_modular_lift():
    H = gd.hamiltonian_vector(AP, np.array([1.0, 0, 0, 0]), 2)
    assert np.array_equal(AP.jac_source((1, 0, 0, 0)) @ H, [0, 1])
    assert gd.verify_modular_lift(AP, 1000, 1e-10).passed


def test_isotropy_probe():
    assert gd.verify_isotropy(C1, 500).passed


def test_alpha_examples():
    assert gd.alpha_flow(0.7, 0.0) == pytest.approx(0.7, abs=1e-15)
    for p in (-0.4, 0.1, 0.9):
        assert gd.alpha_flow(1.0, p) == 1.0 and gd.alpha_flow(-1.0, p) == -1.0
    assert abs(gd.alpha_flow(gd.alpha_flow(0.5, 0.3), 0.2) - gd.alpha_flow(0.5, 0.5)) < 1e-12
    # alpha is the flow of (r^2 - 1) d_r: d alpha / dp = alpha^2 - 1
    for r, p in [(0.3, 0.2), (-1.5, 0.1), (1.4, -0.3)]:
        a = gd.alpha_flow(r, p)
        assert gd.alpha_dp(r, p) == pytest.approx(a * a - 1, rel=1e-12)
    rep = gd.verify_alpha_group_law(10_000, 1e-12)
    assert rep.passed, rep.to_json()


def test_modular_periods():
    assert abs(gd.modular_period_numeric(lambda r: r, 0.0) - 2 * math.pi) < 1e-8
    for r0 in (1.0, -1.0):
        assert abs(gd.modular_period_numeric(lambda r: r * r - 1, r0) - math.pi) < 1e-8
    with pytest.raises(gd.DegenerateZeroError):
        gd.modular_period_numeric(lambda r: r * r, 0.0)
    with pytest.raises(ValueError):
        gd.modular_period_numeric(lambda r: r, 0.5)


def test_dehn_twist():
    phi = gd.dehn_twist_map()
    for th in (0.0, 1.0, 6.0):
        assert phi(1.0, th) == (1.0, th)
        r, t = phi(2.0, th)
        assert r == 2.0 and abs(gd.wrap(t - th)) < 1e-12
    assert 0 < phi(1.5, 0.0)[1] < 2 * math.pi
    rep = gd.verify_twist(1000, 1e-10, k=2)
    assert rep.passed, rep.to_json()
    assert gd.verify_twist(200, 1e-10, k=3).passed


@pytest.mark.parametrize("bad", [
    lambda r: 2 * math.pi * min(max(r - 1, 0), 1) + 0.1,   # nonzero on the inner end
    lambda r: math.pi * min(max(r - 1, 0), 1),             # stops at pi
    lambda r: 2 * math.pi * min(max(r - 1, 0), 1) * (1 + 0.5 * math.sin(20 * r)) if r < 2 else 2 * math.pi,
])
def test_ramp_violations(bad):
    with pytest.raises(gd.RampError):
        gd.dehn_twist_map(bad)


def test_ramp_profile_derivative():
    f = gd.RampProfile()
    for r in np.linspace(0.9, 2.1, 50):
        h = 1e-6
        assert f.derivative(r) == pytest.approx((f(r + h) - f(r - h)) / (2 * h), abs=1e-5)
        assert f.derivative(r) >= 0


def test_seeded_determinism():
    a = json.dumps(gd.verify_symplectic_compatibility(C1, 100, seed=5).to_json())
    b = json.dumps(gd.verify_symplectic_compatibility(C1, 100, seed=5).to_json())
    c = json.dumps(gd.verify_symplectic_compatibility(C1, 100, seed=6).to_json())
    assert a == b and a != c


def test_report_json_shape():
    d = gd.verify_groupoid_axioms(AP, 10).to_json()
    assert d["model"] == "AffinePlane"
    assert set(d["checks"][0]) == {"name", "samples", "max_residual", "tol", "pass"}


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(MODELS), st.integers(0, 10**6))
def test_units_two_sided(model, seed):
    g = model.sample_point(np.random.default_rng(seed))
    left = model.multiply(model.unit(model.source(g)), g)
    right = model.multiply(g, model.unit(model.target(g)))
    for x in (left, right):
        d = x - g
        if model.periodic_v:
            d[1] = gd.wrap(d[1])
        assert np.max(np.abs(d)) < 1e-12
