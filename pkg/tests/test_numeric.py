import numpy as np
import pytest

from lscat.numeric import (
    FlowConfig,
    LeftDomain,
    ScalarField,
    annulus_samples,
    check_condition_C,
    check_discrete_palais_smale_sampled,
    check_energy_identity,
    field_V,
    flow_map,
    get_field,
    half_interval_field,
    halffixed_circle_map_samples,
    n_schedule,
    quadratic_field,
    random_quadratic_field,
    truncation_g,
    verify_prop_app,
)


def test_truncation_clauses():
    assert truncation_g(0.5) == 1.0
    assert truncation_g(0.0) == 1.0
    assert truncation_g(3.0) == 3.0
    assert truncation_g(2.0) == 2.0
    # pinned value of the cubic bridge
    assert truncation_g(1.5) == pytest.approx(1.375)
    xs = np.linspace(0.0, 3.0, 601)
    ys = truncation_g(xs)
    assert np.all(np.diff(ys) >= -1e-12)
    mid = (xs >= 1.0) & (xs <= 2.0)
    assert np.all(ys[mid] <= xs[mid] + 1e-12)
    assert np.all(ys[mid] >= 1.0 - 1e-12)


def test_field_v_examples():
    q = quadratic_field()
    assert np.allclose(field_V(q, [1.0, 0.0]), [-1.0, 0.0])
    assert np.allclose(field_V(q, [0.0, 0.0]), [0.0, 0.0])
    m = [0.2, 0.1]  # gradient norm < 1: untruncated
    assert np.allclose(field_V(q, m), -np.asarray(q.grad(m)))


def test_field_v_is_bounded():
    rng = np.random.default_rng(0)
    q = quadratic_field()
    for _ in range(200):
        m = rng.uniform(-5, 5, size=2)
        v = field_V(q, m)
        g = np.linalg.norm(q.grad(m))
        assert np.linalg.norm(v) <= max(g, 2.0) + 1e-12
        assert np.linalg.norm(v) <= 2.0 + 1e-12


def test_flow_zero_field_stays_put():
    still = ScalarField(2, lambda m: 0.0, lambda m: np.zeros(2))
    traj = flow_map(still, [0.4, -0.2], FlowConfig(1.0))
    assert np.allclose(traj.endpoint, [0.4, -0.2])


def test_flow_matches_closed_form():
    q = quadratic_field()
    cfg = FlowConfig(1.0, 1.0 / 1000)
    traj = flow_map(q, [0.3, 0.0], cfg)
    exact = 0.3 * np.exp(-2.0)
    assert abs(traj.endpoint[0] - exact) <= 1e-8


def test_flow_half_interval_descends_then_exits():
    hi = half_interval_field()
    traj = flow_map(hi, [0.9], FlowConfig(0.4, 0.4 / 1000))
    assert np.all(np.diff(traj.values()) < 0)
    with pytest.raises(LeftDomain):
        flow_map(hi, [0.2], FlowConfig(1.0, 1.0 / 1000))


def test_lyapunov_along_flow():
    q = random_quadratic_field(11)
    traj = flow_map(q, [1.0, -0.7], FlowConfig(1.0, 1.0 / 500))
    values = traj.values()
    assert np.all(np.diff(values) < 1e-12)


def test_energy_identity_examples():
    q = quadratic_field()
    cfg = FlowConfig(1.0, 1.0 / 1000)
    assert check_energy_identity(q, [0.0, 0.0], cfg) == 0.0
    assert check_energy_identity(q, [1.0, 0.0], cfg) <= 1e-6


def test_energy_identity_over_random_quadratics():
    rng = np.random.default_rng(7)
    cfg = FlowConfig(1.0, 1.0 / 1000)
    worst = 0.0
    for seed in range(100):
        field = random_quadratic_field(seed)
        m = rng.uniform(-1.0, 1.0, size=2)
        worst = max(worst, check_energy_identity(field, m, cfg))
    assert worst <= 1e-5


def test_gradient_finite_difference_consistency():
    rng = np.random.default_rng(3)
    for seed in (0, 1, 2):
        field = random_quadratic_field(seed)
        field.check_gradient(rng, samples=1000, rel_tol=1e-5)
    half = half_interval_field()
    half.check_gradient(np.random.default_rng(4), samples=200, box=0.45)


def test_condition_c_branches():
    q = quadratic_field()
    assert check_condition_C(
        q, annulus_samples(count=96, decay=0.6)
    )["verdict"] == "consistent"
    hi = half_interval_field()
    report = check_condition_C(hi, [np.array([1.0 / k]) for k in range(2, 40)])
    assert report["verdict"] == "violation-suspected"
    const = ScalarField(1, lambda m: 1.0, lambda m: np.zeros(1))
    assert check_condition_C(
        const, [np.array([0.1]), np.array([0.5])]
    )["verdict"] == "consistent"
    assert report["heuristic"]


def test_descent_map_check_discriminates_domain():
    phi = lambda x: x / 2.0  # noqa: E731
    f = lambda x: float(np.asarray(x).reshape(-1)[0])  # noqa: E731
    samples = [np.array([2.0 ** -j]) for j in range(1, 20)]
    open_domain = half_interval_field().domain
    bad = check_discrete_palais_smale_sampled(phi, f, samples,
                                              domain=open_domain)
    assert bad["verdict"] == "violation-suspected"
    assert not bad["accumulation_in_domain"]
    good = check_discrete_palais_smale_sampled(phi, f, samples)
    assert good["verdict"] == "consistent"


def test_halffixed_circle_fixture():
    phi, height, samples = halffixed_circle_map_samples()
    report = check_discrete_palais_smale_sampled(phi, height, samples)
    assert report["verdict"] == "consistent"
    fixed = [s for s in samples if np.linalg.norm(s - phi(s)) <= 1e-9]
    values = sorted(float(s[1]) for s in fixed)
    assert values[0] == pytest.approx(-1.0)
    assert values[-1] == pytest.approx(1.0)
    moving = [s for s in samples if np.linalg.norm(s - phi(s)) > 1e-9]
    assert all(height(phi(s)) < height(s) for s in moving)


def test_prop_app_chain_quadratic():
    q = quadratic_field()
    report = verify_prop_app(q, FlowConfig(1.0, 1.0 / 1000), n_max=10_000)
    assert report["chain_ok"]
    assert report["conclusion_ok"]
    for row in report["results"]:
        assert row["path_length"] <= 1.1 * row["path_budget"]


def test_prop_app_tau_scaling():
    q = quadratic_field()
    budgets = {}
    for tau in (0.5, 1.0, 2.0):
        report = verify_prop_app(q, FlowConfig(tau, tau / 1000), n_max=100)
        assert report["chain_ok"]
        budgets[tau] = [row["path_budget"] for row in report["results"]]
    for k in range(len(budgets[0.5])):
        assert budgets[1.0][k] == pytest.approx(2 * budgets[0.5][k])
        assert budgets[2.0][k] == pytest.approx(2 * budgets[1.0][k])


def test_prop_app_half_interval_conclusion_fails():
    hi = half_interval_field()
    family = [np.array([1.0 / max(n, 2)]) for n in n_schedule(1000)]
    report = verify_prop_app(hi, FlowConfig(1.0, 1.0 / 1000),
                             n_max=1000, family=family)
    assert not report["conclusion_ok"]
    assert not report["rest_point_in_domain"]


def test_field_registry():
    assert get_field("quadratic").name == "quadratic"
    assert get_field("half-interval").name == "half-interval"
    with pytest.raises(KeyError):
        get_field("nope")
