import numpy as np
import pytest

from vemmhd.experiments import (
    HARTMANN_PRESETS,
    ErrorReport,
    HartmannCase,
    LevelErrors,
    compute_errors,
    convergence_study,
    example1_case,
    example1_forcing,
    interpolant_state,
    mhd_forcing,
    read_report,
    run_hartmann,
    solve_case,
    write_profile,
    write_report,
)
from vemmhd.experiments.cases import (
    ZERO_SCALAR,
    ZERO_VECTOR,
    ManufacturedCase,
    ScalarField,
    Term,
    VectorField,
    const1d,
    example1_fields,
    linear1d,
    product1d,
    sum1d,
    zero_field,
)
from vemmhd.experiments.report import REPORT_HEADER, observed_rate
from vemmhd.experiments.study import hartmann_mesh
from vemmhd.forms import ModelParams
from vemmhd.mesh import perturbed_quad_mesh, quad_mesh
from vemmhd.settings import SolverSettings
from vemmhd.system import SolverState, build_dofmap, channel_bc, homogeneous_bc

RNG_POINTS = np.random.default_rng(42).uniform(0.05, 0.95, size=(10, 2))


# --- manufactured fields ---


def test_example1_fields_are_solenoidal():
    u, b, _ = example1_fields()
    np.testing.assert_allclose(u.div(RNG_POINTS), 0.0, atol=1e-12)
    np.testing.assert_allclose(b.div(RNG_POINTS), 0.0, atol=1e-12)


def test_example1_velocity_vanishes_at_center():
    u, _, _ = example1_fields()
    np.testing.assert_allclose(u.value(np.array([[0.5, 0.5]])), 0.0, atol=1e-15)


def _fd_forcing(params, u, b, p, x, eps=1e-4):
    """Strong residuals by central differences of the exact fields."""

    def d(fn, x, axis):
        e = np.zeros(2)
        e[axis] = eps
        return (fn(x + e) - fn(x - e)) / (2 * eps)

    def lap(fn, x):
        return sum((fn(x + e) - 2 * fn(x) + fn(x - e)) / eps**2 for e in (np.array([eps, 0]), np.array([0, eps])))

    uv, bv = u.value(x), b.value(x)
    conv = uv[:, 0, None] * d(u.value, x, 0) + uv[:, 1, None] * d(u.value, x, 1)
    curl_b = lambda y: d(lambda z: b.value(z)[:, 1], y, 0) - d(lambda z: b.value(z)[:, 0], y, 1)  # noqa: E731
    om = curl_b(x)
    lorentz = np.column_stack([-bv[:, 1] * om, bv[:, 0] * om])
    grad_p = np.column_stack([d(p.value, x, 0), d(p.value, x, 1)])
    f = -lap(u.value, x) / params.r_nu + conv + grad_p - params.s_c * lorentz

    cross = lambda y: u.value(y)[:, 0] * b.value(y)[:, 1] - u.value(y)[:, 1] * b.value(y)[:, 0]  # noqa: E731
    curl_s = np.column_stack([d(cross, x, 1), -d(cross, x, 0)])
    curl_om = np.column_stack([d(curl_b, x, 1), -d(curl_b, x, 0)])
    g = params.s_c / params.r_m * curl_om - params.s_c * curl_s
    return f, g


@pytest.mark.parametrize("params", [ModelParams(), ModelParams(r_nu=2.0, r_m=0.5, s_c=3.0)])
def test_example1_forcing_matches_finite_differences(params):
    u, b, p = example1_fields()
    f, g = example1_forcing(params)
    f_fd, g_fd = _fd_forcing(params, u, b, p, RNG_POINTS)
    np.testing.assert_allclose(f(RNG_POINTS), f_fd, rtol=1e-4, atol=1e-4)
    np.testing.assert_allclose(g(RNG_POINTS), g_fd, rtol=1e-4, atol=1e-4)


# --- Hartmann fields ---


def test_hartmann_presets():
    assert HARTMANN_PRESETS["ha1"].hartmann == pytest.approx(1.0)
    assert HARTMANN_PRESETS["ha5"].hartmann == pytest.approx(5.0)


@pytest.mark.parametrize("name", ["ha1", "ha5"])
def test_hartmann_profiles(name):
    case = HartmannCase(params=HARTMANN_PRESETS[name], G=0.1)
    walls = np.array([[3.0, -1.0], [3.0, 1.0]])
    np.testing.assert_allclose(case.u.value(walls), 0.0, atol=1e-14)
    np.testing.assert_allclose(case.b.value(walls)[:, 0], 0.0, atol=1e-14)
    assert case.b.value(np.array([[1.0, 0.0]]))[0, 0] == pytest.approx(0.0, abs=1e-15)


def test_hartmann_centerline_velocity():
    params = HARTMANN_PRESETS["ha1"]
    case = HartmannCase(params=params, G=0.1)
    Ha = 1.0
    want = 0.1 * params.r_nu / (Ha * np.tanh(Ha)) * (1 - 1 / np.cosh(Ha))
    assert case.u.value(np.array([[2.0, 0.0]]))[0, 0] == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("name", ["ha1", "ha5"])
def test_hartmann_fields_solve_the_strong_equations(name):
    case = HartmannCase(params=HARTMANN_PRESETS[name], G=0.1)
    x = np.column_stack([np.linspace(0.5, 5.5, 7), np.linspace(-0.9, 0.9, 7)])
    f_fd, g_fd = _fd_forcing(case.params, case.u, case.b, case.p, x)
    np.testing.assert_allclose(f_fd, 0.0, atol=1e-5)
    np.testing.assert_allclose(g_fd, 0.0, atol=1e-5)


# --- error norms ---


def test_zero_state_against_zero_fields_has_zero_errors():
    case = HartmannCase(params=HARTMANN_PRESETS["ha1"], G=0.0)
    mesh = quad_mesh(3, 1, case.domain)
    dm = build_dofmap(mesh, 1, case.bc)
    errors = compute_errors(SolverState.zeros(dm), case, mesh, 1, dm)
    for name in ("e_u0", "e_u1", "e_p0", "div_norm"):
        assert getattr(errors, name) == 0.0
    # b = (0, 1) on the 6 x 2 channel: the L2 error is its norm and the gradient part vanishes
    assert errors.e_b0 == pytest.approx(np.sqrt(12.0), rel=1e-10)
    assert errors.e_b1 == pytest.approx(errors.e_b0)


def test_interpolant_errors_decay_at_optimal_rates():
    case = example1_case()
    report = ErrorReport()
    for n in (4, 8, 16):
        mesh = quad_mesh(n)
        dm = build_dofmap(mesh, 1, homogeneous_bc())
        report.rows.append(compute_errors(interpolant_state(mesh, 1, case, dm), case, mesh, 1, dm))
    rates = report.final_rates()
    assert rates["rate_u0"] == pytest.approx(2.0, abs=0.25)
    assert rates["rate_u1"] == pytest.approx(1.0, abs=0.25)
    assert rates["rate_b0"] == pytest.approx(2.0, abs=0.25)
    assert rates["rate_b1"] == pytest.approx(1.0, abs=0.25)


# --- report ---


def _row(h, scale):
    return LevelErrors(h=h, e_u0=scale, e_u1=2 * scale, e_b0=3 * scale, e_b1=4 * scale, e_p0=5 * scale, div_norm=1e-16)


def test_observed_rate():
    assert observed_rate(0.25, 1.0, 0.5, 1.0) == pytest.approx(2.0)
    assert observed_rate(0.0, 1.0, 0.5, 1.0) is None
    assert observed_rate(1.0, 1.0, 0.5, 0.5) is None


def test_empty_report_writes_header_only(tmp_path):
    path = write_report(ErrorReport(), tmp_path / "r.csv")
    assert path.read_text(encoding="utf-8") == ",".join(REPORT_HEADER) + "\n"


def test_report_round_trip_and_rates(tmp_path):
    report = ErrorReport(rows=[_row(0.5, 1.0), _row(0.25, 0.25)])
    path = write_report(report, tmp_path / "r.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[REPORT_HEADER.index("rate_u0")] == ""
    assert float(lines[2].split(",")[REPORT_HEADER.index("rate_u0")]) == pytest.approx(2.0)

    back = read_report(path)
    assert [r.model_dump(exclude={"iterations", "n_cells"}) for r in back.rows] == [
        r.model_dump(exclude={"iterations", "n_cells"}) for r in report.rows
    ]


def test_write_profile(tmp_path):
    path = write_profile([[0.0, 1.0, 1.0, 0.5, 0.5]], tmp_path / "p.csv")
    assert path.read_text(encoding="utf-8").splitlines()[0] == "x2,u1_numeric,u1_analytic,b1_numeric,b1_analytic"


# --- studies ---


def test_hartmann_with_zero_gradient_gives_zero_flow():
    case = HartmannCase(params=HARTMANN_PRESETS["ha1"], G=0.0)
    result = run_hartmann(case, 2, 1, SolverSettings(), n_samples=5)
    np.testing.assert_allclose(result.samples[:, 1], 0.0, atol=1e-10)
    np.testing.assert_allclose(result.samples[:, 3], 0.0, atol=1e-10)
    assert result.state.converged


def _channel_poiseuille(eps: float) -> ManufacturedCase:
    """u = eps (1 - y^2) e1, p = -2 eps x / R_nu, b = 0 on [0, 2] x [-1, 1]."""
    params = ModelParams(r_nu=1.0, r_m=1.0, s_c=1.0)
    profile = sum1d(const1d(1.0), product1d(linear1d(-1.0), linear1d(1.0)))
    u = VectorField(ScalarField((Term(eps, const1d(), profile),)), ZERO_SCALAR)
    p = ScalarField((Term(-2.0 * eps / params.r_nu, linear1d(), const1d()),))
    f, g = mhd_forcing(params, u, ZERO_VECTOR, p)
    bc = channel_bc(0.0, 2.0, -1.0, 1.0, p_d=p.value, b_d=zero_field)
    return ManufacturedCase(
        name="poiseuille", params=params, u=u, b=ZERO_VECTOR, p=p, f=f, g=g, bc=bc, domain=(0.0, 2.0, -1.0, 1.0)
    )


@pytest.mark.parametrize(
    "make_mesh",
    [
        lambda d: quad_mesh(4, 4, d),
        lambda d: perturbed_quad_mesh(4, 4, d, seed=3),
    ],
    ids=["quad", "perturbed_quad"],
)
def test_k2_reproduces_quadratic_channel_flow(make_mesh):
    # P2 velocity and P1 pressure lie in the discrete spaces; the tiny amplitude keeps
    # the convective term, which is not exact for them, far below the tolerance
    eps = 1e-6
    case = _channel_poiseuille(eps)
    mesh = make_mesh(case.domain)
    state, errors, _ = solve_case(mesh, 2, case)
    assert state.converged
    assert errors.e_u0 <= 1e-3 * eps
    assert errors.e_u1 <= 1e-3 * eps
    assert errors.e_p0 <= 1e-3 * eps
    assert errors.e_b1 <= 1e-12
    assert errors.div_norm <= 1e-10


def test_k1_two_level_rates_on_small_quads():
    report = convergence_study("quad", [4, 8], 1)
    rates = report.final_rates()
    assert rates["rate_u0"] >= 1.5
    assert rates["rate_u1"] >= 0.8
    assert rates["rate_b0"] >= 1.5
    assert rates["rate_b1"] >= 0.8
    assert all(r.div_norm <= 1e-10 for r in report.rows)


def test_hartmann_mesh_resolves_wall_layers():
    ha1 = hartmann_mesh(HartmannCase(params=HARTMANN_PRESETS["ha1"]), 2)
    ha5 = hartmann_mesh(HartmannCase(params=HARTMANN_PRESETS["ha5"]), 2)
    assert ha1.n_cells == 6 * 2
    assert ha5.n_cells == 30 * 10
    # square cells of side 2 / (n Ha)
    assert all(g.area == pytest.approx(0.2**2) for g in ha5.geometry)


def test_hartmann_ha5_brakes_the_flow_and_improves_with_refinement():
    case = HartmannCase(params=HARTMANN_PRESETS["ha5"], G=0.1)
    coarse = run_hartmann(case, 1, 1, n_samples=21)
    fine = run_hartmann(case, 2, 1, n_samples=21)
    assert fine.state.converged
    assert fine.u_rel_error < coarse.u_rel_error
    assert fine.u_rel_error < 1.0
    # centre velocity stays below the unbraked Poiseuille value G R_nu / 2
    centre = fine.samples[len(fine.samples) // 2]
    assert centre[0] == pytest.approx(0.0, abs=1e-12)
    assert centre[1] < 0.5 * case.G * case.params.r_nu


@pytest.mark.slow
def test_k1_convergence_rates_on_quads():
    report = convergence_study("quad", [8, 16, 32], 1)
    rates = report.final_rates()
    assert 1.8 <= rates["rate_u0"] <= 2.2
    assert 0.85 <= rates["rate_u1"] <= 1.2
    assert 1.8 <= rates["rate_b0"] <= 2.2
    assert 0.85 <= rates["rate_b1"] <= 1.2
    assert rates["rate_p0"] >= 0.85
    assert all(r.div_norm <= 1e-10 for r in report.rows)


@pytest.mark.slow
def test_k2_convergence_rates_on_quads():
    report = convergence_study("quad", [4, 8, 16], 2)
    rates = report.final_rates()
    assert 2.7 <= rates["rate_u0"] <= 3.4
    assert 1.8 <= rates["rate_u1"] <= 2.2
    assert 2.7 <= rates["rate_b0"] <= 3.3
    assert 1.8 <= rates["rate_b1"] <= 2.2
    assert all(r.div_norm <= 1e-10 for r in report.rows)


@pytest.mark.slow
@pytest.mark.parametrize("k", [1, 2])
def test_divergence_free_on_voronoi(k):
    report = convergence_study("voronoi", [4, 8], k, seed=3)
    assert all(r.div_norm <= 1e-10 for r in report.rows)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["ha1", "ha5"])
def test_hartmann_profiles_converge(name):
    case = HartmannCase(params=HARTMANN_PRESETS[name], G=0.1)
    errs = [run_hartmann(case, n, 1).max_rel_error for n in (4, 8, 16)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 0.05
