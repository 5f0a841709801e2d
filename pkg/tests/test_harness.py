import math
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from embound.assembly import build_system
from embound.geometry import Circle
from embound.harness.cli import main
from embound.harness.config import ConfigError, ExperimentConfig, load_config, parse_list
from embound.harness.experiments import (
    CSV_COLUMNS,
    box_integral,
    run_convergence,
    solve_steady,
)
from embound.harness.norms import (
    convergence_rates,
    error_norms,
    gradient_error,
    norms_from_errors,
    numerical_gradient,
    observed_rates,
)
from embound.harness.problems import hat_source, named_problem
from embound.problem import ProblemSpec

D = 1e-4


def _div_beta_grad(prob, x, y, t=0.0):
    """Fourth-order finite-difference div(beta grad u) of the exact solution."""
    u = lambda a, b: prob.exact(a, b, t)
    beta = lambda a, b: prob.beta_at(a, b)

    def flux(a, b, dx, dy):
        du = (-u(a + 2 * dx, b + 2 * dy) + 8 * u(a + dx, b + dy) - 8 * u(a - dx, b - dy)
              + u(a - 2 * dx, b - 2 * dy)) / (12 * D)
        return beta(a, b) * du

    out = 0.0
    for dx, dy in ((D, 0.0), (0.0, D)):
        out = out + (-flux(x + 2 * dx, y + 2 * dy, dx, dy) + 8 * flux(x + dx, y + dy, dx, dy)
                     - 8 * flux(x - dx, y - dy, dx, dy) + flux(x - 2 * dx, y - 2 * dy, dx, dy)) / (12 * D)
    return out


def _inside(prob, rng, k=40):
    x0, x1, y0, y1 = prob.box
    pts = rng.uniform([x0, y0], [x1, y1], size=(4000, 2))
    pts = pts[prob.geometry.psi(pts[:, 0], pts[:, 1]) < -0.05][:k]
    return pts[:, 0], pts[:, 1]


@pytest.mark.parametrize("name", ["glass", "tilted_square", "bone", "disk", "ellipse"])
def test_manufactured_sources(name, rng):
    prob = named_problem(name)
    x, y = _inside(prob, rng)
    lhs = _div_beta_grad(prob, x, y)
    assert np.allclose(lhs, prob.source(x, y), rtol=1e-5, atol=1e-5 * np.max(np.abs(lhs)))


def test_rotated_ellipse_source(rng):
    prob = named_problem("rotated_ellipse", alpha=0.4)
    x, y = _inside(prob, rng)
    assert np.allclose(_div_beta_grad(prob, x, y), 3.0, rtol=1e-5)
    # exact solution vanishes on the boundary
    t = np.linspace(0, 2 * np.pi, 9)
    X, Y = 4 * np.cos(t), 2 * np.sin(t)
    c, s = np.cos(0.4), np.sin(0.4)
    assert np.allclose(prob.exact(c * X + s * Y, -s * X + c * Y), 0, atol=1e-12)


def test_heat_manufactured_source(rng):
    prob = named_problem("heat_disk")
    x, y = _inside(prob, rng)
    t = 0.3
    ut = (prob.exact(x, y, t + D) - prob.exact(x, y, t - D)) / (2 * D)
    assert np.allclose(ut - _div_beta_grad(prob, x, y, t), prob.source(x, y, t), atol=1e-5)


def test_wave_mode_solves_wave_equation(rng):
    prob = named_problem("wave_disk")
    x, y = _inside(prob, rng)
    t = 0.07
    d = 1e-3
    utt = (prob.exact(x, y, t + d) - 2 * prob.exact(x, y, t) + prob.exact(x, y, t - d)) / d**2
    lap = _div_beta_grad(prob, x, y, t)
    assert np.allclose(utt, lap, rtol=1e-3, atol=1e-3 * np.max(np.abs(lap)))


def test_hat_source_unit_mass():
    h = 0.01
    xs, ys = np.meshgrid(np.arange(-1, 1, h), np.arange(-1, 1, h), indexing="ij")
    f = hat_source(-0.375, 0.125, h)(xs, ys)
    assert h**2 * f.sum() == pytest.approx(1.0)


def test_norms_hand_values():
    assert norms_from_errors([3.0, 4.0], 1.0) == (5.0, 4.0)
    assert norms_from_errors([], 0.1) == (0.0, 0.0)


def test_exact_samples_zero_error():
    prob = named_problem("disk")
    sys = build_system(prob, 40)
    x, y = sys.points
    bc_exact = ProblemSpec("lin", Circle(radius=0.83), (-1, 1, -1, 1),
                           dirichlet=lambda x, y, t=0.0: 0 * x, exact=lambda x, y, t=0.0: 0 * x)
    sys0 = build_system(bc_exact, 40)
    assert error_norms(sys0, np.zeros(sys0.n), bc_exact.exact) == (0.0, 0.0)


def test_gradient_exact_on_linear_fields():
    lin = lambda x, y, t=0.0: 1 + 2 * x - 0.5 * y
    prob = ProblemSpec("lin", Circle(radius=0.83), (-1, 1, -1, 1), dirichlet=lin, exact=lin)
    sys = build_system(prob, 40)
    x, y = sys.points
    u = lin(x, y)
    grad = lambda x, y, t=0.0: (np.full_like(x, 2.0), np.full_like(x, -0.5))
    e2, einf = gradient_error(sys, u, grad)
    assert einf < 1e-11


def test_central_difference_exact_on_quadratics():
    q = lambda x, y, t=0.0: x * x
    prob = ProblemSpec("q", Circle(radius=0.83), (-1, 1, -1, 1), dirichlet=q, exact=q)
    sys = build_system(prob, 40)
    x, y = sys.points
    gx, _ = numerical_gradient(sys, q(x, y))
    cls = sys.ctx.cls
    i, j = cls.ij.T
    inner = (cls.tag[i + 1, j] == 2) & (cls.tag[i - 1, j] == 2)
    X = sys.ctx.grid.x_lo + sys.h * i
    assert np.allclose(gx[i[inner], j[inner]], 2 * X[inner], atol=1e-12)


def test_rates():
    assert np.allclose(convergence_rates([4.0, 1.0, 0.25])[1:], 2.0)
    assert np.allclose(observed_rates([0.3, 0.1], [9.0, 1.0])[1:], 2.0)


@given(st.lists(st.floats(1e-6, 1.0), min_size=2, max_size=6), st.floats(0.5, 3.0))
def test_observed_rates_power_law(hs, p):
    hs = sorted(set(hs), reverse=True)
    if len(hs) < 2 or min(np.diff(np.log(hs)) * -1) < 1e-3:
        return
    errs = [3.0 * h**p for h in hs]
    assert np.allclose(observed_rates(hs, errs)[1:], p, rtol=1e-8)


def test_box_integral():
    prob = ProblemSpec("one", Circle(radius=2.0), (-3, 3, -3, 3))
    sys = build_system(prob, 60)
    x, y = sys.points
    inside = (np.abs(x) <= 1 + 1e-12) & (np.abs(y) <= 0.5 + 1e-12)
    assert box_integral(sys, np.ones(sys.n)) == pytest.approx(sys.h**2 * inside.sum())
    assert box_integral(sys, np.ones(sys.n)) == pytest.approx(2.0, rel=0.2)


def test_run_convergence_rows():
    rows = run_convergence("disk", [20, 40])
    assert [r.N for r in rows] == [20, 40]
    assert math.isnan(rows[0].rate_l2) and rows[1].rate_l2 > 1.5
    assert all(r.certified == "certified" for r in rows)


def test_helmholtz_uses_minres():
    rep = solve_steady(named_problem("star", n=40), 40)
    assert rep.solver == "minres" and np.all(np.isfinite(rep.u))


# ---- configuration --------------------------------------------------------


def test_parse_list():
    assert parse_list("50, 100;200", int) == [50, 100, 200]
    with pytest.raises(ConfigError):
        parse_list("a,b", int)


def test_config_validate_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig(ns=[4]).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(cycle="F").validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(problem="nope").validate()
    with pytest.raises(ConfigError):
        ExperimentConfig().update(bogus=1)


def test_config_file_and_env(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[experiment]\nproblem = bone\nN = 30, 60\ncycle = v\n[time]\ntheta = 0.25\n")
    cfg = load_config(str(ini), env={"EBM_OUTPUT_DIR": "/tmp/x"})
    assert (cfg.problem, cfg.ns, cfg.cycle, cfg.theta, cfg.output_dir) == (
        "bone", [30, 60], "V", 0.25, "/tmp/x")
    bad = tmp_path / "bad.ini"
    bad.write_text("[mystery]\na = 1\n")
    with pytest.raises(ConfigError):
        load_config(str(bad))


# ---- command line ---------------------------------------------------------


def test_cli_unknown_subcommand():
    assert main(["frobnicate"]) == 2


def test_cli_bad_value(tmp_path):
    assert main(["poisson", "--N", "4", "--out", str(tmp_path)]) == 2
    assert main(["poisson", "--config", str(tmp_path / "missing.ini")]) == 2


def test_cli_poisson_csv_deterministic(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["poisson", "--problem", "disk", "--N", "20,40", "--out", str(d),
                     "--no-timings", "--seed", "7"]) == 0
        outs.append((d / "disk_mixed_W.csv").read_bytes())
    assert outs[0] == outs[1]
    header = outs[0].decode().splitlines()[0].split(",")
    assert tuple(header) == CSV_COLUMNS


def test_cli_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("EBM_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["spdcheck", "--N", "40"]) == 0
    assert (tmp_path / "env" / "spdcheck_tilted_square_N40.txt").exists()


def test_cli_spdcheck_dump(tmp_path):
    assert main(["spdcheck", "--N", "40", "--out", str(tmp_path), "--dump-mask",
                 "--export-matrix", "--require-certified"]) == 0
    mask = (tmp_path / "tilted_square_N40_mask.txt").read_text()
    assert set(mask) <= set("0BC\n") and "C" in mask


def test_cli_wave_unstable_exit(tmp_path):
    assert main(["wave", "--N", "30", "--cfl", "1.5", "--periods", "10", "--out", str(tmp_path)]) == 3


def test_cli_wave_stable(tmp_path):
    assert main(["wave", "--N", "30", "--periods", "1", "--out", str(tmp_path)]) == 0


def test_cli_qoi_and_eig(tmp_path):
    assert main(["qoi", "--N", "40", "--params", "0.8,1,1.25", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "qoi_ellipse_N40.csv").exists()
    assert main(["eig", "--N", "30", "--out", str(tmp_path)]) == 0


def test_cli_heat(tmp_path):
    assert main(["heat", "--N", "20", "--T", "0.1", "--out", str(tmp_path)]) == 0
