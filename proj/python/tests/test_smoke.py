import math

import numpy as np
import pytest

import trpinn


def test_seminorm_hand_cases():
    assert trpinn.discrete_seminorm([1, 0, 0, 0]) == 4.0
    assert trpinn.discrete_seminorm([1, -1, 1, -1]) == 16.0
    assert trpinn.discrete_seminorm([2.5] * 7) == 0.0
    with pytest.raises(trpinn.ConfigError):
        trpinn.discrete_seminorm([1.0, 2.0])


def test_oracle_matches_closed_form():
    s = trpinn.fit_fourier("sin", 3, 256, 64)
    r, t = 0.7, 1.1
    u, ux, uy = s(r * math.cos(t), r * math.sin(t))
    assert abs(u - r**3 * math.sin(3 * t)) < 1e-12
    assert s.modes == 64
    assert abs(s.coefficient(3) - (-0.5j)) < 1e-12
    with pytest.raises(trpinn.DomainError):
        s(1.0, 0.5)


def test_m_spectrum_against_numpy():
    n = 31
    m = trpinn.build_m(n)
    want = np.sort(np.linalg.eigvalsh(m))
    got, vecs = trpinn.jacobi_eigen(m)
    assert np.allclose(got, want, atol=1e-11)
    assert np.allclose(np.sort(trpinn.m_eigenvalues(n)), want, atol=1e-11)
    assert got[0] == pytest.approx(2.0 / n)


def test_spectrum_dominance_on_network_kernel():
    net = trpinn.Mlp([2, 16, 16, 1], 4)
    angles = np.linspace(0, 2 * np.pi, 40, endpoint=False)
    jb = net.boundary_jacobian(list(angles))
    assert jb.shape == (40, net.parameter_count)
    lp, lh = trpinn.spectrum_compare(jb @ jb.T, 40)
    assert np.all(lh >= lp - 1e-10 * lh[0])


def test_midpoint_quadrature_of_sqrt_profile():
    m = 1024
    h = 2 * np.pi / m
    t = -np.pi + (np.arange(m) + 0.5) * h
    v = trpinn.seminorm_midpoint(list(np.sqrt(np.abs(t))), -np.pi, np.pi, periodic=False)
    exact = trpinn.sqrt_profile_seminorm_exact()
    assert abs(v - exact) / exact < 0.02


def test_config_errors_name_the_key():
    with pytest.raises(trpinn.ConfigError, match="model.units"):
        trpinn.parse_config("model.units = 0\n")
    assert "weights.gamma = 50" in trpinn.parse_config("")


def test_tiny_training_run(tmp_path):
    cfg = "\n".join([
        "problem.V = 2", "problem.fourier_samples = 256", "problem.fourier_modes = 64",
        "model.units = 8", "model.hidden_layers = 2", "sampling.interior_n = 100",
        "sampling.boundary_n = 24", "adam.iterations = 30", "lbfgs.max_iterations = 5",
        "metrics.cadence = 10", "eval.radial = 16", "eval.angular = 32", "eval.boundary = 128",
        "ntk.top_k = 8", "output.svg = false",
    ])
    summary = trpinn.train(cfg, tmp_path / "run")
    assert summary["best"]["rel_h1_in"] <= summary["final"]["rel_h1_in"]
    lines = (tmp_path / "run" / "metrics.csv").read_text().splitlines()
    assert lines[0] == "# schema: trpinn.metrics/1"
    net = trpinn.Mlp.load(tmp_path / "run" / "checkpoint.bin")
    assert net.layer_sizes == [2, 8, 8, 1]
    assert math.isfinite(net(0.1, 0.2))
