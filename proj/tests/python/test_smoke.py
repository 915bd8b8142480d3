import math
import os
from pathlib import Path

import numpy as np
import pytest

import invobs

SCENARIOS = Path(os.environ.get("INVOBS_SCENARIOS", Path(__file__).resolve().parents[2] / "scenarios"))


def test_exp_log_round_trip():
    xi = np.array([0.3, -0.2, 0.5])
    for group in ("SO3", "SE2"):
        g = invobs.GroupElement.exp(group, xi)
        assert np.allclose(g.log(), xi, atol=1e-12)
        assert (g * g.inverse()).distance(invobs.GroupElement.identity(group)) < 1e-14


def test_quarter_turn_matrix():
    r = invobs.GroupElement.exp("SO3", np.array([0.0, 0.0, math.pi / 2]))
    assert np.allclose(r.matrix() @ [1, 0, 0], [0, 1, 0], atol=1e-15)
    assert r.group == "SO3"


def test_cut_locus_raises():
    r = invobs.GroupElement.exp("SO3", np.array([math.pi, 0.0, 0.0]))
    with pytest.raises(invobs.AtCutLocus):
        r.log()


def test_bracket_is_cross_product_on_so3():
    a, b = np.array([1.0, 2.0, 3.0]), np.array([-1.0, 0.5, 2.0])
    assert np.allclose(invobs.bracket("SO3", a, b), np.cross(a, b))


def test_linearize_and_place_poles():
    a, c = invobs.linearize("car", np.array([1.0, 0.5]))
    assert invobs.observability_rank(a, c) == 3
    gain = invobs.design_gain_pole(a, c, [-1, -2, -3])
    eig = np.sort(np.linalg.eigvals(a + gain @ c).real)
    assert np.allclose(eig, [-3, -2, -1], atol=1e-8)


def test_attitude_linearization():
    a, c = invobs.linearize("attitude")
    assert not a.any()
    gain = invobs.design_gain_adjoint("attitude", np.array([2.0]))
    assert np.all(np.linalg.eigvalsh(gain @ c) < 0)


def test_magnetometer_only_is_not_observable():
    a, c = invobs.linearize("attitude-mag")
    assert invobs.observability_rank(a, c) == 2
    with pytest.raises(invobs.NotObservable):
        invobs.design_gain_pole(a, c, [-1, -2, -3])


def test_check_equivariance():
    assert all(ok for _, _, ok in invobs.check_equivariance("car", samples=50))
    assert not all(ok for _, _, ok in invobs.check_equivariance("broken-car", samples=50))


def test_run_scenario_file():
    result = invobs.run_scenario_file(str(SCENARIOS / "car_circle.yaml"))
    data, cols = result["data"], result["columns"]
    assert data.shape[1] == len(cols)
    assert cols[0] == "t"
    assert result["summary"]["permanent"]
    assert abs(result["summary"]["decay_rate"] - 1.0) < 0.2


def test_scenario_errors_map_to_exceptions():
    with pytest.raises(invobs.ParseError):
        invobs.run_scenario_text("system: car\nbogus: 1\n")
    with pytest.raises(invobs.ValidationError):
        invobs.run_scenario_text("system: car\nduration: 1\ndt: 0.1\ninput:\n  value: [1, 0, 0]\n")
