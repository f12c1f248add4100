import math

import numpy as np
import pytest

from compcap.weights import WeightError, WeightSpec, check_siz_bounds, coef_weights


def test_alpha_weights():
    assert coef_weights(WeightSpec.Alpha(1), 3).values.tolist() == pytest.approx([1.0, 0.5, 2 / 3, 0.75], rel=1e-14)
    assert coef_weights(WeightSpec.Alpha(0), 5)[5] == pytest.approx(5.0, rel=1e-14)


def test_alpha_two_closed_form():
    weights = coef_weights(WeightSpec.Alpha(2), 50)
    n = np.arange(1, 51)
    np.testing.assert_allclose(weights.values[1:], 2 * n / ((n + 1) * (n + 2)), rtol=1e-13)


def test_classical_weights():
    assert coef_weights(WeightSpec.parse("hardy"), 4).values.tolist() == [1.0] * 5
    assert coef_weights(WeightSpec.parse("bergman"), 3).values.tolist() == pytest.approx([1, 1 / 2, 1 / 3, 1 / 4])
    assert coef_weights(WeightSpec.parse("dirichlet"), 3).values.tolist() == [1.0, 1.0, 2.0, 3.0]


def test_large_n_does_not_overflow():
    weights = coef_weights(WeightSpec.Alpha(5), 4096)
    assert np.all(np.isfinite(weights.values))
    assert weights[4096] > 0


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_alpha_ratio_converges(alpha):
    weights = coef_weights(WeightSpec.Alpha(alpha), 400)
    ratio = [weights[n] / n ** (1 - alpha) for n in (200, 400)]
    assert ratio[0] == pytest.approx(ratio[1], rel=0.05)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0])
def test_quadrature_agrees_with_closed_form(alpha):
    radial = coef_weights(WeightSpec.CustomRadial(lambda r: (1 - r * r) ** alpha, label=f"alpha{alpha}"), 200)
    closed = coef_weights(WeightSpec.Alpha(alpha), 200)
    np.testing.assert_allclose(radial.values, closed.values, rtol=1e-10)


def test_parse():
    assert WeightSpec.parse("alpha(1.5)") == WeightSpec.Alpha(1.5)
    assert WeightSpec.parse(" Hardy ") == WeightSpec.ClassicalSequence("hardy")
    assert str(WeightSpec.parse("alpha(1)")) == "alpha(1)"


def test_parse_error():
    with pytest.raises(WeightError) as err:
        WeightSpec.parse("sobolev")
    assert str(err.value) == "Cannot parse weight spec 'sobolev'"


def test_alpha_must_exceed_minus_one():
    with pytest.raises(WeightError) as err:
        WeightSpec.Alpha(-1)
    assert str(err.value) == "alpha must be > -1, got -1.0"


def test_custom_radial_must_be_positive():
    with pytest.raises(WeightError) as err:
        WeightSpec.CustomRadial(lambda r: r - 0.5)
    assert str(err.value) == "omega must be strictly positive and finite on [0, 1)"


def test_n_max_must_be_positive():
    with pytest.raises(WeightError) as err:
        coef_weights(WeightSpec.Alpha(1), 0)
    assert str(err.value) == "n_max must be >= 1, got 0"


def test_weights_are_read_only():
    weights = coef_weights(WeightSpec.Alpha(1), 8)
    with pytest.raises(ValueError):
        weights.values[0] = 2.0


def test_extended():
    weights = coef_weights(WeightSpec.Alpha(1), 16)
    assert weights.extended(8) is weights
    longer = weights.extended(32)
    assert longer.n_max == 32
    np.testing.assert_allclose(longer.values[:17], weights.values, rtol=1e-15)


def test_to_csv():
    weights = coef_weights(WeightSpec.Alpha(1), 2)
    lines = weights.to_csv().splitlines()
    assert lines == ["n,w_n", "0,1.0", f"1,{float(weights[1])!r}", f"2,{float(weights[2])!r}"]


@pytest.mark.parametrize("spec", ["hardy", "bergman", "alpha(0)", "alpha(2)"])
def test_siz_bounds(spec):
    delta, constant, ok = check_siz_bounds(coef_weights(WeightSpec.parse(spec), 500), 0.1)
    assert ok
    assert delta > 0
    assert constant <= 1.0 + 1e-12


def test_siz_bounds_dirichlet_constant():
    _, constant, _ = check_siz_bounds(coef_weights(WeightSpec.parse("dirichlet"), 100), 0.1)
    assert constant == pytest.approx(1.0)
    assert math.isfinite(constant)
