import numpy as np
import pytest

from compcap.series import PowerSeries, series_pow, series_powers


def test_series_pow():
    square = series_pow(PowerSeries.from_coeffs([0.4, 0.3], 3), 2, 3)
    np.testing.assert_allclose(square.coeffs, [0.16, 0.24, 0.09], atol=1e-15)


def test_series_pow_zero_exponent():
    assert series_pow(PowerSeries.from_coeffs([0.4, 0.3], 3), 0, 3).coeffs.tolist() == [1, 0, 0]


def test_series_pow_negative_exponent():
    with pytest.raises(ValueError) as err:
        series_pow(PowerSeries.identity(4), -1, 4)
    assert str(err.value) == "The exponent must be >= 0, got -1"


def test_monomial_power():
    power = series_pow(PowerSeries.from_coeffs([0, 0.5], 8), 5, 8)
    expected = np.zeros(8)
    expected[5] = 0.5**5
    np.testing.assert_allclose(power.coeffs, expected, atol=1e-16)


def test_division_by_one_minus_z():
    ones = PowerSeries.constant(1, 6) / PowerSeries.from_coeffs([1, -1], 6)
    np.testing.assert_allclose(ones.coeffs, np.ones(6), atol=1e-15)


def test_division_by_zero_constant_term():
    with pytest.raises(ZeroDivisionError):
        PowerSeries.constant(1, 4) / PowerSeries.identity(4)


def test_order_mismatch():
    with pytest.raises(ValueError) as err:
        PowerSeries.identity(4) + PowerSeries.identity(5)
    assert str(err.value) == "Order mismatch: 4 != 5"


def test_series_powers_columns_match_series_pow():
    series = PowerSeries.from_coeffs([0.2, 0.5, -0.1j, 0.05], 12)
    columns = series_powers(series, 12)
    for k in range(12):
        np.testing.assert_allclose(columns[:, k], series_pow(series, k, 12).coeffs, atol=1e-15)


def test_evaluation_matches_pointwise_power():
    series = PowerSeries.from_coeffs([0.4, 0.3], 32)
    z = np.array([0.1, -0.5j, 0.3 + 0.2j])
    np.testing.assert_allclose((series**7)(z), (0.4 + 0.3 * z) ** 7, rtol=1e-13)


def test_coefficients_are_read_only():
    series = PowerSeries.identity(4)
    with pytest.raises(ValueError):
        series.coeffs[0] = 1.0
