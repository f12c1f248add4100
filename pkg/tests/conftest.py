import dataclasses

import pytest

from compcap import Config
from compcap.operator import compute_beta
from compcap.symbols import Symbol
from compcap.weights import WeightSpec, coef_weights

WEIGHT_NAMES = ["hardy", "alpha(0)", "alpha(1)", "alpha(2)"]


@pytest.fixture(autouse=True)
def reset_config():
    """setup and teardown for tests"""
    yield
    for attr in list(vars(Config)):
        if attr != "_value":
            delattr(Config, attr)
    Config.create_config("artifacts", spectrum=False, grid=False)


@pytest.fixture
def hardy():
    return coef_weights(WeightSpec.parse("hardy"), 256)


@pytest.fixture
def weights_for():
    """returns a factory of coefficient weights by spec text"""

    def factory(text: str, n_max: int = 256):
        return coef_weights(WeightSpec.parse(text), n_max)

    return factory


@pytest.fixture
def affine():
    """the affine map 0.3 z + 0.4, whose image is the disk D(0.4, 0.3)"""
    return Symbol.parse("affine(0.3,0.4)")


@pytest.fixture
def auto_dil():
    """the automorphism at 0.5 after the dilation by 0.5, whose image is the disk D(0.4, 0.4)"""
    return Symbol.parse("auto(0.5)*dil(0.5)")


@pytest.fixture
def suite_file(tmp_path):
    """writes a suite file and returns its path"""

    def writer(content: str):
        path = tmp_path / "suite.yml"
        path.write_text(content)
        return path

    return writer


@pytest.fixture
def shift_beta(mocker):
    """scales every beta the harness computes by a factor"""

    def patcher(factor: float):
        def shifted(*args, **kwargs):
            estimate, spectrum = compute_beta(*args, **kwargs)
            return dataclasses.replace(estimate, beta=estimate.beta * factor), spectrum

        return mocker.patch("compcap.harness.compute_beta", side_effect=shifted)

    return patcher
