import numpy as np
import pytest
from loguru import logger

from spectral.operators import assemble
from spectral.regions import RegionSpec
from spectral.symbols import PeriodicFunction, Symbol1D, exp_ix


@pytest.fixture
def g_exp():
    """g(x) = e^{ix}"""
    return PeriodicFunction.from_callable(lambda x: np.exp(1j * x), K=4)


@pytest.fixture
def exp_symbol():
    return exp_ix()


@pytest.fixture
def ladder_operator():
    """hD + 0.5 e^{ix} at h = 0.5, K = 8: lower bidiagonal with eigenvalues 0.5 k"""
    return assemble(exp_ix(amplitude=0.5), 0.5, 8)


@pytest.fixture
def weyl_region():
    return RegionSpec.rectangle(-1.0, 1.0, -0.5, 0.5)


@pytest.fixture
def unit_square():
    return RegionSpec.rectangle(0.0, 1.0, 0.0, 1.0)


@pytest.fixture
def first_order_operator(g_exp):
    def build(h, K):
        return assemble(Symbol1D.first_order(g_exp), h, K)
    return build


@pytest.fixture
def isolated_env(monkeypatch, tmp_path):
    """Keep env-driven defaults out of the tests"""
    monkeypatch.delenv("SPECLAB_WORKERS", raising=False)
    monkeypatch.delenv("SPECLAB_LOG_LEVEL", raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def warning_messages():
    """Loguru warnings emitted during the test, as plain strings"""
    messages = []
    handler = logger.add(lambda m: messages.append(m.record["message"]), level="WARNING")
    yield messages
    logger.remove(handler)
