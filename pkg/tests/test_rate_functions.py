import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tailcert.errors import SymbolicConstantsError, TailcertError
from tailcert.ratefn import (
    ArgPowerRate,
    InversePowerRate,
    LinearCappedRate,
    LinearRate,
    LogRate,
    MinRate,
    NegLogRate,
    PowerRate,
    RescaledRate,
    ShiftedRate,
    SymbolicConst,
    check_lower_rate_function,
    check_rate_function,
    lower_rate_function_from_obj,
    rate_function_from_obj,
)

FORMS = [
    (LogRate(), math.e),
    (LinearRate(0.7), 0.5),
    (PowerRate(0.5, 2.0), 1.0),
    (LinearCappedRate(1.3), 0.25),
    (ShiftedRate(LogRate(), 2.0), math.e ** 3),
    (MinRate(LinearRate(1.0), PowerRate(1.0, 2.0)), 0.5),
    (RescaledRate(PowerRate(0.5, 2.0), 2.0), 2.0),
    (ArgPowerRate(LogRate(), 0.5), math.e ** 2),
]


def test_point_values():
    assert LogRate().evaluate(math.e) == pytest.approx(1.0)
    assert LinearRate(0.7).evaluate(3.0) == pytest.approx(2.1)
    assert PowerRate(0.5, 2.0).evaluate(3.0) == pytest.approx(4.5)
    assert LinearCappedRate(2.0).evaluate(0.5) == pytest.approx(0.5)  # t^2 wins
    assert LinearCappedRate(2.0).evaluate(3.0) == pytest.approx(6.0)  # t wins
    assert ShiftedRate(LogRate(), 2.0).evaluate(math.e ** 3) == pytest.approx(1.0)
    assert MinRate(LinearRate(1.0), PowerRate(1.0, 2.0)).evaluate(4.0) == 4.0
    assert RescaledRate(LogRate(), 2.0).evaluate(2 * math.e) == pytest.approx(1.0)
    # argument power 1/2 realizes f(sqrt t)
    assert ArgPowerRate(LogRate(), 0.5).evaluate(9.0) == pytest.approx(
        0.5 * math.log(9.0))


@pytest.mark.parametrize("f,c2", FORMS)
def test_domain_invariants_on_geometric_grid(f, c2):
    check_rate_function(f, c2)


@pytest.mark.parametrize("f,c2", FORMS)
def test_vectorized_matches_scalar(f, c2):
    grid = np.geomspace(c2, c2 * 100, 17)
    vec = np.asarray(f.evaluate(grid))
    for t, v in zip(grid, vec):
        assert float(f.evaluate(float(t))) == pytest.approx(v)


@pytest.mark.parametrize("f,c2", FORMS)
def test_serialization_round_trip(f, c2):
    back = rate_function_from_obj(f.to_obj())
    grid = np.geomspace(c2, c2 * 10, 7)
    assert np.allclose(back.evaluate(grid), f.evaluate(grid))


def test_threshold_above_is_inverse():
    f = LogRate()
    t = f.threshold_above(3.0, t_start=math.e)
    assert t == pytest.approx(math.e ** 3, rel=1e-9)
    g = PowerRate(0.5, 2.0)
    t = g.threshold_above(8.0, t_start=1.0)
    assert t == pytest.approx(4.0, rel=1e-9)
    # already above the level: returns the start
    assert f.threshold_above(0.5, t_start=math.e) == math.e


@settings(max_examples=60)
@given(st.floats(0.1, 3.0), st.floats(0.5, 2.5), st.floats(1.0, 50.0))
def test_power_rate_monotone(c, gamma, scale):
    f = PowerRate(c, gamma)
    grid = np.geomspace(0.5, 0.5 * (1 + scale), 100)
    vals = np.asarray(f.evaluate(grid))
    assert np.all(np.diff(vals) >= -1e-12)


def test_symbolic_constant_requires_binding():
    f = LinearRate(SymbolicConst("c0"))
    with pytest.raises(SymbolicConstantsError):
        f.evaluate(2.0)
    assert f.evaluate(2.0, {"c0": 0.5}) == pytest.approx(1.0)
    assert f.symbols() == frozenset({"c0"})
    concrete = f.substitute({"c0": 0.5})
    assert concrete.symbols() == frozenset()
    assert concrete.evaluate(2.0) == pytest.approx(1.0)


def test_symbolic_round_trip():
    f = MinRate(LinearRate(SymbolicConst("a")), PowerRate(0.3, 2.0))
    back = rate_function_from_obj(f.to_obj())
    assert back.symbols() == frozenset({"a"})
    assert back.substitute({"a": 1.0}).evaluate(2.0) == pytest.approx(
        min(2.0, 0.3 * 4.0))


def test_lower_rate_functions():
    g = NegLogRate()
    assert g.evaluate(math.exp(-2.0)) == pytest.approx(2.0)
    check_lower_rate_function(g, 0.5)
    h = InversePowerRate(2.0, 1.0)
    assert h.evaluate(0.5) == pytest.approx(4.0)
    check_lower_rate_function(h, 1.0)
    back = lower_rate_function_from_obj(h.to_obj())
    assert back.evaluate(0.25) == pytest.approx(8.0)


def test_lower_rate_rejects_increasing():
    class Bad(NegLogRate):
        def evaluate(self, t):
            return np.asarray(t) + 1.0

    with pytest.raises(TailcertError):
        check_lower_rate_function(Bad(), 0.5)
