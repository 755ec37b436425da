import math

import numpy as np
import pytest

from relaxcycle.errors import DomainError, RhsDomainError, StepBudgetError, StepUnderflowError, ValidationError
from relaxcycle.integrator import IntegratorSettings, Trajectory, integrate, sample_at


def harmonic(t, y):
    return (y[1], -y[0])


def growth(t, y):
    return (y[0], 0.0)


def test_zero_field_is_constant():
    tr = integrate(lambda t, y: (0.0, 0.0), (1.0, 2.0), (0.0, 10.0))
    assert np.all(tr.states == [1.0, 2.0])
    assert tr.times[0] == 0.0 and tr.times[-1] == 10.0


def test_harmonic_oscillator_period():
    tr = integrate(harmonic, (1.0, 0.0), (0.0, 2 * math.pi))
    assert math.hypot(tr.final[0] - 1.0, tr.final[1]) < 1e-6


def test_exponential_growth():
    tr = integrate(growth, (1.0, 0.0), (0.0, 1.0))
    assert abs(tr.final[0] - math.e) < 1e-8


def test_endpoints_and_monotone_times():
    tr = integrate(harmonic, (1.0, 0.0), (0.5, 3.0))
    assert tr.t0 == 0.5 and tr.t1 == 3.0
    assert np.all(np.diff(tr.times) > 0)
    assert len(tr.times) == len(tr.states) == tr.accepted + 1


def test_sample_at_nodes_is_exact():
    tr = integrate(harmonic, (1.0, 0.0), (0.0, 3.0))
    assert np.array_equal(sample_at(tr, tr.times[::3]), tr.states[::3])


def test_sample_constant_trajectory():
    tr = integrate(lambda t, y: (0.0, 0.0), (1.0, 2.0), (0.0, 10.0))
    assert np.allclose(sample_at(tr, [0.3, 4.7, 9.99]), [[1.0, 2.0]] * 3, atol=0, rtol=0)


def test_sample_harmonic_quarter_period():
    tr = integrate(harmonic, (1.0, 0.0), (0.0, 2 * math.pi))
    y = sample_at(tr, [math.pi / 2])[0]
    assert np.hypot(y[0], y[1] + 1.0) < 1e-5


def test_sample_out_of_range():
    tr = integrate(harmonic, (1.0, 0.0), (0.0, 1.0))
    with pytest.raises(ValidationError):
        sample_at(tr, [1.5])


def fixed_step_errors(halvings=4, n0=8):
    hs, errs = [], []
    for i in range(halvings + 1):
        h = 2 * math.pi / (n0 * 2**i)
        tr = integrate(harmonic, (1.0, 0.0), (0.0, 2 * math.pi), IntegratorSettings(fixed_step=h, h_init=h))
        hs.append(h)
        errs.append(math.hypot(tr.final[0] - 1.0, tr.final[1]))
    return hs, errs


def test_fifth_order_convergence():
    hs, errs = fixed_step_errors()
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert 4.5 <= slope <= 5.5


def test_determinism():
    a = integrate(harmonic, (1.0, 0.0), (0.0, 7.0))
    b = integrate(harmonic, (1.0, 0.0), (0.0, 7.0))
    assert a.times.tobytes() == b.times.tobytes()
    assert a.states.tobytes() == b.states.tobytes()


@pytest.mark.parametrize("problem", ["harmonic", "growth"])
def test_tightening_tolerance_never_hurts(problem):
    rhs, y0, span, exact = {
        "harmonic": (harmonic, (1.0, 0.0), (0.0, 2 * math.pi), (1.0, 0.0)),
        "growth": (growth, (1.0, 0.0), (0.0, 1.0), (math.e, 0.0)),
    }[problem]
    prev = math.inf
    for rtol in (1e-4, 1e-6, 1e-8, 1e-10):
        tr = integrate(rhs, y0, span, IntegratorSettings(rel_tol=rtol, abs_tol=rtol * 1e-2))
        err = math.hypot(tr.final[0] - exact[0], tr.final[1] - exact[1])
        assert err <= prev
        prev = err


def test_budget_error_carries_partial():
    with pytest.raises(StepBudgetError) as info:
        integrate(harmonic, (1.0, 0.0), (0.0, 100.0), IntegratorSettings(max_steps=5))
    exc = info.value
    assert exc.partial is not None and len(exc.partial.times) == 6
    assert exc.t_fail == exc.partial.t1


def test_step_underflow():
    # blow-up y' = y^2 from y=1 at t=1
    with pytest.raises(StepUnderflowError) as info:
        integrate(lambda t, y: (y[0] ** 2, 0.0), (1.0, 0.0), (0.0, 2.0), IntegratorSettings(h_min=1e-6))
    assert 0.9 < info.value.t_fail < 1.0


def test_domain_error_reported_with_time():
    def field(t, y):
        if y[0] <= 0:
            raise DomainError("s <= 0")
        return (-1.0, 0.0)

    with pytest.raises(RhsDomainError) as info:
        integrate(field, (1.0, 0.0), (0.0, 5.0))
    assert info.value.t_fail == pytest.approx(1.0, abs=1e-6)
    assert info.value.partial.t1 <= 1.0


@pytest.mark.parametrize("kw", [dict(rel_tol=0), dict(h_min=1.0, h_init=0.1), dict(h_init=2.0, h_max=1.0),
                                dict(max_steps=0), dict(fixed_step=-1.0)])
def test_settings_validation(kw):
    with pytest.raises(ValidationError):
        IntegratorSettings(**kw)


def test_state_must_be_planar():
    with pytest.raises(ValidationError, match="2-vector"):
        integrate(harmonic, (1.0,), (0.0, 1.0))


def test_span_validation():
    with pytest.raises(ValidationError):
        integrate(harmonic, (1.0, 0.0), (1.0, 1.0))
    with pytest.raises(ValidationError):
        integrate(harmonic, (math.nan, 0.0), (0.0, 1.0))


def test_concat_joins_parts():
    a = integrate(harmonic, (1.0, 0.0), (0.0, 1.0))
    b = integrate(harmonic, a.final, (1.0, 2.0))
    joined = Trajectory.concat([a, b])
    assert len(joined.times) == len(a.times) + len(b.times) - 1
    assert joined.accepted == a.accepted + b.accepted
