import math

import pytest

from twohop import NetworkParams, ParameterError, throughput_capacity
from twohop.harness import (
    CSV_HEADER,
    ComparisonRow,
    SweepSpec,
    confidence_interval,
    render_csv,
    sweep,
)
from twohop.sim import SimConfig

PARAMS = NetworkParams(n=10, m=2, nu=1, delta=1.0, B=2)


def small_spec(seed=5, rho_grid=(0.3, 0.8, 1.2), outputs=("rbp", "delay")):
    return SweepSpec(
        params=PARAMS,
        rho_grid=rho_grid,
        sim=SimConfig(params=PARAMS, seed=seed, warmup_slots=500,
                      measure_slots=10_000, replications=3),
        outputs=outputs,
    )


def test_confidence_interval_examples():
    mean, hw = confidence_interval([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert hw == pytest.approx(1.96 / math.sqrt(3), rel=1e-12)
    mean, hw = confidence_interval([4.4, 4.4, 4.4, 4.4])
    assert (mean, hw) == (4.4, 0.0)
    mean, hw = confidence_interval([7.25])
    assert mean == 7.25 and math.isnan(hw)


def test_sweep_rows_and_columns():
    rows = sweep(small_spec())
    lam0 = throughput_capacity(PARAMS)
    assert [r.rho for r in rows] == [0.3, 0.8, 1.2]
    for r in rows:
        assert r.lam == pytest.approx(r.rho * lam0, rel=1e-12)
        assert r.pb_ci >= 0.0
        assert r.report.generated_count == (
            r.report.delivered_count + r.report.in_flight_count
        )
    stable, unstable = rows[0], rows[2]
    assert stable.stable and not unstable.stable
    assert math.isinf(unstable.W_theory) and math.isinf(unstable.D_sim)
    assert math.isfinite(stable.D_sim)
    assert stable.D_sim == pytest.approx(stable.W_sim + stable.T_sim, rel=1e-12)
    assert "pb" in stable.errors and len(stable.errors["pb"]) == 2


def test_theory_columns_do_not_depend_on_seed():
    rows_a = sweep(small_spec(seed=1))
    rows_b = sweep(small_spec(seed=999))
    for a, b in zip(rows_a, rows_b):
        assert (a.pb_theory, a.W_theory, a.T_theory, a.D_theory) == (
            b.pb_theory, b.W_theory, b.T_theory, b.D_theory,
        )
    assert rows_a[0].pb_sim != rows_b[0].pb_sim


def test_rbp_only_sweep_skips_delay_columns():
    rows = sweep(small_spec(rho_grid=(0.4,), outputs=("rbp",)))
    r = rows[0]
    assert math.isfinite(r.pb_sim)
    assert math.isnan(r.W_sim) and math.isnan(r.D_sim)
    assert math.isfinite(r.W_theory)


def test_csv_shape_and_determinism():
    text_a = render_csv(sweep(small_spec()))
    text_b = render_csv(sweep(small_spec()))
    assert text_a == text_b
    lines = text_a.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 4
    unstable_cells = lines[3].split(",")
    assert unstable_cells[-1] == "0"
    assert unstable_cells[5] == "inf"  # W_theory column
    for line in lines[1:]:
        assert len(line.split(",")) == len(CSV_HEADER.split(","))


def test_sweep_parallel_matches_serial():
    assert render_csv(sweep(small_spec())) == render_csv(sweep(small_spec(), workers=2))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(rho_grid=()),
        dict(rho_grid=(0.5, 0.5)),
        dict(rho_grid=(0.8, 0.4)),
        dict(rho_grid=(-0.1, 0.4)),
        dict(outputs=("rbp", "latency")),
    ],
)
def test_spec_validation(kwargs):
    base = dict(
        params=PARAMS,
        rho_grid=(0.3, 0.6),
        sim=SimConfig(params=PARAMS, seed=0, warmup_slots=10, measure_slots=100),
    )
    base.update(kwargs)
    with pytest.raises(ParameterError):
        SweepSpec(**base)
