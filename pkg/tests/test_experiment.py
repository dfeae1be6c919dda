import io
import math

import numpy as np
import pytest

from powerfrontier.errors import DegenerateBandwidthError, DomainError
from powerfrontier.estimators import PointEstimate, Sample
from powerfrontier.experiment import (
    REPORT_COLUMNS,
    TRACE_COLUMNS,
    CellError,
    Estimator,
    ExperimentConfig,
    audit_power_root_inequalities,
    coverage_study,
    default_grid,
    fit_on_grid,
    l1_error,
    l1_error_values,
    local_power_root,
    rate_bandwidth,
    rate_power,
    read_report_csv,
    replication_errors,
    rule_bandwidth,
    rule_power,
    run_cell,
    run_experiment,
)
from powerfrontier.simulation import Covariate, FrontierModel, generate_sample

SMALL = dict(n_values=(100, 150), gamma_values=(1.0, 2.0), m=3, grid_size=51)


def test_rule_bandwidth_example():
    # sd = 0.25 exactly: 400 points split evenly between 0.25 -/+ c
    c = 0.25 * math.sqrt(399 / 400)
    x = np.r_[np.full(200, 0.5 - c), np.full(200, 0.5 + c)]
    assert rule_bandwidth(Sample(x, np.ones(400))) == pytest.approx(0.05, rel=1e-12)


def test_rule_bandwidth_uniform_scale():
    n = 100_000
    s = generate_sample(FrontierModel(covariate="uniform", seed=2), n)
    assert rule_bandwidth(s) * math.sqrt(n) == pytest.approx(4 / math.sqrt(12), rel=0.01)


def test_rule_bandwidth_degenerate():
    with pytest.raises(DegenerateBandwidthError):
        rule_bandwidth(Sample(np.full(10, 0.3), np.ones(10)))
    with pytest.raises(DomainError):
        rule_bandwidth(Sample([0.3], [1.0]))


@pytest.mark.parametrize("n, p", [(200, 14.142135623730951), (1000, 31.622776601683793), (1, 1.0)])
def test_rule_power(n, p):
    assert rule_power(n) == p


def test_rate_rules():
    assert rate_bandwidth(1000) == pytest.approx(1000 ** -0.5)
    assert rate_bandwidth(1000, d=2, alpha=0.5) == pytest.approx(1000 ** (-1 / 2.5))
    assert rate_power(1000) == pytest.approx(1000 ** 0.5, rel=1e-12)
    with pytest.raises(DomainError):
        rate_bandwidth(10, alpha=1.5)


def test_l1_error_examples():
    grid = default_grid(201)
    assert l1_error(lambda x: 0.5, lambda x: 0.5, grid).error == 0.0
    assert l1_error(lambda x: 0.6, lambda x: 0.5, grid).error == pytest.approx(0.1)
    assert l1_error(lambda x: x + 0.1, lambda x: x, grid).error == pytest.approx(0.1)


def test_l1_error_undefined_points_are_excluded():
    grid = default_grid(11)

    def est(x):
        return PointEstimate(9.0, 0, False) if x > 0.5 else PointEstimate(x + 0.2, 3, True)

    res = l1_error(est, lambda x: x, grid)
    assert res.valid and res.error == pytest.approx(0.2)
    assert res.undefined_fraction == pytest.approx(5 / 11)
    none = l1_error(lambda x: PointEstimate(math.nan, 0, False), lambda x: x, grid)
    assert not none.valid and none.undefined_fraction == 1.0 and math.isnan(none.error)


def test_l1_error_values_rejects_bad_grid():
    with pytest.raises(DomainError):
        l1_error_values([1.0], [True], [1.0], [0.0])
    with pytest.raises(DomainError):
        l1_error_values([1.0, 1.0], [True, True], [1.0, 1.0], [0.5, 0.1])


def test_config_validation():
    with pytest.raises(DomainError):
        ExperimentConfig(m=0)
    with pytest.raises(DomainError):
        ExperimentConfig(estimators=("bogus",))
    with pytest.raises(DomainError):
        ExperimentConfig(frontier="g9")
    with pytest.raises(DomainError):
        ExperimentConfig(gamma_values=(0.0,))


def test_default_cell_count():
    assert len(list(ExperimentConfig().cells())) == 36
    four = ExperimentConfig(estimators=tuple(Estimator)[:4])
    assert len(list(four.cells())) == 48


@pytest.mark.parametrize("est", [Estimator.POWER_KERNEL, Estimator.POWER_KERNEL_P1, Estimator.GEFFROY,
                                 Estimator.CORRECTED_GAMMA])
def test_single_replication_cell(est):
    cfg = ExperimentConfig(n_values=(120,), gamma_values=(2.0,), m=1, estimators=(est,))
    c = run_cell(cfg, est, 120, 2.0)
    assert c.mean_l1 == c.min_l1 == c.max_l1
    assert len(c.errors) == 1


def test_doubling_m_extends_the_trace():
    base = ExperimentConfig(**SMALL)
    a = run_cell(base, Estimator.POWER_KERNEL, 100, 2.0)
    b = run_cell(ExperimentConfig(**{**SMALL, "m": 6}), Estimator.POWER_KERNEL, 100, 2.0)
    assert b.errors[:3] == a.errors


def test_cells_are_independent_of_the_rest_of_the_design():
    full = run_experiment(ExperimentConfig(**SMALL))
    alone = run_cell(ExperimentConfig(**{**SMALL, "n_values": (150,), "gamma_values": (2.0,)}),
                     Estimator.GEFFROY, 150, 2.0)
    assert full.get("geffroy", 150, 2.0) == alone


def test_report_invariants_and_csv():
    report = run_experiment(ExperimentConfig(**SMALL))
    assert len(report.cells) == 12 and not report.failures
    for c in report.cells.values():
        assert c.min_l1 <= c.mean_l1 <= c.max_l1
        assert 0 <= c.undefined_fraction <= 1 and c.min_l1 >= 0
    text = report.to_csv()
    assert text.splitlines()[0] == ",".join(REPORT_COLUMNS)
    assert report.trace_to_csv().splitlines()[0] == ",".join(TRACE_COLUMNS)
    assert len(report.trace_to_csv().splitlines()) == 1 + 12 * 3
    back = read_report_csv(io.StringIO(text))
    for key, c in report.cells.items():
        assert back[key].mean_l1 == c.mean_l1
    table = report.format_table()
    assert "gamma = 1" in table and "power_kernel" in table


def test_report_is_deterministic_across_workers():
    cfg = ExperimentConfig(**SMALL)
    assert run_experiment(cfg).to_csv() == run_experiment(cfg, workers=2).to_csv()


def test_reserved_estimator_fails_its_cell_only():
    cfg = ExperimentConfig(**{**SMALL, "estimators": ("power_kernel", "kernel_geffroy")})
    report = run_experiment(cfg)
    assert len(report.cells) == 4 and len(report.failures) == 4
    assert "failed kernel_geffroy" in report.format_table()
    with pytest.raises(CellError):
        run_cell(cfg, "kernel_geffroy", 100, 1.0)


def test_geffroy_is_defined_everywhere():
    s = generate_sample(FrontierModel(covariate="beta22", seed=4), 200)
    values, defined = fit_on_grid(Estimator.GEFFROY, s, default_grid(), 1.0)
    assert defined.all() and np.all(values >= 0)


def test_p1_estimator_is_twice_the_local_mean():
    # with p = 1 the estimator is 2 * (kernel-weighted mean of Y)
    s = generate_sample(FrontierModel(covariate="uniform", seed=9), 300)
    grid = np.array([0.5])
    values, _ = fit_on_grid(Estimator.POWER_KERNEL_P1, s, grid, 1.0)
    from powerfrontier.kernels import kernel_scaled_eval, make_kernel

    h = rule_bandwidth(s)
    w = np.array([kernel_scaled_eval(make_kernel(), h, 0.5 - xi) for xi in s.x[:, 0]])
    assert values[0] == pytest.approx(2 * np.sum(w * s.y) / np.sum(w), rel=1e-12)


def test_replication_errors_reproducible():
    cfg = ExperimentConfig(**SMALL)
    a = replication_errors(cfg, "power_kernel", 100, 1.0)
    b = replication_errors(cfg, "power_kernel", 100, 1.0)
    assert [e.error for e in a] == [e.error for e in b]


def test_coverage_rejects_bad_arguments():
    with pytest.raises(DomainError):
        coverage_study(FrontierModel(gamma=1.0), 200, 0.95, 0, [0.5])
    with pytest.raises(DomainError):
        coverage_study(FrontierModel(gamma=2.0), 200, 0.95, 10, [0.5])


def test_coverage_grows_with_level():
    model = FrontierModel("g2", 1.0, Covariate.UNIFORM, seed=1)
    lo = coverage_study(model, 400, 0.5, 40, [0.3, 0.5, 0.7])
    hi = coverage_study(model, 400, 0.95, 40, [0.3, 0.5, 0.7])
    assert np.all(lo.n_defined == 40)
    assert np.all(lo.coverage <= hi.coverage) and lo.coverage.sum() < hi.coverage.sum()


def test_local_power_root_uniform_responses():
    # gamma = 1 makes (p + 1) E[(Y/g)**p] = 1 for every p
    model = FrontierModel("g1", 1.0, Covariate.UNIFORM, seed=3)
    for p in (5.0, 50.0, 200.0):
        assert local_power_root(model, 0.4, p, 200_000) == pytest.approx(1.0, abs=0.01)


@pytest.mark.parametrize("gamma", [2.0, 3.0])
def test_local_power_root_tends_to_one(gamma):
    model = FrontierModel("g1", gamma, Covariate.UNIFORM, seed=3)
    r = [local_power_root(model, 0.4, p, 200_000) for p in (5.0, 50.0, 200.0)]
    assert abs(r[2] - 1) < abs(r[1] - 1) < abs(r[0] - 1)
    if gamma == 2.0:
        assert abs(r[2] - 1) < 0.05


@pytest.mark.property_suite
def test_inequality_audit_clean():
    audit = audit_power_root_inequalities(n_samples=10_000, p_max=1000.0, seed=0)
    assert audit.n_samples == 10_000
    assert audit.power_failures == 0 and audit.root_failures == 0
