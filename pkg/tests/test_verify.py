import json
import math

import pytest

from memcap import ChannelParams, DomainError
from memcap.verify import (
    CheckReport,
    VerifyConfig,
    check_ap_bound,
    check_fourier_truncation,
    check_norm_bound,
    check_rank_perturbation,
    check_symbol_coefficients,
    check_theorem1_consistency,
    run_all,
)


def test_report_bookkeeping():
    r = CheckReport("demo")
    assert not r.passed  # nothing run yet
    r.add(0.5)
    r.add(-1e-12)
    assert r.passed and r.worst_margin == -1e-12
    r.add(-1e-3)
    assert not r.passed and r.cases_failed == 1
    d = r.to_dict()
    assert d["passed"] is False and len(d["details"]) == 3
    json.dumps(d)


def test_symbol_coefficients_check():
    r = check_symbol_coefficients(ChannelParams(0.7, 0.3), 1 << 10)
    assert r.passed, r.details
    with pytest.raises(DomainError):
        check_symbol_coefficients(ChannelParams(0.7, 0.3), 100)


@pytest.mark.parametrize("lam, mu", [(0.3, 0.0), (0.9, 0.5), (0.5, 0.25)])
def test_inequality_checks_pass(lam, mu):
    p = ChannelParams(lam, mu)
    assert check_norm_bound(p, [4, 16, 64]).passed
    assert check_rank_perturbation(p, 32, 4).passed
    assert check_ap_bound(p, "ebit", [4, 16, 64]).passed
    assert check_theorem1_consistency(p, "ebit", 0.1, [4, 16, 64]).passed
    assert check_fourier_truncation(p, [1, 2], [1, 4]).passed


def test_checks_detect_a_broken_bound(monkeypatch):
    import memcap.verify as verify

    # halve the theoretical bound: the ergodic check must now notice violations somewhere
    real = verify.ergodic_report

    def shrunk(*args, **kwargs):
        r = real(*args, **kwargs)
        return r.__class__(r.n, r.sample_average, r.symbol_integral, r.empirical_error,
                           r.empirical_error * 0.5, False)

    monkeypatch.setattr(verify, "ergodic_report", shrunk)
    r = check_ap_bound(ChannelParams(0.9, 0.5), "ebit", [16, 64])
    assert not r.passed and r.cases_failed == 2


def test_empty_grid_rejected():
    with pytest.raises(DomainError):
        VerifyConfig(lambdas=())
    with pytest.raises(DomainError):
        VerifyConfig(mus=(1.5,))


def test_quick_grid_passes():
    reports = run_all(VerifyConfig.quick())
    names = {r.check_name for r in reports}
    assert names == {"symbol_coefficients", "norm_bound", "rank_perturbation", "ap_bound",
                     "theorem1_consistency", "fourier_truncation"}
    failing = [r.to_dict() for r in reports if not r.passed]
    assert not failing, failing
    assert all(math.isfinite(r.worst_margin) for r in reports)


def test_parallel_run_matches_serial():
    cfg = VerifyConfig(lambdas=(0.6,), mus=(0.0, 0.3), n_list=(4, 16), rank_cases=((32, 2),), fourier_N=(2,))
    serial = [r.to_dict() for r in run_all(cfg)]
    parallel = [r.to_dict() for r in run_all(cfg, workers=3)]
    assert serial == parallel


def test_errors_are_reported_not_raised():
    cfg = VerifyConfig(lambdas=(0.6,), mus=(0.2,), n_list=(4,), rank_cases=((8, 4),), fourier_N=(1,))
    reports = run_all(cfg)
    bad = [r for r in reports if r.error]
    assert len(bad) == 1 and "BandTooWide" in bad[0].error and not bad[0].passed
