import math

import pytest

from reglab import verify as vf


def _assert_all_pass(results):
    failed = [r.line() for r in results if not r.passed]
    assert not failed, "\n".join(failed)
    for r in results:
        assert r.passed == (r.residual <= r.tolerance)
        assert isinstance(r.runtime_ms, int) and r.runtime_ms >= 0


def test_functional_suite():
    res = vf.suite_functional()
    _assert_all_pass(res)
    assert len(res) == 11


def test_functional_suite_rejects_bad_h():
    with pytest.raises(ValueError):
        vf.suite_functional(h_ko=(), h_lr=(1.5,))


def test_main_suite():
    res = vf.suite_main()
    _assert_all_pass(res)
    assert all(r.tolerance == 1e-9 for r in res)


def test_points_and_divisors_suites():
    _assert_all_pass(vf.suite_points())
    res = vf.suite_divisors()
    _assert_all_pass(res)
    assert all(r.tolerance == 0 for r in res)


def test_dilog_suite():
    _assert_all_pass(vf.suite_dilog())


def test_properties_suite():
    _assert_all_pass(vf.suite_properties())


def test_lseries_suite():
    _assert_all_pass(vf.suite_lseries())


def test_run_suite_and_determinism():
    a = vf.run_suite("main")
    b = vf.run_suite("main")
    assert [r.residual for r in a] == [r.residual for r in b]
    with pytest.raises(KeyError):
        vf.run_suite("nope")


def test_failure_is_reported_not_raised():
    def boom():
        raise RuntimeError("x")

    r = vf._safe("broken", boom, 1e-9)
    assert not r.passed and "RuntimeError" in r.name and math.isinf(r.residual)


def test_failing_suite_does_not_abort_others(monkeypatch):
    monkeypatch.setitem(vf.SUITES, "main", lambda: 1 / 0)
    res = vf.run_suite("all")
    assert any("suite main" in r.name and not r.passed for r in res)
    assert any(r.name.startswith("m(4h^2)") and r.passed for r in res)


def test_json_schema():
    r = vf.suite_main()[0]
    assert set(r.to_json()) == {"name", "lhs", "rhs", "residual", "tolerance", "passed"}
