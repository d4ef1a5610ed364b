from __future__ import annotations

import json

import pytest

from pathchoice.errors import HarnessFailure, InputError
from pathchoice.theorems import Leg, Report, verify_prop1, verify_prop2, verify_theorem1, verify_theorem2


def test_theorem1_exhaustive_n3():
    report = verify_theorem1(3)
    assert report.passed
    assert report.stats["pi_rules"] == 35
    assert report.leg("only-if").checked == 35
    assert report.leg("footnote-only-if").checked == 1
    assert report.leg("if").checked == 200


def test_theorem2_exhaustive_n3():
    report = verify_theorem2(3)
    assert report.passed
    assert report.stats["pi_lad_rules"] + report.stats["pi_not_lad_rules"] == 35
    assert report.leg("corollary").checked == report.stats["pi_not_lad_rules"] > 0
    assert report.leg("footnote-corollary").checked == 1


@pytest.mark.parametrize("n, rules", [(1, 2), (2, 16)])
def test_prop1_small(n, rules):
    report = verify_prop1(n)
    assert report.passed and report.leg("equivalence").checked == rules


def test_prop2_n4():
    report = verify_prop2(4, seed=0, count=100)
    assert report.passed
    assert report.leg("laminar").checked == 100
    assert report.leg("fixtures").checked == 2


def test_theorem1_sampled_n4():
    report = verify_theorem1(4, "sampled", seed=1, count=60)
    assert report.passed and report.leg("only-if").checked == 60


def test_theorem2_sampled_n5_responsive_pass():
    report = verify_theorem2(5, "sampled", seed=0, count=40)
    assert report.passed
    assert report.stats["responsive_rules"] > 0


def test_reports_are_deterministic_and_untimed():
    a = verify_theorem1(4, "sampled", seed=3, count=20).to_json()
    b = verify_theorem1(4, "sampled", seed=3, count=20, threads=4).to_json()
    assert json.dumps(a) == json.dumps(b)
    assert "runtime" not in a


def test_mode_validation():
    with pytest.raises(InputError):
        verify_theorem1(4, "exhaustive")
    with pytest.raises(InputError):
        verify_theorem1(3, "bogus")
    with pytest.raises(InputError):
        verify_prop2(7)


def test_failure_carries_report():
    report = Report("demo", {}, [Leg("leg", 1, [{"rule": {}}])])
    assert not report.passed
    err = HarnessFailure("demo failed", report)
    assert err.report.to_json()["legs"][0]["failures"] == 1
