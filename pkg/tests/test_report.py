"""
unit tests for promisecalc.report
"""
from fractions import Fraction

from promisecalc.meadow import GUARDED_STATUS
from promisecalc.report import report
from promisecalc.trace import Trace


def test_report_01():
    """test report() - empty trace"""
    summary = report(Trace())
    assert summary.empty
    assert summary.render() == ["empty trace"]


def test_report_02(simulate):
    """test report() - private obligations only on request"""
    trace = simulate("money_transfer").trace
    assert len(report(trace).obligations) == 2
    assert len(report(trace, include_private=True).obligations) == 3


def test_report_03(simulate):
    """test report() - budget conformance per observer"""
    summary = simulate("budget").summary()
    assert len(summary.budget) == 8
    assert {status for _, _, status in summary.budget} == {"kept"}
    lines = summary.render()
    assert "budget conformance:" in lines
    assert "  Q on P6: kept" in lines


def test_report_04(simulate):
    """test report() - creep status of meadow promises"""
    summary = simulate("meadow").summary()
    assert summary.creep["P1"] == "creep"
    assert summary.creep["P5"] == GUARDED_STATUS
    assert "P1.warning.1" not in summary.creep


def test_report_05():
    """test report() - erosion statistics"""
    trace = Trace()
    trace.append(1, "instance", {"promise": "P1", "holder": "B"})
    trace.append(1, "instance", {"promise": "P2", "holder": "B"})
    trace.append(1, "instance", {"promise": "P3", "holder": "B"})
    trace.append(5, "drop", {"promise": "P3", "holder": "B"})
    trace.append(9, "retain", {"promise": "P1", "holder": "B", "confidence": Fraction(1, 2)})
    trace.append(9, "retain", {"promise": "P2", "holder": "B", "confidence": Fraction(1)})
    erosion = report(trace).erosion
    assert (erosion.created, erosion.dropped, erosion.retained) == (3, 1, 2)
    assert erosion.min_confidence == Fraction(1, 2)
    assert erosion.mean_confidence == Fraction(3, 4)
    assert "  confidence min 1/2, mean 3/4" in report(trace).render()


def test_report_06(simulate):
    """test Summary.render() - section order"""
    lines = simulate("money_transfer").summary().render()
    assert lines[0] == "promises: 10"
    assert "  B in A: 11/20" in lines
    assert lines[-1] == "errors: 0"
