import numpy as np
import pytest

import gapfill.hinge as hinge_mod
from gapfill.codec import Candidate, CandidateMatrix, TransformFamily
from gapfill.errors import NoSourceError, PipelineError, SelectionError
from gapfill.hinge import HingeSide, PipelineConfig, hinge_fm2i, prepare_hinge, select_best
from gapfill.metrics import smape
from gapfill.series import GapSpec, TimeSeries, find_single_gap, inject_gap

FAST = PipelineConfig(patch_size=5, rows=8)


def masked(values):
    return find_single_gap(TimeSeries("x", np.asarray(values, dtype=float)))


def matrix(k, hinges):
    cands = tuple(Candidate(i, np.array([float(i)]), h) for i, h in enumerate(hinges))
    return CandidateMatrix(TransformFamily(k, 8), cands)


def seasonal(length=60, seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    return 100 + 0.4 * t + 8 * np.sin(2 * np.pi * t / 12) + rng.normal(0, 1, length)


class TestPrepareHinge:
    def test_left(self):
        m, stored, idx = prepare_hinge(masked([1, 2, np.nan, np.nan, 5, 6]), "left")
        assert (idx, stored) == (1, 2.0)
        assert np.isnan(m.values[1]) and m.gap == GapSpec(2, 2)

    def test_right(self):
        m, stored, idx = prepare_hinge(masked([1, 2, np.nan, np.nan, 5, 6]), HingeSide.RIGHT)
        assert (idx, stored) == (4, 5.0)
        assert np.isnan(m.values[4])

    def test_boundary(self):
        _, stored, idx = prepare_hinge(masked([9, np.nan, 7]), "left")
        assert (idx, stored) == (0, 9.0)


class TestSelectBest:
    def test_argmin(self):
        choice = select_best([matrix(1, [1.0, 0.5, 0.9])], 0.95)
        assert (choice.family, choice.row) == (1, 2)
        assert choice.hinge_error == pytest.approx(0.05)

    def test_tie_goes_to_lower_family(self):
        choice = select_best([matrix(3, [0.5625, 0.1]), matrix(1, [0.9, 0.4375])], 0.5)
        assert (choice.family, choice.row) == (1, 1)

    def test_tie_within_family_goes_to_lower_row(self):
        choice = select_best([matrix(2, [0.25, 0.75, 0.25])], 0.5)
        assert choice.row == 0

    def test_empty(self):
        with pytest.raises(SelectionError):
            select_best([], 0.5)


@pytest.mark.parametrize("side", ["left", "right"])
def test_constant_series_exact(side):
    m = inject_gap(TimeSeries("c", np.full(70, 5.0)), GapSpec(32, 5))
    result = hinge_fm2i(m, side)
    assert result.imputed_series.values.tolist() == [5.0] * 70


@pytest.mark.parametrize("side", ["left", "right"])
def test_pipeline_contract(side):
    x = seasonal()
    m = inject_gap(TimeSeries("s", x), GapSpec(25, 8))
    result = hinge_fm2i(m, side, FAST)
    out = result.imputed_series.values

    keep = np.ones(x.size, bool)
    keep[25:33] = False
    assert np.array_equal(out[keep], x[keep])  # hinge restored from storage, rest untouched
    assert out[result.hinge_index] == x[result.hinge_index]
    assert not np.isnan(out).any()
    assert len(result.per_family_candidates) == 6
    assert all(len(cm) == 8 for cm in result.per_family_candidates)

    # the selection is the global minimum of hinge error
    stored = (result.stored_hinge - result.params.min) / result.params.range
    errors = [
        (abs(c.hinge - stored), cm.family.k, c.row)
        for cm in result.per_family_candidates
        for c in cm.candidates
    ]
    best = min(errors)
    assert (result.chosen.family, result.chosen.row) == best[1:]
    assert result.chosen.hinge_error == best[0]

    # bracketing against the oracle candidate pool
    pool = [smape(x[25:33], g) for g in result.candidate_gaps()]
    chosen = smape(x[25:33], result.gap_values)
    assert min(pool) <= chosen <= max(pool)

    again = hinge_fm2i(m, side, FAST)
    assert np.array_equal(again.imputed_series.values, out)


def test_failing_family_is_skipped(monkeypatch, caplog):
    real = hinge_mod.inpaint
    calls = []

    def flaky(image, mask, cfg):
        calls.append(1)
        if len(calls) == 1:
            raise NoSourceError("synthetic failure")
        return real(image, mask, cfg)

    monkeypatch.setattr(hinge_mod, "inpaint", flaky)
    m = inject_gap(TimeSeries("s", seasonal(40)), GapSpec(15, 4))
    result = hinge_fm2i(m, "left", FAST)
    assert [cm.family.k for cm in result.per_family_candidates] == [2, 3, 4, 5, 6]
    assert "family 1 skipped" in caplog.text


def test_all_families_failing(monkeypatch):
    def broken(image, mask, cfg):
        raise NoSourceError("nope")

    monkeypatch.setattr(hinge_mod, "inpaint", broken)
    m = inject_gap(TimeSeries("s", seasonal(40)), GapSpec(15, 4))
    with pytest.raises(PipelineError):
        hinge_fm2i(m, "right", FAST)
