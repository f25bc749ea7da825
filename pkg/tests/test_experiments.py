import numpy as np
import pytest
from scipy import stats

from modcoherence.closed_forms import mod_trace_of_max_amplitude
from modcoherence.experiments import (SweepConfig, block_additivity_suite, ci_halfwidth,
                                      exact_proportion, f_density, f_tail_integral,
                                      fifty_percent_crossing, gradient_suite,
                                      mc_pure_proportion, mc_rank_proportion,
                                      proper_measure_suite, sweep, worker_count)
from modcoherence.validation import ValidationError


def test_exact_proportion_examples():
    assert exact_proportion(2) == 0.0
    assert exact_proportion(4) == 0.5
    assert exact_proportion(5) == 0.6875
    assert exact_proportion(1) == 0.0
    assert exact_proportion(10) == pytest.approx(1 - 10 / 512, abs=1e-15)


def test_exact_proportion_shape():
    vals = [exact_proportion(n) for n in range(2, 40)]
    assert np.all(np.diff(vals[1:]) > 0)
    assert 1 - exact_proportion(39) < 1e-9
    assert min(n for n in range(2, 40) if exact_proportion(n) >= 0.5) == 4


@pytest.mark.parametrize("bad", [0, -3, 2.5])
def test_exact_proportion_rejects(bad):
    with pytest.raises(ValidationError):
        exact_proportion(bad)


def test_f_density_is_f_distribution():
    # proportional to the F(2, 2n - 2) pdf
    for n in (3, 6):
        xs = np.linspace(0.1, 20, 50)
        ratio = f_density(n, xs) / stats.f.pdf(xs, 2, 2 * n - 2)
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-10)


def test_f_tail_integral_matches_closed_form():
    for n in range(2, 11):
        assert abs(f_tail_integral(n) - 2.0 ** (1 - n)) <= 1e-10


def test_ci_halfwidth_normal_and_exact():
    z = stats.norm.ppf(0.995)
    assert ci_halfwidth(5000, 10000) == pytest.approx(z * 0.005)
    # exact regime is wider than zero even with no hits
    assert ci_halfwidth(0, 1000) > 0
    lo = stats.beta.ppf(0.005, 3, 998)
    hi = stats.beta.ppf(0.995, 4, 997)
    assert ci_halfwidth(3, 1000) == pytest.approx(max(0.003 - lo, hi - 0.003))


def test_mc_pure_small_dims():
    rep = mc_pure_proportion(2, 2000, seed=3)
    assert rep.hits == 0 and rep.estimate == 0.0 and not rep.flagged
    rep = mc_pure_proportion(3, 2000, seed=3)
    assert abs(rep.estimate - 0.25) < 5 * rep.ci_halfwidth
    assert rep.exact == 0.25


def test_mc_rank_one_matches_pure_path():
    a = mc_pure_proportion(5, 300, seed=11)
    b = mc_rank_proportion(5, 1, 300, seed=11)
    assert a.hits == b.hits and b.excluded == 0


def test_mc_rank_rejects_bad_rank():
    with pytest.raises(ValidationError):
        mc_rank_proportion(3, 4, 10)


def test_full_rank_generic_states_not_saturated():
    rep = mc_rank_proportion(3, 3, 100, seed=1)
    assert rep.hits == 0


def test_fifty_percent_crossing_rank_one():
    assert fifty_percent_crossing(1, samples=0) == 4


def test_sweep_marks_infeasible_pairs():
    out = sweep(SweepConfig(dims=range(2, 4), ranks=range(1, 4), samples=20, seed=1))
    keys = [(n, k) for n, k, _ in out]
    assert keys == [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3), (3, 3)]
    assert out[4][2] is None
    assert all(rep is not None for n, k, rep in out if k <= n)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("COHERENCE_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("COHERENCE_THREADS", "x")
    with pytest.raises(ValidationError):
        worker_count()


def test_thread_count_does_not_change_results(monkeypatch):
    monkeypatch.setenv("COHERENCE_THREADS", "1")
    a = mc_rank_proportion(6, 2, 60, seed=5)
    monkeypatch.setenv("COHERENCE_THREADS", "4")
    b = mc_rank_proportion(6, 2, 60, seed=5)
    assert a == b


def test_figure_one_shape():
    a = np.linspace(0, 1, 100)
    lo = a[a >= 1 / np.sqrt(5)]
    vals = mod_trace_of_max_amplitude(lo)
    flat = lo <= 1 / np.sqrt(2)
    assert np.all(vals[flat] == 1.0)
    assert np.all(np.diff(vals[~flat]) < 0)
    assert vals[-1] == 0.0


def test_property_suites_small():
    assert block_additivity_suite(5, seed=2).passed
    assert proper_measure_suite(5, seed=2).passed
    assert gradient_suite(10, seed=2).passed
