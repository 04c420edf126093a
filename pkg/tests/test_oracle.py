import math

import numpy as np
import pytest

from ssq import oracle
from ssq.errors import ParameterError
from ssq.search import SearchConfig, optimize_direction
from ssq.spin import moments
from ssq.states import (
    DensityMatrix,
    DickeCoefficients,
    PureState,
    as_density,
    build_named_state,
    partial_trace,
    partial_transpose,
)


def bell_symmetric():
    return PureState(2, np.array([0, 1, 1, 0]) / math.sqrt(2)).density()


def test_ppt_bell():
    verdict = oracle.ppt_verdict(bell_symmetric(), 0)
    assert verdict.entangled
    assert abs(verdict.min_pt_eigenvalue + 0.5) < 1e-12
    # the returned eigenvector reproduces the eigenvalue
    pt = partial_transpose(bell_symmetric(), 0)
    v = verdict.eigenvector
    assert abs((v.conj() @ pt @ v).real - verdict.min_pt_eigenvalue) < 1e-12


def test_ppt_product_state():
    rng = np.random.default_rng(0)
    state = oracle.generate(oracle.RandomStateSpec("product", 2, 3))
    verdict = oracle.ppt_verdict(state, 0)
    assert not verdict.entangled
    assert verdict.min_pt_eigenvalue >= -1e-10


def test_ppt_w_state():
    w = build_named_state("w", 3).density()
    verdict = oracle.ppt_verdict(w, 0)
    assert verdict.entangled
    # minimum eigenvalue of the W projector's partial transpose is -sqrt(2)/3
    assert abs(verdict.min_pt_eigenvalue + math.sqrt(2.0) / 3.0) < 1e-12


def test_ppt_involution_spectrum():
    rng = np.random.default_rng(1)
    g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    m = g @ g.conj().T
    rho = DensityMatrix(3, m / np.trace(m))
    pt2 = partial_transpose(partial_transpose(rho, 1, 3), 1, 3)
    assert np.abs(pt2 - rho.matrix).max() < 1e-14


def test_ppt_symmetric_qubit_independence():
    state = oracle.generate(oracle.RandomStateSpec("mixed_symmetric", 3, 5, rank=3))
    vals = [oracle.ppt_verdict(state, q).min_pt_eigenvalue for q in range(3)]
    assert max(vals) - min(vals) < 1e-11


def test_ppt_wrong_dimension():
    with pytest.raises(ParameterError):
        oracle.ppt_verdict(build_named_state("ghz", 4).density(), 0)


def test_generate_determinism():
    for kind, kwargs in (
        ("pure_symmetric", {}),
        ("mixed_symmetric", {"rank": 2}),
        ("product", {}),
        ("separable_mixture", {"terms": 3}),
        ("coherent_mixture", {"terms": 3}),
        ("haar_pure", {}),
    ):
        a = oracle.generate(oracle.RandomStateSpec(kind, 3, 42, **kwargs))
        b = oracle.generate(oracle.RandomStateSpec(kind, 3, 42, **kwargs))
        assert np.abs(as_density(a).matrix - as_density(b).matrix).max() == 0.0


def test_generate_symmetric_support():
    from ssq.states import symmetry_residual

    state = oracle.generate(oracle.RandomStateSpec("pure_symmetric", 2, 7))
    assert isinstance(state, DickeCoefficients)
    assert symmetry_residual(as_density(state)) < 1e-12


def test_generate_product_all_pairs_ppt():
    state = oracle.generate(oracle.RandomStateSpec("product", 3, 11))
    rho = as_density(state)
    for pair in ((0, 1), (0, 2), (1, 2)):
        red = partial_trace(rho, pair)
        assert oracle.ppt_verdict(red, 0).min_pt_eigenvalue >= -1e-10


def test_generate_separable_mixture_not_detected():
    cfg = SearchConfig(seed=1, restarts=6, refine_iters=30, coarse_grid=10)
    for seed in (1, 2, 3):
        state = oracle.generate(oracle.RandomStateSpec("separable_mixture", 3, seed, terms=5))
        assert optimize_direction(moments(state), cfg).best_margin >= -1e-9


def test_generate_validation():
    with pytest.raises(ParameterError):
        oracle.RandomStateSpec("mixed_symmetric", 2, 0, rank=5)
    with pytest.raises(ParameterError):
        oracle.RandomStateSpec("nope", 2, 0)


def test_equivalence_suite_n2():
    cfg = SearchConfig(seed=0, restarts=8, refine_iters=60)
    summary = oracle.equivalence_suite(2, 60, cfg)
    assert summary.passed
    assert summary.disagreements == []
    assert summary.oracle_entangled > 0
    assert summary.detected == summary.oracle_entangled
    # sharp anchor: best margin equals twice the PT minimum for every sample
    assert summary.max_margin_gap < 1e-7


def test_equivalence_suite_n3():
    cfg = SearchConfig(seed=0, restarts=8, refine_iters=50, coarse_grid=12)
    summary = oracle.equivalence_suite(3, 15, cfg)
    assert summary.passed
    assert summary.disagreements == []


def test_equivalence_suite_empty():
    summary = oracle.equivalence_suite(2, 0, SearchConfig(seed=0))
    assert summary.samples == 0
    assert summary.agreements == 0
    assert summary.passed


def test_equivalence_suite_bad_size():
    with pytest.raises(ParameterError):
        oracle.equivalence_suite(4, 10, SearchConfig())


def test_proportionality_suite():
    summary = oracle.proportionality_suite((3, 4, 5), 30, seed=2)
    assert summary.passed
    assert summary.constants["ghz"] == pytest.approx(12.0, abs=1e-12)
    assert summary.constants["w"] == pytest.approx(12.0, abs=1e-12)
    assert summary.constants["ss1"] == pytest.approx(2.0, abs=1e-12)
    assert summary.constants["ss2"] == pytest.approx(6.0, abs=1e-12)
    assert summary.constants["ss3"] == pytest.approx(2.0, abs=1e-12)
    assert max(summary.max_rel_err.values()) <= 1e-9


def test_separable_positivity_suite():
    summary = oracle.separable_positivity_suite(samples=8, seed=3)
    assert summary.passed
    assert summary.min_margin >= -1e-9


def test_separable_positivity_500_states():
    # margins of separable states are nonnegative at every parameter, so any
    # search budget is a valid falsification attempt; 500 states across
    # N = 2..4, symmetric and not, with every applicable criterion searched
    cfg = SearchConfig(seed=5, restarts=4, refine_iters=20, coarse_grid=8)
    summary = oracle.separable_positivity_suite(samples=500, seed=5, cfg=cfg)
    assert summary.passed, summary.worst_case
    assert summary.min_margin >= -1e-9
