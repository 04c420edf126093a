"""Ground-truth machinery: partial-transpose verdicts, seeded random state
generators, and the suites that pin the moment-space criteria to direct
reduced-state traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import criteria, search
from .errors import ParameterError
from .lorentz import frame_from_euler, lorentz_from_sl2c, random_su2, sl2c_from_params
from .spin import moments
from .states import (
    DensityMatrix,
    DickeCoefficients,
    PureState,
    as_density,
    coherent_dicke_vector,
    dicke_reduction,
    partial_transpose,
)

PPT_TOL = -1e-10
DETECT_TOL = 1e-9
BAND_TOL = 1e-7

TRIPARTITE_CONSTANT = 12.0
SS_CONSTANTS = {"ss1": 2.0, "ss2": 6.0, "ss3": 2.0}
_SS_WITNESS = {"ss1": "ghz", "ss2": "w1", "ss3": "w2"}


@dataclass(frozen=True)
class OracleVerdict:
    subsystems: tuple
    min_pt_eigenvalue: float
    entangled: bool
    eigenvector: np.ndarray | None = None


def ppt_verdict(rho: DensityMatrix | DickeCoefficients, subsystem: int = 0) -> OracleVerdict:
    """Minimum eigenvalue of the partial transpose on one qubit.

    Negativity certifies entanglement; for 2-qubit states and symmetric
    3-qubit states positivity certifies separability as well.
    """
    full = as_density(rho)
    if full.n_qubits not in (2, 3):
        raise ParameterError("the partial-transpose verdict applies to 2 or 3 qubits")
    pt = partial_transpose(full, subsystem)
    vals, vecs = np.linalg.eigh(pt)
    lam_min = float(vals[0])
    entangled = lam_min < PPT_TOL
    vec = vecs[:, 0].copy() if entangled else None
    return OracleVerdict(tuple(range(full.n_qubits)), lam_min, entangled, vec)


# ---------------------------------------------------------------------------
# seeded random state generators
# ---------------------------------------------------------------------------

_KINDS = (
    "pure_symmetric",
    "mixed_symmetric",
    "product",
    "separable_mixture",
    "coherent_mixture",
    "haar_pure",
)


@dataclass(frozen=True)
class RandomStateSpec:
    kind: str
    n_qubits: int
    seed: int
    rank: int | None = None
    terms: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown random state kind {self.kind!r}")
        if self.n_qubits < 1:
            raise ParameterError("n_qubits must be >= 1")
        if self.kind == "mixed_symmetric":
            rank = self.rank or 1
            if not 1 <= rank <= self.n_qubits + 1:
                raise ParameterError("rank must lie in [1, N+1] for symmetric states")
        if self.kind in ("separable_mixture", "coherent_mixture") and (self.terms or 1) < 1:
            raise ParameterError("terms must be >= 1")


def _random_qubit_pure(rng) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def generate(spec: RandomStateSpec) -> DensityMatrix | DickeCoefficients:
    """Deterministic random state of the requested kind.

    Symmetric kinds are returned as DickeCoefficients (supported exactly on
    the symmetric subspace); the rest as full DensityMatrix objects.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n_qubits
    if spec.kind == "pure_symmetric":
        v = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
        v /= np.linalg.norm(v)
        return DickeCoefficients(n, np.outer(v, v.conj()))
    if spec.kind == "mixed_symmetric":
        rank = spec.rank or 1
        g = rng.normal(size=(n + 1, rank)) + 1j * rng.normal(size=(n + 1, rank))
        m = g @ g.conj().T
        return DickeCoefficients(n, m / np.trace(m))
    if spec.kind == "coherent_mixture":
        terms = spec.terms or 1
        weights = rng.dirichlet(np.ones(terms))
        m = np.zeros((n + 1, n + 1), dtype=complex)
        for w in weights:
            theta = math.acos(rng.uniform(-1.0, 1.0))
            phi = rng.uniform(0.0, 2.0 * math.pi)
            v = coherent_dicke_vector(n, theta, phi)
            m += w * np.outer(v, v.conj())
        return DickeCoefficients(n, m)
    if spec.kind == "product":
        m = np.array([[1.0]], dtype=complex)
        for _ in range(n):
            g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            q = g @ g.conj().T
            m = np.kron(m, q / np.trace(q))
        return DensityMatrix(n, m)
    if spec.kind == "separable_mixture":
        terms = spec.terms or 1
        weights = rng.dirichlet(np.ones(terms))
        d = 2**n
        m = np.zeros((d, d), dtype=complex)
        for w in weights:
            v = np.array([1.0], dtype=complex)
            for _ in range(n):
                v = np.kron(v, _random_qubit_pure(rng))
            m += w * np.outer(v, v.conj())
        return DensityMatrix(n, m)
    if spec.kind == "haar_pure":
        v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        v /= np.linalg.norm(v)
        return PureState(n, v).density()
    raise ParameterError(f"unknown random state kind {spec.kind!r}")


def _equivalence_state(n_qubits: int, index: int, seed: int) -> DickeCoefficients:
    """Sample mix for the equivalence suites: pure, Ginibre ranks, mixtures."""
    kind = index % 5
    s = seed + 7919 * index
    if kind == 4:
        return generate(RandomStateSpec("coherent_mixture", n_qubits, s, terms=4))
    if kind == 0:
        return generate(RandomStateSpec("pure_symmetric", n_qubits, s))
    return generate(
        RandomStateSpec("mixed_symmetric", n_qubits, s, rank=min(kind + 1, n_qubits + 1))
    )


# ---------------------------------------------------------------------------
# equivalence suite: search-based detection vs the PPT oracle
# ---------------------------------------------------------------------------


@dataclass
class EquivalenceSummary:
    n_qubits: int
    samples: int
    agreements: int = 0
    band_cases: int = 0
    disagreements: list = field(default_factory=list)
    oracle_entangled: int = 0
    detected: int = 0
    escalations: int = 0
    max_margin_gap: float = 0.0
    passed: bool = False

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "samples": self.samples,
            "agreements": self.agreements,
            "band_cases": self.band_cases,
            "disagreements": self.disagreements,
            "oracle_entangled": self.oracle_entangled,
            "detected": self.detected,
            "escalations": self.escalations,
            "max_margin_gap": self.max_margin_gap,
            "passed": self.passed,
        }


def _detect_n2(dicke: DickeCoefficients, cfg: search.SearchConfig) -> float:
    return search.optimize_direction(moments(dicke), cfg).best_margin


def _detect_n3(dicke: DickeCoefficients, cfg: search.SearchConfig) -> float:
    mom = moments(dicke)
    margin = search.optimize_lorentz(mom, "ghz", cfg).best_margin
    if margin < -DETECT_TOL:
        return margin
    return min(margin, search.optimize_lorentz(mom, "w", cfg).best_margin)


def equivalence_suite(
    n_qubits: int, samples: int, cfg: search.SearchConfig = search.SearchConfig()
) -> EquivalenceSummary:
    """Compare search-based detection with the PPT oracle over random
    symmetric states; disagreements outside the boundary band must be zero.
    """
    if n_qubits not in (2, 3):
        raise ParameterError("the equivalence suite runs on 2 or 3 qubits")
    summary = EquivalenceSummary(n_qubits=n_qubits, samples=samples)
    detect = _detect_n2 if n_qubits == 2 else _detect_n3
    big = search.SearchConfig(
        seed=cfg.seed + 1,
        coarse_grid=max(cfg.coarse_grid, 32),
        restarts=max(cfg.restarts * 4, 48),
        rapidity_cap=cfg.rapidity_cap,
        refine_iters=max(cfg.refine_iters * 2, 200),
        tolerance=cfg.tolerance,
    )
    for i in range(samples):
        state = _equivalence_state(n_qubits, i, cfg.seed)
        verdict = ppt_verdict(state, 0)
        margin = detect(state, cfg)
        flagged = margin < -DETECT_TOL
        if flagged != verdict.entangled:
            summary.escalations += 1
            margin = detect(state, big)
            flagged = margin < -DETECT_TOL
        if verdict.entangled:
            summary.oracle_entangled += 1
        if flagged:
            summary.detected += 1
        if n_qubits == 2:
            summary.max_margin_gap = max(
                summary.max_margin_gap, abs(margin - 2.0 * verdict.min_pt_eigenvalue)
            )
        if flagged == verdict.entangled:
            summary.agreements += 1
        elif abs(margin) <= BAND_TOL or abs(verdict.min_pt_eigenvalue) <= 1e-9:
            summary.band_cases += 1
        else:
            summary.disagreements.append(
                {
                    "sample": i,
                    "margin": margin,
                    "min_pt_eigenvalue": verdict.min_pt_eigenvalue,
                }
            )
    summary.passed = (
        not summary.disagreements and summary.band_cases <= max(1, samples // 50)
    )
    return summary


# ---------------------------------------------------------------------------
# proportionality suite: moment-space values vs direct reduced traces
# ---------------------------------------------------------------------------


@dataclass
class ProportionalitySummary:
    constants: dict = field(default_factory=dict)
    max_rel_err: dict = field(default_factory=dict)
    samples: int = 0
    passed: bool = False

    def to_dict(self) -> dict:
        return {
            "constants": self.constants,
            "max_rel_err": self.max_rel_err,
            "samples": self.samples,
            "passed": self.passed,
        }


def _fit_constant(lhs: np.ndarray, rhs: np.ndarray) -> tuple[float, float]:
    """Least-squares constant c minimizing |lhs - c*rhs|, and the normalized
    residual max|lhs - c*rhs| / max|lhs|."""
    denom = float(np.dot(rhs, rhs))
    if denom == 0.0:
        raise ParameterError("cannot fit a constant against identically zero traces")
    c = float(np.dot(lhs, rhs) / denom)
    scale = float(np.abs(lhs).max())
    err = float(np.abs(lhs - c * rhs).max() / max(scale, 1e-30))
    return c, err


def _snap_rational(c: float, tol: float = 1e-9) -> float:
    """Freeze a fitted constant to a small rational when it rounds cleanly."""
    from fractions import Fraction

    frac = Fraction(c).limit_denominator(48)
    if abs(float(frac) - c) <= tol * max(1.0, abs(c)):
        return float(frac)
    return c


def tripartite_direct_value(
    dicke: DickeCoefficients, family: str, a: np.ndarray, b: np.ndarray
) -> float:
    """sum over qubit triples of tr(rho_abc [ (A x B x B)|psi><psi|(..)^dag ]^T1),
    evaluated on the 3-qubit reduction of a symmetric state."""
    from .states import build_named_state

    base = build_named_state("ghz" if family == "ghz" else "w", 3).amplitudes
    psi = np.kron(np.kron(a, b), b) @ base
    m = partial_transpose(np.outer(psi, psi.conj()), 0, 3)
    red = dicke_reduction(dicke, 3)
    return math.comb(dicke.n_qubits, 3) * float(np.trace(red.matrix @ m).real)


def ss_direct_value(dicke: DickeCoefficients, kind: str, frame) -> float:
    """sum over qubit triples of tr(rho_abc W_kind(frame)) for symmetric states."""
    wit = criteria.witness_matrix(_SS_WITNESS[kind], frame)
    red = dicke_reduction(dicke, 3)
    return math.comb(dicke.n_qubits, 3) * float(np.trace(red.matrix @ wit).real)


def proportionality_suite(
    n_values=(3, 4, 5), samples: int = 100, seed: int = 0
) -> ProportionalitySummary:
    """Fit and verify the constants linking moment-space criterion values to
    direct reduced-state traces: the tripartite contraction for both families
    and the three third-moment inequalities."""
    rng = np.random.default_rng(seed)
    summary = ProportionalitySummary(samples=samples)
    per_family = {"ghz": ([], []), "w": ([], [])}
    per_kind = {kind: ([], []) for kind in SS_CONSTANTS}
    for i in range(samples):
        n = n_values[i % len(n_values)]
        rank = int(rng.integers(1, n + 2))
        state = generate(RandomStateSpec("mixed_symmetric", n, seed + 104729 * i, rank=rank))
        mom = moments(state)

        family = "ghz" if i % 2 == 0 else "w"
        a = sl2c_from_params(rng.normal(size=3), rng.uniform(0.0, 1.5), rng.normal(size=3))
        if family == "ghz":
            b = sl2c_from_params(rng.normal(size=3), rng.uniform(0.0, 1.5), rng.normal(size=3))
        else:
            b = random_su2(rng)
        kt = criteria.k_tensor(
            family, lorentz_from_sl2c(a, "star"), lorentz_from_sl2c(b, "dagger")
        )
        per_family[family][0].append(criteria.tripartite_margin(mom, kt))
        per_family[family][1].append(tripartite_direct_value(state, family, a, b))

        frame = frame_from_euler(*rng.uniform(0.0, 2.0 * math.pi, size=3))
        for kind in SS_CONSTANTS:
            per_kind[kind][0].append(criteria.ss_value(mom, kind, frame))
            per_kind[kind][1].append(ss_direct_value(state, kind, frame))

    ok = True
    for name, (lhs, rhs) in {**per_family, **per_kind}.items():
        c, err = _fit_constant(np.array(lhs), np.array(rhs))
        summary.constants[name] = _snap_rational(c)
        summary.max_rel_err[name] = err
        expected = TRIPARTITE_CONSTANT if name in per_family else SS_CONSTANTS[name]
        ok = ok and err <= 1e-9 and abs(summary.constants[name] - expected) <= 1e-9
    summary.passed = ok
    return summary


# ---------------------------------------------------------------------------
# separable-state positivity sweep
# ---------------------------------------------------------------------------


@dataclass
class PositivitySummary:
    samples: int
    min_margin: float
    worst_case: dict = field(default_factory=dict)
    passed: bool = False

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "min_margin": self.min_margin,
            "worst_case": self.worst_case,
            "passed": self.passed,
        }


def separable_positivity_suite(
    samples: int = 100, seed: int = 0, cfg: search.SearchConfig | None = None
) -> PositivitySummary:
    """Random fully separable states must never yield a criterion margin
    below -1e-9 under search."""
    cfg = cfg or search.SearchConfig(seed=seed, restarts=8, refine_iters=40, coarse_grid=12)
    worst = math.inf
    worst_case: dict = {}
    rng = np.random.default_rng(seed)
    for i in range(samples):
        n = int(rng.integers(2, 5))
        symmetric = bool(rng.integers(0, 2))
        if symmetric:
            state = generate(RandomStateSpec("coherent_mixture", n, seed + 31 * i, terms=4))
        else:
            state = generate(RandomStateSpec("separable_mixture", n, seed + 31 * i, terms=4))
        mom = moments(state)
        margins = {"bipartite": search.optimize_direction(mom, cfg).best_margin}
        if n >= 3:
            mode = "symmetric" if symmetric else "general"
            margins["tripartite-ghz"] = search.optimize_lorentz(mom, "ghz", cfg, mode).best_margin
            margins["tripartite-w"] = search.optimize_lorentz(mom, "w", cfg, mode).best_margin
            for kind in ("ss1", "ss2", "ss3"):
                margins[kind] = search.optimize_frame(mom, kind, cfg).best_margin
        m = min(margins.values())
        if m < worst:
            worst = m
            worst_case = {"sample": i, "margins": margins, "symmetric": symmetric, "n": n}
    return PositivitySummary(
        samples=samples, min_margin=worst, worst_case=worst_case, passed=worst >= -1e-9
    )
