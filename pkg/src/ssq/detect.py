"""Detection engine: run a list of criteria on one state, cross-check against
the partial-transpose oracle on all small reductions, and assemble a report.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__, criteria, oracle, prep, search
from .errors import (
    NoAdmissibleFrameError,
    ParameterError,
    ResourceLimitError,
    ZeroMeanSpinError,
)
from .spin import moments
from .states import (
    DensityMatrix,
    DickeCoefficients,
    PureState,
    as_density,
    full_to_dicke,
    partial_trace,
    partial_transpose,
    state_to_dict,
    symmetry_residual,
)

CRITERION_IDS = (
    "xi2",
    "bipartite",
    "tripartite-ghz",
    "tripartite-w",
    "ss1",
    "ss2",
    "ss3",
    "ss1p",
    "ss2p",
    "prep-certificate",
)

DEFAULT_MAX_QUBITS = 12
ORACLE_MAX_QUBITS = 6


def max_qubits() -> int:
    raw = os.environ.get("SSQ_MAX_QUBITS")
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError as exc:
        raise ParameterError(f"SSQ_MAX_QUBITS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ParameterError("SSQ_MAX_QUBITS must be >= 1")
    return value


def canonical_digest(state) -> str:
    blob = json.dumps(state_to_dict(state), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class Report:
    tool_version: str
    input_digest: str
    n_qubits: int
    symmetric: bool
    seed: int
    criteria: list = field(default_factory=list)
    oracle: dict | None = None
    wall_time_s: float | None = None

    def to_dict(self, include_wall_time: bool = False) -> dict:
        return {
            "tool_version": self.tool_version,
            "input_digest": self.input_digest,
            "n_qubits": self.n_qubits,
            "symmetric": self.symmetric,
            "seed": self.seed,
            "criteria": self.criteria,
            "oracle": self.oracle,
            "wall_time_s": self.wall_time_s if include_wall_time else None,
        }


def _criterion_entry(
    criterion: str,
    margin: float | None,
    verdict: str,
    params: dict | None = None,
    xi_squared: float | None = None,
    note: str | None = None,
) -> dict:
    report = criteria.CriterionReport(
        criterion=criterion,
        margin=margin,
        verdict=verdict,
        params=params or {},
        xi_squared=xi_squared,
        note=note,
    )
    return dataclasses.asdict(report)


def _run_one(criterion: str, state, mom, symmetric: bool, cfg: search.SearchConfig) -> dict:
    nq = mom.n_qubits if mom is not None else as_density(state).n_qubits
    tol = cfg.tolerance
    if criterion == "xi2":
        try:
            value, direction = criteria.xi_squared(mom)
        except ZeroMeanSpinError as exc:
            return _criterion_entry(criterion, None, "not_applicable", note=str(exc))
        if not symmetric:
            # below-coherent variance is not an entanglement flag without
            # permutation symmetry (misaligned product states reach it too)
            return _criterion_entry(
                criterion,
                None,
                "not_applicable",
                {"direction": direction.tolist()},
                xi_squared=value,
                note="squeezing-based detection applies to symmetric states",
            )
        margin = value - 1.0
        return _criterion_entry(
            criterion,
            margin,
            criteria.margin_verdict(margin, tol),
            {"direction": direction.tolist()},
            xi_squared=value,
        )
    if criterion == "bipartite":
        res = search.optimize_direction(mom, cfg, symmetric=symmetric)
        return _criterion_entry(
            criterion, res.best_margin, criteria.margin_verdict(res.best_margin, tol), res.best_params
        )
    if criterion in ("tripartite-ghz", "tripartite-w"):
        if nq < 3:
            return _criterion_entry(
                criterion, None, "not_applicable", note="needs at least 3 qubits"
            )
        family = criterion.split("-")[1]
        mode = "symmetric" if symmetric else "general"
        res = search.optimize_lorentz(mom, family, cfg, mode)
        return _criterion_entry(
            criterion, res.best_margin, criteria.margin_verdict(res.best_margin, tol), res.best_params
        )
    if criterion in criteria.SS_KINDS:
        if nq < 3:
            return _criterion_entry(
                criterion, None, "not_applicable", note="needs at least 3 qubits"
            )
        try:
            res = search.optimize_frame(mom, criterion, cfg)
        except NoAdmissibleFrameError as exc:
            return _criterion_entry(criterion, None, "not_applicable", note=str(exc))
        return _criterion_entry(
            criterion, res.best_margin, criteria.margin_verdict(res.best_margin, tol), res.best_params
        )
    if criterion == "prep-certificate":
        if not symmetric:
            return _criterion_entry(
                criterion,
                None,
                "not_applicable",
                note="the P-representation certificate applies to symmetric states",
            )
        dicke = state if isinstance(state, DickeCoefficients) else full_to_dicke(as_density(state))
        cert = prep.separability_certificate(dicke)
        verdict = "certified_separable" if cert.certified else "not_certified"
        params = {
            "resolution": cert.resolution,
            "state_residual": cert.state_residual,
            "moment_residual": cert.moment_residual,
        }
        if cert.measure is not None:
            params["n_nodes"] = int(cert.measure.weights.size)
        return _criterion_entry(criterion, None, verdict, params)
    raise ParameterError(f"unknown criterion {criterion!r}")


def _oracle_block(state, entries: list, symmetric: bool) -> dict:
    """PPT verdicts for every pair (and triple) of qubits, with consistency
    flags against the criterion verdicts."""
    rho = as_density(state)
    n = rho.n_qubits
    pairs = []
    for pair in itertools.combinations(range(n), 2):
        red = rho if n == 2 else partial_trace(rho, pair)
        lam = float(np.linalg.eigvalsh(partial_transpose(red, 0))[0])
        pairs.append({"qubits": list(pair), "min_pt_eigenvalue": lam, "entangled": lam < -1e-10})
    triples = []
    for triple in itertools.combinations(range(n), 3):
        red = rho if n == 3 else partial_trace(rho, triple)
        lam = float(np.linalg.eigvalsh(partial_transpose(red, 0))[0])
        triples.append(
            {"qubits": list(triple), "min_pt_eigenvalue": lam, "entangled": lam < -1e-10}
        )
    any_pair = any(p["entangled"] for p in pairs)
    any_triple = any(t["entangled"] for t in triples)
    notes = []
    verdicts = {e["criterion"]: e["verdict"] for e in entries}
    pair_like = [c for c in ("xi2", "bipartite") if verdicts.get(c) == "entangled"]
    if pair_like and not any_pair:
        notes.append(
            f"criteria {pair_like} flag pair entanglement but every pair reduction is PPT"
        )
    triple_like = [
        c
        for c in ("tripartite-ghz", "tripartite-w", *criteria.SS_KINDS)
        if verdicts.get(c) == "entangled"
    ]
    if triple_like and triples and not any_triple:
        notes.append(
            f"criteria {triple_like} flag triple entanglement but every triple reduction is PPT"
        )
    if symmetric and verdicts.get("bipartite") == "not_detected" and any_pair:
        notes.append(
            "state is symmetric and a pair reduction is NPT but the pair criterion found nothing"
        )
    return {
        "pairs": pairs,
        "triples": triples,
        "consistent": not notes,
        "notes": notes,
    }


def run_detect(
    state: PureState | DensityMatrix | DickeCoefficients,
    criteria_ids: list,
    cfg: search.SearchConfig = search.SearchConfig(),
    with_oracle: bool = True,
) -> Report:
    if not criteria_ids:
        raise ParameterError("criteria list must be non-empty")
    for cid in criteria_ids:
        if cid not in CRITERION_IDS:
            raise ParameterError(
                f"unknown criterion {cid!r}; valid: {', '.join(CRITERION_IDS)}"
            )
    cap = max_qubits()
    nq = state.n_qubits
    if nq > cap:
        raise ResourceLimitError(f"state has {nq} qubits, cap is {cap} (set SSQ_MAX_QUBITS)")

    if isinstance(state, DickeCoefficients):
        symmetric = True
        moment_state = state
    else:
        rho = as_density(state)
        symmetric = symmetry_residual(rho) <= 1e-10
        moment_state = full_to_dicke(rho) if symmetric else rho

    needs_moments = any(c != "prep-certificate" for c in criteria_ids)
    mom = moments(moment_state) if needs_moments else None

    entries = [_run_one(cid, moment_state, mom, symmetric, cfg) for cid in criteria_ids]
    oracle_block = None
    if with_oracle and nq <= ORACLE_MAX_QUBITS:
        oracle_block = _oracle_block(state, entries, symmetric)
    return Report(
        tool_version=__version__,
        input_digest=canonical_digest(state),
        n_qubits=nq,
        symmetric=symmetric,
        seed=cfg.seed,
        criteria=entries,
        oracle=oracle_block,
    )


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

SUITE_IDS = ("identities", "equivalence-n2", "equivalence-n3", "proportionality", "prep-roundtrip")

_SUITE_DEFAULT_SAMPLES = {
    "identities": 0,
    "equivalence-n2": 500,
    "equivalence-n3": 200,
    "proportionality": 100,
    "prep-roundtrip": 50,
}


def _suite_identities(samples: int, seed: int) -> tuple[bool, dict]:
    from .spin import pair_identity_residual, triple_identity_residual

    pair = {n: pair_identity_residual(n) for n in range(2, 7)}
    triple = {n: triple_identity_residual(n) for n in range(3, 7)}
    passed = max(pair.values()) <= 1e-12 and max(triple.values()) <= 1e-11
    return passed, {
        "pair_residuals": {str(k): v for k, v in pair.items()},
        "triple_residuals": {str(k): v for k, v in triple.items()},
        "pair_threshold": 1e-12,
        "triple_threshold": 1e-11,
    }


def _suite_equivalence(n_qubits: int, samples: int, seed: int) -> tuple[bool, dict]:
    if n_qubits == 2:
        cfg = search.SearchConfig(seed=seed, restarts=8, refine_iters=60)
    else:
        cfg = search.SearchConfig(seed=seed, restarts=8, refine_iters=50, coarse_grid=12)
    summary = oracle.equivalence_suite(n_qubits, samples, cfg)
    return summary.passed, summary.to_dict()


def _suite_proportionality(samples: int, seed: int) -> tuple[bool, dict]:
    summary = oracle.proportionality_suite((3, 4, 5), samples, seed)
    return summary.passed, summary.to_dict()


def _suite_prep_roundtrip(samples: int, seed: int) -> tuple[bool, dict]:
    import math

    from .oracle import RandomStateSpec, generate
    from .states import build_named_state

    rng = np.random.default_rng(seed)
    worst_roundtrip = 0.0
    for i in range(samples):
        n = int(rng.integers(1, 7))
        rank = int(rng.integers(1, n + 2))
        d = generate(RandomStateSpec("mixed_symmetric", n, seed + 13 * i, rank=rank))
        rec = prep.p_reconstruct(prep.p_expand(d))
        worst_roundtrip = max(worst_roundtrip, float(np.abs(rec - d.matrix).max()))

    zero = DickeCoefficients(1, np.diag([1.0, 0.0]).astype(complex))
    c = prep.p_expand(zero)
    closed_form_err = max(
        abs(c.get(0, 0) - 1.0 / math.sqrt(4.0 * math.pi)),
        abs(c.get(1, 0) - math.sqrt(3.0 / (4.0 * math.pi))),
        abs(c.get(1, 1)),
        abs(c.get(1, -1)),
    )

    worst_pairing = 0.0
    for i in range(5):
        d = generate(RandomStateSpec("mixed_symmetric", 3, seed + 977 * i, rank=4))
        c = prep.p_expand(d)
        full = as_density(d)
        for kind in ("ghz", "w1", "w2"):
            w = criteria.witness_matrix(kind)
            direct = float(np.trace(full.matrix @ w).real)
            worst_pairing = max(worst_pairing, abs(direct - prep.expectation_from_p(c, w)))

    mixture = generate(RandomStateSpec("coherent_mixture", 3, seed + 5, terms=4))
    cert_mixture = prep.separability_certificate(mixture)
    ghz = full_to_dicke(build_named_state("ghz", 3).density())
    cert_ghz = prep.separability_certificate(ghz)

    passed = (
        worst_roundtrip <= 1e-8
        and closed_form_err <= 1e-10
        and worst_pairing <= 1e-8
        and cert_mixture.certified
        and not cert_ghz.certified
    )
    return passed, {
        "roundtrip_worst": worst_roundtrip,
        "closed_form_err": closed_form_err,
        "witness_pairing_worst": worst_pairing,
        "coherent_mixture_certified": cert_mixture.certified,
        "ghz_certified": cert_ghz.certified,
        "samples": samples,
    }


def run_verify(suite: str, samples: int | None = None, seed: int = 0) -> tuple[bool, dict]:
    if suite not in SUITE_IDS:
        raise ParameterError(f"unknown suite {suite!r}; valid: {', '.join(SUITE_IDS)}")
    n = samples if samples is not None else _SUITE_DEFAULT_SAMPLES[suite]
    if suite == "identities":
        return _suite_identities(n, seed)
    if suite == "equivalence-n2":
        return _suite_equivalence(2, n, seed)
    if suite == "equivalence-n3":
        return _suite_equivalence(3, n, seed)
    if suite == "proportionality":
        return _suite_proportionality(n, seed)
    return _suite_prep_roundtrip(n, seed)
