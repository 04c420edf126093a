"""Derivative-free searches for criterion-violating parameters: directions on
the sphere, orthonormal frames, and SL(2,C)-generated Lorentz pairs.

All searches are deterministic given the seed: a coarse scan (grid or seeded
restarts) followed by compass/pattern refinement with shrinking steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from . import criteria
from .errors import NoAdmissibleFrameError, ParameterError
from .lorentz import frame_from_euler, sl2c_from_params

_REFINE_TOP = 3
_STEP_FLOOR = 1e-7


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    coarse_grid: int = 24
    restarts: int = 32
    rapidity_cap: float = 5.0
    refine_iters: int = 200
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.coarse_grid < 1 or self.restarts < 1 or self.refine_iters < 1:
            raise ParameterError("grid, restarts and refine_iters must be positive")
        if not 0 < self.rapidity_cap <= 20.0:
            raise ParameterError("rapidity_cap must lie in (0, 20]")
        if self.tolerance <= 0:
            raise ParameterError("tolerance must be positive")


@dataclass(frozen=True)
class OptimizationResult:
    best_margin: float
    best_params: dict = field(default_factory=dict)
    evaluations: int = 0
    converged: bool = False


def _pattern_search(fn, x0, steps, max_sweeps, lower=None, upper=None):
    """Compass search with shrinking steps; returns (x, fx, evals, converged)."""
    x = np.array(x0, dtype=float)
    step = np.array(steps, dtype=float)
    fx = fn(x)
    evals = 1
    for _ in range(max_sweeps):
        improved = False
        for i in range(x.size):
            for sgn in (1.0, -1.0):
                xt = x.copy()
                xt[i] += sgn * step[i]
                if lower is not None:
                    xt[i] = max(xt[i], lower[i])
                if upper is not None:
                    xt[i] = min(xt[i], upper[i])
                ft = fn(xt)
                evals += 1
                if ft < fx - 1e-15:
                    x, fx = xt, ft
                    improved = True
        if not improved:
            step *= 0.5
            if float(step.max()) < _STEP_FLOOR:
                return x, fx, evals, True
    return x, fx, evals, False


def _sphere_vec(theta: float, phi: float) -> np.ndarray:
    s = math.sin(theta)
    return np.array([s * math.cos(phi), s * math.sin(phi), math.cos(theta)])


# ---------------------------------------------------------------------------
# direction search (pair criterion)
# ---------------------------------------------------------------------------


def optimize_direction(
    state, cfg: SearchConfig = SearchConfig(), symmetric: bool | None = None
) -> OptimizationResult:
    """Minimize the pair-criterion margin over the unit sphere.

    Symmetric states use the sharp margin (necessary and sufficient); other
    states use the angle-restricted sound form.  When `symmetric` is None it
    is read off the total-spin sum rule.
    """
    mom = criteria.as_moments(state)
    nq = mom.n_qubits
    if nq < 2:
        raise ParameterError("the pair criterion needs at least 2 qubits")
    if symmetric is None:
        symmetric = criteria.is_symmetric_moments(mom)
    mean = mom.mean_spin()
    s2 = mom.m2[1:, 1:].real
    offset = nq * (nq - 2.0) / 4.0
    quarter = nq * nq / 4.0

    if symmetric:

        def margin_of(vecs: np.ndarray) -> np.ndarray:
            mn = vecs @ mean
            vn = np.einsum("...i,ij,...j->...", vecs, s2, vecs)
            return vn + offset - np.hypot(quarter - vn, (nq - 1.0) * mn)

    else:

        def margin_of(vecs: np.ndarray) -> np.ndarray:
            mn = vecs @ mean
            vn = np.einsum("...i,ij,...j->...", vecs, s2, vecs)
            return vn + offset - (nq - 1.0) * np.abs(mn)

    g = cfg.coarse_grid
    thetas = np.linspace(0.0, math.pi, g)
    phis = np.linspace(0.0, 2.0 * math.pi, g, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    grid = np.stack(
        [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1
    ).reshape(-1, 3)
    values = margin_of(grid)
    best = int(np.argmin(values))
    evals = values.size
    x0 = np.array([tt.reshape(-1)[best], pp.reshape(-1)[best]])

    def scalar(x):
        return float(margin_of(_sphere_vec(x[0], x[1])))

    x, _, used, converged = _pattern_search(
        scalar, x0, [math.pi / g, 2.0 * math.pi / g], cfg.refine_iters
    )
    evals += used
    direction = _sphere_vec(x[0], x[1])
    if symmetric:
        final = criteria.bipartite_margin(mom, direction)
    else:
        final = criteria.bipartite_margin_general(mom, direction)
    return OptimizationResult(
        best_margin=final,
        best_params={"direction": direction.tolist(), "symmetric": symmetric},
        evaluations=evals,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# frame search (third-moment criteria)
# ---------------------------------------------------------------------------


def optimize_frame(state, kind: str, cfg: SearchConfig = SearchConfig()) -> OptimizationResult:
    """Minimize one of the third-moment criteria over SO(3) frames.

    For the primed kinds, frames violating the zero-mean / variance-floor
    preconditions are excluded; if no grid frame is admissible the search
    raises NoAdmissibleFrameError.
    """
    kd = kind.lower()
    if kd not in criteria.SS_KINDS:
        raise ParameterError(f"unknown ss kind {kind!r}")
    mom = criteria.as_moments(state)
    if mom.n_qubits < 3:
        raise ParameterError("third-moment criteria need at least 3 qubits")

    def value_of(euler) -> float:
        try:
            return criteria.ss_value(mom, kd, frame_from_euler(*euler))
        except criteria.FrameConstraintError:
            return math.inf

    g = cfg.coarse_grid
    aa = np.linspace(0.0, 2.0 * math.pi, g, endpoint=False)
    bb = np.linspace(0.0, math.pi, g)
    cc = np.linspace(0.0, 2.0 * math.pi, g, endpoint=False)
    am, bm, cm = np.meshgrid(aa, bb, cc, indexing="ij")
    angles = np.stack([am.reshape(-1), bm.reshape(-1), cm.reshape(-1)], axis=-1)
    rot = Rotation.from_euler("zyz", angles).as_matrix()
    k, l, n = rot[:, :, 0], rot[:, :, 1], rot[:, :, 2]

    mean = mom.mean_spin()
    s2 = mom.m2[1:, 1:].real
    s3 = mom.m3[1:, 1:, 1:]
    nq = mom.n_qubits
    const = float(criteria.ss_constant(kd, nq))

    def second(v):
        return np.einsum("bi,ij,bj->b", v, s2, v)

    def third(u, v, w):
        return np.einsum("bi,bj,bk,ijk->b", u, v, w, s3).real

    mk = k @ mean
    mn = n @ mean
    vk2, vl2, vn2 = second(k), second(l), second(n)
    if kd in ("ss1", "ss3"):
        values = -third(k, k, k) / 3.0 + third(l, k, l) - (nq - 2.0) / 2.0 * vn2 + mk / 3.0 + const
    elif kd == "ss2":
        values = (
            third(n, n, n)
            - 2.0 * third(l, n, l)
            - 2.0 * third(k, n, k)
            - (nq - 2.0) / 2.0 * (2.0 * vk2 + 2.0 * vl2 - vn2)
            - (nq * nq - 4.0 * nq + 8.0) / 4.0 * mn
            + const
        )
    else:
        tol = criteria.FRAME_PRECONDITION_TOL
        floor = nq / 4.0 - tol
        admissible = (
            (np.abs(mk) <= tol) & (np.abs(mn) <= tol) & (vk2 >= floor) & (vn2 >= floor)
        )
        if not admissible.any():
            raise NoAdmissibleFrameError(
                f"no admissible frame found for {kd} on the coarse grid"
            )
        values = np.where(admissible, -third(k, k, k) / 3.0 + third(l, k, l) + const, np.inf)

    best = int(np.argmin(values))
    evals = values.size
    x0 = angles[best]
    steps = [2.0 * math.pi / g, math.pi / g, 2.0 * math.pi / g]
    x, _, used, converged = _pattern_search(value_of, x0, steps, cfg.refine_iters)
    evals += used
    frame = frame_from_euler(*x)
    final = criteria.ss_value(mom, kd, frame)
    return OptimizationResult(
        best_margin=final,
        best_params={
            "frame": {"k": frame.k.tolist(), "l": frame.l.tolist(), "n": frame.n.tolist()},
            "euler_zyz": x.tolist(),
        },
        evaluations=evals,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# Lorentz-pair search (tripartite criterion)
# ---------------------------------------------------------------------------

# axis-pi twists of the first SL(2,C) element; the y-pi twist maps a family
# projector onto the sign structure of its own partial transpose
_TWIST_ROTVECS = (
    np.zeros(3),
    np.array([math.pi, 0.0, 0.0]),
    np.array([0.0, math.pi, 0.0]),
    np.array([0.0, 0.0, math.pi]),
)


def _fast_lorentz(a: np.ndarray, star: bool) -> np.ndarray:
    from .spin import PAULI

    if star:
        a = a.conj()
    conj = np.matmul(np.matmul(a, PAULI), a.conj().T)
    return 0.5 * np.tensordot(conj, PAULI, axes=([1, 2], [2, 1])).real


def optimize_lorentz(
    state, family: str, cfg: SearchConfig = SearchConfig(), mode: str | None = None
) -> OptimizationResult:
    """Minimize the tripartite margin over (Lambda, L) pairs for the GHZ
    family or (Lambda, R) pairs for the W family.

    SL(2,C) elements are generated as U1 boost(r) U2 with Haar-seeded SU(2)
    factors and rapidity in [0, rapidity_cap]; deterministic in cfg.seed.
    mode None picks "symmetric" or "general" (cyclic-averaged K) from the
    total-spin sum rule.
    """
    fam = family.lower()
    if fam not in criteria.K_FAMILIES:
        raise ParameterError(f"unknown K family {family!r}")
    if mode not in ("symmetric", "general", None):
        raise ParameterError(f"unknown mode {mode!r}")
    mom = criteria.as_moments(state)
    if mode is None:
        mode = "symmetric" if criteria.is_symmetric_moments(mom) else "general"
    if mom.n_qubits < 3:
        raise ParameterError("the tripartite criterion needs at least 3 qubits")
    xsym = criteria.tripartite_contraction(mom)
    base = criteria._BASE_K[fam]
    cap = cfg.rapidity_cap
    dim = 14 if fam == "ghz" else 10

    def tensors_of(x: np.ndarray):
        x = np.asarray(x, dtype=float)
        a = sl2c_from_params(x[0:3], float(np.clip(x[3], 0.0, cap)), x[4:7])
        lam = _fast_lorentz(a, star=True)
        if fam == "ghz":
            b = sl2c_from_params(x[7:10], float(np.clip(x[10], 0.0, cap)), x[11:14])
        else:
            b = sl2c_from_params(x[7:10], 0.0, np.zeros(3))
        sec = _fast_lorentz(b, star=False)
        return a, b, lam, sec

    def _contract(m1: np.ndarray, m2: np.ndarray, m3: np.ndarray) -> float:
        # sum_pqr base_pqr (m1 X m2^T m3^T)_pqr over the three slots of X
        t = np.tensordot(xsym, m2, axes=(1, 1))  # (a, c, q)
        t = np.tensordot(t, m3, axes=(1, 1))  # (a, q, r)
        t = np.tensordot(m1, t, axes=(1, 0))  # (p, q, r)
        return float(np.sum(base * t))

    if mode == "symmetric":

        def margin_of(x: np.ndarray) -> float:
            _, _, lam, sec = tensors_of(x)
            return _contract(lam, sec, sec)

    else:

        def margin_of(x: np.ndarray) -> float:
            _, _, lam, sec = tensors_of(x)
            return (
                _contract(lam, sec, sec) + _contract(sec, lam, sec) + _contract(sec, sec, lam)
            ) / 3.0

    rng = np.random.default_rng(cfg.seed)
    starts = []
    for tw in _TWIST_ROTVECS:
        x = np.zeros(dim)
        x[0:3] = tw
        starts.append(x)
    while len(starts) < max(cfg.restarts, len(starts)):
        x = np.zeros(dim)
        q = rng.normal(size=4)
        x[0:3] = Rotation.from_quat(q / np.linalg.norm(q)).as_rotvec()
        x[3] = rng.uniform(0.0, cap)
        q = rng.normal(size=4)
        x[4:7] = Rotation.from_quat(q / np.linalg.norm(q)).as_rotvec()
        q = rng.normal(size=4)
        x[7:10] = Rotation.from_quat(q / np.linalg.norm(q)).as_rotvec()
        if fam == "ghz":
            x[10] = rng.uniform(0.0, cap)
            q = rng.normal(size=4)
            x[11:14] = Rotation.from_quat(q / np.linalg.norm(q)).as_rotvec()
        starts.append(x)

    scored = [(margin_of(x), i) for i, x in enumerate(starts)]
    evals = len(starts)
    scored.sort(key=lambda t: (t[0], t[1]))

    lower = np.full(dim, -np.inf)
    upper = np.full(dim, np.inf)
    lower[3], upper[3] = 0.0, cap
    if fam == "ghz":
        lower[10], upper[10] = 0.0, cap
    steps = np.full(dim, 0.4)
    steps[3] = 0.3
    if fam == "ghz":
        steps[10] = 0.3

    best_x, best_f, converged = None, math.inf, False
    for _, idx in scored[:_REFINE_TOP]:
        x, fx, used, conv = _pattern_search(
            margin_of, starts[idx], steps, cfg.refine_iters, lower, upper
        )
        evals += used
        if fx < best_f:
            best_x, best_f, converged = x, fx, conv

    a, b, lam, sec = tensors_of(best_x)
    if mode == "symmetric":
        kt = criteria.k_tensor(fam, lam, sec)
    else:
        kt = criteria.k_tensor_cyclic_average(fam, lam, sec)
    final = criteria.tripartite_margin(xsym, kt, mode)
    params = {
        "family": fam,
        "a": [[z.real, z.imag] for z in a.reshape(-1)],
        "b": [[z.real, z.imag] for z in b.reshape(-1)],
        "lambda": lam.tolist(),
        "second": sec.tolist(),
        "mode": mode,
    }
    return OptimizationResult(
        best_margin=final, best_params=params, evaluations=evals, converged=converged
    )
