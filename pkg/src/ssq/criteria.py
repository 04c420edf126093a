"""Entanglement criteria built from collective-spin moments.

Every criterion returns a real margin; margin < 0 means the inequality is
violated and the corresponding entanglement type is flagged.  Detection
thresholds are applied by callers via `margin_verdict`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import FrameConstraintError, ParameterError, ZeroMeanSpinError
from .lorentz import (
    CANONICAL_FRAME,
    Frame,
    check_lorentz,
    is_pure_rotation,
    su2_from_frame,
)
from .spin import F_TABLE, MomentTensors, moments
from .states import build_named_state

DETECTION_TOL = 1e-9
FRAME_PRECONDITION_TOL = 1e-6

SS_KINDS = ("ss1", "ss2", "ss3", "ss1p", "ss2p")
WITNESS_KINDS = ("ghz", "w1", "w2")
K_FAMILIES = ("ghz", "w")


def as_moments(state) -> MomentTensors:
    if isinstance(state, MomentTensors):
        return state
    return moments(state)


def margin_verdict(margin: float, tol: float = DETECTION_TOL) -> str:
    if margin < -tol:
        return "entangled"
    if margin <= tol:
        return "boundary"
    return "not_detected"


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of one criterion on one state."""

    criterion: str
    margin: float | None
    verdict: str
    params: dict = field(default_factory=dict)
    xi_squared: float | None = None
    note: str | None = None


# ---------------------------------------------------------------------------
# spin squeezing parameter
# ---------------------------------------------------------------------------


def xi_squared(state) -> tuple[float, np.ndarray]:
    """Minimal squeezing parameter 2<dJ_n^2>/(N/2) over unit n orthogonal to <J>.

    Solved exactly via the 2x2 covariance eigenproblem in the plane
    orthogonal to the mean spin.  Raises when the mean spin vanishes.
    """
    mom = as_moments(state)
    n_qubits = mom.n_qubits
    mean = mom.mean_spin()
    norm = float(np.linalg.norm(mean))
    if norm < 1e-9:
        raise ZeroMeanSpinError("mean spin vanishes; squeezing direction undefined")
    axis = mean / norm
    anchor = np.zeros(3)
    anchor[int(np.argmin(np.abs(axis)))] = 1.0
    e1 = np.cross(axis, anchor)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    s = mom.m2[1:, 1:].real
    block = np.array([[e1 @ s @ e1, e1 @ s @ e2], [e2 @ s @ e1, e2 @ s @ e2]])
    block = 0.5 * (block + block.T)
    vals, vecs = np.linalg.eigh(block)
    direction = vecs[0, 0] * e1 + vecs[1, 0] * e2
    direction /= np.linalg.norm(direction)
    xi2 = 4.0 * float(vals[0]) / n_qubits
    return xi2, direction


# ---------------------------------------------------------------------------
# bipartite criterion
# ---------------------------------------------------------------------------


def _direction_moments(mom: MomentTensors, direction) -> tuple[float, float]:
    n = np.asarray(direction, dtype=float).reshape(3)
    if abs(np.linalg.norm(n) - 1.0) > 1e-10:
        raise ParameterError("direction must be a unit 3-vector")
    mean = float(mom.mean_spin() @ n)
    second = mom.second_moment(n, n)
    if abs(second.imag) > 1e-9:
        raise ParameterError("<J_n^2> acquired an imaginary part")
    return mean, second.real


def bipartite_margin(state, direction) -> float:
    """Pair-entanglement margin at a fixed direction, minimized analytically
    over the internal angle:

        <J_n^2> + N(N-2)/4 - sqrt((N^2/4 - <J_n^2>)^2 + (N-1)^2 <J_n>^2).

    Negative iff some two-qubit reduction is flagged entangled (necessary and
    sufficient for symmetric states once minimized over the sphere).
    """
    mom = as_moments(state)
    nq = mom.n_qubits
    if nq < 2:
        raise ParameterError("the pair criterion needs at least 2 qubits")
    mean, second = _direction_moments(mom, direction)
    a = nq * nq / 4.0 - second
    b = (nq - 1.0) * mean
    return second + nq * (nq - 2.0) / 4.0 - math.hypot(a, b)


def bipartite_raw(state, direction, alpha: float) -> float:
    """The explicit-angle form sin(a)(N^2/4 - <J_n^2>) - (N-1)cos(a)<J_n>
    + <J_n^2> + N(N-2)/4; its minimum over alpha equals bipartite_margin."""
    if not -math.pi <= alpha <= math.pi:
        raise ParameterError("alpha must lie in [-pi, pi]")
    mom = as_moments(state)
    nq = mom.n_qubits
    if nq < 2:
        raise ParameterError("the pair criterion needs at least 2 qubits")
    mean, second = _direction_moments(mom, direction)
    a = nq * nq / 4.0 - second
    b = (nq - 1.0) * mean
    return math.sin(alpha) * a - math.cos(alpha) * b + second + nq * (nq - 2.0) / 4.0


def bipartite_optimal_alpha(state, direction) -> float:
    """Minimizer of bipartite_raw over alpha for the given direction."""
    mom = as_moments(state)
    nq = mom.n_qubits
    mean, second = _direction_moments(mom, direction)
    a = nq * nq / 4.0 - second
    b = (nq - 1.0) * mean
    return math.atan2(-a, b)


def is_symmetric_moments(mom: MomentTensors, tol: float = 1e-8) -> bool:
    """Support on the symmetric subspace is equivalent to saturating the
    total-spin sum rule sum_i <J_i^2> = (N/2)(N/2 + 1)."""
    total = sum(mom.m2[i, i].real for i in (1, 2, 3))
    return abs(total - (mom.n_qubits / 2.0) * (mom.n_qubits / 2.0 + 1.0)) <= tol


def bipartite_margin_general(state, direction) -> float:
    """Sound pair-entanglement margin for states without permutation
    symmetry: the internal angle is restricted to [0, pi], where the
    collective-moment form upper-bounds the summed pair traces, giving

        <J_n^2> + N(N-2)/4 - (N-1)|<J_n>|.

    For symmetric states use bipartite_margin, which is sharper (and exact).
    """
    mom = as_moments(state)
    nq = mom.n_qubits
    if nq < 2:
        raise ParameterError("the pair criterion needs at least 2 qubits")
    mean, second = _direction_moments(mom, direction)
    return second + nq * (nq - 2.0) / 4.0 - (nq - 1.0) * abs(mean)


def bipartite_normalized_margin(state, direction) -> float:
    """Variance form 4<dJ_n^2>/N - (1 - 4<J_n>^2/N^2); negative iff the
    margin form is negative (for N >= 2)."""
    mom = as_moments(state)
    nq = mom.n_qubits
    if nq < 2:
        raise ParameterError("the pair criterion needs at least 2 qubits")
    mean, second = _direction_moments(mom, direction)
    variance = second - mean * mean
    return 4.0 * variance / nq - (1.0 - 4.0 * mean * mean / (nq * nq))


# ---------------------------------------------------------------------------
# tripartite criterion: K tensors and the symmetrized moment contraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KTensor:
    """Real 4x4x4 coefficient tensor of the three-qubit criterion."""

    family: str
    table: np.ndarray
    cyclic_averaged: bool = False

    def __post_init__(self):
        if self.family not in K_FAMILIES:
            raise ParameterError(f"unknown K family {self.family!r}")
        t = np.asarray(self.table, dtype=float)
        if t.shape != (4, 4, 4):
            raise ParameterError("K tensor must be 4x4x4")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "table", t)


def _pauli_coefficients(op: np.ndarray) -> np.ndarray:
    """c[p,q,r] with op = (1/8) sum c_pqr sigma^p x sigma^q x sigma^r."""
    from .spin import PAULI

    c = np.zeros((4, 4, 4))
    for p, q, r in itertools.product(range(4), repeat=3):
        val = np.trace(op @ np.kron(np.kron(PAULI[p], PAULI[q]), PAULI[r]))
        if abs(val.imag) > 1e-12:
            raise ParameterError("operator has non-real Pauli coefficients")
        c[p, q, r] = val.real
    return c


def _base_k_table(family: str) -> np.ndarray:
    """Identity-parameter K table: the Pauli coefficients of the family
    projector partially transposed on the first qubit."""
    from .states import partial_transpose

    psi = build_named_state("ghz" if family == "ghz" else "w", 3).amplitudes
    proj = np.outer(psi, psi.conj())
    table = _pauli_coefficients(partial_transpose(proj, 0, 3))
    # entries are exact multiples of 1/3 for both families; snap the float dust
    snapped = np.round(table * 3.0) / 3.0
    if np.abs(snapped - table).max() > 1e-12:
        raise ParameterError("unexpected base K table entries")
    snapped.setflags(write=False)
    return snapped


_BASE_K = {fam: _base_k_table(fam) for fam in K_FAMILIES}


def k_table(family: str, lam: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Raw K table without validation (hot path for searches)."""
    return np.einsum("pqr,pa,qb,rc->abc", _BASE_K[family], lam, second, second)


def _k_table_slots(family: str, slot1: np.ndarray, slot2: np.ndarray, slot3: np.ndarray) -> np.ndarray:
    return np.einsum("pqr,pa,qb,rc->abc", _BASE_K[family], slot1, slot2, slot3)


def k_tensor(family: str, lam: np.ndarray, second: np.ndarray) -> KTensor:
    """K tensor of one family from a restricted Lorentz matrix and a second
    Lorentz matrix (which must be a pure rotation for the W family)."""
    fam = family.lower()
    if fam not in K_FAMILIES:
        raise ParameterError(f"unknown K family {family!r}")
    lam = check_lorentz(lam)
    second = check_lorentz(second)
    if fam == "w" and not is_pure_rotation(second):
        raise ParameterError("the W family requires a pure rotation as second argument")
    return KTensor(fam, k_table(fam, lam, second))


def k_tensor_cyclic_average(family: str, lam: np.ndarray, second: np.ndarray) -> KTensor:
    """Average of the three placements of lam among the slots; required for
    states that are not permutation symmetric."""
    fam = family.lower()
    if fam not in K_FAMILIES:
        raise ParameterError(f"unknown K family {family!r}")
    lam = check_lorentz(lam)
    second = check_lorentz(second)
    if fam == "w" and not is_pure_rotation(second):
        raise ParameterError("the W family requires a pure rotation as second argument")
    table = (
        _k_table_slots(fam, lam, second, second)
        + _k_table_slots(fam, second, lam, second)
        + _k_table_slots(fam, second, second, lam)
    ) / 3.0
    return KTensor(fam, table, cyclic_averaged=True)


def tripartite_contraction(state) -> np.ndarray:
    """Symmetrized state-side tensor X with margin = sum_abc K_abc X_abc.

    X_abc = Sym_(abc)[ 2 <J^a J^b J^c> - 3 f^{ab}_m <J^(c J^m)>
                       + f^{ab}_m f^{(cm)}_n <J^n> ].
    Real for any valid state.
    """
    mom = as_moments(state)
    f = F_TABLE
    m2pair = mom.m2 + mom.m2.T
    g = 0.5 * (f + f.transpose(1, 0, 2))
    x = 2.0 * mom.m3
    x = x - 1.5 * np.einsum("abm,cm->abc", f, m2pair)
    x = x + np.einsum("abm,cmn,n->abc", f, g, mom.m1.astype(complex))
    xs = np.zeros((4, 4, 4), dtype=complex)
    for p in itertools.permutations(range(3)):
        xs += np.transpose(x, p)
    xs /= 6.0
    if np.abs(xs.imag).max() > 1e-8:
        raise ParameterError("symmetrized moment contraction is not real; invalid state input")
    return xs.real


def tripartite_margin(state, k: KTensor, mode: str = "symmetric") -> float:
    """Contraction of the K tensor with the symmetrized collective moments.

    mode "general" (for states without permutation symmetry) requires the
    cyclic-averaged K from `k_tensor_cyclic_average`.
    """
    if mode not in ("symmetric", "general"):
        raise ParameterError(f"unknown mode {mode!r}")
    if mode == "general" and not k.cyclic_averaged:
        raise ParameterError("general mode requires a cyclic-averaged K tensor")
    xs = state if isinstance(state, np.ndarray) else tripartite_contraction(state)
    return float(np.sum(k.table * xs))


# ---------------------------------------------------------------------------
# projector witnesses
# ---------------------------------------------------------------------------

_WITNESS_OFFSETS = {"ghz": Fraction(3, 4), "w1": Fraction(2, 3), "w2": Fraction(1, 2)}
_WITNESS_STATE = {"ghz": "ghz", "w1": "w", "w2": "ghz"}


def witness_matrix(kind: str, frame: Frame = CANONICAL_FRAME) -> np.ndarray:
    """8x8 projector witness c*1 - |psi><psi| with |psi> the GHZ or W state
    written in the rotated frame (k, l, n)."""
    kd = kind.lower()
    if kd not in _WITNESS_OFFSETS:
        raise ParameterError(f"unknown witness kind {kind!r}")
    psi = build_named_state(_WITNESS_STATE[kd], 3).amplitudes
    u = su2_from_frame(frame)
    u3 = np.kron(np.kron(u, u), u)
    rotated = u3 @ psi
    proj = np.outer(rotated, rotated.conj())
    return float(_WITNESS_OFFSETS[kd]) * np.eye(8) - proj


# ---------------------------------------------------------------------------
# third-moment (ss) inequalities
# ---------------------------------------------------------------------------


def ss_constant(kind: str, n_qubits: int) -> Fraction:
    """Additive constants of the third-moment inequalities, as exact rationals.

    ss1 uses N(N-2)(5N-2)/24: the witness-sum derivation fixes the middle
    factor to (N-2), and the proportionality suite pins it numerically.
    """
    n = n_qubits
    if kind == "ss1":
        return Fraction(n * (n - 2) * (5 * n - 2), 24)
    if kind == "ss2":
        return Fraction(n * (n - 2) * (13 * n - 4), 24)
    if kind == "ss3":
        return Fraction(n * n * (n - 2), 8)
    if kind == "ss1p":
        return Fraction(n * (5 * n * n - 10 * n + 8), 24)
    if kind == "ss2p":
        return Fraction(n * (n - 1) * (n - 2), 8)
    raise ParameterError(f"unknown ss kind {kind!r}")


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > 1e-8:
        raise ParameterError(f"{what} acquired an imaginary part {value.imag!r}")
    return value.real


def ss_value(state, kind: str, frame: Frame) -> float:
    """Left-hand side of one of the third-moment inequalities in the frame
    (k, l, n); negative flags GHZ-type (ss1/ss1p) or genuine three-qubit
    (ss2/ss3/ss2p) entanglement."""
    kd = kind.lower()
    if kd not in SS_KINDS:
        raise ParameterError(f"unknown ss kind {kind!r}")
    mom = as_moments(state)
    nq = mom.n_qubits
    if nq < 3:
        raise ParameterError("third-moment criteria need at least 3 qubits")
    k, l, n = frame.k, frame.l, frame.n
    mean = mom.mean_spin()
    mk = float(mean @ k)
    mn = float(mean @ n)
    vk2 = _real(mom.second_moment(k, k), "<J_k^2>")
    vl2 = _real(mom.second_moment(l, l), "<J_l^2>")
    vn2 = _real(mom.second_moment(n, n), "<J_n^2>")
    const = float(ss_constant(kd, nq))

    if kd in ("ss1", "ss3"):
        t_kkk = _real(mom.third_moment(k, k, k), "<J_k^3>")
        t_lkl = _real(mom.third_moment(l, k, l), "<J_l J_k J_l>")
        return -t_kkk / 3.0 + t_lkl - (nq - 2.0) / 2.0 * vn2 + mk / 3.0 + const

    if kd == "ss2":
        t_nnn = _real(mom.third_moment(n, n, n), "<J_n^3>")
        t_lnl = _real(mom.third_moment(l, n, l), "<J_l J_n J_l>")
        t_knk = _real(mom.third_moment(k, n, k), "<J_k J_n J_k>")
        return (
            t_nnn
            - 2.0 * t_lnl
            - 2.0 * t_knk
            - (nq - 2.0) / 2.0 * (2.0 * vk2 + 2.0 * vl2 - vn2)
            - (nq * nq - 4.0 * nq + 8.0) / 4.0 * mn
            + const
        )

    # primed kinds: zero-mean and variance-floor preconditions
    tol = FRAME_PRECONDITION_TOL
    if abs(mk) > tol or abs(mn) > tol:
        raise FrameConstraintError(
            f"frame must satisfy <J_k> = <J_n> = 0 (got {mk:.3e}, {mn:.3e})"
        )
    floor = nq / 4.0 - tol
    if vk2 < floor or vn2 < floor:
        raise FrameConstraintError(
            f"frame must satisfy <J_k^2>, <J_n^2> >= N/4 (got {vk2:.6f}, {vn2:.6f})"
        )
    t_kkk = _real(mom.third_moment(k, k, k), "<J_k^3>")
    t_lkl = _real(mom.third_moment(l, k, l), "<J_l J_k J_l>")
    return -t_kkk / 3.0 + t_lkl + const
