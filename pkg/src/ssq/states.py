"""Dense N-qubit state algebra: state construction, partial trace/transpose,
expectations, and the symmetric (Dicke) subspace embedding.

Bit ordering convention: qubit 0 is the most significant bit of the basis
index, i.e. basis index = sum_a bit_a * 2**(n-1-a).  Tensor products built
with np.kron follow the same order (first factor = qubit 0).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError, RepresentationError, StateFormatError

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
NORM_TOL = 1e-12
PSD_TOL = -1e-10
SYMMETRY_RESIDUAL_TOL = 1e-10
FILE_TOL = 1e-8


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _min_eigenvalue(h: np.ndarray) -> float:
    if h.shape[0] <= 1024:
        return float(np.linalg.eigvalsh(h)[0])
    from scipy.sparse.linalg import eigsh

    val = eigsh(h, k=1, which="SA", return_eigenvectors=False)
    return float(val[0])


@dataclass(frozen=True)
class PureState:
    """Pure state of n qubits as a normalized amplitude vector of length 2**n."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ParameterError("n_qubits must be >= 1")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**self.n_qubits:
            raise ParameterError(
                f"amplitude vector has length {amps.shape[0]}, expected {2**self.n_qubits}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm**2 - 1.0) > 1e-10:
            raise ParameterError(f"state not normalized: |psi|^2 = {norm**2!r}")
        object.__setattr__(self, "amplitudes", _freeze(amps / norm))

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, trace-one matrix on the 2**n dimensional space."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ParameterError("n_qubits must be >= 1")
        m = np.asarray(self.matrix, dtype=complex)
        d = 2**self.n_qubits
        if m.shape != (d, d):
            raise ParameterError(f"matrix has shape {m.shape}, expected {(d, d)}")
        if np.abs(m - m.conj().T).max() > 1e-10:
            raise ParameterError("matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > 1e-8:
            raise ParameterError(f"trace is {tr!r}, expected 1")
        m = m / tr.real
        if _min_eigenvalue(m) < PSD_TOL:
            raise ParameterError("matrix has a negative eigenvalue beyond tolerance")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


@dataclass(frozen=True)
class DickeCoefficients:
    """Symmetric state stored as an (N+1) x (N+1) matrix in the Dicke basis.

    Row/column index m counts excited qubits (number of 1 bits), ascending.
    """

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ParameterError("n_qubits must be >= 1")
        m = np.asarray(self.matrix, dtype=complex)
        d = self.n_qubits + 1
        if m.shape != (d, d):
            raise ParameterError(f"matrix has shape {m.shape}, expected {(d, d)}")
        if np.abs(m - m.conj().T).max() > 1e-10:
            raise ParameterError("matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > 1e-8:
            raise ParameterError(f"trace is {tr!r}, expected 1")
        m = m / tr.real
        if float(np.linalg.eigvalsh(m)[0]) < PSD_TOL:
            raise ParameterError("matrix has a negative eigenvalue beyond tolerance")
        object.__setattr__(self, "matrix", _freeze(m))


def check_subsystems(kept: Iterable[int], n_qubits: int) -> tuple[int, ...]:
    """Validate a strictly increasing, non-empty selection of qubit indices."""
    kept = tuple(int(q) for q in kept)
    if not kept:
        raise ParameterError("subsystem selection must be non-empty")
    if any(q < 0 or q >= n_qubits for q in kept):
        raise ParameterError(f"qubit index out of range for n={n_qubits}: {kept}")
    if any(b <= a for a, b in zip(kept, kept[1:])):
        raise ParameterError(f"qubit indices must be strictly increasing: {kept}")
    return kept


# ---------------------------------------------------------------------------
# named state families
# ---------------------------------------------------------------------------


def coherent_qubit(theta: float, phi: float) -> np.ndarray:
    """Single-qubit spin coherent state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return np.array(
        [math.cos(theta / 2.0), np.exp(1j * phi) * math.sin(theta / 2.0)], dtype=complex
    )


def build_named_state(family: str, n_qubits: int, **params) -> PureState:
    """Construct one of the named pure-state families.

    family: "ghz" | "w" | "coherent" (theta, phi) | "computational" (bits)
    | "psi0" (alpha, n_qubits must be 2).
    """
    fam = family.lower()
    if n_qubits < 1:
        raise ParameterError("n_qubits must be >= 1")
    d = 2**n_qubits
    if fam == "ghz":
        if n_qubits < 2:
            raise ParameterError("GHZ needs n_qubits >= 2")
        amps = np.zeros(d, dtype=complex)
        amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
        return PureState(n_qubits, amps)
    if fam == "w":
        if n_qubits < 2:
            raise ParameterError("W needs n_qubits >= 2")
        amps = np.zeros(d, dtype=complex)
        for a in range(n_qubits):
            amps[1 << (n_qubits - 1 - a)] = 1.0 / math.sqrt(n_qubits)
        return PureState(n_qubits, amps)
    if fam == "coherent":
        theta = float(params["theta"])
        phi = float(params.get("phi", 0.0))
        one = coherent_qubit(theta, phi)
        amps = np.array([1.0], dtype=complex)
        for _ in range(n_qubits):
            amps = np.kron(amps, one)
        return PureState(n_qubits, amps)
    if fam == "computational":
        bits = str(params["bits"])
        if len(bits) != n_qubits or any(b not in "01" for b in bits):
            raise ParameterError(f"bits must be a length-{n_qubits} 0/1 string, got {bits!r}")
        amps = np.zeros(d, dtype=complex)
        amps[int(bits, 2)] = 1.0
        return PureState(n_qubits, amps)
    if fam == "psi0":
        if n_qubits != 2:
            raise ParameterError("psi0 is a 2-qubit family")
        alpha = float(params["alpha"])
        if not -math.pi <= alpha <= math.pi:
            raise ParameterError("alpha must lie in [-pi, pi]")
        amps = np.zeros(4, dtype=complex)
        amps[0] = math.sin(alpha / 2.0)
        amps[3] = math.cos(alpha / 2.0)
        return PureState(2, amps)
    raise ParameterError(f"unknown state family {family!r}")


# ---------------------------------------------------------------------------
# partial trace / partial transpose / expectation
# ---------------------------------------------------------------------------


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on the kept qubits (sorted ascending)."""
    n = rho.n_qubits
    kept = check_subsystems(keep, n)
    t = rho.matrix.reshape((2,) * (2 * n))
    row_labels = list(range(n))
    col_labels = []
    next_label = n
    for q in range(n):
        if q in kept:
            col_labels.append(next_label)
            next_label += 1
        else:
            col_labels.append(q)  # same label as row axis -> traced
    out_labels = [row_labels[q] for q in kept] + [col_labels[q] for q in kept]
    reduced = np.einsum(t, row_labels + col_labels, out_labels)
    k = len(kept)
    return DensityMatrix(k, reduced.reshape(2**k, 2**k))


def partial_transpose(rho: DensityMatrix | np.ndarray, subsystem: int, n_qubits: int | None = None) -> np.ndarray:
    """Transpose the tensor factor of one qubit (w.r.t. the standard basis)."""
    if isinstance(rho, DensityMatrix):
        mat, n = rho.matrix, rho.n_qubits
    else:
        mat = np.asarray(rho, dtype=complex)
        if n_qubits is None:
            n = int(round(math.log2(mat.shape[0])))
        else:
            n = n_qubits
    if not 0 <= subsystem < n:
        raise ParameterError(f"subsystem {subsystem} out of range for n={n}")
    t = mat.reshape((2,) * (2 * n))
    t = np.swapaxes(t, subsystem, n + subsystem)
    return t.reshape(mat.shape).copy()


def expectation(rho: DensityMatrix, op: np.ndarray) -> complex:
    """tr(rho @ op)."""
    op = np.asarray(op)
    if op.shape != rho.matrix.shape:
        raise ParameterError(f"operator shape {op.shape} does not match state {rho.matrix.shape}")
    return complex(np.sum(rho.matrix * op.T))


# ---------------------------------------------------------------------------
# symmetric (Dicke) subspace embedding
# ---------------------------------------------------------------------------


def dicke_isometry(n_qubits: int) -> np.ndarray:
    """Isometry V: C^(N+1) -> C^(2^N); column m is the m-excitation Dicke state."""
    d = 2**n_qubits
    v = np.zeros((d, n_qubits + 1))
    for idx in range(d):
        m = bin(idx).count("1")
        v[idx, m] = 1.0
    for m in range(n_qubits + 1):
        v[:, m] /= math.sqrt(math.comb(n_qubits, m))
    return v


def dicke_to_full(d: DickeCoefficients) -> DensityMatrix:
    v = dicke_isometry(d.n_qubits)
    return DensityMatrix(d.n_qubits, v @ d.matrix @ v.T)


def symmetry_residual(rho: DensityMatrix) -> float:
    """Max-entry distance between rho and its projection onto the symmetric subspace."""
    v = dicke_isometry(rho.n_qubits)
    reduced = v.T @ rho.matrix @ v
    back = v @ reduced @ v.T
    return float(np.abs(rho.matrix - back).max())


def full_to_dicke(rho: DensityMatrix, tol: float = SYMMETRY_RESIDUAL_TOL) -> DickeCoefficients:
    """Project onto the Dicke basis; reject states with weight off the symmetric subspace."""
    res = symmetry_residual(rho)
    if res > tol:
        raise RepresentationError(
            f"state is not supported on the symmetric subspace (residual {res:.3e})"
        )
    v = dicke_isometry(rho.n_qubits)
    return DickeCoefficients(rho.n_qubits, v.T @ rho.matrix @ v)


def dicke_reduction(d: DickeCoefficients, k: int) -> DensityMatrix:
    """Reduced k-qubit state of a symmetric state, computed in the Dicke basis.

    Uses the Vandermonde split of Dicke states over a (k, N-k) bipartition;
    returns the (symmetric) reduction expanded to the full 2^k space.
    """
    n = d.n_qubits
    if not 1 <= k <= n:
        raise ParameterError(f"cannot reduce {n}-qubit state to {k} qubits")
    if k == n:
        return dicke_to_full(d)
    out = np.zeros((k + 1, k + 1), dtype=complex)
    for j in range(k + 1):
        for jp in range(k + 1):
            acc = 0.0 + 0.0j
            for s in range(n - k + 1):
                m, mp = j + s, jp + s
                if m > n or mp > n:
                    continue
                w = math.comb(n - k, s) * math.sqrt(
                    math.comb(k, j) * math.comb(k, jp) / (math.comb(n, m) * math.comb(n, mp))
                )
                acc += d.matrix[m, mp] * w
            out[j, jp] = acc
    return dicke_to_full(DickeCoefficients(k, out))


def coherent_dicke_vector(n_qubits: int, theta: float, phi: float) -> np.ndarray:
    """|theta,phi>^{tensor N} in the Dicke basis (length N+1)."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    m = np.arange(n_qubits + 1)
    binom = np.array([math.comb(n_qubits, int(mm)) for mm in m], dtype=float)
    return np.sqrt(binom) * (c ** (n_qubits - m)) * (np.exp(1j * phi) * s) ** m


# ---------------------------------------------------------------------------
# JSON state files
# ---------------------------------------------------------------------------


def _encode_complex(a: np.ndarray):
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _decode_complex(data, ndim: int) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFormatError(f"malformed complex data: {exc}") from exc
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise StateFormatError(f"complex entries must be [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(state: PureState | DensityMatrix | DickeCoefficients) -> dict:
    if isinstance(state, PureState):
        return {"n_qubits": state.n_qubits, "kind": "pure", "data": _encode_complex(state.amplitudes)}
    if isinstance(state, DensityMatrix):
        return {"n_qubits": state.n_qubits, "kind": "density", "data": _encode_complex(state.matrix)}
    if isinstance(state, DickeCoefficients):
        return {"n_qubits": state.n_qubits, "kind": "dicke", "data": _encode_complex(state.matrix)}
    raise ParameterError(f"cannot serialize {type(state)!r}")


def state_from_dict(obj: dict) -> PureState | DensityMatrix | DickeCoefficients:
    try:
        n = int(obj["n_qubits"])
        kind = obj["kind"]
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFormatError(f"state object missing/invalid fields: {exc}") from exc
    if n < 1:
        raise StateFormatError("n_qubits must be >= 1")
    if kind == "pure":
        amps = _decode_complex(data, 1)
        if amps.shape != (2**n,):
            raise StateFormatError(f"pure state data has shape {amps.shape}, expected ({2**n},)")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > FILE_TOL:
            raise StateFormatError(f"pure state not normalized (|psi|^2 = {norm2!r})")
        return PureState(n, amps / math.sqrt(norm2))
    if kind in ("density", "dicke"):
        d = 2**n if kind == "density" else n + 1
        mat = _decode_complex(data, 2)
        if mat.shape != (d, d):
            raise StateFormatError(f"{kind} data has shape {mat.shape}, expected ({d}, {d})")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > FILE_TOL:
            raise StateFormatError(f"{kind} state trace is {tr!r}, expected 1")
        if np.abs(mat - mat.conj().T).max() > FILE_TOL:
            raise StateFormatError(f"{kind} state is not Hermitian within tolerance")
        try:
            cls = DensityMatrix if kind == "density" else DickeCoefficients
            return cls(n, mat / tr.real)
        except ParameterError as exc:
            raise StateFormatError(str(exc)) from exc
    raise StateFormatError(f"unknown state kind {kind!r}")


def save_state(state, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_dict(state), fh)
        fh.write("\n")


def load_state(path) -> PureState | DensityMatrix | DickeCoefficients:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StateFormatError(f"cannot read state file: {exc}") from exc
    if not isinstance(obj, dict):
        raise StateFormatError("state file must contain a JSON object")
    return state_from_dict(obj)


def as_density(state: PureState | DensityMatrix | DickeCoefficients) -> DensityMatrix:
    """Coerce any supported state container to a full-space DensityMatrix."""
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density()
    if isinstance(state, DickeCoefficients):
        return dicke_to_full(state)
    raise ParameterError(f"unsupported state type {type(state)!r}")
