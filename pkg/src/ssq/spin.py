"""Collective spin operators, moment tensors, Pauli structure constants, and
the pair/triple operator identities that link site sums to collective moments.

Greek-style indices run 0..3: index 0 is the scalar component J^0 = (N/2) * 1,
indices 1..3 are the x, y, z collective components J^i = sum_a sigma^i_a / 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ResourceLimitError
from .states import DickeCoefficients, as_density

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

DEFAULT_MAX_QUBITS = 12
DENSE_MOMENT_MAX_QUBITS = 10

UNIT_TOL = 1e-10


def structure_constants() -> np.ndarray:
    """Table f with sigma^a sigma^b = sum_mu f[a, b, mu] sigma^mu.

    f[0,a,b] = f[a,0,b] = delta_ab;  f[i,j,mu] = i eps_ijl delta_mu^l
    + delta_ij delta_mu^0.
    """
    f = np.zeros((4, 4, 4), dtype=complex)
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1.0
    for a in range(4):
        f[0, a, a] = 1.0
        f[a, 0, a] = 1.0
    for i in range(1, 4):
        for j in range(1, 4):
            if i == j:
                f[i, j, 0] = 1.0
            else:
                for l in range(1, 4):
                    f[i, j, l] = 1j * eps[i - 1, j - 1, l - 1]
    return f


F_TABLE = structure_constants()


def embed_site_operator(op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    """1 x ... x op x ... x 1 with op acting on the given qubit."""
    left = np.eye(2**site)
    right = np.eye(2 ** (n_qubits - site - 1))
    return np.kron(np.kron(left, op), right)


@dataclass(frozen=True)
class SpinOperators:
    """The four collective operators J^0..J^3 for N qubits.

    space is "full" (2^N dimensional) or "dicke" (N+1 dimensional, valid for
    states supported on the symmetric subspace).
    """

    n_qubits: int
    J: tuple
    space: str = "full"


def collective_spin(n_qubits: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> SpinOperators:
    """Dense collective spin operators on the full 2^N space."""
    if n_qubits < 1:
        raise ParameterError("n_qubits must be >= 1")
    if n_qubits > max_qubits:
        raise ResourceLimitError(f"n_qubits={n_qubits} exceeds the cap of {max_qubits}")
    d = 2**n_qubits
    ops = [np.eye(d, dtype=complex) * (n_qubits / 2.0)]
    for i in (1, 2, 3):
        acc = np.zeros((d, d), dtype=complex)
        for a in range(n_qubits):
            acc += embed_site_operator(PAULI[i], a, n_qubits)
        ops.append(acc / 2.0)
    return SpinOperators(n_qubits, tuple(map(_readonly, ops)), "full")


def dicke_collective_spin(n_qubits: int) -> SpinOperators:
    """Collective spin operators restricted to the (N+1)-dim Dicke basis.

    Index m counts excitations, so J_z |m> = (N/2 - m)|m> and the lowering
    operator J_- raises m by one.
    """
    if n_qubits < 1:
        raise ParameterError("n_qubits must be >= 1")
    n = n_qubits
    m = np.arange(n + 1)
    jz = np.diag((n / 2.0 - m).astype(complex))
    amp = np.sqrt((m[:-1] + 1.0) * (n - m[:-1]))
    jminus = np.zeros((n + 1, n + 1), dtype=complex)
    jminus[m[:-1] + 1, m[:-1]] = amp
    jplus = jminus.conj().T
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    j0 = np.eye(n + 1, dtype=complex) * (n / 2.0)
    return SpinOperators(n, tuple(map(_readonly, (j0, jx, jy, jz))), "dicke")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def rotated_component(ops: SpinOperators, direction) -> np.ndarray:
    """J_n = n . (J^1, J^2, J^3) for a unit 3-vector n."""
    n = np.asarray(direction, dtype=float).reshape(3)
    if abs(np.linalg.norm(n) - 1.0) > UNIT_TOL:
        raise ParameterError(f"direction must be a unit vector, |n| = {np.linalg.norm(n)!r}")
    return n[0] * ops.J[1] + n[1] * ops.J[2] + n[2] * ops.J[3]


@dataclass(frozen=True)
class MomentTensors:
    """First, second and third operator-ordered moments of J^0..J^3.

    m1[a] = <J^a> (real), m2[a,b] = <J^a J^b>, m3[a,b,c] = <J^a J^b J^c>.
    """

    n_qubits: int
    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray

    def mean_spin(self) -> np.ndarray:
        return self.m1[1:].copy()

    def second_moment(self, u, v) -> complex:
        """<J_u J_v> for 3-vectors u, v."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return complex(u @ self.m2[1:, 1:] @ v)

    def third_moment(self, u, v, w) -> complex:
        """<J_u J_v J_w> for 3-vectors u, v, w."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        return complex(np.einsum("a,b,c,abc->", u, v, w, self.m3[1:, 1:, 1:]))


def moments(state, ops: SpinOperators | None = None) -> MomentTensors:
    """All moment tensors <J^a>, <J^a J^b>, <J^a J^b J^c> of a state.

    Symmetric states given as DickeCoefficients are handled in the Dicke
    basis; dense states use the full-space operators (capped in size).
    """
    if isinstance(state, DickeCoefficients):
        if ops is None or ops.space != "dicke" or ops.n_qubits != state.n_qubits:
            ops = dicke_collective_spin(state.n_qubits)
        rho = state.matrix
        n = state.n_qubits
    else:
        rho_full = as_density(state)
        n = rho_full.n_qubits
        if ops is None or ops.space != "full" or ops.n_qubits != n:
            if n > DENSE_MOMENT_MAX_QUBITS:
                raise ResourceLimitError(
                    f"dense moment tensors are capped at {DENSE_MOMENT_MAX_QUBITS} qubits; "
                    "supply the state in the Dicke representation if it is symmetric"
                )
            ops = collective_spin(n)
        rho = rho_full.matrix
    js = ops.J
    if js[0].shape != rho.shape:
        raise ParameterError("operator dimension does not match the state")
    prod = [[js[b] @ js[c] for c in range(4)] for b in range(4)]
    left = [rho @ js[a] for a in range(4)]
    m1 = np.array([np.trace(left[a]) for a in range(4)])
    if np.abs(m1.imag).max() > 1e-9:
        raise ParameterError("first moments acquired an imaginary part; state is not Hermitian")
    m2 = np.array([[np.sum(left[a] * js[b].T) for b in range(4)] for a in range(4)])
    m3 = np.array(
        [[[np.sum(left[a] * prod[b][c].T) for c in range(4)] for b in range(4)] for a in range(4)]
    )
    return MomentTensors(n, m1.real, m2, m3)


# ---------------------------------------------------------------------------
# operator identities
# ---------------------------------------------------------------------------


def _site_paulis(n_qubits: int) -> list:
    return [[embed_site_operator(PAULI[a], site, n_qubits) for a in range(4)] for site in range(n_qubits)]


def pair_identity_residual(n_qubits: int) -> float:
    """Residual of sum_{a<b} sigma^i_a sigma^i_b = 2 (J^i)^2 - N/2, max over i."""
    if n_qubits < 2:
        raise ParameterError("the pair identity needs n_qubits >= 2")
    ops = collective_spin(n_qubits)
    site = _site_paulis(n_qubits)
    d = 2**n_qubits
    worst = 0.0
    for i in (1, 2, 3):
        lhs = np.zeros((d, d), dtype=complex)
        for a, b in itertools.combinations(range(n_qubits), 2):
            lhs += site[a][i] @ site[b][i]
        rhs = 2.0 * (ops.J[i] @ ops.J[i]) - (n_qubits / 2.0) * np.eye(d)
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    return worst


def triple_identity_residual(n_qubits: int) -> float:
    """Residual of the symmetrized three-site identity

        3 sum_{a<b<c} sigma_a^(alpha) sigma_b^beta sigma_c^(gamma)
          = 4 J^(alpha J^beta J^gamma) - 6 f^(alpha beta)_mu J^gamma J^mu)
            + 2 f^(alpha beta)_mu f^(gamma mu))_nu J^nu

    where round brackets denote averaging over all permutations of
    (alpha, beta, gamma).  Max spectral-norm residual over all index triples.
    """
    if n_qubits < 3:
        raise ParameterError("the triple identity needs n_qubits >= 3")
    ops = collective_spin(n_qubits)
    site = _site_paulis(n_qubits)
    f = F_TABLE
    d = 2**n_qubits
    perms = list(itertools.permutations(range(3)))
    triples = list(itertools.combinations(range(n_qubits), 3))
    jj = [[ops.J[a] @ ops.J[b] for b in range(4)] for a in range(4)]
    worst = 0.0
    for alpha, beta, gamma in itertools.product(range(4), repeat=3):
        idx = (alpha, beta, gamma)
        lhs = np.zeros((d, d), dtype=complex)
        rhs = np.zeros((d, d), dtype=complex)
        for p in perms:
            a, b, c = idx[p[0]], idx[p[1]], idx[p[2]]
            for s1, s2, s3 in triples:
                lhs += site[s1][a] @ site[s2][b] @ site[s3][c]
            term = 4.0 * (jj[a][b] @ ops.J[c])
            for mu in range(4):
                if f[a, b, mu] != 0:
                    term = term - 6.0 * f[a, b, mu] * jj[c][mu]
                    for nu in range(4):
                        if f[c, mu, nu] != 0:
                            term = term + 2.0 * f[a, b, mu] * f[c, mu, nu] * ops.J[nu]
            rhs += term
        lhs *= 3.0 / len(perms)
        rhs /= len(perms)
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    return worst
