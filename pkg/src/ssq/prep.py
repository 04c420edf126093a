"""P-representation of symmetric states: expansion of a symmetric density
matrix over spherical-harmonic coefficients of a quasi-probability P(theta,
phi), reconstruction by quadrature, witness polynomials on the sphere, and a
nonnegative-measure separability certificate.

Harmonics are orthonormal with the Condon-Shortley phase.  A symmetric
N-qubit state fixes only the coefficients with l <= N; this module always
works with that minimal-degree representative (higher-l terms are gauge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .errors import ParameterError, RepresentationError
from .states import (
    DensityMatrix,
    DickeCoefficients,
    coherent_dicke_vector,
    full_to_dicke,
)

try:  # scipy >= 1.15
    from scipy.special import sph_harm_y as _sph_harm_y

    def _ylm(l: int, m: int, theta, phi):
        return _sph_harm_y(l, m, theta, phi)

except ImportError:  # pragma: no cover
    from scipy.special import sph_harm as _sph_harm

    def _ylm(l: int, m: int, theta, phi):
        return _sph_harm(m, l, phi, theta)


RECONSTRUCTION_TOL = 1e-8
CERTIFICATE_MOMENT_TOL = 1e-8
CERTIFICATE_STATE_TOL = 1e-7
CERTIFICATE_RESOLUTIONS = (64, 256, 1024)


def lm_index(l: int, m: int) -> int:
    """Flat index of (l, m) in the packing l**2 + l + m."""
    return l * l + l + m


def lm_pairs(l_max: int):
    for l in range(l_max + 1):
        for m in range(-l, l + 1):
            yield l, m


@dataclass(frozen=True)
class HarmonicCoefficients:
    """Coefficients c_{l,m}, 0 <= l <= N, packed flat as index l^2 + l + m.

    Real-field condition: c_{l,-m} = (-1)^m conj(c_{l,m}).
    """

    n_qubits: int
    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex).reshape(-1)
        expect = (self.n_qubits + 1) ** 2
        if c.shape[0] != expect:
            raise ParameterError(f"expected {expect} coefficients, got {c.shape[0]}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    def get(self, l: int, m: int) -> complex:
        if not (0 <= l <= self.n_qubits and -l <= m <= l):
            raise ParameterError(f"(l, m) = ({l}, {m}) out of range")
        return complex(self.c[lm_index(l, m)])

    def reality_residual(self) -> float:
        worst = 0.0
        for l, m in lm_pairs(self.n_qubits):
            diff = self.c[lm_index(l, -m)] - (-1) ** m * np.conj(self.c[lm_index(l, m)])
            worst = max(worst, abs(diff))
        return worst

    def evaluate(self, theta, phi) -> np.ndarray:
        """P(theta, phi) on arrays of angles (real up to the field condition)."""
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        total = np.zeros(np.broadcast(theta, phi).shape, dtype=complex)
        for l, m in lm_pairs(self.n_qubits):
            total += self.c[lm_index(l, m)] * _ylm(l, m, theta, phi)
        return total.real


@dataclass(frozen=True)
class GridMeasure:
    """Discrete probability measure on the sphere: nodes and weights."""

    nodes: np.ndarray  # (M, 2) rows of (theta, phi)
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if nodes.shape[0] != weights.shape[0]:
            raise ParameterError("nodes and weights must have equal length")
        if (weights < 0).any():
            raise ParameterError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-10:
            raise ParameterError(f"weights must sum to 1, got {weights.sum()!r}")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)


def _as_dicke(state) -> DickeCoefficients:
    if isinstance(state, DickeCoefficients):
        return state
    if isinstance(state, DensityMatrix):
        return full_to_dicke(state)
    raise RepresentationError("the P-representation applies to symmetric states")


def sphere_quadrature(n_qubits: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(theta, phi, weight) nodes exact for the degree <= 2N integrands that
    arise from products of coherent projectors and l <= N harmonics:
    Gauss-Legendre in cos(theta) x uniform in phi."""
    x, wx = np.polynomial.legendre.leggauss(n_qubits + 1)
    n_phi = 2 * n_qubits + 2
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    w_phi = 2.0 * math.pi / n_phi
    theta = np.repeat(np.arccos(x), n_phi)
    phi = np.tile(phis, x.size)
    w = np.repeat(wx, n_phi) * w_phi
    return theta, phi, w


def _coherent_projectors(n_qubits: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """(M, N+1, N+1) stack of coherent-product projectors in the Dicke basis."""
    vs = np.stack([coherent_dicke_vector(n_qubits, t, p) for t, p in zip(theta, phi)])
    return np.einsum("mi,mj->mij", vs, vs.conj())


def _moment_matrix(n_qubits: int) -> np.ndarray:
    """A[(ij), k] with column k the Dicke matrix of integral Y_k(w) proj(w) dW."""
    theta, phi, w = sphere_quadrature(n_qubits)
    projs = _coherent_projectors(n_qubits, theta, phi)
    n_coef = (n_qubits + 1) ** 2
    cols = np.empty((n_coef, (n_qubits + 1) ** 2), dtype=complex)
    for l, m in lm_pairs(n_qubits):
        y = _ylm(l, m, theta, phi)
        mat = np.einsum("m,mij->ij", w * y, projs)
        cols[lm_index(l, m)] = mat.reshape(-1)
    return cols.T


def p_expand(state) -> HarmonicCoefficients:
    """Minimal-degree harmonic coefficients of the P-representation
    rho = integral P(theta,phi) |theta,phi><theta,phi|^{x N} dOmega."""
    dicke = _as_dicke(state)
    n = dicke.n_qubits
    a = _moment_matrix(n)
    try:
        c = np.linalg.solve(a, dicke.matrix.reshape(-1))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - system is full rank for l <= N
        raise ParameterError(f"moment system is singular: {exc}") from exc
    coeffs = np.empty_like(c)
    for l, m in lm_pairs(n):
        coeffs[lm_index(l, m)] = 0.5 * (
            c[lm_index(l, m)] + (-1) ** m * np.conj(c[lm_index(l, -m)])
        )
    return HarmonicCoefficients(n, coeffs)


def p_reconstruct(coeffs: HarmonicCoefficients) -> np.ndarray:
    """Quadrature of integral P(w) proj(w) dW; returns the Dicke-basis matrix."""
    n = coeffs.n_qubits
    theta, phi, w = sphere_quadrature(n)
    projs = _coherent_projectors(n, theta, phi)
    p_vals = coeffs.evaluate(theta, phi)
    mat = np.einsum("m,mij->ij", w * p_vals, projs)
    return 0.5 * (mat + mat.conj().T)


def witness_polynomial(witness: np.ndarray, grid) -> np.ndarray:
    """w(theta, phi) = <(theta,phi)^{x N}| W |(theta,phi)^{x N}> on grid points."""
    witness = np.asarray(witness, dtype=complex)
    dim = witness.shape[0]
    n = int(round(math.log2(dim)))
    if witness.shape != (dim, dim) or 2**n != dim:
        raise ParameterError("witness must be a square matrix on n qubits")
    out = np.empty(len(grid))
    for i, (theta, phi) in enumerate(grid):
        one = np.array([math.cos(theta / 2.0), np.exp(1j * phi) * math.sin(theta / 2.0)])
        v = np.array([1.0], dtype=complex)
        for _ in range(n):
            v = np.kron(v, one)
        val = v.conj() @ witness @ v
        if abs(val.imag) > 1e-10:
            raise ParameterError("witness polynomial is not real; witness not Hermitian")
        out[i] = val.real
    return out


def expectation_from_p(coeffs: HarmonicCoefficients, witness: np.ndarray) -> float:
    """integral P(w) w(w) dW by quadrature; equals tr(rho W) for l <= N data."""
    n = coeffs.n_qubits
    theta, phi, w = sphere_quadrature(n)
    p_vals = coeffs.evaluate(theta, phi)
    w_vals = witness_polynomial(witness, list(zip(theta, phi)))
    return float(np.sum(w * p_vals * w_vals))


def fibonacci_sphere(resolution: int) -> np.ndarray:
    """(M, 2) quasi-uniform (theta, phi) nodes."""
    i = np.arange(resolution)
    z = 1.0 - 2.0 * (i + 0.5) / resolution
    golden = math.pi * (3.0 - math.sqrt(5.0))
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.mod(golden * i, 2.0 * math.pi)
    return np.stack([theta, phi], axis=-1)


@dataclass(frozen=True)
class CertificateResult:
    certified: bool
    measure: GridMeasure | None
    resolution: int
    state_residual: float
    moment_residual: float

    def to_dict(self) -> dict:
        out = {
            "certified": self.certified,
            "resolution": self.resolution,
            "state_residual": self.state_residual,
            "moment_residual": self.moment_residual,
        }
        if self.measure is not None:
            out["nodes"] = self.measure.nodes.tolist()
            out["weights"] = self.measure.weights.tolist()
        return out


def _certificate_at_resolution(
    dicke: DickeCoefficients, nodes: np.ndarray
) -> tuple[np.ndarray, float]:
    n = dicke.n_qubits
    projs = _coherent_projectors(n, nodes[:, 0], nodes[:, 1])
    cols = projs.reshape(projs.shape[0], -1).T  # (D^2, M) complex
    a = np.vstack([cols.real, cols.imag])
    b = np.concatenate([dicke.matrix.reshape(-1).real, dicke.matrix.reshape(-1).imag])
    weights, residual = nnls(a, b)
    return weights, float(residual)


def _coherent_vector_and_theta_grad(n: int, theta: float, phi: float):
    m = np.arange(n + 1)
    binom = np.sqrt([math.comb(n, int(mm)) for mm in m])
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    phase = np.exp(1j * phi * m)
    v = binom * (c ** (n - m)) * (s**m) * phase
    # d/dtheta [c^(n-m) s^m] = (-(n-m) c^(n-m-1) s^(m+1) + m c^(n-m+1) s^(m-1)) / 2
    term1 = np.where(n - m > 0, (n - m) * np.power(c, np.maximum(n - m - 1, 0)) * (s ** (m + 1)), 0.0)
    term2 = np.where(m > 0, m * (c ** (n - m + 1)) * np.power(s, np.maximum(m - 1, 0)), 0.0)
    dv = binom * 0.5 * (-term1 + term2) * phase
    return v, dv


def _refine_atoms(
    dicke: DickeCoefficients, nodes: np.ndarray, weights: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Exchange-style refinement of the discrete measure: grid atoms only
    approximate off-grid mixtures to O(spacing^2), so the active atoms are
    moved on the sphere by damped least squares (weights parametrized as
    squares to stay nonnegative).  Genuinely separable states reach solver
    noise; entangled states remain stuck at a finite residual."""
    from scipy.optimize import least_squares

    n = dicke.n_qubits
    target = dicke.matrix.reshape(-1)
    tvec = np.concatenate([target.real, target.imag])
    k = nodes.shape[0]

    def unpack(x):
        return x[:k], x[k : 2 * k], x[2 * k :]

    def residual(x):
        th, ph, u = unpack(x)
        rec = np.zeros(((n + 1) ** 2,), dtype=complex)
        for i in range(k):
            v = coherent_dicke_vector(n, th[i], ph[i])
            rec += (u[i] ** 2) * np.outer(v, v.conj()).reshape(-1)
        return np.concatenate([rec.real, rec.imag]) - tvec

    def jacobian(x):
        th, ph, u = unpack(x)
        cols = np.empty((2 * (n + 1) ** 2, 3 * k))
        marange = np.arange(n + 1)
        for i in range(k):
            v, dv = _coherent_vector_and_theta_grad(n, th[i], ph[i])
            w2 = u[i] ** 2
            d_th = w2 * (np.outer(dv, v.conj()) + np.outer(v, dv.conj())).reshape(-1)
            dphi_v = 1j * marange * v
            d_ph = w2 * (np.outer(dphi_v, v.conj()) + np.outer(v, dphi_v.conj())).reshape(-1)
            d_u = 2.0 * u[i] * np.outer(v, v.conj()).reshape(-1)
            cols[:, i] = np.concatenate([d_th.real, d_th.imag])
            cols[:, k + i] = np.concatenate([d_ph.real, d_ph.imag])
            cols[:, 2 * k + i] = np.concatenate([d_u.real, d_u.imag])
        return cols

    x = np.concatenate([nodes[:, 0], nodes[:, 1], np.sqrt(np.maximum(weights, 1e-12))])
    best = float(np.linalg.norm(residual(x)))
    for _ in range(4):
        sol = least_squares(
            residual, x, jac=jacobian, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
            max_nfev=2000,
        )
        x = sol.x
        best = float(np.linalg.norm(sol.fun))
        if best <= 1e-11:
            break
        # prune near-zero atoms and retry in the smaller parametrization
        th, ph, u = unpack(x)
        keep = u**2 > 1e-10
        if keep.all() or not keep.any():
            break
        th, ph, u = th[keep], ph[keep], u[keep]
        k = th.size
        x = np.concatenate([th, ph, u])
    th, ph, u = unpack(x)
    return np.stack([th, ph], axis=-1), u**2, best


def separability_certificate(state, grid_resolution: int | None = None) -> CertificateResult:
    """Search for a nonnegative discrete measure on the sphere whose coherent
    mixture reproduces the state (all harmonic moments with l <= N).

    Success certifies full separability.  Failure is inconclusive: it is NOT
    an entanglement verdict.
    """
    dicke = _as_dicke(state)
    if grid_resolution is not None and grid_resolution < 8:
        raise ParameterError("grid resolution must be at least 8")
    resolutions = (grid_resolution,) if grid_resolution else CERTIFICATE_RESOLUTIONS
    target = p_expand(dicke)
    best = None
    n_atom_cap = 2 * (dicke.n_qubits + 1) ** 2
    for res in resolutions:
        nodes = fibonacci_sphere(res)
        weights, residual = _certificate_at_resolution(dicke, nodes)
        active = weights > 1e-12
        if active.any() and residual > 1e-10:
            order = np.argsort(weights)[::-1]
            chosen = order[: min(n_atom_cap, max(int(active.sum()), 1))]
            nodes, weights, residual = _refine_atoms(dicke, nodes[chosen], weights[chosen])
        total = weights.sum()
        if total <= 0:
            continue
        weights = weights / total
        keep = weights > 1e-12
        nodes_kept, weights_kept = nodes[keep], weights[keep]
        weights_kept = weights_kept / weights_kept.sum()
        projs = _coherent_projectors(dicke.n_qubits, nodes_kept[:, 0], nodes_kept[:, 1])
        recon = np.einsum("m,mij->ij", weights_kept, projs)
        state_residual = float(np.abs(recon - dicke.matrix).max())
        moment_res = 0.0
        for l, m in lm_pairs(dicke.n_qubits):
            y = np.conj(_ylm(l, m, nodes_kept[:, 0], nodes_kept[:, 1]))
            moment_res = max(
                moment_res, abs(complex(weights_kept @ y) - target.get(l, m))
            )
        result = CertificateResult(
            certified=moment_res <= CERTIFICATE_MOMENT_TOL
            and state_residual <= CERTIFICATE_STATE_TOL,
            measure=GridMeasure(nodes_kept, weights_kept),
            resolution=res,
            state_residual=state_residual,
            moment_residual=moment_res,
        )
        if result.certified:
            return result
        if best is None or result.moment_residual < best.moment_residual:
            best = result
    if best is None:
        return CertificateResult(False, None, resolutions[-1], math.inf, math.inf)
    return CertificateResult(
        False, None, best.resolution, best.state_residual, best.moment_residual
    )
