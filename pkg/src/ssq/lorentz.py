"""SL(2,C) action on Pauli matrices, restricted Lorentz matrices, SU(2)
rotations, and orthonormal frames on the sphere."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import ParameterError
from .spin import PAULI

MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])

DET_TOL = 1e-10
LORENTZ_TOL = 1e-9
FRAME_TOL = 1e-10


def check_sl2c(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2):
        raise ParameterError(f"SL(2,C) element must be 2x2, got {a.shape}")
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if abs(det - 1.0) > 1e-8:
        raise ParameterError(f"matrix must have unit determinant, det = {det!r}")
    return a


def lorentz_from_sl2c(a: np.ndarray, convention: str = "dagger") -> np.ndarray:
    """Restricted Lorentz matrix induced by an SL(2,C) element.

    convention "dagger": L[mu, nu] with  A sigma^mu A^dag = L[mu, nu] sigma^nu.
    convention "star":   L[mu, nu] with  A* sigma^mu A^T  = L[mu, nu] sigma^nu
    (the action picked up by a tensor factor under partial transposition).
    Coefficients are extracted with the Euclidean pairing tr(s^a s^b) = 2 d_ab.
    """
    a = check_sl2c(a)
    if convention == "star":
        a = a.conj()
    elif convention != "dagger":
        raise ParameterError(f"unknown convention {convention!r}")
    lam = np.empty((4, 4))
    adag = a.conj().T
    for mu in range(4):
        conj = a @ PAULI[mu] @ adag
        for nu in range(4):
            coeff = 0.5 * np.trace(PAULI[nu] @ conj)
            if abs(coeff.imag) > 1e-9:
                raise ParameterError("Lorentz coefficients acquired an imaginary part")
            lam[mu, nu] = coeff.real
    return lam


def check_lorentz(lam: np.ndarray, tol: float = LORENTZ_TOL) -> np.ndarray:
    """Validate a proper orthochronous Lorentz matrix."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (4, 4):
        raise ParameterError(f"Lorentz matrix must be 4x4, got {lam.shape}")
    resid = np.abs(lam @ MINKOWSKI @ lam.T - MINKOWSKI).max()
    if resid > tol:
        raise ParameterError(f"matrix does not preserve the Minkowski form (residual {resid:.3e})")
    if lam[0, 0] < 1.0 - tol:
        raise ParameterError("matrix is not orthochronous")
    if abs(np.linalg.det(lam) - 1.0) > 1e-6:
        raise ParameterError("matrix must have unit determinant")
    return lam


def is_pure_rotation(lam: np.ndarray, tol: float = LORENTZ_TOL) -> bool:
    """True when the time row and column are trivial (a spatial SO(3) block)."""
    lam = np.asarray(lam, dtype=float)
    target = np.zeros(4)
    target[0] = 1.0
    return bool(np.abs(lam[0] - target).max() <= tol and np.abs(lam[:, 0] - target).max() <= tol)


def su2_from_rotvec(rotvec) -> np.ndarray:
    """SU(2) element exp(-i theta/2 axis.sigma) for rotvec = theta * axis."""
    rv = np.asarray(rotvec, dtype=float).reshape(3)
    theta = float(np.linalg.norm(rv))
    if theta < 1e-15:
        return np.eye(2, dtype=complex)
    axis = rv / theta
    n_sigma = axis[0] * PAULI[1] + axis[1] * PAULI[2] + axis[2] * PAULI[3]
    return np.cos(theta / 2.0) * np.eye(2) - 1j * np.sin(theta / 2.0) * n_sigma


def boost_matrix(rapidity: float) -> np.ndarray:
    """diag(e^{r/2}, e^{-r/2}): a boost of rapidity r along z under the dagger map."""
    return np.diag([np.exp(rapidity / 2.0), np.exp(-rapidity / 2.0)]).astype(complex)


def sl2c_from_params(rotvec_left, rapidity: float, rotvec_right) -> np.ndarray:
    """Polar-style parametrization U_left boost(r) U_right covering SL(2,C)."""
    return su2_from_rotvec(rotvec_left) @ boost_matrix(rapidity) @ su2_from_rotvec(rotvec_right)


@dataclass(frozen=True)
class Frame:
    """Right-handed orthonormal triple (k, l, n)."""

    k: np.ndarray
    l: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        vecs = []
        for name in ("k", "l", "n"):
            v = np.asarray(getattr(self, name), dtype=float).reshape(3)
            if abs(np.linalg.norm(v) - 1.0) > FRAME_TOL:
                raise ParameterError(f"frame axis {name} is not a unit vector")
            v = v.copy()
            v.setflags(write=False)
            object.__setattr__(self, name, v)
            vecs.append(v)
        k, l, n = vecs
        for u, v in ((k, l), (k, n), (l, n)):
            if abs(float(u @ v)) > FRAME_TOL:
                raise ParameterError("frame axes are not orthogonal")
        if abs(float(np.linalg.det(np.column_stack(vecs))) - 1.0) > FRAME_TOL:
            raise ParameterError("frame is not right-handed")

    def matrix(self) -> np.ndarray:
        """3x3 rotation with columns (k, l, n): maps x->k, y->l, z->n."""
        return np.column_stack([self.k, self.l, self.n])


CANONICAL_FRAME = Frame(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]))


def frame_from_euler(a: float, b: float, c: float) -> Frame:
    r = Rotation.from_euler("zyz", [a, b, c]).as_matrix()
    return Frame(r[:, 0], r[:, 1], r[:, 2])


def su2_from_frame(frame: Frame) -> np.ndarray:
    """SU(2) element U with U (v.sigma) U^dag = (R v).sigma, R = frame.matrix()."""
    rotvec = Rotation.from_matrix(frame.matrix()).as_rotvec()
    return su2_from_rotvec(rotvec)


def random_su2(rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform SU(2) via a uniform quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    # q = (w, x, y, z) -> w*1 - i(x sx + y sy + z sz)
    return q[0] * np.eye(2) - 1j * (q[1] * PAULI[1] + q[2] * PAULI[2] + q[3] * PAULI[3])
