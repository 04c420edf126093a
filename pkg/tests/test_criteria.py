import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg as sla

from ssq import criteria
from ssq.errors import FrameConstraintError, ParameterError, ZeroMeanSpinError
from ssq.lorentz import (
    CANONICAL_FRAME,
    frame_from_euler,
    lorentz_from_sl2c,
    sl2c_from_params,
    su2_from_rotvec,
)
from ssq.spin import PAULI, dicke_collective_spin, moments
from ssq.states import (
    DensityMatrix,
    DickeCoefficients,
    PureState,
    build_named_state,
    coherent_dicke_vector,
    dicke_reduction,
    partial_transpose,
)

I4 = np.eye(4)


def bell_symmetric():
    return PureState(2, np.array([0, 1, 1, 0]) / math.sqrt(2)).density()


def random_symmetric(rng, n, rank=None):
    rank = rank or n + 1
    g = rng.normal(size=(n + 1, rank)) + 1j * rng.normal(size=(n + 1, rank))
    m = g @ g.conj().T
    return DickeCoefficients(n, m / np.trace(m))


def coherent_mixture(rng, n, terms):
    m = np.zeros((n + 1, n + 1), dtype=complex)
    for w in rng.dirichlet(np.ones(terms)):
        v = coherent_dicke_vector(n, math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))
        m += w * np.outer(v, v.conj())
    return DickeCoefficients(n, m)


def one_axis_twisted(n, chi):
    ops = dicke_collective_spin(n)
    u = sla.expm(-1j * chi * (ops.J[3] @ ops.J[3]))
    v = u @ coherent_dicke_vector(n, math.pi / 2, 0.0)
    return DickeCoefficients(n, np.outer(v, v.conj()))


def pauli_triple_op(table):
    op = np.zeros((8, 8), dtype=complex)
    for a in range(4):
        for b in range(4):
            for c in range(4):
                if table[a, b, c] != 0.0:
                    op += table[a, b, c] * np.kron(np.kron(PAULI[a], PAULI[b]), PAULI[c])
    return op / 8.0


# ---------------------------------------------------------------------------
# spin squeezing parameter
# ---------------------------------------------------------------------------


def test_xi_squared_coherent_is_one():
    rng = np.random.default_rng(0)
    for n in (2, 3, 5):
        theta, phi = rng.uniform(0.2, math.pi - 0.2), rng.uniform(0, 2 * math.pi)
        rho = build_named_state("coherent", n, theta=theta, phi=phi).density()
        value, direction = criteria.xi_squared(rho)
        assert abs(value - 1.0) < 1e-9
        assert abs(np.linalg.norm(direction) - 1.0) < 1e-10


def test_xi_squared_one_axis_twisting_squeezed():
    # independent dense oracle: evolve |+>^4 with exp(-i chi Jz^2) on the
    # full 16-dim space and scan the orthogonal plane directly
    from ssq.spin import collective_spin

    chi, n = 0.2, 4
    plus = build_named_state("coherent", n, theta=math.pi / 2, phi=0.0).amplitudes
    ops = collective_spin(n)
    u = sla.expm(-1j * chi * (ops.J[3] @ ops.J[3]))
    psi = u @ plus
    rho = DensityMatrix(n, np.outer(psi, psi.conj()))
    mom = moments(rho)
    mean = mom.mean_spin()
    axis = mean / np.linalg.norm(mean)
    anchor = np.zeros(3)
    anchor[int(np.argmin(np.abs(axis)))] = 1.0
    e1 = np.cross(axis, anchor)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    best = math.inf
    for t in np.linspace(0, math.pi, 2001):
        v = math.cos(t) * e1 + math.sin(t) * e2
        jv = v[0] * ops.J[1] + v[1] * ops.J[2] + v[2] * ops.J[3]
        var = (psi.conj() @ jv @ jv @ psi).real - (psi.conj() @ jv @ psi).real ** 2
        best = min(best, var)
    oracle_xi2 = best / (n / 4)

    value, direction = criteria.xi_squared(rho)
    assert value < 1.0
    assert abs(value - oracle_xi2) < 1e-6
    assert abs(direction @ axis) < 1e-8


def test_xi_squared_undefined_for_zero_mean_spin():
    mixed = DensityMatrix(2, np.eye(4) / 4)
    with pytest.raises(ZeroMeanSpinError):
        criteria.xi_squared(mixed)


# ---------------------------------------------------------------------------
# bipartite criterion
# ---------------------------------------------------------------------------


def test_bipartite_margin_bell():
    # direct 4x4 oracle for the two moments
    from ssq.spin import collective_spin

    rho = bell_symmetric()
    ops = collective_spin(2)
    mean = np.trace(rho.matrix @ ops.J[3]).real
    second = np.trace(rho.matrix @ ops.J[3] @ ops.J[3]).real
    assert abs(mean) < 1e-12 and abs(second) < 1e-12
    expected = second + 0.0 - math.hypot(1.0 - second, mean)
    assert abs(expected + 1.0) < 1e-12
    assert abs(criteria.bipartite_margin(rho, [0, 0, 1]) + 1.0) < 1e-12


def test_bipartite_product_state_nonnegative():
    rng = np.random.default_rng(1)
    rho = build_named_state("computational", 2, bits="00").density()
    for _ in range(25):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        assert criteria.bipartite_margin(rho, v) >= -1e-12


def test_bipartite_margin_ghz_z():
    rho = build_named_state("ghz", 3).density()
    assert abs(criteria.bipartite_margin(rho, [0, 0, 1]) - 3.0) < 1e-12


def test_bipartite_raw_examples():
    rho = bell_symmetric()
    assert abs(criteria.bipartite_raw(rho, [0, 0, 1], math.pi / 2) - 1.0) < 1e-12
    zero = build_named_state("computational", 2, bits="00").density()
    assert abs(criteria.bipartite_raw(zero, [0, 0, 1], 0.0)) < 1e-12
    with pytest.raises(ParameterError):
        criteria.bipartite_raw(rho, [0, 0, 1], 4.0)


def test_bipartite_raw_minimum_matches_margin():
    rng = np.random.default_rng(2)
    for _ in range(5):
        d = random_symmetric(rng, 2)
        mom = moments(d)
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        margin = criteria.bipartite_margin(mom, v)
        alpha_star = criteria.bipartite_optimal_alpha(mom, v)
        assert abs(criteria.bipartite_raw(mom, v, alpha_star) - margin) < 1e-12
        grid = np.arange(-math.pi, math.pi, 1e-3)
        grid_min = min(criteria.bipartite_raw(mom, v, a) for a in grid)
        assert grid_min >= margin >= grid_min - 1e-6


def test_bipartite_general_margin_sound_on_product_states():
    # |0>|1>|+>: the sharp symmetric-state formula would report -1 here, but
    # the state is a product; the angle-restricted general form stays >= 0
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    v = np.kron(np.kron([1.0, 0.0], [0.0, 1.0]), plus).astype(complex)
    rho = DensityMatrix(3, np.outer(v, v.conj()))
    mom = moments(rho)
    assert not criteria.is_symmetric_moments(mom)
    assert abs(criteria.bipartite_margin(mom, [0, 0, 1]) + 1.0) < 1e-12
    rng = np.random.default_rng(20)
    for _ in range(25):
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        assert criteria.bipartite_margin_general(mom, u) >= -1e-12


def test_bipartite_general_margin_is_restricted_angle_minimum():
    rng = np.random.default_rng(21)
    g = rng.normal(size=(8, 3)) + 1j * rng.normal(size=(8, 3))
    m = g @ g.conj().T
    rho = DensityMatrix(3, m / np.trace(m))
    mom = moments(rho)
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    grid_min = min(criteria.bipartite_raw(mom, v, a) for a in np.linspace(0.0, math.pi, 3200))
    general = criteria.bipartite_margin_general(mom, v)
    assert grid_min >= general >= grid_min - 1e-5


def test_symmetry_detection_from_moments():
    rng = np.random.default_rng(22)
    sym = random_symmetric(rng, 3)
    assert criteria.is_symmetric_moments(moments(sym))
    nonsym = build_named_state("computational", 3, bits="010").density()
    assert not criteria.is_symmetric_moments(moments(nonsym))


def test_bipartite_normalized_form_sign_agreement():
    rng = np.random.default_rng(3)
    for _ in range(10):
        d = random_symmetric(rng, 3)
        mom = moments(d)
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        margin = criteria.bipartite_margin(mom, v)
        normalized = criteria.bipartite_normalized_margin(mom, v)
        if abs(margin) > 1e-10:
            assert (margin < 0) == (normalized < 0)


# ---------------------------------------------------------------------------
# K tensors
# ---------------------------------------------------------------------------


def test_k_tensor_ghz_identity_entries():
    kt = criteria.k_tensor("ghz", I4, I4)
    expected = {
        (0, 0, 0): 1.0,
        (0, 3, 3): 1.0,
        (1, 1, 1): 1.0,
        (1, 2, 2): -1.0,
        (2, 1, 2): 1.0,
        (2, 2, 1): 1.0,
        (3, 0, 3): 1.0,
        (3, 3, 0): 1.0,
    }
    nonzero = {tuple(i): float(kt.table[tuple(i)]) for i in np.argwhere(kt.table != 0)}
    assert nonzero == expected


def test_k_tensor_ghz_identity_matches_printed_formula():
    # the printed six-term contraction, written out at general (lam, sec)
    rng = np.random.default_rng(4)
    a = sl2c_from_params(rng.normal(size=3), 0.9, rng.normal(size=3))
    b = sl2c_from_params(rng.normal(size=3), 0.4, rng.normal(size=3))
    lam = lorentz_from_sl2c(a, "star")
    sec = lorentz_from_sl2c(b, "dagger")

    def o3(u, v, w):
        return u[:, None, None] * v[None, :, None] * w[None, None, :]

    printed = (
        o3(lam[0], sec[0], sec[0])
        + o3(lam[0], sec[3], sec[3])
        + o3(lam[1], sec[1], sec[1])
        + o3(lam[3], sec[0], sec[3])
        + o3(lam[3], sec[3], sec[0])
        - o3(lam[1], sec[2], sec[2])
        + o3(lam[2], sec[1], sec[2])
        + o3(lam[2], sec[2], sec[1])
    )
    kt = criteria.k_tensor("ghz", lam, sec)
    assert np.abs(kt.table - printed).max() < 1e-10


def test_k_tensor_w_identity_matches_projector_transpose():
    kt = criteria.k_tensor("w", I4, I4)
    w = build_named_state("w", 3).density()
    assert np.abs(pauli_triple_op(kt.table) - partial_transpose(w, 0)).max() < 1e-12


def test_k_tensor_w_corrects_truncated_formula():
    # the W-family contraction needs the diagonal-pair terms
    # +2(L0+L3)(R1 R1 + R2 R2)/3 on top of the ten-term form
    kt = criteria.k_tensor("w", I4, I4)
    for idx in ((0, 1, 1), (0, 2, 2), (3, 1, 1), (3, 2, 2)):
        assert abs(kt.table[idx] - 2.0 / 3.0) < 1e-12


@pytest.mark.parametrize("family", ["ghz", "w"])
def test_k_tensor_brute_force_projector_equality(family):
    rng = np.random.default_rng(5)
    base = build_named_state("ghz" if family == "ghz" else "w", 3).amplitudes
    for _ in range(4):
        a = sl2c_from_params(rng.normal(size=3), rng.uniform(0, 2), rng.normal(size=3))
        if family == "ghz":
            b = sl2c_from_params(rng.normal(size=3), rng.uniform(0, 2), rng.normal(size=3))
        else:
            b = su2_from_rotvec(rng.normal(size=3))
        kt = criteria.k_tensor(
            family, lorentz_from_sl2c(a, "star"), lorentz_from_sl2c(b, "dagger")
        )
        psi = np.kron(np.kron(a, b), b) @ base
        expected = partial_transpose(np.outer(psi, psi.conj()), 0, 3)
        assert np.abs(pauli_triple_op(kt.table) - expected).max() < 1e-10
        assert np.abs(kt.table.imag).max() if np.iscomplexobj(kt.table) else 0.0 <= 1e-10


def test_k_tensor_w_rejects_boost_second_argument():
    boost = lorentz_from_sl2c(sl2c_from_params([0, 0, 0], 1.0, [0, 0, 0]), "dagger")
    with pytest.raises(ParameterError):
        criteria.k_tensor("w", I4, boost)


# ---------------------------------------------------------------------------
# tripartite margin
# ---------------------------------------------------------------------------


def test_tripartite_identity_parameter_values():
    # the family projectors themselves are NOT flagged at identity
    # parameters: tr(P P^T1) = +1/2 (GHZ) and +5/9 (W), so the margins are
    # +6 and +20/3 under the frozen constant 12
    ghz = build_named_state("ghz", 3).density()
    w = build_named_state("w", 3).density()
    assert abs(np.trace(ghz.matrix @ partial_transpose(ghz, 0)).real - 0.5) < 1e-12
    assert abs(np.trace(w.matrix @ partial_transpose(w, 0)).real - 5.0 / 9.0) < 1e-12
    m_ghz = criteria.tripartite_margin(moments(ghz), criteria.k_tensor("ghz", I4, I4))
    m_w = criteria.tripartite_margin(moments(w), criteria.k_tensor("w", I4, I4))
    assert abs(m_ghz - 6.0) < 1e-9
    assert abs(m_w - 20.0 / 3.0) < 1e-9


def test_tripartite_canonical_detection_parameters():
    # GHZ: Lambda from A = XZ (pi rotation about y), L = 1 -> margin -6
    ghz = build_named_state("ghz", 3).density()
    xz = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
    lam = lorentz_from_sl2c(xz, "star")
    assert np.abs(lam - np.diag([1.0, -1.0, 1.0, -1.0])).max() < 1e-12
    margin = criteria.tripartite_margin(moments(ghz), criteria.k_tensor("ghz", lam, I4))
    assert abs(margin + 6.0) < 1e-9

    # W: Lambda from the boost-rotation normalizing the PT eigenvector -> -16/3
    w = build_named_state("w", 3).density()
    a0 = np.array([[0.0, -math.sqrt(6) / 2], [math.sqrt(3) / 2, 0.0]], dtype=complex)
    a0 = a0 / np.sqrt(np.linalg.det(a0))
    lam_w = lorentz_from_sl2c(a0, "star")
    margin_w = criteria.tripartite_margin(moments(w), criteria.k_tensor("w", lam_w, I4))
    assert abs(margin_w + 16.0 / 3.0) < 1e-9


def test_tripartite_matches_direct_traces():
    # anti-drift anchor: margin = 12 * C(N,3) * tr(rho_red M) on symmetric states
    rng = np.random.default_rng(6)
    ghz_base = build_named_state("ghz", 3).amplitudes
    for n in (3, 4, 5):
        for _ in range(6):
            d = random_symmetric(rng, n, rank=int(rng.integers(1, n + 2)))
            mom = moments(d)
            a = sl2c_from_params(rng.normal(size=3), rng.uniform(0, 1.5), rng.normal(size=3))
            b = sl2c_from_params(rng.normal(size=3), rng.uniform(0, 1.5), rng.normal(size=3))
            kt = criteria.k_tensor(
                "ghz", lorentz_from_sl2c(a, "star"), lorentz_from_sl2c(b, "dagger")
            )
            margin = criteria.tripartite_margin(mom, kt)
            psi = np.kron(np.kron(a, b), b) @ ghz_base
            m_op = partial_transpose(np.outer(psi, psi.conj()), 0, 3)
            direct = math.comb(n, 3) * np.trace(dicke_reduction(d, 3).matrix @ m_op).real
            assert abs(margin - 12.0 * direct) <= 1e-9 * max(1.0, abs(margin))


def test_tripartite_separable_nonnegative():
    rng = np.random.default_rng(7)
    for _ in range(10):
        d = coherent_mixture(rng, 3, 4)
        mom = moments(d)
        a = sl2c_from_params(rng.normal(size=3), rng.uniform(0, 2), rng.normal(size=3))
        b = sl2c_from_params(rng.normal(size=3), rng.uniform(0, 2), rng.normal(size=3))
        kt = criteria.k_tensor(
            "ghz", lorentz_from_sl2c(a, "star"), lorentz_from_sl2c(b, "dagger")
        )
        assert criteria.tripartite_margin(mom, kt) >= -1e-9


def test_tripartite_general_mode_on_nonsymmetric_separable():
    rng = np.random.default_rng(8)
    for _ in range(6):
        mats = []
        for _ in range(3):
            g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            q = g @ g.conj().T
            mats.append(q / np.trace(q))
        rho = DensityMatrix(3, np.kron(np.kron(mats[0], mats[1]), mats[2]))
        mom = moments(rho)
        a = sl2c_from_params(rng.normal(size=3), rng.uniform(0, 1.5), rng.normal(size=3))
        b = su2_from_rotvec(rng.normal(size=3))
        kt = criteria.k_tensor_cyclic_average(
            "w", lorentz_from_sl2c(a, "star"), lorentz_from_sl2c(b, "dagger")
        )
        assert criteria.tripartite_margin(mom, kt, "general") >= -1e-9


def test_tripartite_mode_validation():
    ghz = build_named_state("ghz", 3).density()
    kt = criteria.k_tensor("ghz", I4, I4)
    with pytest.raises(ParameterError):
        criteria.tripartite_margin(moments(ghz), kt, "general")
    with pytest.raises(ParameterError):
        criteria.tripartite_margin(moments(ghz), kt, "nope")


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------


def test_witness_traces():
    ghz = build_named_state("ghz", 3).density()
    w = build_named_state("w", 3).density()
    assert abs(np.trace(ghz.matrix @ criteria.witness_matrix("ghz")).real + 0.25) < 1e-12
    assert abs(np.trace(w.matrix @ criteria.witness_matrix("w1")).real + 1.0 / 3.0) < 1e-12
    assert abs(np.trace(ghz.matrix @ criteria.witness_matrix("w2")).real + 0.5) < 1e-12


def test_witness_hermitian_any_frame():
    rng = np.random.default_rng(9)
    for kind in ("ghz", "w1", "w2"):
        f = frame_from_euler(*rng.uniform(0, 2 * math.pi, size=3))
        w = criteria.witness_matrix(kind, f)
        assert np.abs(w - w.conj().T).max() < 1e-12


# ---------------------------------------------------------------------------
# third-moment inequalities
# ---------------------------------------------------------------------------


def test_ss_constants_are_exact_rationals():
    assert criteria.ss_constant("ss1", 3) == Fraction(13, 8)
    assert criteria.ss_constant("ss2", 3) == Fraction(35, 8)
    assert criteria.ss_constant("ss3", 3) == Fraction(9, 8)
    assert criteria.ss_constant("ss1p", 3) == Fraction(23, 8)
    assert criteria.ss_constant("ss2p", 3) == Fraction(3, 4)
    assert criteria.ss_constant("ss3", 4) == Fraction(4)
    assert criteria.ss_constant("ss2", 5) == Fraction(5 * 3 * 61, 24)


def test_ss1_detects_ghz_at_canonical_frame():
    ghz = build_named_state("ghz", 3).density()
    value = criteria.ss_value(moments(ghz), "ss1", CANONICAL_FRAME)
    direct = np.trace(ghz.matrix @ criteria.witness_matrix("ghz")).real
    assert abs(value - 2.0 * direct) < 1e-12
    assert abs(value + 0.5) < 1e-12


def test_ss2_detects_w_at_canonical_frame():
    w = build_named_state("w", 3).density()
    value = criteria.ss_value(moments(w), "ss2", CANONICAL_FRAME)
    assert abs(value + 2.0) < 1e-12


def test_ss_values_match_witness_sums():
    rng = np.random.default_rng(10)
    pairs = {"ss1": ("ghz", 2.0), "ss2": ("w1", 6.0), "ss3": ("w2", 2.0)}
    for n in (3, 4, 5):
        for _ in range(4):
            d = random_symmetric(rng, n, rank=int(rng.integers(1, n + 2)))
            mom = moments(d)
            f = frame_from_euler(*rng.uniform(0, 2 * math.pi, size=3))
            red = dicke_reduction(d, 3).matrix
            for kind, (wkind, const) in pairs.items():
                value = criteria.ss_value(mom, kind, f)
                direct = math.comb(n, 3) * np.trace(
                    red @ criteria.witness_matrix(wkind, f)
                ).real
                assert abs(value - const * direct) <= 1e-9 * max(1.0, abs(value))


def test_ss_maximally_mixed_value():
    # all odd moments vanish and <J_n^2> = 3/4; the value is the constant
    # term minus (1/2)(3/4) = 13/8 - 3/8 = 5/4
    mixed = DensityMatrix(3, np.eye(8) / 8)
    value = criteria.ss_value(moments(mixed), "ss1", CANONICAL_FRAME)
    assert abs(value - 1.25) < 1e-12
    assert value > 0


def test_ss_separable_nonnegative_over_frames():
    rng = np.random.default_rng(11)
    zero = build_named_state("computational", 3, bits="000").density()
    mom = moments(zero)
    for _ in range(30):
        f = frame_from_euler(*rng.uniform(0, 2 * math.pi, size=3))
        for kind in ("ss1", "ss2", "ss3"):
            assert criteria.ss_value(mom, kind, f) >= -1e-9


def test_ss_primed_values_and_preconditions():
    ghz = build_named_state("ghz", 3).density()
    mom = moments(ghz)
    # GHZ admits every frame: <J> = 0 and <J_k^2> >= 3/4 in all directions.
    # cubic part is -1/4 - 3/4 = -1, plus the constant 23/8
    value = criteria.ss_value(mom, "ss1p", CANONICAL_FRAME)
    assert abs(value - 15.0 / 8.0) < 1e-12
    # primed inequalities are weaker than the unprimed ones on admissible frames
    assert value >= criteria.ss_value(mom, "ss1", CANONICAL_FRAME)

    coh = build_named_state("coherent", 3, theta=0.0, phi=0.0).density()
    bad_frame = CANONICAL_FRAME  # n = z is the mean-spin direction: <J_n> = 3/2
    with pytest.raises(FrameConstraintError):
        criteria.ss_value(moments(coh), "ss1p", bad_frame)


def test_ss_requires_three_qubits():
    with pytest.raises(ParameterError):
        criteria.ss_value(moments(bell_symmetric()), "ss1", CANONICAL_FRAME)


# ---------------------------------------------------------------------------
# frame/rotation covariance
# ---------------------------------------------------------------------------


def test_criteria_frame_covariance():
    # rotating the state by U^(x)N and all geometric arguments by R leaves
    # every criterion value unchanged
    rng = np.random.default_rng(12)
    d = random_symmetric(rng, 3, rank=2)
    mom = moments(d)
    f0 = frame_from_euler(0.3, 1.1, 2.0)
    rotvec = rng.normal(size=3)
    u = su2_from_rotvec(rotvec)
    # Bloch-vector rotation of u: U (v.sigma) U^dag = (r v).sigma
    r = lorentz_from_sl2c(u, "dagger")[1:, 1:].T
    u3 = np.kron(np.kron(u, u), u)
    from ssq.states import DensityMatrix as DM, full_to_dicke, dicke_to_full

    rotated = full_to_dicke(DM(3, u3 @ dicke_to_full(d).matrix @ u3.conj().T))
    mom_rot = moments(rotated)

    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    assert abs(
        criteria.bipartite_margin(mom, v) - criteria.bipartite_margin(mom_rot, r @ v)
    ) < 1e-10

    from ssq.lorentz import Frame

    f_rot = Frame(r @ f0.k, r @ f0.l, r @ f0.n)
    for kind in ("ss1", "ss2", "ss3"):
        assert abs(
            criteria.ss_value(mom, kind, f0) - criteria.ss_value(mom_rot, kind, f_rot)
        ) < 1e-10

    # tripartite: rotating the state by u on every qubit maps the detector
    # family element (a, b) to (u* a, u b) -- the transposed slot picks up the
    # conjugate -- and the margin is unchanged
    a = sl2c_from_params(rng.normal(size=3), 0.8, rng.normal(size=3))
    b = sl2c_from_params(rng.normal(size=3), 0.5, rng.normal(size=3))
    lam = lorentz_from_sl2c(a, "star")
    sec = lorentz_from_sl2c(b, "dagger")
    margin = criteria.tripartite_margin(mom, criteria.k_tensor("ghz", lam, sec))
    margin_rot = criteria.tripartite_margin(
        mom_rot,
        criteria.k_tensor(
            "ghz",
            lorentz_from_sl2c(u.conj() @ a, "star"),
            lorentz_from_sl2c(u @ b, "dagger"),
        ),
    )
    assert abs(margin - margin_rot) < 1e-9
