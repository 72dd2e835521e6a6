"""Independent reference computations used only by the tests.

* Brute-force many-body exact diagonalization of the lattice Hamiltonian in
  the full 2^M Fock space (Jordan-Wigner construction), including partial
  traces for block reduced density matrices. This is the ground truth every
  correlator and entropy convention is pinned against.
* An exact 1D-integral evaluation of the d = 3 surface-integral prefactor
  via projected sheet counting.
* A literal face-by-face evaluation of the double surface integral over the
  unit-cube boundary, validating the collapsed quadrature formula.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.integrate import quad

MAX_ED_SITES = 12


def jordan_wigner_ops(m: int) -> list[np.ndarray]:
    """Dense annihilation operators c_0..c_{m-1} on the 2^m Fock space."""
    sigma_z = np.diag([1.0, -1.0])
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])
    ops = []
    for i in range(m):
        mats = [sigma_z] * i + [lower] + [np.eye(2)] * (m - 1 - i)
        op = mats[0]
        for mat in mats[1:]:
            op = np.kron(op, mat)
        ops.append(op)
    return ops


def _bond_list(shape: tuple[int, ...], antiperiodic: bool):
    """Oriented nearest-neighbor bonds (i, j, sign), j = i + e_a."""
    sites = list(itertools.product(*[range(n) for n in shape]))
    index = {s: i for i, s in enumerate(sites)}
    bonds = []
    for s in sites:
        for axis in range(len(shape)):
            t = list(s)
            t[axis] += 1
            sign = 1.0
            if t[axis] == shape[axis]:
                t[axis] = 0
                if antiperiodic:
                    sign = -1.0
            bonds.append((index[s], index[tuple(t)], sign))
    return sites, bonds


def ed_ground_state(lam, gamma, shape, antiperiodic, site_order=None):
    """Ground state of the lattice Hamiltonian in the full Fock space.

    ``site_order`` optionally reorders the Jordan-Wigner chain (a list of
    flat row-major site indices); block-first orderings make the plain qubit
    partial trace a valid fermionic partial trace for the block.

    Returns (psi, energy, c_ops).
    """
    shape = tuple(shape)
    m = int(np.prod(shape))
    if m > MAX_ED_SITES:
        raise ValueError(f"{m} sites exceeds the ED limit of {MAX_ED_SITES}")
    _, bonds = _bond_list(shape, antiperiodic)
    if site_order is not None:
        position = {flat: jw for jw, flat in enumerate(site_order)}
        bonds = [(position[i], position[j], s) for i, j, s in bonds]
    c_ops = jordan_wigner_ops(m)
    cd_ops = [op.T for op in c_ops]  # real matrices
    ham = np.zeros((2**m, 2**m))
    for i in range(m):
        ham -= 2.0 * lam * (cd_ops[i] @ c_ops[i])
    for i, j, sign in bonds:
        ham += sign * (cd_ops[i] @ c_ops[j] + cd_ops[j] @ c_ops[i])
        ham -= gamma * sign * (cd_ops[i] @ cd_ops[j] + c_ops[j] @ c_ops[i])
    energies, vectors = np.linalg.eigh(ham)
    assert energies[1] - energies[0] > 1e-9, "degenerate ED ground state"
    return vectors[:, 0], float(energies[0]), c_ops


def ed_correlations(lam, gamma, shape, antiperiodic):
    """C_ij = <c+_i c_j> and F_ij = <c+_i c+_j> from the many-body ground state."""
    psi, energy, c_ops = ed_ground_state(lam, gamma, shape, antiperiodic)
    m = len(c_ops)
    c_mat = np.zeros((m, m))
    f_mat = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            c_mat[i, j] = psi @ (c_ops[i].T @ c_ops[j]) @ psi
            f_mat[i, j] = psi @ (c_ops[i].T @ c_ops[j].T) @ psi
    return c_mat, f_mat, energy


def ed_block_entropy_bits(lam, gamma, shape, antiperiodic, block_shape):
    """Entropy of the corner block from the many-body ground state.

    The Jordan-Wigner chain is ordered block-first so the block operators act
    on the leading qubits and the reduced density matrix is a plain partial
    trace. Also returns the block (C, F) from the same state for
    correlation-method cross-checks.
    """
    shape = tuple(shape)
    block_shape = tuple(block_shape)
    sites = list(itertools.product(*[range(n) for n in shape]))
    in_block = [
        i
        for i, s in enumerate(sites)
        if all(coord < b for coord, b in zip(s, block_shape))
    ]
    outside = [i for i in range(len(sites)) if i not in in_block]
    order = in_block + outside
    psi, _, c_ops = ed_ground_state(lam, gamma, shape, antiperiodic, site_order=order)
    m_block = len(in_block)
    m_total = len(sites)

    amplitude = psi.reshape(2**m_block, 2 ** (m_total - m_block))
    rho = amplitude @ amplitude.T
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-14]
    entropy = float(-(evals * np.log2(evals)).sum())

    c_mat = np.zeros((m_block, m_block))
    f_mat = np.zeros((m_block, m_block))
    for i in range(m_block):
        for j in range(m_block):
            c_mat[i, j] = psi @ (c_ops[i].T @ c_ops[j]) @ psi
            f_mat[i, j] = psi @ (c_ops[i].T @ c_ops[j].T) @ psi
    return entropy, c_mat, f_mat


def exact_prefactor_3d(lam: float) -> float:
    """Exact d = 3, gamma = 0 prefactor by projected sheet counting.

    The x-projected surface measure of {cos kx + cos ky + cos kz = lam}
    counts two kx sheets wherever |lam - cos ky - cos kz| < 1, reducing the
    quadrature to a 1D integral of kz-arc measures over ky.
    """

    def arc_measure(ky: float) -> float:
        lo = lam - 1.0 - np.cos(ky)
        hi = lam + 1.0 - np.cos(ky)
        lo, hi = max(lo, -1.0), min(hi, 1.0)
        if hi <= lo:
            return 0.0
        return 2.0 * (np.arccos(lo) - np.arccos(hi))

    integral, _ = quad(arc_measure, -np.pi, np.pi, limit=400, epsabs=1e-12)
    projected = 2.0 * integral  # two sheets
    # three equivalent axes; unit-cube faces contribute a factor 2
    return float(2.0 * (3.0 * projected) / (4.0 * (2.0 * np.pi) ** 2))


def brute_force_prefactor(fs) -> float:
    """Literal double surface integral over the unit-cube boundary.

    Loops over the 2d axis-aligned faces of the unit block and the surface
    elements, integrating |n_x . n_p| without using the projected-measure
    collapse. The face integrand is constant in x, so this checks the
    bookkeeping (face areas, the factor 2, the 2*pi powers) rather than
    adding resolution.
    """
    total = 0.0
    for axis in range(fs.dim):
        for orientation in (1.0, -1.0):
            face_normal = np.zeros(fs.dim)
            face_normal[axis] = orientation
            integrand = np.abs(fs.normals @ face_normal)
            total += float((integrand * fs.measures).sum())  # face area = 1
    return total / (4.0 * (2.0 * np.pi) ** (fs.dim - 1))
