"""
Exact one- and two-qubit linear algebra.

Conventions
-----------
* Matrices are plain ``numpy`` complex arrays: 2x2 for one qubit, 4x4 for two.
* Two-qubit ordering is qubit-A-major, i.e. basis index ``2*a + b``, which is
  what ``np.kron(A, B)`` produces.
* Pure states are length-2 amplitude vectors in the z basis.
* x-basis states: |0>_x = (|0>_z + |1>_z)/sqrt(2), |1>_x = (|0>_z - |1>_z)/sqrt(2).
* Bloch vectors are real length-3 arrays with rho = (I + v.sigma)/2.
"""
import numpy as np

from .exceptions import UnphysicalStateError

ATOL = 1e-12

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

X_AXIS = np.array([1.0, 0.0, 0.0])
Y_AXIS = np.array([0.0, 1.0, 0.0])
Z_AXIS = np.array([0.0, 0.0, 1.0])

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET0_X = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET1_X = np.array([1, -1], dtype=complex) / np.sqrt(2)

for _a in (I2, I4, SIGMA_X, SIGMA_Y, SIGMA_Z, PAULIS, X_AXIS, Y_AXIS, Z_AXIS,
           KET0, KET1, KET0_X, KET1_X):
    _a.setflags(write=False)


def pauli_dot(v):
    """Return ``v . sigma`` for a real 3-vector ``v``."""
    v = np.asarray(v, dtype=float)
    return np.tensordot(v, PAULIS, axes=1)


def from_x_basis(amp0, amp1):
    """Pure state with amplitudes ``amp0``, ``amp1`` on |0>_x, |1>_x, as z-basis amplitudes."""
    return amp0 * KET0_X + amp1 * KET1_X


def check_bloch(v, *, pure=False, atol=ATOL):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise UnphysicalStateError(f"Bloch vector must be a finite 3-vector, got {v!r}")
    norm = np.linalg.norm(v)
    if norm > 1 + atol:
        raise UnphysicalStateError(f"Bloch vector norm {norm!r} exceeds 1")
    if pure and abs(norm - 1) > atol:
        raise UnphysicalStateError(f"expected a unit Bloch vector, norm is {norm!r}")
    return v


def check_density(rho, atol=ATOL):
    """Validate a 2x2 density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise UnphysicalStateError(f"density matrix must be 2x2, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise UnphysicalStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise UnphysicalStateError(f"density matrix trace is {np.trace(rho)!r}, not 1")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise UnphysicalStateError("density matrix has a negative eigenvalue")
    return rho


def check_pure(psi, atol=ATOL):
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,):
        raise UnphysicalStateError(f"pure qubit must have 2 amplitudes, got shape {psi.shape}")
    if abs(np.vdot(psi, psi).real - 1) > atol:
        raise UnphysicalStateError("pure qubit is not normalized")
    return psi


def normalize(psi):
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if not norm > ATOL:
        raise UnphysicalStateError("cannot normalize a zero (or non-finite) vector")
    return psi / norm


def bloch_to_density(v):
    """rho = (I + v.sigma)/2. Rejects vectors longer than 1."""
    v = check_bloch(v)
    return 0.5 * (I2 + pauli_dot(v))


def density_to_bloch(rho):
    """v_i = Tr(rho sigma_i)."""
    rho = check_density(rho)
    return _bloch_unchecked(rho)


def _bloch_unchecked(rho):
    return np.real(np.einsum("ij,kji->k", rho, PAULIS))


def pure_to_density(psi):
    psi = check_pure(psi)
    return np.outer(psi, psi.conj())


def pure_to_bloch(psi):
    return _bloch_unchecked(pure_to_density(psi))


def tensor(a, b):
    """Kronecker product in qubit-A-major order: (a x b)[2i+k, 2j+l] = a[i,j] b[k,l]."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace_A(m):
    """Trace out the first (A) qubit of a 4x4 operator."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 operator, got shape {m.shape}")
    return np.einsum("akal->kl", m.reshape(2, 2, 2, 2))


def fidelity_overlap(psi, phi):
    """|<psi|phi>| for two normalized pure qubits."""
    psi = check_pure(psi)
    phi = check_pure(phi)
    return min(1.0, abs(np.vdot(psi, phi)))


def equal_up_to_phase(psi, phi, atol=ATOL):
    """True when the two amplitude vectors differ only by a global phase."""
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    inner = np.vdot(psi, phi)
    if abs(inner) < atol:
        return False
    phase = inner / abs(inner)
    return bool(np.max(np.abs(psi * phase - phi)) <= atol)


def is_unitary(u, atol=ATOL):
    u = np.asarray(u, dtype=complex)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= atol)
