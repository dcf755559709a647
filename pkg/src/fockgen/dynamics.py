"""Full time-dependent simulation of the laboratory Hamiltonian.

The planner's analytic model keeps only the resonant term of each step; the
integrators here evolve the complete driven Hamiltonian (every unwanted
term included) either unitarily or under the master equation

    drho/dt = -i[H(t), rho] + L_q[rho] + L_c[rho],

with qubit dissipators built from dressed operators R_y(theta) sigma_ij
R_y(theta)^+ (the qubit relaxes in its own eigenbasis, not in the sigma_z
basis the Hamiltonian is written in) and the usual cavity decay
L_c = (kappa/2)(2 a rho a^+ - a^+a rho - rho a^+a).

Schedules run with a per-step local clock: at step n the drive is
Omega_d^(n) cos(omega_d^(n) (t - T_{n-1}) + phi_d^(n)), i.e. the drive
retunes instantaneously at step boundaries and each step's phase is
referenced to the step start, matching the planner's bookkeeping.

States carry a picture tag.  The displacement picture and the original
(laboratory) picture are related by D(eta sigma_z / 2); in particular the
displaced-picture vacuum |0>|g> is the coherent state |+eta/2>|g> in the
original picture, which is the default initial state for "actual" runs
(the true ground state sits within P >= 0.99 of it in the regime studied).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from . import fockspace as fs
from .errors import DomainError, PictureMismatch, PositivityLoss, StepSizeUnderflow, TruncationError
from .hamiltonians import TWO_PI, SystemParams
from .synthesis import PulseSchedule, TargetState

__all__ = [
    "QuantumState",
    "DensityMatrix",
    "LindbladRates",
    "coherent_initial_state",
    "ground_initial_state",
    "schrodinger_evolve",
    "lindblad_evolve",
    "to_original_picture",
    "to_displaced_picture",
    "photon_distribution",
    "displaced_photon_distribution",
    "fidelity",
    "trace_out_qubit",
    "displaced_target_density",
    "dressed_sigma",
    "state_to_json",
    "state_from_json",
    "density_to_json",
    "density_from_json",
]

PICTURES = ("original", "displaced", "interaction")


@dataclass
class QuantumState:
    """State vector on the qubit (x) Fock space with a picture tag."""

    amplitudes: np.ndarray
    picture: str = "original"

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.picture not in PICTURES:
            raise DomainError(f"unknown picture {self.picture!r}")
        if self.amplitudes.ndim != 1 or self.amplitudes.size % 2:
            raise DomainError("amplitudes must be a vector of length 2*dim")
        # Constructor guard looser than the 1e-9 state invariant so honest
        # integrator output (drift < 1e-8) is representable; tests pin the
        # tight bounds on the evolution results themselves.
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-7:
            raise DomainError(f"state norm deviates from 1 by {abs(norm - 1.0):.3e}")

    @property
    def dim(self) -> int:
        return self.amplitudes.size // 2

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.picture)


@dataclass
class DensityMatrix:
    """Density matrix on the qubit (x) Fock space with a picture tag."""

    matrix: np.ndarray
    picture: str = "original"

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.picture not in PICTURES:
            raise DomainError(f"unknown picture {self.picture!r}")
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n) or n % 2:
            raise DomainError("matrix must be square with side 2*dim")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > 1e-10:
            raise DomainError("matrix is not Hermitian")
        if abs(np.trace(self.matrix).real - 1.0) > 1e-6:
            raise DomainError(f"trace deviates from 1 by {abs(np.trace(self.matrix) - 1):.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass(frozen=True)
class LindbladRates:
    """Dissipation rates in 1/ns: qubit relaxation gamma_10, dephasings
    gamma_11 / gamma_00 (gamma_00 = 0 by default), cavity decay kappa."""

    gamma_10: float = 0.0
    gamma_11: float = 0.0
    kappa: float = 0.0
    gamma_00: float = 0.0

    def __post_init__(self):
        for name in ("gamma_10", "gamma_11", "kappa", "gamma_00"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0")

    @classmethod
    def from_ghz(cls, gamma_10=0.0, gamma_11=0.0, kappa=0.0, gamma_00=0.0) -> "LindbladRates":
        """Build from ordinary frequencies in GHz (multiplied by 2*pi internally)."""
        return cls(TWO_PI * gamma_10, TWO_PI * gamma_11, TWO_PI * kappa, TWO_PI * gamma_00)

    @property
    def any_nonzero(self) -> bool:
        return any((self.gamma_10, self.gamma_11, self.kappa, self.gamma_00))


def _check_leakage(weights_top_two: float, cfg: fs.FockConfig, context: str):
    if weights_top_two > cfg.leak_tol:
        raise TruncationError(
            f"{context}: {weights_top_two:.3e} of the population sits on the top "
            f"two Fock levels (leak_tol = {cfg.leak_tol:.3e})"
        )


def _state_leakage(vec: np.ndarray, dim: int) -> float:
    idx = np.r_[dim - 2 : dim, 2 * dim - 2 : 2 * dim]
    return float(np.sum(np.abs(vec[idx]) ** 2))


def _density_leakage(mat: np.ndarray, dim: int) -> float:
    idx = np.r_[dim - 2 : dim, 2 * dim - 2 : 2 * dim]
    return float(np.sum(np.real(np.diag(mat)[idx])))


def coherent_initial_state(sys: SystemParams, cfg: fs.FockConfig) -> QuantumState:
    """Original-picture image of the displaced-picture vacuum: |+eta/2>|g>."""
    disp = fs.displacement_matrix(sys.eta / 2.0, cfg)
    vec = np.zeros(2 * cfg.dim, dtype=complex)
    vec[: cfg.dim] = disp[:, 0]
    return QuantumState(vec, "original")


def ground_initial_state(sys: SystemParams, cfg: fs.FockConfig) -> QuantumState:
    """True numerical ground state of the undriven laboratory Hamiltonian."""
    from .hamiltonians import ground_state, original_static_hamiltonian

    _, vec = ground_state(original_static_hamiltonian(sys, cfg))
    return QuantumState(vec, "original")


def _drive_settings(schedule: PulseSchedule):
    """Per-step (Omega_d, omega_d, phi_d, duration) in lab units."""
    out = []
    for st in schedule.steps:
        omega_d = st.omega_d_n
        out.append((0.5 * schedule.x_d * omega_d, omega_d, st.phi_d_n, st.duration_tn))
    return out


def schrodinger_evolve(
    psi0: QuantumState,
    schedule: PulseSchedule,
    sys: SystemParams,
    cfg: fs.FockConfig,
    tol: float = 1e-9,
) -> QuantumState:
    """Integrate i dpsi/dt = H(t) psi through the schedule (original picture).

    Adaptive high-order Runge-Kutta with the step bounded by a twentieth of
    the drive period, so the cos(omega_d t) modulation is always resolved.
    """
    if psi0.picture != "original":
        raise PictureMismatch("schrodinger_evolve expects the original picture")
    dim = cfg.dim
    if psi0.dim != dim:
        raise DomainError("state dimension does not match cfg.dim")

    a = fs.annihilation(dim)
    h_static = (
        0.5 * sys.omega_z * fs.qubit_matrix(fs.SIGMA_Z, dim)
        + 0.5 * sys.omega_x * fs.qubit_matrix(fs.SIGMA_X, dim)
        + sys.omega_cav * fs.fock_matrix(fs.number_operator(dim))
        + sys.g * fs.qubit_matrix(fs.SIGMA_Z, dim) @ fs.fock_matrix(a + a.conj().T)
    )
    sz_diag = np.concatenate([-np.ones(dim), np.ones(dim)])

    psi = psi0.amplitudes.copy()
    for omega_amp, omega_d, phi_d, t_n in _drive_settings(schedule):
        if t_n == 0.0:
            continue

        def rhs(t, y):
            drive = omega_amp * math.cos(omega_d * t + phi_d)
            return -1j * (h_static @ y + drive * (sz_diag * y))

        sol = solve_ivp(
            rhs,
            (0.0, t_n),
            psi,
            method="DOP853",
            rtol=tol,
            atol=tol * 1e-2,
            max_step=(TWO_PI / omega_d) / 20.0,
            dense_output=False,
        )
        if not sol.success:
            raise StepSizeUnderflow(f"integration failed: {sol.message}")
        psi = sol.y[:, -1]

    _check_leakage(_state_leakage(psi, dim), cfg, "schrodinger_evolve")
    return QuantumState(psi, "original")


def dressed_sigma(i: int, j: int, sys: SystemParams) -> np.ndarray:
    """sigma_ij = |i><j| (0 = g, 1 = e) rotated into the qubit eigenbasis."""
    theta = sys.theta
    ry = expm(-1j * theta * fs.SIGMA_Y / 2.0)
    basis = np.zeros((2, 2), dtype=complex)
    basis[i, j] = 1.0
    return ry @ basis @ ry.conj().T


def lindblad_evolve(
    rho0: DensityMatrix,
    schedule: PulseSchedule,
    sys: SystemParams,
    rates: LindbladRates,
    cfg: fs.FockConfig,
    tol: float = 1e-8,
) -> DensityMatrix:
    """Integrate the master equation through the schedule (original picture)."""
    if rho0.picture != "original":
        raise PictureMismatch("lindblad_evolve expects the original picture")
    dim = cfg.dim
    if rho0.dim != dim:
        raise DomainError("density dimension does not match cfg.dim")

    a = fs.annihilation(dim)
    h_static = (
        0.5 * sys.omega_z * fs.qubit_matrix(fs.SIGMA_Z, dim)
        + 0.5 * sys.omega_x * fs.qubit_matrix(fs.SIGMA_X, dim)
        + sys.omega_cav * fs.fock_matrix(fs.number_operator(dim))
        + sys.g * fs.qubit_matrix(fs.SIGMA_Z, dim) @ fs.fock_matrix(a + a.conj().T)
    )
    sz_diag = np.concatenate([-np.ones(dim), np.ones(dim)])

    # Jump operators with their rates: relaxation s~_01, dephasings s~_11 / s~_00,
    # cavity decay a.  Each enters as (rate/2)(2 L rho L+ - L+L rho - rho L+L).
    jumps = []
    if rates.gamma_10 > 0:
        jumps.append((rates.gamma_10, fs.qubit_matrix(dressed_sigma(0, 1, sys), dim)))
    if rates.gamma_11 > 0:
        jumps.append((rates.gamma_11, fs.qubit_matrix(dressed_sigma(1, 1, sys), dim)))
    if rates.gamma_00 > 0:
        jumps.append((rates.gamma_00, fs.qubit_matrix(dressed_sigma(0, 0, sys), dim)))
    if rates.kappa > 0:
        jumps.append((rates.kappa, fs.fock_matrix(a)))
    pairs = [(g, L, L.conj().T @ L) for g, L in jumps]

    size = 2 * dim
    rho = rho0.matrix.copy()
    for omega_amp, omega_d, phi_d, t_n in _drive_settings(schedule):
        if t_n == 0.0:
            continue

        def rhs(t, y):
            r = y.reshape(size, size)
            drive = omega_amp * math.cos(omega_d * t + phi_d)
            h = h_static + drive * np.diag(sz_diag)
            out = -1j * (h @ r - r @ h)
            for g, L, LdL in pairs:
                out += 0.5 * g * (2.0 * (L @ r @ L.conj().T) - LdL @ r - r @ LdL)
            return out.ravel()

        sol = solve_ivp(
            rhs,
            (0.0, t_n),
            rho.ravel(),
            method="DOP853",
            rtol=tol,
            atol=tol * 1e-2,
            max_step=(TWO_PI / omega_d) / 20.0,
        )
        if not sol.success:
            raise StepSizeUnderflow(f"integration failed: {sol.message}")
        rho = sol.y[:, -1].reshape(size, size)

    rho = 0.5 * (rho + rho.conj().T)
    eigmin = float(np.linalg.eigvalsh(rho)[0])
    if eigmin < -1e-6:
        raise PositivityLoss(f"smallest eigenvalue {eigmin:.3e} < -1e-6")
    _check_leakage(_density_leakage(rho, dim), cfg, "lindblad_evolve")
    return DensityMatrix(rho, "original")


def _picture_unitary(sys: SystemParams, cfg: fs.FockConfig, to_original: bool) -> np.ndarray:
    """Block-diagonal D^+( eta sigma_z/2 ) (to original) or D( . ) (to displaced).

    D(eta sigma_z/2) displaces the g branch by -eta/2 and the e branch by
    +eta/2 (sigma_z|g> = -|g>); its inverse undoes that.
    """
    half = sys.eta / 2.0
    sign = 1.0 if to_original else -1.0
    d_g = fs.displacement_matrix(sign * half, cfg)
    d_e = fs.displacement_matrix(-sign * half, cfg)
    u = np.zeros((2 * cfg.dim, 2 * cfg.dim), dtype=complex)
    u[: cfg.dim, : cfg.dim] = d_g
    u[cfg.dim :, cfg.dim :] = d_e
    return u


def to_original_picture(state, sys: SystemParams, cfg: fs.FockConfig):
    """Map a displaced-picture state/density to the original picture."""
    if state.picture != "displaced":
        raise PictureMismatch(f"expected a displaced-picture operand, got {state.picture!r}")
    u = _picture_unitary(sys, cfg, to_original=True)
    return _apply_picture(state, u, "original", cfg)


def to_displaced_picture(state, sys: SystemParams, cfg: fs.FockConfig):
    """Map an original-picture state/density to the displacement picture."""
    if state.picture != "original":
        raise PictureMismatch(f"expected an original-picture operand, got {state.picture!r}")
    u = _picture_unitary(sys, cfg, to_original=False)
    return _apply_picture(state, u, "displaced", cfg)


def _apply_picture(state, u, tag, cfg):
    if isinstance(state, QuantumState):
        vec = u @ state.amplitudes
        _check_leakage(_state_leakage(vec, cfg.dim), cfg, "picture transform")
        return QuantumState(vec, tag)
    mat = u @ state.matrix @ u.conj().T
    _check_leakage(_density_leakage(mat, cfg.dim), cfg, "picture transform")
    mat = 0.5 * (mat + mat.conj().T)
    return DensityMatrix(mat, tag)


def photon_distribution(state) -> np.ndarray:
    """P_l summed over both qubit branches."""
    if isinstance(state, QuantumState):
        dim = state.dim
        amp = state.amplitudes
        return np.abs(amp[:dim]) ** 2 + np.abs(amp[dim:]) ** 2
    dim = state.dim
    diag = np.real(np.diag(state.matrix))
    return diag[:dim] + diag[dim:]


def displaced_photon_distribution(target: TargetState, alpha: complex, l_max: int) -> np.ndarray:
    """Closed-form photon distribution of sum_n C_n |alpha, n>.

    P_l = | sum_n C_n <l|alpha,n> |^2, the double sum over displaced number
    states including the interference cross terms.
    """
    out = np.empty(l_max + 1)
    for l in range(l_max + 1):
        amp = sum(
            c * fs.displaced_number_overlap(l, alpha, n)
            for n, c in enumerate(target.coeffs)
        )
        out[l] = abs(amp) ** 2
    return out


def fidelity(rho_a: DensityMatrix, rho_d: DensityMatrix) -> float:
    """Tr{rho_a rho_d}; for a pure rho_d this is <psi_d|rho_a|psi_d>."""
    if rho_a.picture != rho_d.picture:
        raise PictureMismatch(f"pictures differ: {rho_a.picture!r} vs {rho_d.picture!r}")
    if rho_a.matrix.shape != rho_d.matrix.shape:
        raise DomainError("density matrices have different dimensions")
    return float(np.real(np.trace(rho_a.matrix @ rho_d.matrix)))


def trace_out_qubit(rho: DensityMatrix) -> np.ndarray:
    """Partial trace over the qubit: <g|rho|g> + <e|rho|e>."""
    dim = rho.dim
    m = rho.matrix
    return m[:dim, :dim] + m[dim:, dim:]


def displaced_target_density(target: TargetState, sys: SystemParams, cfg: fs.FockConfig) -> DensityMatrix:
    """Ideal target state displaced into the original picture (pure density)."""
    psi = QuantumState(target.vector(cfg.dim), "displaced")
    return to_original_picture(psi, sys, cfg).density()


def state_to_json(state: QuantumState) -> dict:
    """Binary-free layout: interleaved re/im, row-major, with picture and dim."""
    flat = np.column_stack([state.amplitudes.real, state.amplitudes.imag]).ravel()
    return {"kind": "state", "dim": state.dim, "picture": state.picture, "data": flat.tolist()}


def state_from_json(payload: dict) -> QuantumState:
    data = np.asarray(payload["data"], dtype=float).reshape(-1, 2)
    return QuantumState(data[:, 0] + 1j * data[:, 1], payload["picture"])


def density_to_json(rho: DensityMatrix) -> dict:
    flat = np.column_stack([rho.matrix.real.ravel(), rho.matrix.imag.ravel()]).ravel()
    return {"kind": "density", "dim": rho.dim, "picture": rho.picture, "data": flat.tolist()}


def density_from_json(payload: dict) -> DensityMatrix:
    side = 2 * payload["dim"]
    data = np.asarray(payload["data"], dtype=float).reshape(-1, 2)
    mat = (data[:, 0] + 1j * data[:, 1]).reshape(side, side)
    return DensityMatrix(mat, payload["picture"])
