"""System/drive parameters, Hamiltonian builders, and the static ground state.

Units convention (applies to the whole package)
------------------------------------------------
All *configured* frequencies are ordinary frequencies in GHz and are
converted to angular frequencies in rad/ns by multiplying with 2*pi at the
boundary (``SystemParams.from_ghz`` and friends).  Internally every
``omega_*`` attribute is an angular frequency in rad/ns, times are in ns,
and hbar = 1.  A quoted value like "omega_z/2pi = 19.5 GHz" therefore maps
to ``omega_z = 2*pi*19.5`` rad/ns.

The laboratory Hamiltonian of the driven qubit-cavity system is

    H(t) = (omega_z/2) sz + (omega_x/2) sx + omega_cav a^ a
           + g sz (a + a^) + Omega_d sz cos(omega_d t + phi_d),

and the polaron-displaced static Hamiltonian (no drive) is

    H_eff = (omega_z/2) sz + omega_cav a^ a
            + (omega_x/2) { s+ exp[eta (a^ - a)] + h.c. },     eta = 2 g / omega_cav.

The two are unitarily equivalent, which the tests check through their
spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fockspace as fs
from .errors import DegenerateQubit, DomainError, EigensolveFailure

TWO_PI = 2.0 * math.pi

__all__ = [
    "SystemParams",
    "DriveParams",
    "QubitBasisParams",
    "full_hamiltonian",
    "qubit_basis_decomposition",
    "heff_static",
    "original_static_hamiltonian",
    "ground_state",
    "ground_vacuum_probability",
]


@dataclass(frozen=True)
class SystemParams:
    """Static system frequencies, all angular (rad/ns).

    omega_z may take any sign (it measures the asymmetry of the qubit
    potential); the remaining frequencies must be nonnegative.
    """

    omega_z: float
    omega_x: float
    omega_cav: float
    g: float

    def __post_init__(self):
        if self.omega_x < 0 or self.omega_cav <= 0 or self.g < 0:
            raise DomainError(
                "need omega_x >= 0, omega_cav > 0, g >= 0; got "
                f"omega_x={self.omega_x}, omega_cav={self.omega_cav}, g={self.g}"
            )

    @classmethod
    def from_ghz(cls, nu_z: float, nu_x: float, nu_cav: float, nu_g: float) -> "SystemParams":
        """Build from ordinary frequencies in GHz (multiplied by 2*pi internally)."""
        return cls(TWO_PI * nu_z, TWO_PI * nu_x, TWO_PI * nu_cav, TWO_PI * nu_g)

    @property
    def eta(self) -> float:
        """Normalized qubit-cavity coupling (Lamb-Dicke parameter), 2g/omega_cav."""
        return 2.0 * self.g / self.omega_cav

    @property
    def omega_q(self) -> float:
        """Qubit eigenfrequency sqrt(omega_x^2 + omega_z^2)."""
        return math.hypot(self.omega_x, self.omega_z)

    @property
    def theta(self) -> float:
        """Mixing angle of the qubit basis, atan2(omega_x, omega_z)."""
        return math.atan2(self.omega_x, self.omega_z)

    @property
    def large_detuning(self) -> bool:
        """True when omega_q > 5 omega_cav (checked, never assumed)."""
        return self.omega_q > 5.0 * self.omega_cav


@dataclass(frozen=True)
class DriveParams:
    """Classical drive: amplitude Omega_d, frequency omega_d, phase phi_d (all angular)."""

    Omega_d: float
    omega_d: float
    phi_d: float = 0.0

    def __post_init__(self):
        if self.Omega_d < 0 or self.omega_d <= 0:
            raise DomainError(
                f"need Omega_d >= 0 and omega_d > 0, got {self.Omega_d}, {self.omega_d}"
            )

    @classmethod
    def from_ghz(cls, nu_Omega: float, nu_d: float, phi_d: float = 0.0) -> "DriveParams":
        return cls(TWO_PI * nu_Omega, TWO_PI * nu_d, phi_d)

    @classmethod
    def from_xd(cls, x_d: float, omega_d: float, phi_d: float = 0.0) -> "DriveParams":
        """Build from the drive ratio x_d = 2 Omega_d / omega_d."""
        return cls(0.5 * x_d * omega_d, omega_d, phi_d)

    @property
    def x_d(self) -> float:
        return 2.0 * self.Omega_d / self.omega_d


@dataclass(frozen=True)
class QubitBasisParams:
    """Couplings projected onto the qubit eigenbasis."""

    g_z: float
    g_x: float
    Omega_dz: float
    Omega_dx: float
    omega_q: float
    theta: float


def qubit_basis_decomposition(sys: SystemParams, drv: DriveParams) -> QubitBasisParams:
    """Project the couplings onto the qubit eigenbasis.

    g_z = g cos(theta), g_x = -g sin(theta), and likewise for the drive,
    with theta = atan2(omega_x, omega_z).  Satisfies g_z^2 + g_x^2 = g^2 and
    Omega_dz^2 + Omega_dx^2 = Omega_d^2 identically.
    """
    if sys.omega_x == 0 and sys.omega_z == 0:
        raise DegenerateQubit("omega_x = omega_z = 0 leaves the qubit basis undefined")
    th = sys.theta
    return QubitBasisParams(
        g_z=sys.g * math.cos(th),
        g_x=-sys.g * math.sin(th),
        Omega_dz=drv.Omega_d * math.cos(th),
        Omega_dx=-drv.Omega_d * math.sin(th),
        omega_q=sys.omega_q,
        theta=th,
    )


def full_hamiltonian(sys: SystemParams, drv: DriveParams, t: float, cfg: fs.FockConfig) -> np.ndarray:
    """Laboratory Hamiltonian H(t) on the qubit (x) Fock space at time t (ns)."""
    dim = cfg.dim
    a = fs.annihilation(dim)
    h = (
        0.5 * sys.omega_z * fs.qubit_matrix(fs.SIGMA_Z, dim)
        + 0.5 * sys.omega_x * fs.qubit_matrix(fs.SIGMA_X, dim)
        + sys.omega_cav * fs.fock_matrix(fs.number_operator(dim))
        + sys.g * fs.qubit_matrix(fs.SIGMA_Z, dim) @ fs.fock_matrix(a + a.conj().T)
    )
    if drv.Omega_d != 0:
        h = h + drv.Omega_d * math.cos(drv.omega_d * t + drv.phi_d) * fs.qubit_matrix(fs.SIGMA_Z, dim)
    return h


def original_static_hamiltonian(sys: SystemParams, cfg: fs.FockConfig) -> np.ndarray:
    """Undriven laboratory Hamiltonian H' (original picture)."""
    return full_hamiltonian(sys, DriveParams(0.0, 1.0, 0.0), 0.0, cfg)


def heff_static(sys: SystemParams, cfg: fs.FockConfig) -> np.ndarray:
    """Undriven Hamiltonian in the displacement picture.

    The longitudinal coupling is traded for the exponential factor
    exp[eta (a^ - a)], built here from the closed-form displacement matrix.
    """
    dim = cfg.dim
    disp = fs.displacement_matrix(sys.eta, cfg)
    h = (
        0.5 * sys.omega_z * fs.qubit_matrix(fs.SIGMA_Z, dim)
        + sys.omega_cav * fs.fock_matrix(fs.number_operator(dim))
        + 0.5 * sys.omega_x * (np.kron(fs.SIGMA_PLUS, disp) + np.kron(fs.SIGMA_MINUS, disp.conj().T))
    )
    return h


def ground_state(h: np.ndarray) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a Hermitian matrix.

    Phase convention: the largest-magnitude component of the eigenvector is
    made real and positive, so results are reproducible across runs.
    """
    try:
        evals, evecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigensolveFailure(str(exc)) from exc
    vec = evecs[:, 0]
    pivot = int(np.argmax(np.abs(vec)))
    phase = vec[pivot] / abs(vec[pivot])
    return float(evals[0]), vec / phase


def ground_vacuum_probability(sys: SystemParams, cfg: fs.FockConfig) -> float:
    """Probability |<0,g|psi_g>|^2 for the displaced-picture ground state.

    With omega_x = 0 the Hamiltonian is diagonal and the ground state is
    exactly |0>|g>, so the probability is 1.
    """
    if sys.omega_x == 0:
        return 1.0
    _, vec = ground_state(heff_static(sys, cfg))
    return float(abs(vec[0]) ** 2)  # index 0 = |g>, photon 0
