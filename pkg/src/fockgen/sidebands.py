"""Sideband bookkeeping: resonances, effective couplings, Rabi frequencies,
collision checks, and the closed-form evolution operators.

A drive at frequency omega_d picks, out of the Jacobi-Anger expansion of the
displaced coupling, one resonant component labelled by a nonzero integer N
(the Bessel order) and a photon number k:

    red      |n+k>|g>  <->  |n>|e>     omega_d = (omega_z - k omega) / |N|
    blue     |n>|g>    <->  |n+k>|e>   omega_d = (omega_z + k omega) / |N|
    carrier  |n>|g>    <->  |n>|e>     omega_d =  omega_z / |N|

The sign of N never enters the resonance condition (a classical drive has a
positive frequency); it selects which Jacobi-Anger component is resonant and
therefore only affects the coupling constant through J_N(x_d) and the phase
factor exp(i N phi_d).  N = 0 is excluded: that component does not involve
the drive at all.

Effective coupling constants (k-photon processes):

    red:     (-1)^k (omega_x/2) J_N(x_d) exp(-eta^2/2 + i N phi_d) eta^k
    blue:            (omega_x/2) J_N(x_d) exp(-eta^2/2 + i N phi_d) eta^k
    carrier:         (omega_x/2) J_N(x_d) exp(-eta^2/2 + i N phi_d)

and the complex Rabi frequency between the coupled pair at lower photon
number n is  Omega^{k,n} = J_coupling * sqrt(n!/(n+k)!) * L_n^(k)(eta^2).
The evolution operators are assembled analytically from these matrix
elements (2x2 rotation blocks), never by matrix exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import fockspace as fs
from .errors import DomainError, NonPositiveDrive, TruncationError
from .hamiltonians import SystemParams

__all__ = [
    "SidebandSpec",
    "RabiFrequency",
    "CollisionReport",
    "resonant_drive_frequency",
    "collision_report",
    "coupling_constant",
    "rabi_frequency",
    "evolution_operator",
]

KINDS = ("red", "blue", "carrier")


@dataclass(frozen=True)
class SidebandSpec:
    """One controllable process: kind in {red, blue, carrier}, Bessel order N != 0,
    photon number k (k = 0 exactly for the carrier)."""

    kind: str
    N: int = -1
    k: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.N == 0:
            raise DomainError("N = 0 is excluded: that component does not couple to the drive")
        if self.kind == "carrier" and self.k != 0:
            raise DomainError("carrier requires k = 0")
        if self.kind != "carrier" and self.k < 1:
            raise DomainError(f"{self.kind} sideband requires k >= 1, got k={self.k}")


@dataclass(frozen=True)
class RabiFrequency:
    """Magnitude (rad/ns) and phase in (-pi, pi] of a complex Rabi frequency."""

    magnitude: float
    phase: float

    @classmethod
    def from_complex(cls, z: complex) -> "RabiFrequency":
        return cls(abs(z), math.atan2(z.imag, z.real))

    @property
    def as_complex(self) -> complex:
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))


def resonant_drive_frequency(spec: SidebandSpec, sys: SystemParams) -> float:
    """Drive frequency (rad/ns) that makes the process resonant.

    Raises NonPositiveDrive when the resonance formula yields omega_d <= 0
    (e.g. a red sideband with k omega >= omega_z).
    """
    n_abs = abs(spec.N)
    if spec.kind == "red":
        omega_d = (sys.omega_z - spec.k * sys.omega_cav) / n_abs
    elif spec.kind == "blue":
        omega_d = (sys.omega_z + spec.k * sys.omega_cav) / n_abs
    else:
        omega_d = sys.omega_z / n_abs
    if omega_d <= 0:
        raise NonPositiveDrive(
            f"{spec.kind} (N={spec.N}, k={spec.k}) resonates at omega_d = {omega_d:.6g} <= 0"
        )
    return omega_d


@dataclass(frozen=True)
class CollisionReport:
    """Processes accidentally resonant at the same drive frequency, plus
    commensurability flags omega_z ~ n*omega/j for j = 1, 2, 3."""

    collisions: tuple[tuple[int, int, str], ...]
    omega_z_flags: tuple[str, ...]

    @property
    def clean(self) -> bool:
        return not self.collisions and not self.omega_z_flags


def collision_report(
    spec: SidebandSpec,
    sys: SystemParams,
    N_range=range(-3, 4),
    k_range=range(1, 11),
    rel_tol: float = 1e-6,
) -> CollisionReport:
    """Enumerate processes (N', k', kind') resonant at spec's drive frequency.

    The spec's own process is excluded, including its mirror N' = -N: both
    signed orders describe the same drive, |J_N| = |J_{-N}|.  Also flags
    omega_z = n*omega, n*omega/2, n*omega/3 (the commensurabilities through
    which the dominant unwanted orders N' = 0, +-1, +-2 become resonant).
    """
    omega_d = resonant_drive_frequency(spec, sys)
    hits = []
    for n_prime in N_range:
        if n_prime == 0:
            continue
        for kind in KINDS:
            k_values = (0,) if kind == "carrier" else tuple(k_range)
            for k_prime in k_values:
                if kind == spec.kind and abs(n_prime) == abs(spec.N) and k_prime == spec.k:
                    continue
                try:
                    other = resonant_drive_frequency(SidebandSpec(kind, n_prime, k_prime), sys)
                except NonPositiveDrive:
                    continue
                if abs(other - omega_d) <= rel_tol * omega_d:
                    hits.append((n_prime, k_prime, kind))

    flags = []
    for j in (1, 2, 3):
        ratio = j * sys.omega_z / sys.omega_cav  # integer iff omega_z = n*omega/j
        if abs(ratio - round(ratio)) <= rel_tol * max(abs(ratio), 1.0) and round(ratio) != 0:
            flags.append(f"omega_z = {round(ratio)}*omega/{j}")
    return CollisionReport(tuple(hits), tuple(flags))


def coupling_constant(spec: SidebandSpec, sys: SystemParams, x_d: float, phi_d: float) -> complex:
    """Effective coupling constant J_{N,beta}^(k) of the resonant process."""
    if sys.eta <= 0:
        raise DomainError("coupling constants require eta > 0")
    eta = sys.eta
    base = (
        0.5
        * sys.omega_x
        * fs.bessel_j(spec.N, x_d)
        * np.exp(-0.5 * eta**2 + 1j * spec.N * phi_d)
    )
    if spec.kind == "red":
        return complex((-1) ** spec.k * base * eta**spec.k)
    if spec.kind == "blue":
        return complex(base * eta**spec.k)
    return complex(base)


def rabi_frequency(
    spec: SidebandSpec, n: int, sys: SystemParams, x_d: float, phi_d: float
) -> RabiFrequency:
    """Complex Rabi frequency Omega^{k,n} between the pair coupled at photon number n.

    Omega^{k,n} = J_coupling * sqrt(n!/(n+k)!) * L_n^(k)(eta^2).
    """
    if n < 0:
        raise DomainError(f"need n >= 0, got {n}")
    j = coupling_constant(spec, sys, x_d, phi_d)
    weight = math.exp(0.5 * (gammaln(n + 1) - gammaln(n + spec.k + 1)))
    z = j * weight * fs.laguerre(n, spec.k, sys.eta**2)
    return RabiFrequency.from_complex(z)


def _rotation_angles(spec, sys, x_d, phi_d, t, count):
    """cos/sin/phase arrays of the 2x2 blocks for n = 0..count-1."""
    cos = np.empty(count)
    sin = np.empty(count)
    phase = np.empty(count)
    for n in range(count):
        om = rabi_frequency(spec, n, sys, x_d, phi_d)
        cos[n] = math.cos(om.magnitude * t)
        sin[n] = math.sin(om.magnitude * t)
        phase[n] = om.phase
    return cos, sin, phase


def evolution_operator(
    spec: SidebandSpec,
    t: float,
    sys: SystemParams,
    x_d: float,
    phi_d: float,
    cfg: fs.FockConfig,
) -> np.ndarray:
    """Closed-form interaction-picture propagator of the resonant process.

    Each coupled pair rotates as

        [ cos(|O|t)                ,  exp(-i phi - i pi/2) sin(|O|t) ]
        [ exp(+i phi - i pi/2) sin ,  cos(|O|t)                      ]

    with rows/columns ordered (qubit-ground side, qubit-excited side), so the
    qubit-exciting direction carries exp(+i phi).  Couplings whose upper Fock
    index would exceed the truncation are zeroed, leaving those levels
    untouched; k >= dim/2 is rejected outright.
    """
    if t < 0:
        raise DomainError(f"need t >= 0, got {t}")
    dim = cfg.dim
    if spec.k >= dim / 2:
        raise TruncationError(f"k = {spec.k} does not fit a dim = {dim} truncation")

    u = np.eye(2 * dim, dtype=complex)
    k = spec.k
    count = dim if spec.kind == "carrier" else dim - k
    cos, sin, phase = _rotation_angles(spec, sys, x_d, phi_d, t, count)
    down = np.exp(-1j * phase - 1j * math.pi / 2) * sin  # upper -> lower amplitude
    up = np.exp(+1j * phase - 1j * math.pi / 2) * sin    # lower -> upper amplitude

    for n in range(count):
        if spec.kind == "red":
            i_up = dim + n        # |n>|e>
            i_lo = n + k          # |n+k>|g>
        elif spec.kind == "blue":
            i_up = dim + n + k    # |n+k>|e>
            i_lo = n              # |n>|g>
        else:
            i_up = dim + n        # |n>|e>
            i_lo = n              # |n>|g>
        u[i_up, i_up] = cos[n]
        u[i_lo, i_lo] = cos[n]
        u[i_lo, i_up] = down[n]
        u[i_up, i_lo] = up[n]
    return u
