"""Pulse-schedule planner for synthesizing Fock-state superpositions.

A target sum_k C_k |k>|g> (k = 0..n_max) is generated from |0>|g> by one
carrier pulse followed by red sidebands k = 1..n_max; the mirrored variant
builds sum_k C_k |k>|e> with blue sidebands instead.  Both reduce to the
same bookkeeping:

* Step magnitudes.  The carrier splits |0>|g> against the transfer
  reservoir; each sideband step n then moves amplitude |C_n| out of the
  reservoir, giving the durations

      |O_c| t_0 = arccos|C_0|            (red; arcsin|C_0| for blue)
      |O_n| t_n = arcsin( |C_n| / sqrt(sum_{k>=n} |C_k|^2) )

  with the shortest branch (no extra 2*pi cycles) taken everywhere.

* Step phases.  Transforming in and out of the interaction picture attaches
  a phase alpha to every amplitude of every step, a nonlinear function of
  the per-step drive phase phi_d through sin(omega_d t_n + phi_d) terms and
  through the argument of the complex Rabi frequency (N phi_d plus 0 or pi).
  Each step leaves one phase relation between the freshly created
  coefficient and the reservoir; it is solved for phi_d by bracketed 1-D
  root finding on (-pi, pi], taking the root closest to zero when several
  exist.

* Global phase.  The vanishing transfer reservoir after the last step is
  assigned phase zero (the published convention), which pins every drive
  phase; the reconstructed initial amplitude then carries a leftover phase.
  That phase is unavoidable: the argument of the final C_0 winds zero times
  in every drive phase (only bounded sin terms move it), so no choice of
  phases can null it once the shortest-pulse durations are fixed.  The
  planner therefore reproduces the target exactly up to the recorded
  ``global_phase`` (forward state = exp(i*global_phase) * target), with all
  magnitudes and relative phases exact.

The analytic total generation time and the optimal Lamb-Dicke parameter
(stationary points of the normalized time, a polynomial condition in eta)
live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from . import fockspace as fs
from .errors import CollisionDetected, DomainError, PhaseUnsolvable, ZeroBessel
from .hamiltonians import TWO_PI, SystemParams
from .sidebands import (
    SidebandSpec,
    collision_report,
    evolution_operator,
    rabi_frequency,
    resonant_drive_frequency,
)

__all__ = [
    "TargetState",
    "PulseStep",
    "PulseSchedule",
    "EtaOptimum",
    "plan_schedule",
    "forward_coefficients",
    "simulate_ideal",
    "total_time",
    "optimize_eta",
    "schedule_to_json",
    "schedule_from_json",
]

_BESSEL_FLOOR = 1e-12


@dataclass(frozen=True)
class TargetState:
    """Normalized target coefficients C_0..C_{n_max} on one qubit branch."""

    coeffs: tuple
    qubit_branch: str = "g"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if len(self.coeffs) == 0:
            raise DomainError("target needs at least one coefficient")
        if self.qubit_branch not in ("g", "e"):
            raise DomainError(f"qubit_branch must be 'g' or 'e', got {self.qubit_branch!r}")
        norm = sum(abs(c) ** 2 for c in self.coeffs)
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"coefficients must be normalized; sum |C|^2 = {norm!r}")

    @classmethod
    def normalized(cls, coeffs, qubit_branch: str = "g") -> "TargetState":
        """Build from unnormalized coefficients (zero vectors rejected)."""
        arr = np.asarray(list(coeffs), dtype=complex)
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise DomainError("cannot normalize a zero target")
        return cls(tuple(arr / norm), qubit_branch)

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def trimmed(self) -> tuple:
        """Coefficients with trailing zeros removed (keeps at least C_0)."""
        last = 0
        for idx, c in enumerate(self.coeffs):
            if abs(c) > 0:
                last = idx
        return self.coeffs[: last + 1]

    def vector(self, dim: int) -> np.ndarray:
        """Embed as a state vector on the qubit (x) Fock space."""
        if self.n_max + 2 >= dim:
            raise DomainError(f"target n_max = {self.n_max} needs dim > {self.n_max + 2}")
        vec = np.zeros(2 * dim, dtype=complex)
        offset = 0 if self.qubit_branch == "g" else dim
        for k, c in enumerate(self.coeffs):
            vec[offset + k] = c
        return vec


@dataclass(frozen=True)
class PulseStep:
    spec: SidebandSpec
    omega_d_n: float    # rad/ns
    phi_d_n: float      # rad
    duration_tn: float  # ns
    step_index: int


@dataclass(frozen=True)
class PulseSchedule:
    steps: tuple
    total_time_T: float
    normalized_time: float
    eta: float
    x_d: float
    bessel_order: int
    variant: str = "red"
    sys: SystemParams = field(repr=False, compare=False, default=None)
    global_phase: float = 0.0  # forward state = exp(i*global_phase) * target


@dataclass(frozen=True)
class EtaOptimum:
    eta: float
    t_tilde: float
    interior: bool  # False when no stationary point beat the interval endpoints


def _wrap(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    return -math.remainder(-x, TWO_PI)


def _solve_phase(f, xtol: float = 1e-12) -> float:
    """All phi in (-pi, pi] with f(phi) = 0 mod 2*pi; returns the one nearest 0."""
    grid = np.linspace(-math.pi, math.pi, 4097)
    vals = np.array([f(p) for p in grid])
    lo = math.floor(vals.min() / TWO_PI)
    hi = math.ceil(vals.max() / TWO_PI)
    roots = []
    for m in range(lo, hi + 1):
        level = TWO_PI * m
        diff = vals - level
        sign = np.sign(diff)
        for j in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
            try:
                r = brentq(lambda p: f(p) - level, grid[j], grid[j + 1], xtol=xtol)
            except ValueError:
                continue
            roots.append(_wrap(r))
        roots.extend(_wrap(grid[j]) for j in np.nonzero(diff == 0)[0])
    if not roots:
        raise PhaseUnsolvable("no drive phase satisfies the step's phase relation")
    roots.sort(key=lambda r: (abs(r), r))
    return roots[0]


class _StepPhases:
    """alpha-phase bookkeeping of one step (in/out of the interaction picture).

    For a sideband step n >= 1 the roles are: `spectator(k)` multiplies the
    untouched coefficients, `created` the sin-branch output (the fresh |n>
    coefficient), `reservoir` the cos-branch survivor.  For the carrier
    (n = 0) use `carrier_g` (cos branch on |0>|g>) and `carrier_e`
    (sin branch onto |0>|e>).
    """

    def __init__(self, variant, sys, N, x_d, n, t_n, omega_d):
        self.variant = variant
        self.sys = sys
        self.N = N
        self.x_d = x_d
        self.n = n
        self.t = t_n
        self.omega_d = omega_d
        kind = "carrier" if n == 0 else ("red" if variant == "red" else "blue")
        self.spec = SidebandSpec(kind, N, 0 if n == 0 else n)
        ref = rabi_frequency(self.spec, 0, sys, x_d, 0.0)
        self.rabi_mag = ref.magnitude
        self.arg0 = ref.phase  # arg O(phi_d) = N phi_d + arg0 exactly

    def _S(self, phi):
        return math.sin(self.omega_d * self.t + phi)

    def phi_rabi(self, phi):
        return self.N * phi + self.arg0

    def spectator(self, k, phi):
        half = 0.5 * self.x_d * (self._S(phi) - math.sin(phi))
        orbit = -k * self.sys.omega_cav * self.t
        if self.variant == "red":  # spectators sit on the g branch
            return half + 0.5 * self.sys.omega_z * self.t + orbit
        return -half - 0.5 * self.sys.omega_z * self.t + orbit

    def created(self, phi):
        n, t = self.n, self.t
        both = 0.5 * self.x_d * (self._S(phi) + math.sin(phi))
        if self.variant == "red":  # created on the g branch at photon n
            return (
                both + 0.5 * self.sys.omega_z * t - n * self.sys.omega_cav * t
                - self.phi_rabi(phi) - 0.5 * math.pi
            )
        return (  # created on the e branch at photon n
            -both - 0.5 * self.sys.omega_z * t - n * self.sys.omega_cav * t
            + self.phi_rabi(phi) - 0.5 * math.pi
        )

    def reservoir(self, phi):
        half = 0.5 * self.x_d * (self._S(phi) - math.sin(phi))
        if self.variant == "red":  # reservoir is |0>|e>
            return -half - 0.5 * self.sys.omega_z * self.t
        return half + 0.5 * self.sys.omega_z * self.t  # reservoir is |0>|g>

    def carrier_g(self, phi):
        return 0.5 * self.x_d * (self._S(phi) - math.sin(phi)) + 0.5 * self.sys.omega_z * self.t

    def carrier_e(self, phi):
        return (
            -0.5 * self.x_d * (self._S(phi) + math.sin(phi))
            - 0.5 * self.sys.omega_z * self.t
            + self.phi_rabi(phi)
            - 0.5 * math.pi
        )


def _step_phases(variant, sys, N, x_d, durations, omega_ds):
    return [
        _StepPhases(variant, sys, N, x_d, n, durations[n], omega_ds[n])
        for n in range(len(durations))
    ]


def _plan_backward(coeffs, variant, phases, gamma):
    """One backward pass at reservoir gauge gamma.

    Returns (phi list, chi): the per-step drive phases and the phase of the
    reconstructed initial amplitude C^(-1) (chi = 0 means the plan hits the
    target exactly).
    """
    n_max = len(coeffs) - 1
    created = list(coeffs)
    reservoir = 0.0 + 0.0j  # C_{0e} for red, C_{0g} for blue
    phis = [0.0] * (n_max + 1)
    tails = np.cumsum(np.abs(coeffs[::-1]) ** 2)[::-1]

    for n in range(n_max, 0, -1):
        ph = phases[n]
        if ph.t == 0.0:
            continue  # identity step: every alpha vanishes at t = 0
        sin_n = min(abs(coeffs[n]) / math.sqrt(tails[n]), 1.0)
        cos_n = math.sqrt(max(1.0 - sin_n**2, 0.0))
        if n == n_max:
            target_arg = float(np.angle(created[n]))
            phi = _solve_phase(lambda p: ph.created(p) + gamma - target_arg)
            reservoir_prev = created[n] / (np.exp(1j * ph.created(phi)) * sin_n)
        else:
            delta = float(np.angle(created[n])) - float(np.angle(reservoir))
            phi = _solve_phase(lambda p: ph.created(p) - ph.reservoir(p) - delta)
            reservoir_prev = reservoir / (np.exp(1j * ph.reservoir(phi)) * cos_n)
        phis[n] = phi
        for k in range(n):
            created[k] = created[k] / np.exp(1j * ph.spectator(k, phi))
        reservoir = reservoir_prev

    # Carrier: C_{0g}^(0) = e^(i a_g) cos * C^(-1),  C_{0e}^(0) = e^(i a_e) sin * C^(-1).
    ph = phases[0]
    g_amp = created[0] if variant == "red" else reservoir
    e_amp = reservoir if variant == "red" else created[0]
    if ph.t == 0.0:
        return phis, _wrap(float(np.angle(g_amp)))
    cos_0 = abs(g_amp)
    if cos_0 == 0:
        e_arg = float(np.angle(e_amp))
        phis[0] = _solve_phase(lambda p: ph.carrier_e(p) - e_arg)
        return phis, 0.0
    delta = float(np.angle(g_amp)) - float(np.angle(e_amp))
    phi = _solve_phase(lambda p: ph.carrier_g(p) - ph.carrier_e(p) - delta)
    phis[0] = phi
    return phis, _wrap(float(np.angle(g_amp)) - ph.carrier_g(phi))


def forward_coefficients(schedule: "PulseSchedule", n_max: int):
    """Apply the step recursions forward from C^(-1) = 1.

    Returns (coeffs, reservoir_left): the final coefficients C_0..C_{n_max}
    on the target branch and the residual reservoir amplitude (zero for an
    exact plan).  This runs the same recursion the planner inverted, so
    agreement with the target exercises every alpha-phase formula.
    """
    variant = schedule.variant
    sys = schedule.sys
    coeffs = [0.0j] * (n_max + 1)
    if not schedule.steps:
        coeffs[0] = 1.0 + 0.0j
        return coeffs, 0.0j

    st0 = schedule.steps[0]
    ph0 = _StepPhases(variant, sys, schedule.bessel_order, schedule.x_d, 0, st0.duration_tn, st0.omega_d_n)
    ang0 = ph0.rabi_mag * st0.duration_tn
    amp_g = np.exp(1j * ph0.carrier_g(st0.phi_d_n)) * math.cos(ang0)
    amp_e = np.exp(1j * ph0.carrier_e(st0.phi_d_n)) * math.sin(ang0)
    coeffs[0] = amp_g if variant == "red" else amp_e
    reservoir = amp_e if variant == "red" else amp_g

    for st in schedule.steps[1:]:
        n = st.spec.k
        ph = _StepPhases(variant, sys, schedule.bessel_order, schedule.x_d, n, st.duration_tn, st.omega_d_n)
        if st.duration_tn == 0.0:
            continue
        ang = ph.rabi_mag * st.duration_tn
        phi = st.phi_d_n
        for k in range(n):
            coeffs[k] = coeffs[k] * np.exp(1j * ph.spectator(k, phi))
        coeffs[n] = np.exp(1j * ph.created(phi)) * math.sin(ang) * reservoir
        reservoir = np.exp(1j * ph.reservoir(phi)) * math.cos(ang) * reservoir
    return coeffs, reservoir


def plan_schedule(
    target: TargetState,
    sys: SystemParams,
    N: int = -1,
    x_d: float = 1.305,
    variant: str | None = None,
    collision_N_range=range(-3, 4),
    collision_k_range=range(1, 11),
) -> PulseSchedule:
    """Plan drive frequencies, phases, and durations for the target state.

    variant "red" (default for qubit_branch g) uses one carrier plus red
    sidebands k = 1..n_max; "blue" (qubit_branch e) mirrors it.  The plan
    realizes exp(i*global_phase) times the target (see module docstring).
    """
    if variant is None:
        variant = "red" if target.qubit_branch == "g" else "blue"
    if (variant == "red") != (target.qubit_branch == "g"):
        raise DomainError(
            f"variant {variant!r} ends on the wrong qubit branch for target branch "
            f"{target.qubit_branch!r}"
        )

    coeffs = np.array(target.trimmed(), dtype=complex)
    n_max = len(coeffs) - 1

    jn = fs.bessel_j(N, x_d)
    if abs(jn) < _BESSEL_FLOOR:
        raise ZeroBessel(f"J_{N}({x_d}) = {jn:.3e}: every Rabi frequency vanishes")

    if n_max == 0 and variant == "red":
        # Already the initial state (up to an unsynthesizable global phase).
        return PulseSchedule(
            steps=(), total_time_T=0.0, normalized_time=0.0, eta=sys.eta, x_d=x_d,
            bessel_order=N, variant=variant, sys=sys,
            global_phase=_wrap(float(np.angle(coeffs[0]))),
        )

    # Durations and drive frequencies (phase-independent), with collision checks.
    tails = np.cumsum(np.abs(coeffs[::-1]) ** 2)[::-1]
    durations, omega_ds, specs = [], [], []
    for n in range(n_max + 1):
        kind = "carrier" if n == 0 else ("red" if variant == "red" else "blue")
        spec = SidebandSpec(kind, N, 0 if n == 0 else n)
        mag = rabi_frequency(spec, 0, sys, x_d, 0.0).magnitude
        if mag < _BESSEL_FLOOR:
            raise ZeroBessel(f"step {n} Rabi frequency vanished (|Omega| = {mag:.3e})")
        if n == 0:
            c0 = min(abs(coeffs[0]), 1.0)
            angle = math.acos(c0) if variant == "red" else math.asin(c0)
        else:
            angle = math.asin(min(abs(coeffs[n]) / math.sqrt(tails[n]), 1.0))
        rep = collision_report(spec, sys, collision_N_range, collision_k_range)
        if not rep.clean:
            raise CollisionDetected(
                f"step {n} ({kind}, k={spec.k}) collides: "
                f"{list(rep.collisions) + list(rep.omega_z_flags)}",
                rep.collisions,
            )
        durations.append(angle / mag)
        omega_ds.append(resonant_drive_frequency(spec, sys))
        specs.append(spec)

    phases = _step_phases(variant, sys, N, x_d, durations, omega_ds)
    phis, chi = _plan_backward(coeffs, variant, phases, 0.0)
    global_phase = _wrap(-chi)

    steps = tuple(
        PulseStep(specs[n], omega_ds[n], phis[n], durations[n], n) for n in range(n_max + 1)
    )
    total = float(sum(durations))
    return PulseSchedule(
        steps=steps,
        total_time_T=total,
        normalized_time=total * abs(sys.omega_x * jn) / 2.0,
        eta=sys.eta,
        x_d=x_d,
        bessel_order=N,
        variant=variant,
        sys=sys,
        global_phase=global_phase,
    )


def _u0_diagonal(sys, x_d, omega_d, phi_d, t, dim):
    """Diagonal of U_0(t) = V_0(t) U_d(t) on the qubit (x) Fock space."""
    ns = np.arange(dim)
    drive = 0.5 * x_d * math.sin(omega_d * t + phi_d)
    ph_g = np.exp(1j * (-0.5 * sys.omega_z * t + sys.omega_cav * ns * t - drive))
    ph_e = np.exp(1j * (+0.5 * sys.omega_z * t + sys.omega_cav * ns * t + drive))
    return np.concatenate([ph_g, ph_e])


def simulate_ideal(schedule: PulseSchedule, target: TargetState, cfg: fs.FockConfig) -> float:
    """Apply the analytic step operators to |0>|g> and return |<target|psi>|^2.

    Works in the displacement picture: each step is
    U_0^(n)+(t_n) U_beta^(n)(t_n) U_0^(n)(0), with U_0 the diagonal frame
    bookkeeping and U_beta the closed-form sideband propagator.
    """
    sys = schedule.sys
    dim = cfg.dim
    if target.n_max + 2 >= dim:
        raise DomainError(f"target n_max = {target.n_max} needs dim > {target.n_max + 2}")
    psi = np.zeros(2 * dim, dtype=complex)
    psi[0] = 1.0  # |0>|g>
    for st in schedule.steps:
        psi = _u0_diagonal(sys, schedule.x_d, st.omega_d_n, st.phi_d_n, 0.0, dim) * psi
        psi = evolution_operator(st.spec, st.duration_tn, sys, schedule.x_d, st.phi_d_n, cfg) @ psi
        psi = np.conj(_u0_diagonal(sys, schedule.x_d, st.omega_d_n, st.phi_d_n, st.duration_tn, dim)) * psi
    return float(abs(np.vdot(target.vector(dim), psi)) ** 2)


def _t_tilde_of_eta(coeffs, eta: float) -> float:
    """Normalized generation time T|omega_x J_N|/2 as a function of eta."""
    tails = np.cumsum(np.abs(coeffs[::-1]) ** 2)[::-1]
    val = math.acos(min(abs(coeffs[0]), 1.0)) * math.exp(0.5 * eta**2)
    for n in range(1, len(coeffs)):
        ratio = min(abs(coeffs[n]) / math.sqrt(tails[n]), 1.0)
        val += math.exp(0.5 * (gammaln(n + 1) + eta**2)) * math.asin(ratio) / eta**n
    return val


def total_time(
    target: TargetState, sys: SystemParams, N: int, x_d: float, eta: float | None = None
):
    """Closed-form total generation time (T in ns, normalized T_tilde).

    T = (2 / |omega_x J_N|) e^(eta^2/2) [ arccos|C_0|
        + sum_n sqrt(n!) arcsin(|C_n| / sqrt(sum_{k>=n}|C_k|^2)) / eta^n ],
    with T_tilde = T |omega_x J_N| / 2.  Cycle periods are omitted (shortest
    pulses), matching the planner's red-variant durations.
    """
    jn = fs.bessel_j(N, x_d)
    if abs(jn) < _BESSEL_FLOOR:
        raise ZeroBessel(f"J_{N}({x_d}) = {jn:.3e}")
    eta = sys.eta if eta is None else eta
    coeffs = np.array(target.trimmed(), dtype=complex)
    t_tilde = _t_tilde_of_eta(coeffs, eta)
    return 2.0 * t_tilde / abs(sys.omega_x * jn), t_tilde


def optimize_eta(target: TargetState, bounds: tuple) -> EtaOptimum:
    """Lamb-Dicke parameter minimizing the normalized generation time.

    Stationary points satisfy sum_{n=-1}^{n_max+1} A_n eta^{n_max+1-n} = 0
    with A_{-1} = arccos|C_0| and A_n = P_{n+1} - (n-1) P_{n-1}, where
    P_j = sqrt(j!) arcsin(|C_j| / sqrt(sum_{k>=j}|C_k|^2)) and P_j = 0
    outside 1..n_max.  Real roots inside the bounds compete against the
    interval endpoints; `interior` is False when an endpoint wins.
    """
    lo, hi = float(bounds[0]), float(bounds[1])
    if not (0 < lo < hi):
        raise DomainError(f"need 0 < eta_lo < eta_hi, got {bounds}")
    coeffs = np.array(target.trimmed(), dtype=complex)
    n_max = len(coeffs) - 1
    tails = np.cumsum(np.abs(coeffs[::-1]) ** 2)[::-1]

    def p(j):
        if not 1 <= j <= n_max:
            return 0.0
        ratio = min(abs(coeffs[j]) / math.sqrt(tails[j]), 1.0)
        return math.exp(0.5 * gammaln(j + 1)) * math.asin(ratio)

    # poly[i] multiplies eta^(n_max+2-i); index i corresponds to n = i - 1.
    poly = np.zeros(n_max + 3)
    poly[0] = math.acos(min(abs(coeffs[0]), 1.0))
    for n in range(0, n_max + 2):
        poly[n + 1] = p(n + 1) - (n - 1) * p(n - 1)

    interior = []
    if np.any(np.abs(poly) > 0):
        roots = np.roots(poly)
        if roots.size:
            scale = max(float(np.max(np.abs(roots))), 1.0)
            for r in roots:
                if abs(r.imag) < 1e-9 * scale and lo < r.real < hi:
                    interior.append(float(r.real))

    candidates = [lo, hi] + interior
    best = min(candidates, key=lambda e: _t_tilde_of_eta(coeffs, e))
    return EtaOptimum(eta=best, t_tilde=_t_tilde_of_eta(coeffs, best), interior=best in interior)


def schedule_to_json(schedule: PulseSchedule) -> dict:
    """Documented serialization: frequencies as ordinary GHz, times in ns."""
    return {
        "steps": [
            {
                "kind": st.spec.kind,
                "N": st.spec.N,
                "k": st.spec.k,
                "omega_d_GHz": st.omega_d_n / TWO_PI,
                "phi_d_rad": st.phi_d_n,
                "t_ns": st.duration_tn,
            }
            for st in schedule.steps
        ],
        "total_time_ns": schedule.total_time_T,
        "eta": schedule.eta,
        "x_d": schedule.x_d,
    }


def schedule_from_json(data: dict, sys: SystemParams) -> PulseSchedule:
    steps = tuple(
        PulseStep(
            SidebandSpec(st["kind"], st["N"], st["k"]),
            st["omega_d_GHz"] * TWO_PI,
            st["phi_d_rad"],
            st["t_ns"],
            idx,
        )
        for idx, st in enumerate(data["steps"])
    )
    n_order = steps[0].spec.N if steps else -1
    variant = "red"
    for st in steps:
        if st.spec.kind in ("red", "blue"):
            variant = st.spec.kind
    jn = fs.bessel_j(n_order, data["x_d"])
    return PulseSchedule(
        steps=steps,
        total_time_T=data["total_time_ns"],
        normalized_time=data["total_time_ns"] * abs(sys.omega_x * jn) / 2.0,
        eta=data["eta"],
        x_d=data["x_d"],
        bessel_order=n_order,
        variant=variant,
        sys=sys,
    )
