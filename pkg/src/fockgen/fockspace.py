"""Special functions and truncated Fock-space operator constructors.

Everything downstream (Hamiltonians, sideband operators, the Wigner kernel)
is built from the primitives here: first-kind Bessel values, generalized
Laguerre polynomials, ladder operators on a truncated Fock space, and the
displacement operator in its closed Laguerre form

    <l|alpha,n> = alpha^(l-n) sqrt(n!/l!) exp(-|alpha|^2/2) L_n^(l-n)(|alpha|^2),   l >= n,
    <l|alpha,n> = (-alpha*)^(n-l) sqrt(l!/n!) exp(-|alpha|^2/2) L_l^(n-l)(|alpha|^2), l < n,

where |alpha,n> = D(alpha)|n> is a displaced number state.

The qubit lives on a 2-dimensional factor ordered (|g>, |e>) with
sigma_z|g> = -|g> and sigma_z|e> = +|e>; composite indices are q*dim + n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln, jv

from .errors import DomainError, TruncationError

__all__ = [
    "FockConfig",
    "bessel_j",
    "laguerre",
    "annihilation",
    "creation",
    "number_operator",
    "displaced_number_overlap",
    "displacement_matrix",
    "qubit_matrix",
    "fock_matrix",
    "SIGMA_Z",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_PLUS",
    "SIGMA_MINUS",
    "PROJ_G",
    "PROJ_E",
]

# Qubit operators in the (|g>, |e>) ordering, sigma_z = diag(-1, +1).
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)   # |e><g|
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
PROJ_G = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
PROJ_E = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)

_BESSEL_MAX_ORDER = 64
_BESSEL_MAX_ARG = 50.0


@dataclass(frozen=True)
class FockConfig:
    """Fock-space truncation: photon numbers 0..dim-1.

    leak_tol bounds the amplitude weight tolerated on the top two levels;
    operations that would push more weight there raise TruncationError.
    """

    dim: int = 40
    leak_tol: float = 1e-8

    def __post_init__(self):
        if self.dim < 4:
            raise DomainError(f"dim must be >= 4, got {self.dim}")
        if not 0.0 <= self.leak_tol < 1.0:
            raise DomainError(f"leak_tol must lie in [0, 1), got {self.leak_tol}")


def bessel_j(order: int, x: float) -> float:
    """First-kind Bessel J_N(x) for integer order, |N| <= 64, |x| <= 50.

    Integer orders obey the reflection identity J_N(x) = (-1)^N J_{-N}(x).
    """
    order = int(order)
    if abs(order) > _BESSEL_MAX_ORDER:
        raise DomainError(f"|order| must be <= {_BESSEL_MAX_ORDER}, got {order}")
    if abs(x) > _BESSEL_MAX_ARG:
        raise DomainError(f"|x| must be <= {_BESSEL_MAX_ARG}, got {x}")
    return float(jv(order, x))


def laguerre(n: int, k: int, x) -> float:
    """Generalized Laguerre polynomial L_n^(k)(x) for n, k >= 0 and x >= 0."""
    if n < 0 or k < 0:
        raise DomainError(f"need n, k >= 0, got n={n}, k={k}")
    if np.any(np.asarray(x) < 0):
        raise DomainError("need x >= 0")
    return eval_genlaguerre(n, k, x)


def annihilation(dim: int) -> np.ndarray:
    """Truncated annihilation operator, a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def creation(dim: int) -> np.ndarray:
    return annihilation(dim).conj().T


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def displaced_number_overlap(l: int, alpha: complex, n: int) -> complex:
    """Closed-form overlap <l|alpha,n> of a Fock state with a displaced number state."""
    if l < 0 or n < 0:
        raise DomainError(f"need l, n >= 0, got l={l}, n={n}")
    a2 = abs(alpha) ** 2
    if l >= n:
        amp = alpha ** (l - n) * np.sqrt(np.exp(gammaln(n + 1) - gammaln(l + 1)))
        lag = laguerre(n, l - n, a2)
    else:
        amp = (-np.conj(alpha)) ** (n - l) * np.sqrt(np.exp(gammaln(l + 1) - gammaln(n + 1)))
        lag = laguerre(l, n - l, a2)
    return complex(amp * np.exp(-a2 / 2.0) * lag)


def displacement_matrix(alpha: complex, cfg: FockConfig) -> np.ndarray:
    """Dense displacement operator D(alpha) with elements <l|alpha,n>.

    Unitary on the retained subspace; raises TruncationError when the
    displaced vacuum (column 0) carries more than leak_tol weight on the
    top two Fock levels.
    """
    dim = cfg.dim
    if abs(alpha) ** 2 > dim / 4.0:
        raise DomainError(
            f"|alpha|^2 = {abs(alpha)**2:.3g} exceeds dim/4 = {dim / 4.0:.3g}; "
            "the displaced vacuum is not representable at this truncation"
        )
    a2 = abs(alpha) ** 2
    ns = np.arange(dim)
    lgf = gammaln(ns + 1.0)  # log n!

    ll, nn = np.meshgrid(ns, ns, indexing="ij")
    d = ll - nn  # l - n
    # sqrt(min!/max!) in log space; Laguerre degree is min(l, n), order |l - n|.
    lower = np.minimum(ll, nn)
    ratio = np.exp(0.5 * (lgf[lower] - lgf[np.maximum(ll, nn)]))
    lag = eval_genlaguerre(lower, np.abs(d), a2)

    if alpha == 0:
        amp = np.where(d == 0, 1.0 + 0.0j, 0.0j)
    else:
        upper_amp = alpha ** np.where(d >= 0, d, 0)
        lower_amp = (-np.conj(alpha)) ** np.where(d < 0, -d, 0)
        amp = np.where(d >= 0, upper_amp, lower_amp)

    mat = amp * ratio * lag * np.exp(-a2 / 2.0)

    leak = np.sum(np.abs(mat[dim - 2 :, 0]) ** 2)
    if leak > cfg.leak_tol:
        raise TruncationError(
            f"displaced vacuum leaks {leak:.3e} onto the top two levels "
            f"(leak_tol = {cfg.leak_tol:.3e}; alpha = {alpha})"
        )
    return mat


def qubit_matrix(op2: np.ndarray, dim: int) -> np.ndarray:
    """Embed a 2x2 qubit operator into the qubit (x) Fock product space."""
    return np.kron(op2, np.eye(dim, dtype=complex))


def fock_matrix(op: np.ndarray) -> np.ndarray:
    """Embed a Fock-space operator into the qubit (x) Fock product space."""
    return np.kron(np.eye(2, dtype=complex), op)
