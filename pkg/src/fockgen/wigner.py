"""Wigner functions from cavity density matrices via the Fock-basis kernel.

W(beta) = sum_mn rho_mn W_mn(beta), with the two-branch kernel

    W_mn = (2^(n-m+1)/pi) (-1)^m sqrt(m!/n!) beta^(n-m)
           e^(-2|beta|^2) L_m^(n-m)(4|beta|^2)            for m < n,

and the m >= n branch obtained by conjugation symmetry (beta* and swapped
indices), so W_nm = conj(W_mn) and the sum is real for Hermitian input.
The grid integral of W approximates the trace; displacing the state
displaces W rigidly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .errors import DomainError

__all__ = ["WignerGrid", "wigner_kernel", "wigner_from_density", "find_peak", "grid_integral"]


@dataclass(frozen=True)
class WignerGrid:
    """W sampled on a rectangular phase-space region, values[i, j] = W(x_i + i y_j)."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.x.size, self.y.size):
            raise DomainError("values must have shape (nx, ny)")

    @property
    def nx(self) -> int:
        return self.x.size

    @property
    def ny(self) -> int:
        return self.y.size

    @property
    def x_range(self):
        return float(self.x[0]), float(self.x[-1])

    @property
    def y_range(self):
        return float(self.y[0]), float(self.y[-1])


def wigner_kernel(m: int, n: int, beta) -> np.ndarray:
    """Kernel W_mn(beta, beta*) of the Fock-basis Wigner expansion."""
    if m < 0 or n < 0:
        raise DomainError(f"need m, n >= 0, got m={m}, n={n}")
    beta = np.asarray(beta, dtype=complex)
    b2 = np.abs(beta) ** 2
    if m < n:
        pref = (2.0 ** (n - m + 1) / np.pi) * (-1) ** m * np.exp(0.5 * (gammaln(m + 1) - gammaln(n + 1)))
        return pref * beta ** (n - m) * np.exp(-2.0 * b2) * eval_genlaguerre(m, n - m, 4.0 * b2)
    pref = (2.0 ** (m - n + 1) / np.pi) * (-1) ** n * np.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)))
    return pref * np.conj(beta) ** (m - n) * np.exp(-2.0 * b2) * eval_genlaguerre(n, m - n, 4.0 * b2)


def wigner_from_density(
    rho_c: np.ndarray,
    x_range=(-3.0, 3.0),
    y_range=(-3.0, 3.0),
    nx: int = 201,
    ny: int = 201,
    element_cutoff: float = 1e-14,
) -> WignerGrid:
    """Sum the kernel over all density-matrix elements above the cutoff."""
    rho_c = np.asarray(rho_c, dtype=complex)
    dim = rho_c.shape[0]
    if rho_c.shape != (dim, dim):
        raise DomainError("rho_c must be a square cavity density matrix")
    if nx < 2 or ny < 2:
        raise DomainError("need at least a 2x2 grid")
    x = np.linspace(x_range[0], x_range[1], nx)
    y = np.linspace(y_range[0], y_range[1], ny)
    beta = x[:, None] + 1j * y[None, :]

    w = np.zeros((nx, ny), dtype=complex)
    for m in range(dim):
        for n in range(dim):
            if abs(rho_c[m, n]) > element_cutoff:
                w += rho_c[m, n] * wigner_kernel(m, n, beta)

    imag_max = float(np.max(np.abs(w.imag))) if w.size else 0.0
    if imag_max > 1e-8:
        raise DomainError(f"Wigner sum has imaginary residue {imag_max:.3e}; input not Hermitian?")
    return WignerGrid(x, y, w.real)


def grid_integral(grid: WignerGrid) -> float:
    """Riemann sum of W over the grid (approximates the trace on its support)."""
    dx = grid.x[1] - grid.x[0]
    dy = grid.y[1] - grid.y[0]
    return float(np.sum(grid.values) * dx * dy)


def _parabolic_offset(w_minus: float, w_0: float, w_plus: float) -> float:
    denom = w_minus - 2.0 * w_0 + w_plus
    if denom == 0:
        return 0.0
    off = 0.5 * (w_minus - w_plus) / denom
    return float(np.clip(off, -0.5, 0.5))


def find_peak(grid: WignerGrid):
    """Location of the grid maximum with 3x3 parabolic sub-grid refinement.

    Ties between equal maxima break toward the smallest |beta|.
    """
    vals = grid.values
    top = np.max(vals)
    ii, jj = np.nonzero(vals == top)
    betas = np.abs(grid.x[ii] + 1j * grid.y[jj])
    pick = int(np.argmin(betas))
    i, j = int(ii[pick]), int(jj[pick])

    dx = grid.x[1] - grid.x[0]
    dy = grid.y[1] - grid.y[0]
    x_star = grid.x[i]
    y_star = grid.y[j]
    if 0 < i < grid.nx - 1:
        x_star += dx * _parabolic_offset(vals[i - 1, j], vals[i, j], vals[i + 1, j])
    if 0 < j < grid.ny - 1:
        y_star += dy * _parabolic_offset(vals[i, j - 1], vals[i, j], vals[i, j + 1])
    return float(x_star), float(y_star)
