"""Periodic Fourier collocation infrastructure.

Functions on a uniform grid over (-L, L) are represented by their nodal
values and expanded in the modes e^{i pi k x / L} for integer wavenumbers
k in {-N/2, ..., N/2 - 1}.  The forward transform is normalized by 1/N so
that coefficients approximate the continuous Fourier coefficients

    u_hat(k) = (1/2L) int_{-L}^{L} e^{-i pi k x / L} u(x) dx

(trapezoid quadrature at the nodes).  Because the first node sits at -L
rather than 0, the discrete transform picks up an alternating phase
(-1)^k relative to a plain FFT; diagonal multiplier operators are
unaffected (the phases cancel), so they are applied directly in FFT
layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError

__all__ = [
    "SpectralGrid",
    "Field",
    "Coefficients",
    "forward_transform",
    "inverse_transform",
    "fractional_laplacian",
    "derivative",
    "dealias",
    "l2_norm",
    "hs_norm",
    "linf_norm",
]


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid on (-L, L) with N collocation nodes.

    Nodes are x_j = -L + j h with h = 2L/N; the right endpoint is excluded
    by periodicity.  The wavenumber table keeps numpy's FFT ordering
    [0, 1, ..., N/2 - 1, -N/2, ..., -1] so coefficient arrays align with
    fft output.
    """

    N: int
    L: float

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 4 or self.N % 2:
            raise ParameterError(f"N must be an even integer >= 4, got {self.N!r}")
        if not self.L > 0:
            raise ParameterError(f"L must be positive, got {self.L!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @cached_property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @cached_property
    def nodes(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers in FFT order, covering [-N/2, N/2 - 1]."""
        k = np.fft.fftfreq(self.N, d=1.0 / self.N)
        return np.rint(k).astype(np.int64)

    @cached_property
    def kappa(self) -> np.ndarray:
        """Physical wavenumbers pi k / L, FFT order."""
        return np.pi * self.wavenumbers / self.L

    @cached_property
    def mode_phase(self) -> np.ndarray:
        # (-1)^k: relates plain-FFT coefficients to the -L-based expansion.
        return np.where(self.wavenumbers % 2 == 0, 1.0, -1.0)

    @cached_property
    def derivative_symbol(self) -> np.ndarray:
        """i pi k / L with the unmatched Nyquist mode -N/2 zeroed."""
        sym = 1j * self.kappa
        sym[self.wavenumbers == -self.N // 2] = 0.0
        sym.setflags(write=False)
        return sym

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Boolean mask keeping modes with |k| <= floor(N/3) (2/3 rule)."""
        mask = np.abs(self.wavenumbers) <= self.N // 3
        mask.setflags(write=False)
        return mask

    def fractional_symbol(self, s: float) -> np.ndarray:
        """Multiplier |pi k / L|^(2s) of the fractional Laplacian."""
        return np.abs(self.kappa) ** (2.0 * s)


@dataclass(frozen=True)
class Field:
    """Complex nodal values of a 2L-periodic function on a SpectralGrid."""

    values: np.ndarray
    grid: SpectralGrid

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.N,):
            raise ParameterError(
                f"Field values must have shape ({self.grid.N},), got {vals.shape}"
            )
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class Coefficients:
    """Fourier coefficients aligned with the grid's wavenumber table."""

    modes: np.ndarray
    grid: SpectralGrid

    def __post_init__(self):
        modes = np.asarray(self.modes, dtype=np.complex128)
        if modes.shape != (self.grid.N,):
            raise ParameterError(
                f"Coefficients must have shape ({self.grid.N},), got {modes.shape}"
            )
        object.__setattr__(self, "modes", modes)


def forward_transform(f: Field) -> Coefficients:
    """Discrete Fourier coefficients u_hat_k = (1/N) sum_j u_j e^{-i pi k x_j / L}."""
    g = f.grid
    return Coefficients(g.mode_phase * np.fft.fft(f.values) / g.N, g)


def inverse_transform(c: Coefficients) -> Field:
    """Exact inverse of forward_transform."""
    g = c.grid
    return Field(np.fft.ifft(c.modes * g.mode_phase) * g.N, g)


def _apply_symbol(f: Field, symbol: np.ndarray) -> Field:
    # Diagonal Fourier multiplier; the -L phase factors cancel.
    return Field(np.fft.ifft(symbol * np.fft.fft(f.values)), f.grid)


def fractional_laplacian(f: Field, s: float) -> Field:
    """Apply (-d_xx)^s: mode k is scaled by |pi k / L|^(2s).

    The zero mode is annihilated; the Nyquist mode is kept (the symbol is
    even, so no conjugate partner is needed).
    """
    if not 0.0 < s <= 1.0:
        raise ParameterError(f"s must lie in (0, 1], got {s!r}")
    return _apply_symbol(f, f.grid.fractional_symbol(s))


def derivative(f: Field) -> Field:
    """Spectral first derivative; the Nyquist mode is zeroed.

    The odd symbol i pi k / L has no matched conjugate partner at k = -N/2,
    so that mode is dropped to keep real fields real.
    """
    return _apply_symbol(f, f.grid.derivative_symbol)


def dealias(f: Field) -> Field:
    """Zero all modes with |k| > floor(N/3) (the 2/3 rule).  Idempotent."""
    return _apply_symbol(f, f.grid.dealias_mask)


def l2_norm(f: Field) -> float:
    """Discrete L2 norm sqrt(h sum_j |f_j|^2)."""
    return float(np.sqrt(f.grid.h) * np.linalg.norm(f.values))


def hs_norm(f: Field, s: float) -> float:
    """Sobolev H^s norm sqrt(2L sum_k (1 + k^2)^s |u_hat_k|^2)."""
    g = f.grid
    c = forward_transform(f).modes
    weights = (1.0 + g.wavenumbers.astype(np.float64) ** 2) ** s
    return float(np.sqrt(2.0 * g.L * np.sum(weights * np.abs(c) ** 2)))


def linf_norm(f: Field) -> float:
    """Maximum nodal modulus."""
    return float(np.max(np.abs(f.values)))
