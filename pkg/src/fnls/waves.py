"""Reference traveling waves: the closed-form s = 1 soliton and
numerically generated fractional solitary-wave profiles.

A traveling wave u(x, t) = Phi(x - lambda2 t) e^{i lambda1 t} of the
fractional NLS satisfies the profile equation

    (lambda1 + (-d_xx)^s) Phi + i lambda2 Phi' - |Phi|^2 Phi = 0.

For s = 1 the solution is explicit (sech profile); for s < 1 the profile
is computed with the Petviashvili iteration in Fourier space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ProfileDivergenceError
from .spectral import Field, SpectralGrid, derivative, fractional_laplacian, l2_norm

__all__ = [
    "SolitonParams",
    "ProfileResult",
    "nls_soliton",
    "residual_operator",
    "petviashvili_profile",
]


@dataclass(frozen=True)
class SolitonParams:
    """Parameters of the s = 1 soliton.

    lambda1 sets the frequency, lambda2 the velocity; the sech width
    parameter a = lambda1 - lambda2^2 / 4 must be positive.
    """

    lambda1: float
    lambda2: float = 0.0
    x0: float = 0.0
    theta0: float = 0.0

    def __post_init__(self):
        if not self.a > 0.0:
            raise ParameterError(
                "soliton requires a = lambda1 - lambda2^2/4 > 0, got "
                f"a = {self.a!r}"
            )

    @property
    def a(self) -> float:
        return self.lambda1 - 0.25 * self.lambda2**2


def nls_soliton(grid: SpectralGrid, t: float, sp: SolitonParams) -> Field:
    """Exact s = 1 soliton sampled at the grid nodes at time t.

    u(x, t) = rho(xi) e^{i (theta(xi) + theta0 + lambda1 t)} with
    xi = x - lambda2 t - x0, rho(x) = sqrt(2a) sech(sqrt(a) x) and
    theta(x) = (lambda2 / 2) x.  xi is not wrapped periodically; the
    sech tails are below machine precision for adequate L.
    """
    a = sp.a
    xi = grid.nodes - sp.lambda2 * t - sp.x0
    rho = np.sqrt(2.0 * a) / np.cosh(np.sqrt(a) * xi)
    phase = 0.5 * sp.lambda2 * xi + sp.theta0 + sp.lambda1 * t
    return Field(rho * np.exp(1j * phase), grid)


def residual_operator(phi: Field, s: float, lambda1: float,
                      lambda2: float) -> Field:
    """Profile-equation residual (lambda1 + (-d_xx)^s) Phi + i lambda2 Phi' - |Phi|^2 Phi."""
    vals = phi.values
    lap = fractional_laplacian(phi, s).values
    dphi = derivative(phi).values
    cubic = np.abs(vals) ** 2 * vals
    return Field(lambda1 * vals + lap + 1j * lambda2 * dphi - cubic, phi.grid)


@dataclass(frozen=True)
class ProfileResult:
    """Converged traveling-wave profile with its solve diagnostics."""

    profile: Field
    residual: float
    iterations: int
    s: float
    lambda1: float
    lambda2: float


def _profile_symbol(grid: SpectralGrid, s: float, lambda1: float,
                    lambda2: float) -> np.ndarray:
    """Fourier symbol l(k) = lambda1 + |pi k/L|^(2s) - lambda2 (pi k/L)."""
    return lambda1 + np.abs(grid.kappa) ** (2.0 * s) - lambda2 * grid.kappa


def petviashvili_profile(grid: SpectralGrid, s: float, lambda1: float,
                         lambda2: float, tol: float = 1e-12,
                         max_iters: int = 500) -> ProfileResult:
    """Compute a solitary-wave profile by the Petviashvili iteration.

    Iterates in coefficient space,

        Phi_hat <- m^(3/2) G_hat / l,   G = |Phi|^2 Phi,
        m = sum_k l(k) |Phi_hat(k)|^2 / sum_k G_hat(k) conj(Phi_hat(k)),

    with stabilization exponent 3/2 (the optimal value for a cubic
    nonlinearity).  The initial iterate is the s = 1 soliton with the
    same (lambda1, lambda2).  Stops when the relative l2 change of the
    iterate is <= tol and the profile-equation residual is <= 100 tol.
    """
    if not 0.5 < s <= 1.0:
        raise ParameterError(f"petviashvili_profile requires s in (1/2, 1], got {s!r}")
    if not tol > 0.0:
        raise ParameterError(f"tol must be positive, got {tol!r}")
    if max_iters < 1:
        raise ParameterError(f"max_iters must be >= 1, got {max_iters!r}")
    ell = _profile_symbol(grid, s, lambda1, lambda2)
    if np.min(ell) <= 0.0:
        raise ParameterError(
            "profile symbol lambda1 + |pi k/L|^(2s) - lambda2 pi k/L must be "
            f"positive for all grid modes; min = {float(np.min(ell)):.6g}"
        )

    vals = nls_soliton(grid, 0.0, SolitonParams(lambda1, lambda2)).values
    residual_history: list[float] = []
    for it in range(1, max_iters + 1):
        phi_hat = np.fft.fft(vals)
        g_hat = np.fft.fft(np.abs(vals) ** 2 * vals)
        # Both sums are real up to roundoff (Parseval pairs them with
        # real-valued nodal sums); keep the real parts.
        num = float(np.sum(ell * np.abs(phi_hat) ** 2))
        den = float(np.real(np.sum(g_hat * np.conj(phi_hat))))
        m = num / den
        new_vals = np.fft.ifft(m**1.5 * g_hat / ell)
        change = np.linalg.norm(new_vals - vals) / np.linalg.norm(new_vals)
        vals = new_vals
        candidate = Field(vals, grid)
        res = l2_norm(residual_operator(candidate, s, lambda1, lambda2))
        residual_history.append(res)
        if change <= tol and res <= 100.0 * tol:
            return ProfileResult(profile=candidate, residual=res, iterations=it,
                                 s=s, lambda1=lambda1, lambda2=lambda2)
    raise ProfileDivergenceError(max_iters, residual_history)
