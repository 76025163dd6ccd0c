"""Radar-side math: shift clutter model, Doppler gain, filters, SINR.

A flight transmits L repetitions of a length-N code x per slot.  Range
sidelobes enter through cyclic shifts J_k x (k != 0); after Doppler
processing the interference covariance and the SINR take the closed
forms implemented here.  All operations accept real or complex codes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LagOutOfRange(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class SingularCovariance(ValueError):
    pass


class NotPositiveDefinite(ValueError):
    pass


class ZeroFilter(ValueError):
    pass


@dataclass(frozen=True)
class CodeSequence:
    entries: np.ndarray
    power: float   # per-chip power: |x_i|^2 for a constant-modulus code

    def is_unimodular(self, tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(np.abs(self.entries) ** 2 - self.power)) <= tol)


def shift_apply(k: int, x: np.ndarray) -> np.ndarray:
    """Cyclic shift J_k x; J_k rotates entries left by k, J_{-k} = J_k^T."""
    x = np.asarray(x)
    if abs(k) > x.size - 1:
        raise LagOutOfRange(f"|k|={abs(k)} exceeds N-1={x.size - 1}")
    return np.roll(x, -k)


def doppler_filter(nu: float, length: int) -> np.ndarray:
    """FFT-style Doppler filter [1, e^{-j nu}, ..., e^{-j nu (L-1)}]."""
    return np.exp(-1j * nu * np.arange(length))


def doppler_gain(a: np.ndarray, length: int) -> float:
    """Coherent integration factor L + sum_{i != j} conj(a_i) a_j."""
    a = np.asarray(a)
    if a.size != length:
        raise LengthMismatch(f"filter length {a.size} != L={length}")
    total = np.abs(a.sum()) ** 2
    return float(length + (total - np.abs(a) ** 2 @ np.ones(a.size)).real)


def _lag_stack(x: np.ndarray) -> np.ndarray:
    """Rows J_k x for k = -(N-1)..-1, 1..(N-1)."""
    n = x.size
    lags = [k for k in range(-(n - 1), n) if k != 0]
    return np.stack([np.roll(x, -k) for k in lags])


def interference_covariance(x: np.ndarray, beta: float, sigma_noise2: float,
                            sigma_clutter2, length: int,
                            check_pd: bool = False) -> np.ndarray:
    """Post-Doppler interference covariance

        Xi = L sigma^2 I + beta * sum_{k != 0} clutter_k (J_k x)(J_k x)^H.

    ``sigma_clutter2`` is a scalar applied to all lags, or one value per
    lag ordered -(N-1)..-1, 1..N-1.
    """
    x = np.asarray(x)
    n = x.size
    if np.all(x == 0):
        raise NotPositiveDefinite("code is identically zero")
    V = _lag_stack(x)
    w = np.broadcast_to(np.asarray(sigma_clutter2, dtype=float), (V.shape[0],))
    if np.any(w <= 0) or sigma_noise2 <= 0:
        raise NotPositiveDefinite("noise and clutter powers must be positive")
    xi = (V * w[:, None]).T @ V.conj() * beta
    xi = xi + length * sigma_noise2 * np.eye(n)
    if check_pd:
        try:
            np.linalg.cholesky(0.5 * (xi + xi.conj().T))
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite("covariance is not positive definite") from exc
    return xi


def receive_filter(x: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """SINR-optimal filter Xi^{-1} x, normalized to unit norm."""
    try:
        w = np.linalg.solve(xi, np.asarray(x))
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance(str(exc)) from exc
    nrm = np.linalg.norm(w)
    if not np.isfinite(nrm) or nrm == 0.0:
        raise SingularCovariance("filter collapsed to zero")
    return w / nrm


def sensing_sinr(x: np.ndarray, w: np.ndarray, beta: float, xi: np.ndarray,
                 alpha2: float = 1.0) -> float:
    """Post-range-and-Doppler SINR; invariant to a rescaling of w."""
    w = np.asarray(w)
    if np.all(w == 0):
        raise ZeroFilter("receive filter is zero")
    num = beta * alpha2 * np.abs(np.vdot(w, x)) ** 2
    den = np.real(np.vdot(w, xi @ w))
    return float(num / den)


def per_pulse_covariance(x: np.ndarray, sigma_noise2: float, sigma_clutter2) -> np.ndarray:
    """Single-pulse covariance (before Doppler integration)."""
    V = _lag_stack(np.asarray(x))
    w = np.broadcast_to(np.asarray(sigma_clutter2, dtype=float), (V.shape[0],))
    return (V * w[:, None]).T @ V.conj() + sigma_noise2 * np.eye(x.size)


def optimal_sinr(x: np.ndarray, beta: float, xi: np.ndarray,
                 alpha2: float = 1.0) -> float:
    """SINR at the optimal filter: beta alpha^2 x^H Xi^{-1} x."""
    v = np.linalg.solve(xi, np.asarray(x))
    return float(beta * alpha2 * np.real(np.vdot(np.asarray(x), v)))
