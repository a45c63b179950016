"""Independent reference implementations used to freeze expected values.

Everything here is written against the printed formulas with the plainest
reliable numerics available: classical fixed-step Runge-Kutta, dense
eigen-decompositions, direct products evaluated term by term.  None of it
shares code with the package, so agreement between the two is evidence
rather than tautology.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


def rk4(f: Callable[[float, np.ndarray], np.ndarray], y0: Sequence[complex],
        t0: float, t1: float, n_steps: int) -> np.ndarray:
    """Classical fixed-step fourth-order Runge-Kutta on a complex vector."""
    y = np.asarray(y0, dtype=complex)
    h = (t1 - t0) / n_steps
    for i in range(n_steps):
        t = t0 + i * h
        # exact endpoint on the last step so f is never sampled past t1
        t_end = t1 if i == n_steps - 1 else t0 + (i + 1) * h
        k1 = f(t, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t_end, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def two_level_final(omega: Callable[[float], complex], duration: float,
                    delta: float, gamma_p: float = 0.0, gamma_s: float = 0.0,
                    n_steps: int = 20000, reverse: bool = False) -> tuple[float, float]:
    """Final (|P|^2, |S|^2) of the two-level transfer stage.

    Integrates the printed amplitude equations directly, fast chirp phase
    and all, with no gauge transformation:

        dP/dt = -(gamma_p + i delta) P + i Omega(t) S
        dS/dt = -gamma_s S + i conj(Omega(t)) P
    """

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        om = omega(t)
        p, s = y
        return np.array([-(gamma_p + 1j * delta) * p + 1j * om * s,
                         -gamma_s * s + 1j * np.conj(om) * p])

    y0 = (0.0, 1.0) if reverse else (1.0, 0.0)
    p, s = rk4(rhs, y0, 0.0, duration, n_steps)
    return float(abs(p)) ** 2, float(abs(s)) ** 2


def exchange_pair(t: float, J: float, gamma_s: float = 0.0, gamma_k: float = 0.0,
                  delta_s: float = 0.0, delta_k: float = 0.0,
                  s0: complex = 1.0, k0: complex = 0.0) -> tuple[complex, complex]:
    """Closed-form evolution of one coupled alkali/noble-gas mode pair.

        d/dt [s, k] = [[-(gamma_s + i delta_s), -iJ],
                       [-iJ, -(gamma_k + i delta_k)]] [s, k]

    Solved exactly through the eigen-decomposition of the constant matrix,
    which is what the diffusion-free spatially uniform limit of the coupled
    spin equations reduces to.
    """
    m = np.array([[-(gamma_s + 1j * delta_s), -1j * J],
                  [-1j * J, -(gamma_k + 1j * delta_k)]], dtype=complex)
    vals, vecs = np.linalg.eig(m)
    coeffs = np.linalg.solve(vecs, np.array([s0, k0], dtype=complex))
    s, k = vecs @ (coeffs * np.exp(vals * t))
    return complex(s), complex(k)


def dephasing_sinc_squared(finesse: float) -> float:
    """Comb dephasing factor via numpy's normalized sinc."""
    return float(np.sinc(1.0 / finesse) ** 2)


def nested_swap_time(n: int, link_length_km: float, interface_delay: float,
                     mode_count: int, pair_probability: float,
                     eta_conversion: float, eta_detector: float,
                     eta_memory: float, attenuation_length_km: float,
                     fiber_speed: float) -> float:
    """Distribution time for a repeater with 2**n elementary links.

    Term-by-term direct evaluation, parameterized by the nesting level n
    itself so the n = 0 single-link reduction (empty swap product) can be
    exercised symbolically.
    """
    attempt = link_length_km * 1000.0 / fiber_speed + interface_delay
    eta = eta_memory * eta_detector
    eta_t = math.exp(-link_length_km / (2.0 * attenuation_length_km))
    swap_product = 1.0
    for k in range(1, n + 1):
        swap_product *= 2.0 ** k * (2.0 ** k - 1.0) * eta
    denom = (mode_count * pair_probability * eta_conversion * eta_detector
             * eta_t * eta ** (n + 2))
    return attempt * 3.0 ** (n + 1) / denom * swap_product
