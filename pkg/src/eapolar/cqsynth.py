"""Binary classical-quantum channels induced by a qubit-input channel.

Three cq channels are derived from ``V: A' -> B E``:

* amplitude ``W_A: z -> N(|z><z|)`` on ``B``;
* phase ``W_P: x -> Tr_E |sigma_x><sigma_x|`` on ``B (x) C`` where
  ``|sigma_x> = V Z^x |Phi>^{A'C}`` and ``C`` (the receiver's half of the
  ebit) is the rightmost factor;
* environment ``W_E: z -> N^c(|z><z|)`` on ``E``.

The fidelity parameter is stored as its square root, ``||sqrt(rho0) sqrt(rho1)||_1``.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .channel import apply_channel, complementary_channel, random_channel

__all__ = [
    "BinaryCqChannel",
    "JointChannelState",
    "joint_state",
    "amplitude_channel",
    "phase_channel",
    "environment_channel",
    "holevo",
    "sqrt_fidelity_param",
    "holevo_fidelity_bound",
    "duality_gap",
    "random_qubit_channel",
    "LABELS",
]

LABELS = ("amplitude", "phase", "environment", "synthesized")


@dataclass(frozen=True, eq=False)
class BinaryCqChannel:
    rho0: np.ndarray
    rho1: np.ndarray
    label: str = "synthesized"

    def __post_init__(self):
        if self.rho0.shape != self.rho1.shape:
            raise ValueError("cq channel outputs must have equal dimension")
        if self.label not in LABELS:
            raise ValueError(f"unknown cq channel label {self.label!r}")

    @property
    def dim(self):
        return self.rho0.shape[0]

    def output(self, bit):
        return self.rho1 if bit else self.rho0


@dataclass(frozen=True, eq=False)
class JointChannelState:
    """``|psi> = 2^{-1/2} sum_z |z>^A |phi_z>^{BE} |z>^C`` with axes ordered (A, B, C, E)."""

    psi: np.ndarray
    subsystem_dims: tuple


def _require_qubit(ch):
    if ch.in_dim != 2:
        raise ValueError(f"cq synthesis needs a qubit-input channel, got in_dim={ch.in_dim}")


def _branches(ch):
    """``phi_z = V|z>`` reshaped to (d_B, d_E) for z = 0, 1."""
    v = ch.extension
    return [v[:, z].reshape(ch.out_dim, ch.env_dim) for z in (0, 1)]


def joint_state(ch):
    _require_qubit(ch)
    dB, dE = ch.out_dim, ch.env_dim
    psi = np.zeros((2, dB, 2, dE), dtype=complex)
    for z, phi in enumerate(_branches(ch)):
        psi[z, :, z, :] = phi / np.sqrt(2)
    dims = (2, dB, 2, dE)
    return JointChannelState(linalg.check_state_vector(psi.ravel(), dims), dims)


def amplitude_channel(ch):
    _require_qubit(ch)
    rhos = [apply_channel(ch, linalg.projector(linalg.ket(z, 2))) for z in (0, 1)]
    return BinaryCqChannel(rhos[0], rhos[1], "amplitude")


def environment_channel(ch):
    _require_qubit(ch)
    rhos = [complementary_channel(ch, linalg.projector(linalg.ket(z, 2))) for z in (0, 1)]
    return BinaryCqChannel(rhos[0], rhos[1], "environment")


def phase_channel(ch):
    _require_qubit(ch)
    phi = _branches(ch)
    sigmas = []
    for x in (0, 1):
        # |sigma_x> on (B, E, C): sum_z (-1)^{xz} |phi_z>^{BE} |z>^C / sqrt(2)
        t = np.zeros((ch.out_dim, ch.env_dim, 2), dtype=complex)
        for z in (0, 1):
            t[:, :, z] = (-1) ** (x * z) * phi[z] / np.sqrt(2)
        # trace E, keep B (x) C
        sigmas.append(np.einsum("bec,fed->bcfd", t, t.conj()).reshape(2 * ch.out_dim, -1))
    return BinaryCqChannel(sigmas[0], sigmas[1], "phase")


def holevo(w):
    """Symmetric Holevo information ``H((rho0+rho1)/2) - (H(rho0)+H(rho1))/2``."""
    h = linalg.von_neumann_entropy
    val = h((w.rho0 + w.rho1) / 2) - (h(w.rho0) + h(w.rho1)) / 2
    return float(min(max(val, 0.0), 1.0))


def sqrt_fidelity_param(w):
    return linalg.sqrt_fidelity(w.rho0, w.rho1)


def holevo_fidelity_bound(sqrt_f):
    """``log2(2 / (1 + sqrt F))``, a lower bound on the Holevo information."""
    return float(np.log2(2.0 / (1.0 + sqrt_f)))


def duality_gap(ch):
    """``I(W_P) + I(W_E) - 1``; vanishes for every qubit-input channel."""
    _require_qubit(ch)
    return holevo(phase_channel(ch)) + holevo(environment_channel(ch)) - 1.0


def random_qubit_channel(rng, out_dim=2, env_dim=2):
    return random_channel(2, out_dim, env_dim, rng)
