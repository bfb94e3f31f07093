"""Level-by-level rates for a channel with a ``2^m``-dimensional input.

The input index is split into ``m`` bits, little-endian: level ``k`` is bit
``k`` of the index, so ``z = sum_k z_k 2^k``. The receiver decodes the
amplitude bits ``Z_0, ..., Z_{m-1}`` in order, each using the previous ones
as side information, and then the phase bits ``X_0, ..., X_{m-1}`` with all
amplitudes (held coherently in ``C``) plus the earlier phases:

* ``z_k = I(Z_k ; B Z_0..Z_{k-1})``
* ``x_k = I(X_k ; B C X_0..X_{k-1})``

The net rate ``sum_k (z_k + x_k - 1)`` equals the symmetric coherent
information of the whole channel; :func:`multilevel_net_rate` checks that.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .channel import QuantumChannel, apply_channel, tensor_channels
from .errors import VerificationError
from .polar import coherent_information

__all__ = [
    "MultiQubitChannel",
    "LevelRates",
    "level_rates",
    "multilevel_net_rate",
    "SuperactivationReport",
    "superactivation_check",
    "CHAIN_RULE_TOL",
    "ZERO_RATE_TOL",
]

CHAIN_RULE_TOL = 1e-6
ZERO_RATE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class MultiQubitChannel:
    m: int
    channel: QuantumChannel

    def __post_init__(self):
        if self.m < 1 or self.channel.in_dim != 1 << self.m:
            raise ValueError(
                f"channel input dimension {self.channel.in_dim} is not 2^{self.m}")

    @classmethod
    def wrap(cls, channel):
        d = channel.in_dim
        if d < 2 or d & (d - 1):
            raise ValueError(f"input dimension {d} is not a power of two")
        return cls(d.bit_length() - 1, channel)


@dataclass(frozen=True)
class LevelRates:
    z_rates: tuple
    x_rates: tuple
    net: float

    CSV_HEADER = ("level", "z_rate", "x_rate")

    def csv_rows(self):
        return [(k, repr(z), repr(x)) for k, (z, x) in enumerate(zip(self.z_rates, self.x_rates))]


def _level_holevo(states, m, k):
    """``I(V_k ; Q V_0..V_{k-1})`` for uniform ``V`` indexing ``states``."""
    h = linalg.von_neumann_entropy
    low = 1 << k
    total = 0.0
    for lower in range(low):
        group = [[], []]
        for v, rho in enumerate(states):
            if v % low == lower:
                group[(v >> k) & 1].append(rho)
        avg = [sum(g) / len(g) for g in group]
        total += h((avg[0] + avg[1]) / 2) - (h(avg[0]) + h(avg[1])) / 2
    return float(min(max(total / low, 0.0), 1.0))


def _amplitude_states(mc):
    d = mc.channel.in_dim
    return [apply_channel(mc.channel, linalg.projector(linalg.ket(z, d))) for z in range(d)]


def _phase_states(mc):
    """``Tr_E |sigma_x><sigma_x|`` on ``B (x) C`` for every ``x``."""
    ch = mc.channel
    d, dB, dE = ch.in_dim, ch.out_dim, ch.env_dim
    linalg.check_dim(dB * d, "phase side-information space")
    phi = ch.extension.reshape(dB, dE, d)
    z = np.arange(d)
    states = []
    for x in range(d):
        parity = np.array([bin(x & zz).count("1") & 1 for zz in z])
        # t[b, e, c] = (-1)^{x.c} phi_c[b, e] / sqrt(d)
        t = phi * ((-1.0) ** parity / np.sqrt(d))
        states.append(np.einsum("bec,fed->bcfd", t, t.conj()).reshape(dB * d, dB * d))
    return states


def level_rates(mc):
    m = mc.m
    amp = _amplitude_states(mc)
    ph = _phase_states(mc)
    z = tuple(_level_holevo(amp, m, k) for k in range(m))
    x = tuple(_level_holevo(ph, m, k) for k in range(m))
    net = float(sum(z) + sum(x) - m)
    return LevelRates(z, x, net)


def multilevel_net_rate(mc, tol=CHAIN_RULE_TOL):
    """Net rate from the level decomposition, cross-checked against coherent information."""
    return _checked_rates(mc, tol).net


def _checked_rates(mc, tol=CHAIN_RULE_TOL):
    rates = level_rates(mc)
    ci = coherent_information(mc.channel)
    if abs(rates.net - ci) > tol:
        raise VerificationError(
            f"level decomposition gives net rate {rates.net!r}, "
            f"coherent information is {ci!r}")
    return rates


@dataclass(frozen=True)
class SuperactivationReport:
    first_coherent_info: float
    second_coherent_info: float
    joint_net_rate: float
    joint_rates: LevelRates
    superactivated: bool

    def to_dict(self):
        return {
            "first_coherent_info": self.first_coherent_info,
            "second_coherent_info": self.second_coherent_info,
            "joint_net_rate": self.joint_net_rate,
            "joint_z_rates": list(self.joint_rates.z_rates),
            "joint_x_rates": list(self.joint_rates.x_rates),
            "superactivated": self.superactivated,
        }


def superactivation_check(first, second, tol=ZERO_RATE_TOL):
    """Joint rate of ``first (x) second`` against the rates of each factor.

    Superactivation is declared when the joint net rate exceeds ``tol``
    while neither factor's coherent information does. This is the
    symmetric-input quantity only; it does not certify zero capacity.
    """
    joint = tensor_channels(first, second)
    rates = _checked_rates(MultiQubitChannel.wrap(joint))
    net = rates.net
    c1 = coherent_information(first)
    c2 = coherent_information(second)
    flag = net > tol and c1 <= tol and c2 <= tol
    return SuperactivationReport(float(c1), float(c2), float(net), rates, bool(flag))

