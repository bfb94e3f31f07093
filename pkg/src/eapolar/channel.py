"""Quantum channels as Kraus families with a Stinespring isometry.

The environment ``E`` is always the rightmost factor of the extension
output, so ``V = sum_k K_k (x) |k>_E`` and the composite output index is
``b * env_dim + k``.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ValidationError

__all__ = [
    "Degradability",
    "QuantumChannel",
    "ChannelSpec",
    "BUILTIN_NAMES",
    "make_builtin",
    "channel_from_kraus",
    "stinespring",
    "apply_channel",
    "apply_kraus",
    "complementary_channel",
    "tensor_channels",
    "random_channel",
    "completeness_residual",
]


class Degradability(enum.Enum):
    KNOWN_DEGRADABLE = "known_degradable"
    KNOWN_NOT_DEGRADABLE = "known_not_degradable"
    UNKNOWN = "unknown"


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Kraus family ``{K_k}`` plus isometric extension ``V: A' -> B (x) E``."""

    in_dim: int
    out_dim: int
    env_dim: int
    kraus: tuple
    extension: np.ndarray
    degradable: Degradability = Degradability.UNKNOWN
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for k in self.kraus:
            k.setflags(write=False)
        self.extension.setflags(write=False)

    def describe(self):
        return {"name": self.name, **self.params}


@dataclass(frozen=True)
class ChannelSpec:
    """Either a built-in ``name`` with ``params``, or explicit Kraus matrices."""

    name: str = "custom"
    params: dict = field(default_factory=dict)
    kraus: tuple = None


BUILTIN_NAMES = (
    "identity",
    "amplitude_damping",
    "dephasing",
    "depolarizing",
    "qubit_erasure",
    "erasure",
    "custom",
)


def completeness_residual(kraus):
    """Max-norm of ``sum_k K_k^dag K_k - I``."""
    in_dim = kraus[0].shape[1]
    s = sum(k.conj().T @ k for k in kraus)
    return float(np.max(np.abs(s - np.eye(in_dim))))


def stinespring(kraus, tol=1e-8):
    """Stack Kraus operators into the isometry ``sum_k K_k (x) |k>_E``."""
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    if not kraus:
        raise ValidationError("empty Kraus family")
    shape = kraus[0].shape
    if any(k.shape != shape for k in kraus):
        raise ValidationError("Kraus operators must share one shape")
    res = completeness_residual(kraus)
    if res > tol:
        raise ValidationError(f"Kraus completeness violated: residual {res:.3e}")
    out_dim, in_dim = shape
    env_dim = len(kraus)
    linalg.check_dim(out_dim * env_dim, "Stinespring output")
    v = np.stack(kraus, axis=1).reshape(out_dim * env_dim, in_dim)
    return v


def channel_from_kraus(kraus, degradable=Degradability.UNKNOWN, name="custom", params=None):
    kraus = tuple(np.array(k, dtype=complex) for k in kraus)
    v = stinespring(kraus)
    out_dim, in_dim = kraus[0].shape
    return QuantumChannel(
        in_dim=in_dim,
        out_dim=out_dim,
        env_dim=len(kraus),
        kraus=kraus,
        extension=v,
        degradable=degradable,
        name=name,
        params=dict(params or {}),
    )


def _prob(params, key, name):
    if key not in params:
        raise ValueError(f"{name} needs parameter {key!r}")
    p = float(params[key])
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name}: parameter {key}={p} outside [0, 1]")
    return p


def _dim(params, key="d", default=2):
    d = int(params.get(key, default))
    if d < 1:
        raise ValueError(f"dimension {key}={d} must be positive")
    return d


def _weyl_operators(d):
    """The d^2 generalized Pauli operators X^a Z^b."""
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(d)
        for b in range(d)
    ]


def _erasure_kraus(d, p):
    embed = np.zeros((d + 1, d), dtype=complex)
    embed[:d, :d] = np.eye(d)
    kraus = [np.sqrt(1 - p) * embed]
    for j in range(d):
        k = np.zeros((d + 1, d), dtype=complex)
        k[d, j] = np.sqrt(p)
        kraus.append(k)
    return kraus


def make_builtin(spec):
    """Instantiate a channel from a :class:`ChannelSpec`.

    Built-ins: ``identity(d)``, ``amplitude_damping(gamma)``,
    ``dephasing(p)`` (Kraus ``sqrt(1-p) I, sqrt(p) Z``; ``p=0.5`` is full
    dephasing), ``depolarizing(p, d=2)`` (``rho -> (1-p) rho + p I/d``),
    ``qubit_erasure(p)`` and ``erasure(d, p)`` (flag is the last output
    basis vector). Explicit Kraus data gives a ``custom`` channel.
    """
    if isinstance(spec, dict):
        spec = ChannelSpec(**spec)
    name, params = spec.name, dict(spec.params or {})
    D = Degradability

    if spec.kraus is not None:
        return channel_from_kraus(spec.kraus, D.UNKNOWN, "custom", params)
    if name == "identity":
        d = _dim(params)
        return channel_from_kraus([np.eye(d)], D.KNOWN_DEGRADABLE, name, {"d": d})
    if name == "amplitude_damping":
        g = _prob(params, "gamma", name)
        k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]])
        k1 = np.array([[0, np.sqrt(g)], [0, 0]])
        flag = D.KNOWN_DEGRADABLE if g <= 0.5 else D.UNKNOWN
        return channel_from_kraus([k0, k1], flag, name, {"gamma": g})
    if name == "dephasing":
        p = _prob(params, "p", name)
        kraus = [np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * np.diag([1.0, -1.0])]
        return channel_from_kraus(kraus, D.KNOWN_DEGRADABLE, name, {"p": p})
    if name == "depolarizing":
        p = _prob(params, "p", name)
        d = _dim(params)
        ws = _weyl_operators(d)
        w0 = np.sqrt(1 - p + p / d**2)
        kraus = [w0 * ws[0]] + [np.sqrt(p) / d * w for w in ws[1:]]
        return channel_from_kraus(kraus, D.UNKNOWN, name, {"p": p, "d": d})
    if name in ("qubit_erasure", "erasure"):
        p = _prob(params, "p", name)
        if name == "qubit_erasure":
            d = 2
        elif "d" in params:
            d = _dim(params)
        else:
            raise ValueError("erasure needs parameter 'd'")
        flag = D.KNOWN_DEGRADABLE if p <= 0.5 else D.UNKNOWN
        return channel_from_kraus(_erasure_kraus(d, p), flag, name, {"d": d, "p": p})
    if name == "custom":
        raise ValueError("custom channel needs explicit Kraus operators")
    raise ValueError(f"unknown channel name {name!r}; expected one of {BUILTIN_NAMES}")


def _check_input(ch, rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.in_dim, ch.in_dim):
        raise ValueError(f"input has shape {rho.shape}, channel expects in_dim {ch.in_dim}")
    return rho


def _dilate(ch, rho):
    v = ch.extension
    return v @ rho @ v.conj().T


def apply_channel(ch, rho):
    """``Tr_E(V rho V^dag)``."""
    rho = _check_input(ch, rho)
    return linalg.partial_trace(_dilate(ch, rho), [ch.out_dim, ch.env_dim], [0])


def apply_kraus(ch, rho):
    """``sum_k K_k rho K_k^dag``; the Kraus-side route to :func:`apply_channel`."""
    rho = _check_input(ch, rho)
    return sum(k @ rho @ k.conj().T for k in ch.kraus)


def complementary_channel(ch, rho):
    """``Tr_B(V rho V^dag)``: what leaks to the environment."""
    rho = _check_input(ch, rho)
    return linalg.partial_trace(_dilate(ch, rho), [ch.out_dim, ch.env_dim], [1])


def tensor_channels(first, second):
    """Product channel; ``first`` acts on the most significant input factor."""
    kraus = [np.kron(a, b) for a in first.kraus for b in second.kraus]
    flag = Degradability.UNKNOWN
    return channel_from_kraus(
        kraus, flag, f"{first.name}*{second.name}",
        {"first": first.describe(), "second": second.describe()},
    )


def random_channel(in_dim, out_dim, env_dim, rng):
    """Channel whose extension is a Haar-random isometry ``in -> out (x) env``."""
    v = linalg.random_isometry(in_dim, out_dim * env_dim, rng)
    t = v.reshape(out_dim, env_dim, in_dim)
    kraus = [t[:, k, :] for k in range(env_dim)]
    return channel_from_kraus(kraus, Degradability.UNKNOWN, "random",
                              {"in_dim": in_dim, "out_dim": out_dim, "env_dim": env_dim})
