"""Channel combining and splitting for binary cq channels.

Conventions
-----------
* Indices are 0-based: ``i`` in ``range(N)`` and a word ``u`` is the tuple
  ``(u_0, ..., u_{N-1})`` with ``u_0`` the most significant (leftmost)
  tensor factor.
* ``G_N = F^{(x)n}`` with ``F = [[1, 0], [1, 1]]`` and no bit-reversal
  permutation; channel inputs are ``x = u G_N`` over GF(2). Bit reversal
  only relabels indices, so omitting it changes nothing but the order in
  which synthesized channels are listed.
* ``forward`` synthesis (amplitude and environment channels) conditions
  bit ``i`` on the prefix ``u_0..u_{i-1}`` and averages the suffix.
  ``transposed`` synthesis (phase channel) uses ``G_N^T``, conditions on the
  suffix and averages the prefix. Index ``i`` always refers to the same
  physical encoder input in both directions.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .cqsynth import (
    BinaryCqChannel,
    amplitude_channel,
    holevo_fidelity_bound,
    environment_channel,
    holevo,
    phase_channel,
    sqrt_fidelity_param,
)
from .channel import Degradability, apply_channel, complementary_channel
from .errors import VerificationError

__all__ = [
    "FORWARD",
    "TRANSPOSED",
    "EncoderMatrix",
    "SynthesizedChannelTable",
    "ChannelPartition",
    "RateReport",
    "UncertaintyRow",
    "UncertaintyReport",
    "gn_matrix",
    "encode",
    "one_step_transform",
    "branch_pair",
    "synthesize_all",
    "side_encoder_operator",
    "good_set",
    "good_threshold",
    "classify",
    "coherent_information",
    "rate_report",
    "uncertainty_report",
    "fraction_good",
]

FORWARD = "forward_GN"
TRANSPOSED = "transposed_GNT"
_DIRECTION_ALIASES = {
    "fwd": FORWARD, "forward": FORWARD, FORWARD: FORWARD,
    "transposed": TRANSPOSED, "T": TRANSPOSED, TRANSPOSED: TRANSPOSED,
}


def _direction(direction):
    try:
        return _DIRECTION_ALIASES[direction]
    except KeyError:
        raise ValueError(f"invalid direction {direction!r}") from None


@dataclass(frozen=True, eq=False)
class EncoderMatrix:
    n: int
    bits: np.ndarray

    @property
    def N(self):
        return 1 << self.n


def _level(N):
    N = int(N)
    if N < 1 or N & (N - 1):
        raise ValueError(f"block length must be a power of two, got {N}")
    return N.bit_length() - 1


def gn_matrix(n):
    """``F^{(x)n}`` over GF(2) as a ``uint8`` array."""
    n = int(n)
    if n < 0:
        raise ValueError("recursion level must be non-negative")
    linalg.check_dim(1 << n, "encoder")
    f = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        g = np.kron(g, f)
    return EncoderMatrix(n, g % 2)


def encode(u, g):
    """``u G`` over GF(2)."""
    return (np.asarray(u, dtype=np.int64) @ np.asarray(g, dtype=np.int64)) % 2


def one_step_transform(w):
    """One combining/splitting step: returns ``(W-, W+)``.

    ``W-: u1 -> 1/2 sum_u2 rho_{u1+u2} (x) rho_u2`` and
    ``W+: u2 -> 1/2 (rho_{u2} (x) rho_u2) (+) 1/2 (rho_{1+u2} (x) rho_u2)``,
    the direct sum being over the classical value of ``u1``.
    """
    linalg.check_dim(2 * w.dim * w.dim, "one-step output")
    r = (w.rho0, w.rho1)
    minus = [sum(np.kron(r[u1 ^ u2], r[u2]) for u2 in (0, 1)) / 2 for u1 in (0, 1)]
    plus = []
    for u2 in (0, 1):
        blocks = [np.kron(r[u1 ^ u2], r[u2]) / 2 for u1 in (0, 1)]
        d = blocks[0].shape[0]
        m = np.zeros((2 * d, 2 * d), dtype=complex)
        m[:d, :d] = blocks[0]
        m[d:, d:] = blocks[1]
        plus.append(m)
    return (BinaryCqChannel(minus[0], minus[1], "synthesized"),
            BinaryCqChannel(plus[0], plus[1], "synthesized"))


def _roles(N, i, direction):
    """(conditioned positions, averaged positions) for index ``i``."""
    if direction == FORWARD:
        return list(range(i)), list(range(i + 1, N))
    return list(range(i + 1, N)), list(range(i))


def _generator(N, direction):
    g = gn_matrix(_level(N)).bits.astype(np.int64)
    return g if direction == FORWARD else g.T


def _check_synth_dim(w, N):
    total = w.dim ** N
    linalg.check_dim(total, f"synthesized output ({w.dim}^{N})")


def branch_pair(w, N, direction, i, cond):
    """Quantum parts ``(rho_bar_0, rho_bar_1)`` of one branch of ``W_N^(i)``.

    ``cond`` holds the values of the conditioned bits (prefix for
    ``forward``, suffix for ``transposed``), in increasing position order.
    The result averages ``rho_{u M}`` uniformly over the remaining bits,
    with ``M = G_N`` or ``G_N^T``.
    """
    direction = _direction(direction)
    _check_synth_dim(w, N)
    cpos, apos = _roles(N, i, direction)
    cond = tuple(int(b) for b in cond)
    if len(cond) != len(cpos):
        raise ValueError(f"index {i} needs {len(cpos)} conditioned bits, got {len(cond)}")
    m = _generator(N, direction)
    return _branch_pair(w, N, m, i, cpos, apos, cond)


def _branch_pair(w, N, m, i, cpos, apos, cond):
    r = (w.rho0, w.rho1)
    u = np.zeros(N, dtype=np.int64)
    u[cpos] = cond
    out = []
    scale = 1.0 / (1 << len(apos))
    for b in (0, 1):
        u[i] = b
        acc = None
        for avg in itertools.product((0, 1), repeat=len(apos)):
            u[apos] = avg
            x = (u @ m) % 2
            term = linalg.kron_all([r[xk] for xk in x])
            acc = term if acc is None else acc + term
        out.append(acc * scale)
    return out[0], out[1]


@dataclass(frozen=True, eq=False)
class SynthesizedChannelTable:
    """Exact ``sqrt F`` and Holevo information of every ``W_N^(i)``."""

    N: int
    direction: str
    sqrt_fidelity: np.ndarray
    holevo: np.ndarray
    branches: tuple = ()
    label: str = "synthesized"

    def records(self):
        return [
            {"i": i, "sqrt_fidelity": float(self.sqrt_fidelity[i]), "holevo": float(self.holevo[i])}
            for i in range(self.N)
        ]

    def csv_rows(self):
        tag = "fwd" if self.direction == FORWARD else "transposed"
        return [
            (self.N, tag, i, repr(float(self.sqrt_fidelity[i])), repr(float(self.holevo[i])))
            for i in range(self.N)
        ]


CSV_HEADER = ("N", "direction", "i", "sqrt_fidelity", "holevo")


def synthesize_all(w, N, direction=FORWARD, output_unitary=None):
    """Exact parameters of all synthesized channels by full enumeration.

    For each index the conditioned bits form a classical register, so the
    synthesized state is block diagonal with uniform weights; its ``sqrt F``
    is the branch average of ``||sqrt(rho_bar_0) sqrt(rho_bar_1)||_1`` and
    its Holevo information the branch average of binary Holevo quantities
    (the register entropy cancels).

    ``output_unitary``, if given, conjugates every quantum part; it must
    leave both parameters unchanged and exists to check exactly that.
    """
    direction = _direction(direction)
    _level(N)
    _check_synth_dim(w, N)
    m = _generator(N, direction)
    sf = np.zeros(N)
    hol = np.zeros(N)
    nbranch = []
    for i in range(N):
        cpos, apos = _roles(N, i, direction)
        s_acc = 0.0
        h_acc = 0.0
        for cond in itertools.product((0, 1), repeat=len(cpos)):
            r0, r1 = _branch_pair(w, N, m, i, cpos, apos, cond)
            if output_unitary is not None:
                r0 = output_unitary @ r0 @ output_unitary.conj().T
                r1 = output_unitary @ r1 @ output_unitary.conj().T
            pair = BinaryCqChannel(r0, r1)
            s_acc += sqrt_fidelity_param(pair)
            h_acc += holevo(pair)
        nb = 1 << len(cpos)
        sf[i] = min(s_acc / nb, 1.0)
        hol[i] = min(h_acc / nb, 1.0)
        nbranch.append(nb)
    return SynthesizedChannelTable(N, direction, sf, hol, tuple(nbranch), w.label)


def side_encoder_operator(N, d_b):
    """``U_E`` acting on the ``C`` factors of an interleaved ``(B C)^{(x)N}`` space.

    ``U_E |c> = |c G_N>``. Phase-channel outputs are laid out as
    ``B_0 C_0 B_1 C_1 ...``; the ``B`` factors are untouched.
    """
    g = gn_matrix(_level(N)).bits.astype(np.int64)
    dim = (2 * d_b) ** N
    linalg.check_dim(dim, "side encoder")
    perm = np.zeros(dim, dtype=np.int64)
    shape = [d_b, 2] * N
    for idx in range(dim):
        digits = np.array(np.unravel_index(idx, shape))
        c = digits[1::2]
        digits[1::2] = (c @ g) % 2
        perm[idx] = np.ravel_multi_index(tuple(digits), shape)
    op = np.zeros((dim, dim), dtype=complex)
    op[perm, np.arange(dim)] = 1.0
    return op


def good_threshold(N, beta):
    return 2.0 ** (-(float(N) ** beta))


def _check_beta(beta):
    beta = float(beta)
    if not 0.0 < beta < 0.5:
        raise ValueError(f"beta must lie in (0, 1/2), got {beta}")
    return beta


def good_set(table, beta):
    """Indices with ``sqrt F < 2^{-N^beta}`` (strict; ties are bad)."""
    beta = _check_beta(beta)
    thr = good_threshold(table.N, beta)
    return frozenset(int(i) for i in np.flatnonzero(table.sqrt_fidelity < thr))


def fraction_good(table, beta):
    return len(good_set(table, beta)) / table.N


@dataclass(frozen=True)
class ChannelPartition:
    """Inputs split by amplitude/phase goodness: ``A`` both, ``X`` amplitude only,
    ``Z`` phase only, ``B`` neither."""

    N: int
    beta: float
    A: frozenset
    X: frozenset
    Z: frozenset
    B: frozenset
    good_amp: frozenset = field(default=frozenset())
    good_phase: frozenset = field(default=frozenset())

    def __post_init__(self):
        sets = (self.A, self.X, self.Z, self.B)
        union = frozenset().union(*sets)
        if union != frozenset(range(self.N)) or sum(len(s) for s in sets) != self.N:
            raise ValueError("A, X, Z, B must partition range(N)")

    @classmethod
    def from_sets(cls, N, A=(), X=(), Z=(), B=(), beta=0.3):
        """Build a partition by hand (e.g. to force every input into ``A``)."""
        A, X, Z, B = (frozenset(int(i) for i in s) for s in (A, X, Z, B))
        return cls(N, beta, A, X, Z, B, A | X, A | Z)

    def role(self, i):
        for name in "AXZB":
            if i in getattr(self, name):
                return name
        raise KeyError(i)

    def sizes(self):
        return {k: len(getattr(self, k)) for k in "AXZB"}


def classify(table_a, table_p, beta):
    beta = _check_beta(beta)
    if table_a.N != table_p.N:
        raise ValueError(f"tables disagree on N: {table_a.N} vs {table_p.N}")
    N = table_a.N
    ga = good_set(table_a, beta)
    gp = good_set(table_p, beta)
    full = frozenset(range(N))
    ba, bp = full - ga, full - gp
    return ChannelPartition(N, beta, ga & gp, ga & bp, ba & gp, ba & bp, ga, gp)


def coherent_information(ch):
    """Symmetric coherent information ``H(B) - H(E)`` for a maximally mixed input."""
    mixed = np.eye(ch.in_dim, dtype=complex) / ch.in_dim
    h = linalg.von_neumann_entropy
    return h(apply_channel(ch, mixed)) - h(complementary_channel(ch, mixed))


@dataclass(frozen=True)
class RateReport:
    N: int
    size_A: int
    size_X: int
    size_Z: int
    size_B: int
    net_rate: float
    coherent_info: float
    ebit_rate: float

    CSV_HEADER = ("N", "A", "X", "Z", "B", "net_rate", "coherent_info", "ebit_rate")

    def csv_row(self):
        return (self.N, self.size_A, self.size_X, self.size_Z, self.size_B,
                repr(self.net_rate), repr(self.coherent_info), repr(self.ebit_rate))


def rate_report(partition, ch):
    p = partition
    sizes = p.sizes()
    n_ga = len(p.good_amp) if p.good_amp else sizes["A"] + sizes["X"]
    n_gp = len(p.good_phase) if p.good_phase else sizes["A"] + sizes["Z"]
    if sizes["A"] - sizes["B"] != n_ga + n_gp - p.N:
        raise VerificationError(
            f"set identity failed: |A|-|B| = {sizes['A'] - sizes['B']}, "
            f"|G_A|+|G_P|-N = {n_ga + n_gp - p.N}"
        )
    return RateReport(
        N=p.N,
        size_A=sizes["A"], size_X=sizes["X"], size_Z=sizes["Z"], size_B=sizes["B"],
        net_rate=(sizes["A"] - sizes["B"]) / p.N,
        coherent_info=coherent_information(ch),
        ebit_rate=sizes["B"] / p.N,
    )


@dataclass(frozen=True)
class UncertaintyRow:
    i: int
    holevo_phase: float
    holevo_env: float
    sqrt_f_phase: float
    sqrt_f_env: float
    holevo_amp: float
    sqrt_f_amp: float

    @property
    def holevo_sum(self):
        return self.holevo_phase + self.holevo_env

    @property
    def fid_relation_1(self):
        return 2 * self.sqrt_f_phase + self.sqrt_f_env

    @property
    def fid_relation_2(self):
        return self.sqrt_f_phase + 2 * self.sqrt_f_env

    def checks(self, tol=1e-9):
        return {
            "holevo_sum": self.holevo_sum <= 1 + tol,
            "fid_relation_1": self.fid_relation_1 >= 1 - tol,
            "fid_relation_2": self.fid_relation_2 >= 1 - tol,
            "fid_bound_phase": self.holevo_phase >= holevo_fidelity_bound(self.sqrt_f_phase) - tol,
            "fid_bound_env": self.holevo_env >= holevo_fidelity_bound(self.sqrt_f_env) - tol,
            "fid_bound_amp": self.holevo_amp >= holevo_fidelity_bound(self.sqrt_f_amp) - tol,
        }

    def passed(self, tol=1e-9):
        return all(self.checks(tol).values())


@dataclass(frozen=True)
class UncertaintyReport:
    N: int
    beta: float
    rows: tuple
    good_phase: frozenset
    good_env: frozenset
    doubly_bad: frozenset
    degradable: bool

    CSV_HEADER = ("N", "i", "holevo_phase", "holevo_env", "holevo_sum",
                  "sqrt_f_phase", "sqrt_f_env", "fid_relation_1", "fid_relation_2",
                  "in_good_phase", "in_good_env", "in_B", "status")

    @property
    def phase_env_disjoint(self):
        return not (self.good_phase & self.good_env)

    @property
    def doubly_bad_env_disjoint(self):
        """``B`` and ``G(W_E)`` disjoint; ``None`` unless the channel is known degradable."""
        if not self.degradable:
            return None
        return not (self.doubly_bad & self.good_env)

    def all_pass(self, tol=1e-9):
        rows_ok = all(r.passed(tol) for r in self.rows)
        return rows_ok and self.phase_env_disjoint and self.doubly_bad_env_disjoint is not False

    def csv_rows(self, tol=1e-9):
        out = []
        for r in self.rows:
            out.append((
                self.N, r.i, repr(r.holevo_phase), repr(r.holevo_env), repr(r.holevo_sum),
                repr(r.sqrt_f_phase), repr(r.sqrt_f_env),
                repr(r.fid_relation_1), repr(r.fid_relation_2),
                int(r.i in self.good_phase), int(r.i in self.good_env), int(r.i in self.doubly_bad),
                "PASS" if r.passed(tol) else "FAIL",
            ))
        return out


def uncertainty_report(ch, N, beta):
    """Per-index complementarity checks between the phase and environment channels."""
    beta = _check_beta(beta)
    t_a = synthesize_all(amplitude_channel(ch), N, FORWARD)
    t_p = synthesize_all(phase_channel(ch), N, TRANSPOSED)
    t_e = synthesize_all(environment_channel(ch), N, FORWARD)
    part = classify(t_a, t_p, beta)
    rows = tuple(
        UncertaintyRow(i, float(t_p.holevo[i]), float(t_e.holevo[i]),
                       float(t_p.sqrt_fidelity[i]), float(t_e.sqrt_fidelity[i]),
                       float(t_a.holevo[i]), float(t_a.sqrt_fidelity[i]))
        for i in range(N)
    )
    return UncertaintyReport(
        N=N, beta=beta, rows=rows,
        good_phase=good_set(t_p, beta),
        good_env=good_set(t_e, beta),
        doubly_bad=part.B,
        degradable=ch.degradable is Degradability.KNOWN_DEGRADABLE,
    )
