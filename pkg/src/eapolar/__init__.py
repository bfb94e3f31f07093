"""Entanglement-assisted quantum polar codes at desk scale.

Dense-matrix tools for synthesizing the amplitude, phase and environment
cq channels of a qubit channel, classifying polarized indices, simulating
the coherent decoding protocol at tiny block length, and checking the
level-by-level rate decomposition of multi-qubit channels.
"""

from .channel import (
    ChannelSpec,
    Degradability,
    QuantumChannel,
    apply_channel,
    channel_from_kraus,
    complementary_channel,
    make_builtin,
    random_channel,
    tensor_channels,
)
from .cqsynth import (
    BinaryCqChannel,
    amplitude_channel,
    duality_gap,
    environment_channel,
    holevo,
    phase_channel,
    sqrt_fidelity_param,
)
from .errors import NumericDomainError, ResourceLimitError, ValidationError, VerificationError
from .linalg import dim_cap, get_dim_cap, set_dim_cap
from .multilevel import MultiQubitChannel, level_rates, multilevel_net_rate, superactivation_check
from .polar import (
    FORWARD,
    TRANSPOSED,
    ChannelPartition,
    classify,
    coherent_information,
    gn_matrix,
    rate_report,
    synthesize_all,
    uncertainty_report,
)
from .protosim import ProtocolConfig, run_protocol

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec", "Degradability", "QuantumChannel", "apply_channel", "channel_from_kraus",
    "complementary_channel", "make_builtin", "random_channel", "tensor_channels",
    "BinaryCqChannel", "amplitude_channel", "duality_gap", "environment_channel", "holevo",
    "phase_channel", "sqrt_fidelity_param",
    "NumericDomainError", "ResourceLimitError", "ValidationError", "VerificationError",
    "dim_cap", "get_dim_cap", "set_dim_cap",
    "MultiQubitChannel", "level_rates", "multilevel_net_rate", "superactivation_check",
    "FORWARD", "TRANSPOSED", "ChannelPartition", "classify", "coherent_information",
    "gn_matrix", "rate_report", "synthesize_all", "uncertainty_report",
    "ProtocolConfig", "run_protocol",
    "__version__",
]
