import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eapolar import linalg
from eapolar.channel import (
    ChannelSpec,
    Degradability,
    apply_channel,
    apply_kraus,
    channel_from_kraus,
    complementary_channel,
    make_builtin,
    random_channel,
    stinespring,
    tensor_channels,
)
from eapolar.errors import ValidationError


def ad(g):
    return make_builtin({"name": "amplitude_damping", "params": {"gamma": g}})


def test_identity_builtin():
    ch = make_builtin(ChannelSpec("identity", {"d": 2}))
    assert ch.env_dim == 1 and len(ch.kraus) == 1
    assert np.allclose(ch.kraus[0], np.eye(2))
    assert ch.degradable is Degradability.KNOWN_DEGRADABLE


def test_amplitude_damping_zero_is_identity(rng):
    ch = ad(0.0)
    for _ in range(5):
        rho = linalg.random_density(2, rng)
        assert np.allclose(apply_channel(ch, rho), rho, atol=1e-12)


def test_erasure_four_half():
    ch = make_builtin({"name": "erasure", "params": {"d": 4, "p": 0.5}})
    assert (ch.in_dim, ch.out_dim) == (4, 5)
    rho = np.zeros((4, 4))
    rho[2, 2] = 1
    out = apply_channel(ch, rho)
    expected = np.zeros((5, 5))
    expected[2, 2] = 0.5
    expected[4, 4] = 0.5
    assert np.allclose(out, expected)


@pytest.mark.parametrize("spec, flag", [
    ({"name": "amplitude_damping", "params": {"gamma": 0.5}}, Degradability.KNOWN_DEGRADABLE),
    ({"name": "amplitude_damping", "params": {"gamma": 0.51}}, Degradability.UNKNOWN),
    ({"name": "dephasing", "params": {"p": 0.3}}, Degradability.KNOWN_DEGRADABLE),
    ({"name": "qubit_erasure", "params": {"p": 0.5}}, Degradability.KNOWN_DEGRADABLE),
    ({"name": "erasure", "params": {"d": 3, "p": 0.7}}, Degradability.UNKNOWN),
    ({"name": "depolarizing", "params": {"p": 0.1}}, Degradability.UNKNOWN),
])
def test_degradability_flags(spec, flag):
    assert make_builtin(spec).degradable is flag


@pytest.mark.parametrize("spec", [
    {"name": "amplitude_damping", "params": {"gamma": 1.5}},
    {"name": "dephasing", "params": {"p": -0.1}},
    {"name": "nonsense"},
    {"name": "custom"},
    {"name": "erasure", "params": {"p": 0.5}},
    {"name": "amplitude_damping"},
])
def test_bad_specs(spec):
    with pytest.raises(ValueError):
        make_builtin(spec)


def test_stinespring_identity():
    v = stinespring([np.eye(2)])
    assert np.allclose(v, np.kron(np.eye(2), np.array([[1]])))


def test_stinespring_full_damping():
    v = ad(1.0).extension
    # |1> -> |0>_B |1>_E, composite index b * env + e = 1
    assert np.allclose(v[:, 1], [0, 1, 0, 0])
    assert np.allclose(v[:, 0], [1, 0, 0, 0])


def test_stinespring_full_dephasing():
    v = make_builtin({"name": "dephasing", "params": {"p": 0.5}}).extension
    s = np.sqrt(0.5)
    for z in (0, 1):
        b = linalg.ket(z, 2)
        e = np.array([s, (-1) ** z * s])
        assert np.allclose(v[:, z], np.kron(b, e))


def test_stinespring_rejects_incomplete():
    with pytest.raises(ValidationError, match="residual"):
        stinespring([np.eye(2), np.eye(2)])
    with pytest.raises(ValidationError):
        stinespring([])
    with pytest.raises(ValidationError):
        stinespring([np.eye(2), np.zeros((3, 2))])


def test_apply_channel_examples():
    g = 0.3
    assert np.allclose(apply_channel(ad(g), np.diag([0.0, 1.0])), np.diag([g, 1 - g]))
    plus = linalg.projector(np.array([1, 1]) / np.sqrt(2))
    deph = make_builtin({"name": "dephasing", "params": {"p": 0.5}})
    assert np.allclose(apply_channel(deph, plus), np.eye(2) / 2)
    rho = np.array([[0.7, 0.2j], [-0.2j, 0.3]])
    assert np.allclose(apply_channel(make_builtin({"name": "identity"}), rho), rho)


def test_apply_channel_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_channel(ad(0.1), np.eye(3) / 3)


def test_complementary_examples(rng):
    g = 0.3
    assert np.allclose(complementary_channel(ad(g), np.diag([0.0, 1.0])), np.diag([1 - g, g]))
    ident = make_builtin({"name": "identity"})
    assert np.allclose(complementary_channel(ident, linalg.random_density(2, rng)), [[1.0]])
    clean = make_builtin({"name": "dephasing", "params": {"p": 0.0}})
    envs = [complementary_channel(clean, linalg.random_density(2, rng)) for _ in range(3)]
    for e in envs:
        assert np.allclose(e, envs[0])
        assert linalg.von_neumann_entropy(e) == pytest.approx(0, abs=1e-12)


def test_depolarizing_action(rng):
    p = 0.4
    ch = make_builtin({"name": "depolarizing", "params": {"p": p, "d": 3}})
    rho = linalg.random_density(3, rng)
    assert np.allclose(apply_channel(ch, rho), (1 - p) * rho + p * np.eye(3) / 3)


def test_amplitude_damping_swap_under_complement():
    for g in (0.1, 0.3, 0.45):
        for z in (0, 1):
            rho = np.diag([1.0 - z, float(z)])
            env = np.linalg.eigvalsh(complementary_channel(ad(g), rho))
            out = np.linalg.eigvalsh(apply_channel(ad(1 - g), rho))
            assert np.allclose(env, out)


def test_tensor_channels_product_action(rng):
    a, b = ad(0.2), make_builtin({"name": "dephasing", "params": {"p": 0.3}})
    joint = tensor_channels(a, b)
    r, s = linalg.random_density(2, rng), linalg.random_density(2, rng)
    assert np.allclose(apply_channel(joint, np.kron(r, s)),
                       np.kron(apply_channel(a, r), apply_channel(b, s)))


def test_channel_arrays_are_frozen():
    ch = ad(0.2)
    with pytest.raises(ValueError):
        ch.kraus[0][0, 0] = 3
    with pytest.raises(ValueError):
        ch.extension[0, 0] = 3


def test_custom_from_spec():
    k0 = np.array([[1, 0], [0, 0.8]])
    k1 = np.array([[0, 0.6], [0, 0]])
    ch = make_builtin(ChannelSpec(kraus=(k0, k1)))
    assert ch.name == "custom" and ch.degradable is Degradability.UNKNOWN
    assert np.allclose(apply_channel(ch, np.diag([0.0, 1.0])), np.diag([0.36, 0.64]))


BUILTINS = [
    {"name": "identity", "params": {"d": 3}},
    {"name": "amplitude_damping", "params": {"gamma": 0.37}},
    {"name": "dephasing", "params": {"p": 0.2}},
    {"name": "depolarizing", "params": {"p": 0.6}},
    {"name": "qubit_erasure", "params": {"p": 0.25}},
    {"name": "erasure", "params": {"d": 3, "p": 0.5}},
]


@given(st.integers(0, 2**32 - 1), st.sampled_from(BUILTINS))
def test_builtin_traces_and_two_routes(seed, spec):
    rng = np.random.default_rng(seed)
    ch = make_builtin(spec)
    linalg.check_isometry(ch.extension)
    rho = linalg.random_density(ch.in_dim, rng)
    out = apply_channel(ch, rho)
    assert np.trace(out).real == pytest.approx(1, abs=1e-10)
    assert np.trace(complementary_channel(ch, rho)).real == pytest.approx(1, abs=1e-10)
    assert np.allclose(out, apply_kraus(ch, rho), atol=1e-10)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 4), st.integers(1, 4))
def test_random_channels_are_valid(seed, din, dout, denv):
    if dout * denv < din:
        return
    rng = np.random.default_rng(seed)
    ch = random_channel(din, dout, denv, rng)
    rho = linalg.random_density(din, rng)
    linalg.check_density(apply_channel(ch, rho), tol=1e-9)
    assert np.allclose(apply_channel(ch, rho), apply_kraus(ch, rho), atol=1e-10)
    again = channel_from_kraus(ch.kraus)
    assert np.allclose(again.extension, ch.extension)
