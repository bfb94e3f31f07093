import itertools
import json

import numpy as np
import pytest

from eapolar import linalg
from eapolar.channel import make_builtin
from eapolar.cqsynth import amplitude_channel, phase_channel
from eapolar.errors import ResourceLimitError
from eapolar.polar import (
    FORWARD,
    TRANSPOSED,
    ChannelPartition,
    _roles,
    branch_pair,
    classify,
    gn_matrix,
    synthesize_all,
)
from eapolar.protosim import (
    GlobalState,
    ProtocolConfig,
    _encode_and_transmit,
    amplitude_stage,
    build_initial_state,
    build_scd_povm,
    coherent_decode_step,
    coherent_encoder,
    decoder_error,
    final_cnot_correction,
    helstrom_error,
    phase_stage,
    run_protocol,
)


def builtin(name, **params):
    return make_builtin({"name": name, "params": params})


def ad(g):
    return builtin("amplitude_damping", gamma=g)


def part(N, **sets):
    return ChannelPartition.from_sets(N, **sets)


PARTITIONS_2 = [
    dict(A=[0, 1]), dict(A=[0], X=[1]), dict(Z=[0], A=[1]),
    dict(X=[0], Z=[1]), dict(B=[0], A=[1]), dict(A=[1], X=[0]),
]
PHI = np.array([1, 0, 0, 1]) / np.sqrt(2)


# initial state -----------------------------------------------------------

def test_initial_state_single_information_qubit():
    cfg = ProtocolConfig(builtin("identity"), 1, part(1, A=[0]))
    st = build_initial_state(cfg)
    assert st.names == ["alice0", "in0", "c0", "ph0"]
    pair = np.moveaxis(st.t, [0, 1], [0, 1])[:, :, 0, 0].ravel()
    assert np.allclose(pair, PHI)


def test_initial_state_ebits_with_receiver():
    cfg = ProtocolConfig(builtin("identity"), 2, part(2, B=[0, 1]))
    st = build_initial_state(cfg)
    for k in (0, 1):
        assert st.pair_fidelity([(f"in{k}", f"ebit{k}")]) == pytest.approx(1)


def test_initial_state_fixed_frozen_amplitude():
    cfg = ProtocolConfig(builtin("identity"), 2, part(2, Z=[0], A=[1]),
                         frozen_amp=(0,), average_frozen=False)
    st = build_initial_state(cfg)
    t = np.moveaxis(st.t, st.axis("in0"), 0)
    assert np.linalg.norm(t[1]) == pytest.approx(0)
    cfg1 = ProtocolConfig(builtin("identity"), 2, part(2, Z=[0], A=[1]),
                          frozen_amp=(1,), average_frozen=False)
    st1 = build_initial_state(cfg1)
    for name in ("in0", "c0"):
        assert np.linalg.norm(np.moveaxis(st1.t, st1.axis(name), 0)[0]) == pytest.approx(0)


def test_initial_state_frozen_phase_is_hadamard_basis():
    cfg = ProtocolConfig(builtin("identity"), 2, part(2, X=[0], A=[1]), frozen_phase=(1,))
    st = build_initial_state(cfg)
    t = np.moveaxis(st.t, st.axis("in0"), 0).reshape(2, -1)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert np.linalg.norm(minus.conj() @ t) == pytest.approx(1)


def test_initial_state_cap():
    cfg = ProtocolConfig(builtin("identity"), 4, part(4, A=range(4)))
    with linalg.dim_cap(64):
        with pytest.raises(ResourceLimitError):
            build_initial_state(cfg)


# coherent encoder ----------------------------------------------------------

def test_coherent_encoder_small():
    assert np.allclose(coherent_encoder(1), np.eye(2))
    u = coherent_encoder(2)
    # |u0 u1> -> |u0 + u1, u1>: a CNOT whose control is the second qubit
    expected = np.zeros((4, 4))
    for u0, u1 in itertools.product((0, 1), repeat=2):
        expected[2 * (u0 ^ u1) + u1, 2 * u0 + u1] = 1
    assert np.allclose(u, expected)


def test_coherent_encoder_n4_matches_gn():
    u = coherent_encoder(4)
    assert np.allclose(u.conj().T @ u, np.eye(16))
    g = gn_matrix(2).bits.astype(int)
    for idx, word in enumerate(itertools.product((0, 1), repeat=4)):
        image = (np.array(word) @ g) % 2
        col = np.zeros(16)
        col[int("".join(map(str, image)), 2)] = 1
        assert np.allclose(u[:, idx], col)


def test_coherent_encoder_rejects_bad_n():
    with pytest.raises(ValueError):
        coherent_encoder(3)


# decoders ------------------------------------------------------------------

def test_povm_identity_is_projective():
    w = amplitude_channel(builtin("identity"))
    povm = build_scd_povm(w, 2, FORWARD, {})
    assert povm.kind == "amplitude_Lambda"
    g = gn_matrix(1).bits.astype(int)
    for bits, e in povm.elements.items():
        x = (np.array(bits) @ g) % 2
        basis = np.zeros(4)
        basis[2 * x[0] + x[1]] = 1
        assert np.allclose(e, np.outer(basis, basis))
    assert decoder_error(w, 2, FORWARD, []) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("kind", ["helstrom", "pgm"])
@pytest.mark.parametrize("direction, frozen", [(FORWARD, {}), (FORWARD, {1: 1}), (TRANSPOSED, {0: 0})])
def test_povm_is_valid(kind, direction, frozen):
    ch = ad(0.2)
    w = amplitude_channel(ch) if direction == FORWARD else phase_channel(ch)
    povm = build_scd_povm(w, 2, direction, frozen, kind)
    assert povm.residual() < 1e-8
    assert povm.kind == ("amplitude_Lambda" if direction == FORWARD else "phase_Gamma")
    for e in povm.elements.values():
        assert np.min(np.linalg.eigvalsh((e + e.conj().T) / 2)) > -1e-10
    assert len(povm.elements) == 2 ** (2 - len(frozen))


@pytest.mark.parametrize("g", [0.05, 0.3, 0.7])
def test_helstrom_single_step(g):
    w = amplitude_channel(ad(g))
    # |0><0| vs diag(g, 1-g): trace distance 1-g, so error g/2
    assert helstrom_error(w.rho0, w.rho1) == pytest.approx(g / 2)
    assert decoder_error(w, 1, FORWARD, []) == pytest.approx(g / 2, abs=1e-12)


def test_sequential_union_bound():
    ch = ad(0.1)
    for w, d in ((amplitude_channel(ch), FORWARD), (phase_channel(ch), TRANSPOSED)):
        steps = 0.0
        for i in range(2):
            cpos, _ = _roles(2, i, d)
            steps += np.mean([helstrom_error(*branch_pair(w, 2, d, i, c))
                              for c in itertools.product((0, 1), repeat=len(cpos))])
        assert 1 - decoder_error(w, 2, d, []) >= 1 - steps - 1e-12


def test_pgm_option_runs():
    cfg = ProtocolConfig(ad(0.05), 2, part(2, A=[0, 1]), povm_kind="pgm")
    rep = run_protocol(cfg)
    assert 0 < rep.ebit_fidelity <= 1


def test_unknown_povm_kind():
    with pytest.raises(ValueError):
        build_scd_povm(amplitude_channel(ad(0.1)), 2, FORWARD, {}, "oracle")


# coherent decoding ---------------------------------------------------------

def test_projective_coherent_step_copies_basis_state():
    st = GlobalState([("q", 2), ("out", 2)])
    st.apply(np.array([[0, 1], [1, 0]]), ["q"])
    w = amplitude_channel(builtin("identity"))
    povm = build_scd_povm(w, 1, FORWARD, {})
    coherent_decode_step(st, lambda c: povm, [], ["q"], ["out"])
    assert abs(st.t[1, 1]) == pytest.approx(1)


def test_controlled_isometry_needs_fresh_outputs():
    st = GlobalState([("q", 2), ("out", 2)])
    st.apply(np.array([[0, 1], [1, 0]]), ["out"])
    with pytest.raises(ValueError):
        st.controlled_isometry([], ["q"], ["out"], lambda c: [(np.eye(2), (0,))])


def _pipeline(cfg, u_x=None):
    st = build_initial_state(cfg)
    norms = [st.norm()]
    _encode_and_transmit(st, cfg)
    norms.append(st.norm())
    amplitude_stage(st, cfg)
    norms.append(st.norm())
    phase_stage(st, cfg, u_x)
    norms.append(st.norm())
    final_cnot_correction(st, cfg)
    norms.append(st.norm())
    return st, norms


@pytest.mark.parametrize("sets", PARTITIONS_2)
def test_norm_preserved_at_every_stage(sets):
    cfg = ProtocolConfig(ad(0.2), 2, part(2, **sets))
    _, norms = _pipeline(cfg)
    assert np.allclose(norms, 1, atol=1e-8)


def test_identity_amplitude_stage_is_ideal():
    rep = run_protocol(ProtocolConfig(builtin("identity"), 2, part(2, A=[0], X=[1])))
    assert rep.stage_overlaps[0] > 1 - 1e-9
    assert rep.stage_overlaps[1] > 1 - 1e-9


def test_amplitude_stage_overlap_bound():
    for sets in PARTITIONS_2:
        rep = run_protocol(ProtocolConfig(ad(0.05), 2, part(2, **sets)))
        assert rep.stage_overlaps[0] >= 1 - 2 * rep.eps_amp - 1e-12
        assert rep.stage_overlaps[1] >= 1 - 2 * rep.eps_phase - 1e-12


def test_final_cnot_identity_gives_perfect_ebits():
    cfg = ProtocolConfig(builtin("identity"), 2, part(2, A=[0, 1]))
    st, _ = _pipeline(cfg)
    assert st.pair_fidelity([("alice0", "ph0"), ("alice1", "ph1")]) == pytest.approx(1, abs=1e-9)


def test_final_cnot_on_phase_free_state_is_relabeling():
    st = GlobalState([("c0", 2), ("ph0", 2), ("c1", 2), ("ph1", 2)])
    before = st.t.copy()
    cfg = ProtocolConfig(builtin("identity"), 2, part(2, A=[0, 1]))
    final_cnot_correction(st, cfg)
    assert np.allclose(st.t, before)


def test_fidelity_composes_stage_overlaps():
    rep = run_protocol(ProtocolConfig(ad(0.05), 2, part(2, A=[0, 1])))
    a, p = rep.stage_overlaps
    assert rep.ebit_fidelity >= a * p - 1e-12


# end to end ----------------------------------------------------------------

@pytest.mark.parametrize("sets", PARTITIONS_2 + [dict(B=[0, 1])])
@pytest.mark.parametrize("average", [True, False])
def test_identity_channel_is_perfect(sets, average):
    rep = run_protocol(ProtocolConfig(builtin("identity"), 2, part(2, **sets), average_frozen=average))
    assert rep.ebit_fidelity == pytest.approx(1, abs=1e-9)


def test_identity_n4():
    rep = run_protocol(ProtocolConfig(builtin("identity"), 4, part(4, A=[1, 3], X=[2], Z=[0])))
    assert rep.ebit_fidelity == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("sets", [dict(A=[0, 1]), dict(A=[1], Z=[0]), dict(A=[0], X=[1])])
def test_fully_depolarizing_is_random_guess(sets):
    rep = run_protocol(ProtocolConfig(builtin("depolarizing", p=1.0), 2, part(2, **sets)))
    assert rep.ebit_fidelity <= 2.0 ** -len(sets["A"]) + 0.1


def _classified(ch, N, beta=0.3):
    return classify(synthesize_all(amplitude_channel(ch), N, FORWARD),
                    synthesize_all(phase_channel(ch), N, TRANSPOSED), beta)


def test_error_bound_with_classified_partition():
    ch = ad(0.05)
    rep = run_protocol(ProtocolConfig(ch, 2, _classified(ch, 2), average_frozen=True))
    assert rep.ebit_fidelity >= 1 - 2 * (rep.eps_amp + rep.eps_phase)


@pytest.mark.parametrize("g", [0.02, 0.1, 0.2])
@pytest.mark.parametrize("sets", PARTITIONS_2)
def test_error_bound_sweep(g, sets):
    rep = run_protocol(ProtocolConfig(ad(g), 2, part(2, **sets)))
    assert rep.ebit_fidelity >= 1 - 2 * (rep.eps_amp + rep.eps_phase)


@pytest.mark.parametrize("sets", [dict(A=[0, 1]), dict(Z=[0], A=[1]), dict(X=[0], Z=[1])])
def test_fidelity_monotone_in_gamma(sets):
    fids = [run_protocol(ProtocolConfig(ad(g), 2, part(2, **sets))).ebit_fidelity
            for g in (0.0, 0.02, 0.05, 0.1)]
    assert all(b <= a + 1e-6 for a, b in zip(fids, fids[1:]))


def test_fixed_frozen_run_is_seeded():
    cfg = ProtocolConfig(ad(0.1), 2, part(2, X=[0], Z=[1]), average_frozen=False, seed=11)
    a, b = run_protocol(cfg), run_protocol(cfg)
    assert a.to_json() == b.to_json()
    assert set(a.frozen) == {"u_Z", "u_X"}
    assert a.stage_overlaps[1] is None


def test_report_json_keys():
    rep = run_protocol(ProtocolConfig(ad(0.05), 2, part(2, A=[0, 1])))
    data = json.loads(rep.to_json())
    for key in ("N", "gamma_or_params", "ebit_fidelity", "stage_overlaps", "eps_amp",
                "eps_phase", "averaged_over_frozen", "seed", "partition"):
        assert key in data
    assert data["gamma_or_params"] == {"name": "amplitude_damping", "gamma": 0.05}


def test_config_validation():
    with pytest.raises(ValueError):
        ProtocolConfig(builtin("identity"), 4, part(2, A=[0, 1]))
    with pytest.raises(ValueError):
        ProtocolConfig(builtin("identity"), 2, part(2, Z=[0], A=[1]), frozen_amp=(0, 1))
    with pytest.raises(ValueError):
        ProtocolConfig(builtin("identity", d=3), 2, part(2, A=[0, 1]))
    with pytest.raises(ValueError):
        ProtocolConfig(builtin("identity"), 2, part(2, A=[0, 1]), povm_kind="magic")
