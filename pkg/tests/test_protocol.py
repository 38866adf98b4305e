import math

import numpy as np
import pytest

from w2ghz.atom_cavity import SystemParams
from w2ghz.detection import OutcomeClass, atomic_space, ghz_pair_states
from w2ghz.dynamics import decay_coefficients, ideal_coefficients
from w2ghz.hilbert import DensityMatrix, StateVector, fidelity
from w2ghz.protocol import (
    apply_hadamard_pulses,
    cavity_interaction,
    ghz_target,
    ground_state_space,
    prepare_w_state,
    raman_mapping,
    run_protocol,
    sign_correction,
    transfer_coefficients,
)

IDEAL = SystemParams(delta=20.0, lambda_c=1.0, omega=1.0)
DECAYING = SystemParams(delta=20.0, lambda_c=1.0, omega=1.0, kappa=0.02)

# Post-pulse amplitudes of the eight ground configurations, ordered
# (LLL, LLR, LRL, LRR, RLL, RLR, RRL, RRR) over 2 sqrt 6.
POST_PULSE_NUMERATORS = [3, 1, 1, -1, 1, -1, -1, -3]


class TestStatePreparation:
    def test_w_state_amplitudes(self):
        w = prepare_w_state()
        space = w.space
        assert w.norm() == pytest.approx(1.0, abs=1e-14)
        assert w.amplitudes[space.basis_index(0, 0, 1)] == pytest.approx(1 / math.sqrt(3))
        assert w.amplitudes[space.basis_index(0, 1, 0)] == pytest.approx(1 / math.sqrt(3))
        assert w.amplitudes[space.basis_index(1, 0, 0)] == pytest.approx(1 / math.sqrt(3))
        assert w.amplitudes[space.basis_index(1, 1, 1)] == 0.0
        assert w.amplitudes[space.basis_index(0, 0, 0)] == 0.0

    def test_hadamard_produces_expected_coefficients(self):
        state = apply_hadamard_pulses(prepare_w_state())
        expected = np.array(POST_PULSE_NUMERATORS) / (2 * math.sqrt(6))
        assert np.max(np.abs(state.amplitudes - expected)) < 1e-14

    def test_hadamard_is_involution(self):
        w = prepare_w_state()
        back = apply_hadamard_pulses(apply_hadamard_pulses(w))
        assert np.max(np.abs(back.amplitudes - w.amplitudes)) < 1e-14

    def test_hadamard_requires_qubits(self):
        bad = StateVector(atomic_space(("a",), ("gL", "gR", "eL", "eR")), [1, 0, 0, 0])
        with pytest.raises(ValueError, match="qubits"):
            apply_hadamard_pulses(bad)

    def test_ghz_target_form(self):
        t = ghz_target()
        assert t.amplitudes[t.space.basis_index(0, 0, 0)] == pytest.approx(1 / math.sqrt(2))
        assert t.amplitudes[t.space.basis_index(1, 1, 1)] == pytest.approx(1 / math.sqrt(2))


class TestCavityInteraction:
    def test_zero_time_keeps_ground_state(self):
        state = apply_hadamard_pulses(prepare_w_state())
        joint = cavity_interaction(state, IDEAL, t=0.0)
        assert joint.photon_numbers() == {0}
        amps = {config: amp for (config, occ), amp in joint.terms.items()}
        assert amps[("gL", "gL", "gL")] == pytest.approx(3 / (2 * math.sqrt(6)))

    def test_operating_point_emits_everywhere(self):
        state = apply_hadamard_pulses(prepare_w_state())
        joint = cavity_interaction(state, IDEAL)
        joint.require_photon_number(3)
        amps = {config: amp for (config, occ), amp in joint.terms.items()}
        # Every ground level became the matching emitted level with a sign
        # flip cubed.
        assert amps[("eL", "eL", "eL")] == pytest.approx(-3 / (2 * math.sqrt(6)), abs=1e-12)
        assert amps[("eR", "eR", "eR")] == pytest.approx(3 / (2 * math.sqrt(6)), abs=1e-12)

    def test_norm_follows_coefficient_weight(self):
        state = apply_hadamard_pulses(prepare_w_state())
        for t in (0.7, 1.9):
            coeffs = decay_coefficients(DECAYING, t)
            joint = cavity_interaction(state, DECAYING, t=t)
            assert joint.norm_sq() == pytest.approx(coeffs.weight ** 3, abs=1e-12)

    def test_transfer_coefficients_dispatch(self):
        t = 1.1
        assert transfer_coefficients(IDEAL, t) == ideal_coefficients(IDEAL, t)
        assert transfer_coefficients(DECAYING, t) == decay_coefficients(DECAYING, t)

    def test_requires_ground_space(self):
        bad = StateVector(atomic_space(("a", "b"), ("gL", "gR")), [1, 0, 0, 0])
        with pytest.raises(ValueError, match="three-atom"):
            cavity_interaction(bad, IDEAL)


class TestSignCorrection:
    def test_minus_class_maps_to_plus(self):
        space = atomic_space(("a", "b", "c"))
        plus, minus = ghz_pair_states(space)
        corrected = sign_correction(minus.to_density_matrix(), OutcomeClass.GHZ_MINUS)
        assert fidelity(corrected, plus) == pytest.approx(1.0, abs=1e-12)

    def test_plus_class_untouched(self):
        space = atomic_space(("a", "b", "c"))
        plus, _ = ghz_pair_states(space)
        rho = plus.to_density_matrix()
        assert sign_correction(rho, OutcomeClass.GHZ_PLUS) is rho

    def test_flip_is_involution(self):
        rng = np.random.default_rng(43)
        space = atomic_space(("a", "b", "c"))
        g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        m = g @ g.conj().T
        rho = DensityMatrix(space, m / np.trace(m).real)
        twice = sign_correction(sign_correction(rho, OutcomeClass.GHZ_MINUS), OutcomeClass.GHZ_MINUS)
        assert np.max(np.abs(twice.elements - rho.elements)) < 1e-14

    def test_reject_class_refused(self):
        space = atomic_space(("a", "b", "c"))
        plus, _ = ghz_pair_states(space)
        with pytest.raises(ValueError, match="accepted"):
            sign_correction(plus.to_density_matrix(), OutcomeClass.REJECT)


class TestRamanMapping:
    def test_plus_state_maps_to_ghz(self):
        space = atomic_space(("a", "b", "c"))
        plus, _ = ghz_pair_states(space)
        mapped = raman_mapping(plus.to_density_matrix())
        assert mapped.space == ground_state_space()
        assert fidelity(mapped, ghz_target()) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed_stays_maximally_mixed(self):
        space = atomic_space(("a", "b", "c"))
        rho = DensityMatrix(space, np.eye(8) / 8)
        mapped = raman_mapping(rho)
        assert np.allclose(mapped.elements, np.eye(8) / 8)
        assert mapped.trace() == pytest.approx(1.0)

    def test_four_level_input_with_emitted_support(self):
        space = atomic_space(("a", "b", "c"), ("gL", "gR", "eL", "eR"))
        amps = np.zeros(space.total_dim, dtype=complex)
        amps[space.basis_index(2, 2, 2)] = 1 / math.sqrt(2)
        amps[space.basis_index(3, 3, 3)] = 1 / math.sqrt(2)
        mapped = raman_mapping(StateVector(space, amps).to_density_matrix())
        assert fidelity(mapped, ghz_target()) == pytest.approx(1.0, abs=1e-12)

    def test_four_level_input_with_ground_support_rejected(self):
        space = atomic_space(("a", "b", "c"), ("gL", "gR", "eL", "eR"))
        rho = StateVector.basis_state(space, 0, 0, 0).to_density_matrix()
        with pytest.raises(ValueError, match="support outside"):
            raman_mapping(rho)


class TestRunProtocol:
    def test_ideal_end_to_end(self):
        run = run_protocol(IDEAL)
        assert run.success_probability == pytest.approx(0.75, abs=1e-10)
        assert run.fidelity == pytest.approx(1.0, abs=1e-10)
        assert run.reject_probability == pytest.approx(0.25, abs=1e-10)
        assert len(run.results) == 8

    def test_every_accepted_pattern_reaches_target(self):
        run = run_protocol(IDEAL)
        classes = set()
        for result in run.results:
            assert result.probability == pytest.approx(3 / 32, abs=1e-12)
            assert result.fidelity == pytest.approx(1.0, abs=1e-10)
            assert fidelity(result.final, ghz_target()) == pytest.approx(1.0, abs=1e-10)
            classes.add(result.outcome)
        assert classes == {OutcomeClass.GHZ_PLUS, OutcomeClass.GHZ_MINUS}

    def test_detector_efficiency_scaling(self):
        params = SystemParams(delta=20.0, lambda_c=1.0, omega=1.0, eta_d=0.8)
        run = run_protocol(params)
        assert run.success_probability == pytest.approx(3 * 0.8**3 / 4, abs=1e-12)
        assert run.fidelity == pytest.approx(1.0, abs=1e-10)

    def test_off_operating_time_only_costs_probability(self):
        # Incomplete transfer feeds the reject mass; the post-selected state
        # itself stays perfect because all three atoms share one amplitude.
        t = 0.6 * IDEAL.operating_time
        run = run_protocol(IDEAL, t=t)
        beta = ideal_coefficients(IDEAL, t).beta
        assert run.success_probability == pytest.approx(0.75 * abs(beta) ** 6, abs=1e-12)
        assert run.success_probability < 0.75
        assert run.fidelity == pytest.approx(1.0, abs=1e-10)

    def test_decay_success_matches_closed_form(self):
        run = run_protocol(DECAYING)
        coeffs = decay_coefficients(DECAYING, DECAYING.operating_time)
        assert run.success_probability == pytest.approx(0.75 * abs(coeffs.beta) ** 6, abs=1e-12)
        assert run.fidelity == pytest.approx(1.0, abs=1e-10)

    def test_decay_outcome_algebra_complete(self):
        run = run_protocol(DECAYING)
        # In-algebra probabilities sum to the surviving weight; the jump
        # branch tops the reject mass up to one.
        in_algebra = sum(run.report.pattern_probabilities.values())
        coeffs = decay_coefficients(DECAYING, DECAYING.operating_time)
        assert in_algebra == pytest.approx(coeffs.weight ** 3, abs=1e-10)
        assert run.success_probability + run.reject_probability == pytest.approx(1.0, abs=1e-12)

    def test_json_report(self):
        doc = run_protocol(IDEAL).to_json_dict()
        assert doc["success_probability"] == pytest.approx(0.75)
        assert doc["fidelity"] == pytest.approx(1.0)
        assert len(doc["patterns"]) == 8
        assert all(set(p) == {"detectors", "class", "probability", "fidelity"} for p in doc["patterns"])


def test_run_protocol_runtime_under_one_second():
    import time
    start = time.perf_counter()
    run_protocol(IDEAL)
    assert time.perf_counter() - start < 1.0
