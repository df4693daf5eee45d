import math
from itertools import product

import numpy as np
import pytest

from qrainbow import grover
from qrainbow.errors import ConfigurationError, IndexRangeError, SimulationError
from qrainbow.grover import (Segment, TargetSpec, closed_form_success, compute_phi, dega_circuit, gate_count,
                             grover_modified_circuit, grover_original_circuit, noise_sweep, partition,
                             phase_flip_oracle, phase_rotation_oracle, search_bucket, subfunction_solutions,
                             success_probability, success_sweep)
from qrainbow.qsim import NoiseModel


def all_taus(n):
    return ["".join(bits) for bits in product("01", repeat=n)]


class TestPartition:
    def test_even(self):
        assert partition(TargetSpec(4, "0011")).segments == (Segment(0, 2, "00"), Segment(2, 2, "11"))

    def test_single_segment(self):
        assert partition(TargetSpec(2, "11")).segments == (Segment(0, 2, "11"),)

    def test_odd(self):
        assert partition(TargetSpec(5, "01011")).segments == (Segment(0, 2, "01"), Segment(2, 3, "011"))

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
    def test_widths_and_concatenation(self, n):
        rng = np.random.default_rng(n)
        tau = "".join(rng.choice(["0", "1"], size=n))
        plan = partition(TargetSpec(n, tau))
        widths = [s.width for s in plan.segments]
        assert len(widths) == n // 2
        assert widths[:-1] == [2] * (len(widths) - 1)
        assert widths[-1] == (2 if n % 2 == 0 else 3)
        assert plan.tau == tau

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_subfunctions_have_unique_solution(self, n):
        rng = np.random.default_rng(100 + n)
        for _ in range(50):
            tau = "".join(rng.choice(["0", "1"], size=n))
            spec = TargetSpec(n, tau)
            solutions = subfunction_solutions(spec)
            assert solutions == [[s.tau] for s in partition(spec).segments]

    def test_invalid_targets(self):
        with pytest.raises(ConfigurationError):
            TargetSpec(1, "1")
        with pytest.raises(ConfigurationError):
            TargetSpec(3, "01")
        with pytest.raises(ConfigurationError):
            TargetSpec(2, "12")


class TestOracles:
    def test_phase_flip(self):
        np.testing.assert_allclose(np.diag(phase_flip_oracle(2, "00").unitary), [-1, 1, 1, 1], atol=1e-12)
        np.testing.assert_allclose(np.diag(phase_flip_oracle(2, "11").unitary), [1, 1, 1, -1], atol=1e-12)

    def test_involution(self):
        U = phase_flip_oracle(3, "101").unitary
        np.testing.assert_allclose(U @ U, np.eye(8), atol=1e-12)

    def test_rotation_limits(self):
        np.testing.assert_allclose(phase_rotation_oracle(3, "011", np.pi).unitary,
                                   phase_flip_oracle(3, "011").unitary, atol=1e-12)
        np.testing.assert_allclose(phase_rotation_oracle(3, "011", 0.0).unitary, np.eye(8), atol=1e-12)

    def test_rotation_is_unitary(self):
        U = phase_rotation_oracle(3, "011", compute_phi()).unitary
        np.testing.assert_allclose(U.conj().T @ U, np.eye(8), atol=1e-12)

    def test_width_mismatch(self):
        with pytest.raises(ConfigurationError):
            phase_flip_oracle(2, "011")


class TestPhi:
    def test_reference_values(self):
        theta = np.arcsin(np.sqrt(1 / 8))
        assert theta == pytest.approx(0.3613671239, abs=1e-9)
        assert int(np.floor((np.pi / 2 - theta) / (2 * theta))) == 1
        reference = 2 * math.asin(math.sin(math.pi / 10) / math.sqrt(1 / 8))
        assert compute_phi() == pytest.approx(reference, abs=1e-9)
        assert compute_phi() == pytest.approx(2.1269, abs=1e-4)

    def test_in_range(self):
        assert 0 < compute_phi() <= np.pi


class TestExactness:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_dega_exhaustive(self, n):
        for tau in all_taus(n):
            spec = TargetSpec(n, tau)
            assert success_probability(dega_circuit(spec), spec) == pytest.approx(1.0, abs=1e-9)

    def test_dega_six_qubits(self):
        rng = np.random.default_rng(6)
        for _ in range(8):
            tau = "".join(rng.choice(["0", "1"], size=6))
            spec = TargetSpec(6, tau)
            assert success_probability(dega_circuit(spec), spec) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("tau", ["11", "001", "1100", "01011"])
    def test_modified_is_exact(self, tau):
        spec = TargetSpec(len(tau), tau)
        assert success_probability(grover_modified_circuit(spec), spec) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_modified_exhaustive(self, n):
        for tau in all_taus(n):
            spec = TargetSpec(n, tau)
            assert success_probability(grover_modified_circuit(spec), spec) == pytest.approx(1.0, abs=1e-9)


class TestOriginal:
    def test_two_qubits_exact(self):
        spec = TargetSpec(2, "11")
        assert success_probability(grover_original_circuit(spec, iterations=1), spec) == pytest.approx(1.0)

    @pytest.mark.parametrize("n, iterations, expected", [(3, 2, 0.9453125), (4, 3, 0.9613189697265625)])
    def test_closed_form(self, n, iterations, expected):
        assert closed_form_success(n, iterations) == pytest.approx(expected, abs=1e-9)
        spec = TargetSpec(n, "1" * n)
        probability = success_probability(grover_original_circuit(spec, iterations), spec)
        assert probability == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("tau", ["11", "001", "1100", "01011"])
    def test_default_iterations_match_closed_form(self, tau):
        n = len(tau)
        spec = TargetSpec(n, tau)
        probability = success_probability(grover_original_circuit(spec), spec)
        assert probability == pytest.approx(closed_form_success(n), abs=1e-9)

    def test_optimal_iterations(self):
        assert [grover.original_iterations(n) for n in (2, 3, 4, 5)] == [1, 2, 3, 4]


class TestGateCounts:
    def test_four_qubits(self):
        spec = TargetSpec(4, "0011")
        assert gate_count(dega_circuit(spec)) == 16
        assert gate_count(grover_original_circuit(spec)) == 34
        assert gate_count(grover_modified_circuit(spec)) == 34

    def test_three_qubits_coincide(self):
        # A lone 3-wide segment is the exact 3-qubit search itself
        spec = TargetSpec(3, "001")
        assert gate_count(dega_circuit(spec)) == gate_count(grover_modified_circuit(spec)) == 19

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_dega_is_shallowest(self, n):
        spec = TargetSpec(n, "0" * n)
        dega = gate_count(dega_circuit(spec))
        original = gate_count(grover_original_circuit(spec))
        modified = gate_count(grover_modified_circuit(spec))
        assert dega < original
        assert dega < modified
        assert modified >= original

    def test_gate_widths(self):
        assert max(g.width for g in dega_circuit(TargetSpec(5, "01011"))) == 3
        assert max(g.width for g in grover_original_circuit(TargetSpec(5, "01011"))) == 5


class TestNoise:
    p_grid = [round(0.01 * i, 2) for i in range(11)]

    @pytest.fixture(scope="class")
    def sweep(self):
        rows = noise_sweep(TargetSpec(4, "0011"), self.p_grid)
        return {(r["p"], r["variant"]): r["success_probability"] for r in rows}

    def test_noiseless_row(self, sweep):
        assert sweep[(0.0, "dega")] == pytest.approx(1.0, abs=1e-9)
        assert sweep[(0.0, "modified")] == pytest.approx(1.0, abs=1e-9)
        assert sweep[(0.0, "original")] == pytest.approx(0.9613189697265625, abs=1e-9)

    @pytest.mark.parametrize("variant", ["original", "modified", "dega"])
    def test_non_increasing(self, sweep, variant):
        curve = [sweep[(p, variant)] for p in self.p_grid]
        assert all(b <= a + 1e-9 for a, b in zip(curve, curve[1:]))

    def test_dega_dominates(self, sweep):
        for p in self.p_grid:
            assert sweep[(p, "dega")] >= sweep[(p, "original")] - 0.02
            assert sweep[(p, "dega")] >= sweep[(p, "modified")] - 1e-9
        assert sweep[(0.0, "dega")] > sweep[(0.0, "original")]

    def test_strictly_between_uniform_and_noiseless(self):
        spec = TargetSpec(4, "0011")
        circuit = grover_original_circuit(spec)
        noisy = success_probability(circuit, spec, NoiseModel(0.05))
        assert 1 / 16 < noisy < success_probability(circuit, spec)

    def test_full_noise_is_uniform(self):
        spec = TargetSpec(4, "0011")
        for build in grover.VARIANTS.values():
            assert success_probability(build(spec), spec, NoiseModel(1.0)) == pytest.approx(1 / 16, abs=0.02)

    def test_threads_give_same_rows(self):
        spec = TargetSpec(3, "001")
        assert noise_sweep(spec, [0.0, 0.05], n_jobs=2) == noise_sweep(spec, [0.0, 0.05])

    def test_register_caps(self):
        with pytest.raises(SimulationError):
            noise_sweep(TargetSpec(9, "0" * 9), [0.01])
        with pytest.raises(SimulationError):
            success_sweep(["0" * 13])


class TestSuccessSweep:
    def test_reference_targets(self):
        rows = success_sweep(["11", "001", "1100", "01011"])
        table = {(r["tau"], r["variant"]): r["success_probability"] for r in rows}
        assert len(rows) == 12
        assert table[("01011", "dega")] == pytest.approx(1.0, abs=1e-9)
        assert table[("11", "original")] == pytest.approx(1.0, abs=1e-9)
        assert table[("001", "original")] == pytest.approx(0.9453125, abs=1e-9)

    def test_exhaustive(self):
        rows = success_sweep(["11", "001"], variants=["dega"], exhaustive=True)
        assert sorted(r["tau"] for r in rows) == sorted(all_taus(2) + all_taus(3))

    def test_shots(self):
        rows = success_sweep(["11"], variants=["dega"], shots=200, seed=1)
        assert rows[0]["success_probability"] == 1.0


class TestSearchBucket:
    def test_occupied(self):
        membership = np.zeros(16, dtype=bool)
        membership[11] = True
        assert search_bucket(membership, 11)
        assert not search_bucket(membership, 3)

    def test_empty(self):
        membership = np.zeros(16, dtype=bool)
        assert not any(search_bucket(membership, lookup) for lookup in range(16))

    def test_other_sizes(self):
        membership = np.zeros(8, dtype=bool)
        membership[[1, 6]] = True
        assert [search_bucket(membership, j) for j in range(8)] == membership.tolist()

    def test_bad_size(self):
        with pytest.raises(ConfigurationError):
            search_bucket(np.zeros(12, dtype=bool), 0)

    def test_bad_lookup(self):
        with pytest.raises(IndexRangeError):
            search_bucket(np.zeros(16, dtype=bool), 16)
