import numpy as np
import pytest

from conftest import hamiltonian_dense, random_pauli_hamiltonian
from qmaml.hamiltonian import PauliHamiltonian, heisenberg_xyz, save_hamiltonian
from qmaml.taskspace import (
    KIND_DISTRIBUTION,
    KIND_HEISENBERG,
    TaskSet,
    TaskVector,
    continuity_probe,
    distribution_taskset,
    hilbert_schmidt_metric,
    hilbert_schmidt_overlap,
    load_taskset,
    molecule_tasks_from_files,
    parameter_distance,
    sample_heisenberg_tasks,
    save_taskset,
    write_probe_csv,
)


class TestHeisenbergSampling:
    def test_components_on_lattice(self):
        ts = sample_heisenberg_tasks(count=16, n=4, seed=123)
        assert len(ts.tasks) == 16
        for task in ts.tasks:
            assert task.phi.shape == (3,)
            for v in task.phi:
                assert -3.0 - 1e-12 <= v <= 3.0 + 1e-12
                steps = (v + 3.0) / 0.1
                assert abs(steps - round(steps)) < 1e-9
            assert task.hamiltonian is not None
            assert task.hamiltonian.n == 4

    def test_two_point_lattice(self):
        ts = sample_heisenberg_tasks(count=50, n=2, seed=1, step=6.0)
        values = {v for task in ts.tasks for v in task.phi}
        assert values <= {-3.0, 3.0}
        assert len(values) == 2

    def test_seed_reproducibility(self):
        a = sample_heisenberg_tasks(count=20, n=3, seed=77)
        b = sample_heisenberg_tasks(count=20, n=3, seed=77)
        for ta, tb in zip(a.tasks, b.tasks):
            assert np.array_equal(ta.phi, tb.phi)
        assert a.split == b.split

    def test_test_count_split(self):
        ts = sample_heisenberg_tasks(count=20, n=3, seed=5, test_count=4)
        assert len(ts.test) == 4
        assert len(ts.train) == 16

    def test_step_must_divide_range(self):
        with pytest.raises(ValueError, match="divide"):
            sample_heisenberg_tasks(count=1, n=2, seed=0, step=0.7)


class TestMoleculeTasks:
    def _write_files(self, tmp_path, term_counts):
        paths = []
        rng = np.random.default_rng(0)
        for i, tc in enumerate(term_counts):
            h = random_pauli_hamiltonian(3, tc, rng)
            p = tmp_path / f"ham_{i:03d}.txt"
            save_hamiltonian(h, p)
            paths.append(p)
        return paths

    def test_padding(self, tmp_path):
        paths = self._write_files(tmp_path, [3, 5])
        ts = molecule_tasks_from_files(paths)
        assert ts.phi_length == 5
        short = ts.tasks[0]
        assert np.array_equal(short.phi[short.hamiltonian.num_terms:],
                              np.zeros(5 - short.hamiltonian.num_terms))
        # padding does not touch the Hamiltonian itself
        assert short.hamiltonian.num_terms <= 5

    def test_ten_percent_split(self, tmp_path):
        paths = self._write_files(tmp_path, [4] * 60)
        ts = molecule_tasks_from_files(paths, test_fraction=0.1, seed=3)
        assert len(ts.test) == 6
        assert len(ts.train) == 54

    def test_single_file_verbatim(self, tmp_path):
        paths = self._write_files(tmp_path, [4])
        ts = molecule_tasks_from_files(paths)
        h = ts.tasks[0].hamiltonian
        assert np.array_equal(ts.tasks[0].phi, [c for c, _ in h.terms])

    def test_max_len_violation(self, tmp_path):
        paths = self._write_files(tmp_path, [6])
        with pytest.raises(ValueError, match="max_len"):
            molecule_tasks_from_files(paths, max_len=4)

    def test_mixed_qubit_counts_rejected(self, tmp_path):
        p1 = tmp_path / "a.txt"
        p1.write_text("2\n1.0 XX\n")
        p2 = tmp_path / "b.txt"
        p2.write_text("3\n1.0 XXX\n")
        with pytest.raises(ValueError, match="qubit count"):
            molecule_tasks_from_files([p1, p2])


class TestHamiltonianDistance:
    def test_self_overlap_is_one(self):
        h = heisenberg_xyz(3, [1.0, -0.5, 2.0])
        assert hilbert_schmidt_overlap(h, h) == pytest.approx(1.0)

    def test_orthogonal_paulis(self):
        x = PauliHamiltonian.from_terms(1, [(1.0, "X")])
        z = PauliHamiltonian.from_terms(1, [(1.0, "Z")])
        assert hilbert_schmidt_overlap(x, z) == pytest.approx(0.0)

    def test_heisenberg_pair(self):
        h1 = heisenberg_xyz(2, [1, 1, 1])
        h2 = heisenberg_xyz(2, [1, 1, 0])
        value = hilbert_schmidt_overlap(h1, h2)
        assert value == pytest.approx(2.0 / np.sqrt(6.0), abs=1e-12)
        # dense trace oracle
        m1 = hamiltonian_dense(h1)
        m2 = hamiltonian_dense(h2)
        oracle = np.real(np.trace(m1.conj().T @ m2))
        oracle /= np.sqrt(np.real(np.trace(m1.conj().T @ m1))
                          * np.real(np.trace(m2.conj().T @ m2)))
        assert value == pytest.approx(oracle, abs=1e-12)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_raw_matches_dense_trace(self, n, rng):
        h1 = random_pauli_hamiltonian(n, 8, rng)
        h2 = random_pauli_hamiltonian(n, 8, rng)
        raw = hilbert_schmidt_overlap(h1, h2, normalized=False)
        oracle = np.real(np.trace(hamiltonian_dense(h1).conj().T
                                  @ hamiltonian_dense(h2)))
        assert abs(raw - oracle) <= 1e-10 * max(1.0, abs(oracle))

    def test_normalized_within_unit_interval(self, rng):
        for _ in range(10):
            h1 = random_pauli_hamiltonian(3, 6, rng)
            h2 = random_pauli_hamiltonian(3, 6, rng)
            assert -1.0 - 1e-12 <= hilbert_schmidt_overlap(h1, h2) <= 1.0 + 1e-12

    def test_positive_multiple_gives_one(self):
        h1 = heisenberg_xyz(3, [1.0, 0.5, -0.7])
        h2 = heisenberg_xyz(3, [2.0, 1.0, -1.4])
        assert hilbert_schmidt_overlap(h1, h2) == pytest.approx(1.0, abs=1e-12)

    def test_zero_hamiltonian_normalization_error(self):
        zero = PauliHamiltonian.from_terms(1, [])
        h = PauliHamiltonian.from_terms(1, [(1.0, "Z")])
        with pytest.raises(ValueError, match="zero"):
            hilbert_schmidt_overlap(zero, h)
        assert hilbert_schmidt_overlap(zero, h, normalized=False) == 0.0

    def test_metric_matches_dense(self, rng):
        h1 = random_pauli_hamiltonian(3, 6, rng)
        h2 = random_pauli_hamiltonian(3, 6, rng)
        value = hilbert_schmidt_metric(h1, h2)
        diff = hamiltonian_dense(h1) - hamiltonian_dense(h2)
        oracle = np.sqrt(np.real(np.trace(diff.conj().T @ diff))) / 2 ** 1.5
        assert value == pytest.approx(oracle, abs=1e-10)


class TestParameterDistance:
    def test_identical_vectors(self):
        phi = np.array([0.2, -1.0, 3.0])
        assert parameter_distance(phi, phi, "paper-sum") == 0.0
        assert parameter_distance(phi, phi, "l2") == 0.0

    def test_signed_sum(self):
        assert parameter_distance([1, 2, 3], [0, 0, 0], "paper-sum") == 6.0

    def test_signed_sum_is_not_a_metric(self):
        a = [1.0, 0.0]
        b = [0.0, 1.0]
        assert parameter_distance(a, b, "paper-sum") == 0.0
        assert parameter_distance(a, b, "l2") == pytest.approx(np.sqrt(2.0))

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            parameter_distance([1, 2], [1, 2, 3])


class TestContinuityProbe:
    def test_normal_sampler_correlations(self):
        result = continuity_probe([1, 1, 1], sampler="normal", count=500, seed=11)
        assert result.d_phi_sum.size == 500
        # the metric pairing is the linear one; the overlap pairing is weaker
        assert result.pearson_metric is not None
        assert result.pearson_metric > 0.8
        assert result.pearson_overlap is not None
        assert 0.0 < result.pearson_overlap < result.pearson_metric

    def test_uniform_sampler_runs(self):
        result = continuity_probe([1, 1, 1], sampler="uniform", count=100, seed=2)
        assert np.all(result.d_phi_l2 >= 0)
        assert np.all(np.abs(result.d_h_norm) <= 1.0 + 1e-12)

    def test_single_sample_degenerate_marker(self):
        result = continuity_probe([1, 1, 1], sampler="normal", count=1, seed=0)
        assert result.pearson_overlap is None
        assert result.pearson_metric is None

    def test_deterministic(self):
        a = continuity_probe([1, 1, 1], sampler="normal", count=50, seed=9)
        b = continuity_probe([1, 1, 1], sampler="normal", count=50, seed=9)
        assert np.array_equal(a.d_phi_l2, b.d_phi_l2)
        assert np.array_equal(a.d_h_norm, b.d_h_norm)

    def test_csv_export(self, tmp_path):
        result = continuity_probe([1, 1, 1], sampler="normal", count=10, seed=3)
        path = tmp_path / "scatter.csv"
        write_probe_csv(result, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "d_phi_sum,d_phi_l2,d_H_norm,d_H_metric"
        assert len(lines) == 11


class TestManifestIO:
    def test_heisenberg_round_trip(self, tmp_path):
        ts = sample_heisenberg_tasks(count=10, n=4, seed=42, test_count=2)
        path = tmp_path / "tasks.txt"
        save_taskset(ts, path)
        loaded = load_taskset(path)
        assert loaded.kind == KIND_HEISENBERG
        assert loaded.n == 4
        assert loaded.split == ts.split
        assert loaded.meta == ts.meta
        for a, b in zip(ts.tasks, loaded.tasks):
            assert np.array_equal(a.phi, b.phi)
            assert a.hamiltonian.coefficients() == b.hamiltonian.coefficients()

    def test_molecule_round_trip_with_file_refs(self, tmp_path):
        rng = np.random.default_rng(1)
        paths = []
        for i in range(3):
            h = random_pauli_hamiltonian(2, 3, rng)
            p = tmp_path / f"h{i}.txt"
            save_hamiltonian(h, p)
            paths.append(p)
        ts = molecule_tasks_from_files(paths, test_fraction=0.34, seed=1)
        manifest = tmp_path / "tasks.txt"
        save_taskset(ts, manifest)
        loaded = load_taskset(manifest)
        for a, b in zip(ts.tasks, loaded.tasks):
            assert np.array_equal(a.phi, b.phi)
            assert a.hamiltonian.coefficients() == pytest.approx(
                b.hamiltonian.coefficients())

    def test_distribution_round_trip(self, tmp_path):
        targets = [np.full(4, 0.25), np.array([0.5, 0.5, 0.0, 0.0])]
        ts = distribution_taskset(targets, n=2, seed=0)
        path = tmp_path / "tasks.txt"
        save_taskset(ts, path)
        loaded = load_taskset(path)
        assert loaded.kind == KIND_DISTRIBUTION
        for a, b in zip(ts.tasks, loaded.tasks):
            assert np.array_equal(a.phi, b.phi)
            assert np.array_equal(b.phi, b.target)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "tasks.txt"
        path.write_text("NOT A MANIFEST\n")
        with pytest.raises(ValueError, match="manifest"):
            load_taskset(path)


class TestTaskSetValidation:
    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            TaskSet(tasks=(), split=(), n=2)

    def test_mixed_kinds_rejected(self):
        a = TaskVector(phi=np.zeros(3), kind=KIND_HEISENBERG)
        b = TaskVector(phi=np.full(4, 0.25), kind=KIND_DISTRIBUTION,
                       target=np.full(4, 0.25))
        with pytest.raises(ValueError, match="mixed"):
            TaskSet(tasks=(a, b), split=("train", "train"), n=2)

    def test_distribution_must_normalize(self):
        with pytest.raises(ValueError, match="sum to 1"):
            TaskVector(phi=np.ones(4), kind=KIND_DISTRIBUTION, target=np.ones(4))
