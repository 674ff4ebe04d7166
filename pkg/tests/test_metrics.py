import numpy as np
import pytest

from qaedenoise import metrics, network, noise, qmath, train
from qaedenoise.noise import DataSet
from conftest import all_archs, random_density, random_pure


class TestRenyi:
    def test_values(self, rng):
        assert metrics.renyi2(qmath.dm(random_pure(2, rng))) == pytest.approx(0, abs=1e-12)
        assert metrics.renyi2(np.eye(2) / 2) == pytest.approx(np.log(2), abs=1e-12)
        assert metrics.renyi2(np.eye(4) / 4) == pytest.approx(np.log(4), abs=1e-12)

    def test_bounds(self):
        r = np.random.default_rng(1)
        for n in (1, 2, 3):
            for _ in range(20):
                e = metrics.renyi2(random_density(n, r))
                assert -1e-9 <= e <= n * np.log(2) + 1e-9


class TestSubsystems:
    def test_zero_params(self, rng):
        for arch in all_archs((2,)):
            hid, out = metrics.subsystem_entropies(arch, np.zeros(arch.n_slots), qmath.dm(random_pure(2, rng)))
            assert hid == pytest.approx(0, abs=1e-12)
            assert out == pytest.approx(0, abs=1e-12)

    @pytest.mark.parametrize("arch", all_archs(), ids=lambda a: f"{a.name}-{a.m}-{a.model}")
    def test_matches_brute_force(self, arch, rng):
        params = rng.uniform(-np.pi, np.pi, arch.n_slots)
        rho_in = random_density(arch.m, rng)
        u = network.unitary_of(arch, params)
        anc = np.zeros((2 ** (arch.m + 1),) * 2)
        anc[0, 0] = 1
        full = u @ np.kron(rho_in, anc) @ u.conj().T
        hid = -np.log(np.trace(np.linalg.matrix_power(qmath.partial_trace(full, [arch.m]), 2)).real)
        out = -np.log(np.trace(np.linalg.matrix_power(qmath.partial_trace(full, arch.layout.outputs), 2)).real)
        got = metrics.subsystem_entropies(arch, params, rho_in)
        assert got == pytest.approx((hid, out), abs=1e-10)


def _sets(m=2, p=0.2, seed=0):
    r = np.random.default_rng(seed)
    return noise.make_training_set(m, p, 6, r), noise.make_validation_set(m, p, 4, r)


class TestEvaluate:
    def test_matches_recomputation(self, rng):
        arch = network.build_qae_conj_mod_dec(2, 3)
        tr, va = _sets()
        params = rng.uniform(-np.pi, np.pi, arch.n_slots)
        rec = metrics.evaluate(arch, params, tr, va, 7)
        g = noise.ghz(2)
        clean = [qmath.fidelity_pure(network.forward(arch, params, p.input), g) for p in tr.pairs]
        val = [qmath.fidelity_pure(network.forward(arch, params, p.input), g) for p in va.pairs]
        ent = np.array([metrics.subsystem_entropies(arch, params, p.input) for p in tr.pairs])
        assert rec.iter == 7
        assert rec.cost_train == pytest.approx(train.average_cost(arch, params, tr), abs=1e-12)
        assert rec.fid_train_clean == pytest.approx(np.mean(clean), abs=1e-12)
        assert rec.fid_val == pytest.approx(np.mean(val), abs=1e-12)
        assert rec.renyi_hidden == pytest.approx(ent[:, 0].mean(), abs=1e-10)
        assert rec.renyi_output == pytest.approx(ent[:, 1].mean(), abs=1e-10)

    def test_duplicates_leave_record_unchanged(self, rng):
        arch = network.build_qae_nisq(2)
        tr, va = _sets()
        params = rng.uniform(-np.pi, np.pi, arch.n_slots)
        a = metrics.evaluate(arch, params, tr, va, 0)
        b = metrics.evaluate(arch, params, DataSet(tr.pairs * 2, 2, tr.spec), DataSet(va.pairs * 3, 2, va.spec), 0)
        for x, y in zip(a.values(), b.values()):
            assert x == pytest.approx(y, abs=1e-12)

    def test_perfect_denoiser_limit(self):
        # p=0 data and a converged network: fidelities 1, outputs pure
        arch = network.build_qae_conj(2)
        tr, va = _sets(p=0.0)
        hist = train.train_average(arch, train.TrainConfig(iterations=100, init="warm_start", seed=0), tr, va)
        rec = hist.records[-1]
        assert rec.fid_train_clean > 0.999 and rec.fid_val > 0.999
        assert rec.renyi_output < 0.05

    def test_columns(self):
        assert metrics.IterationRecord.columns() == [
            "iter", "cost_train", "fid_train_clean", "fid_val", "renyi_hidden", "renyi_output"
        ]
