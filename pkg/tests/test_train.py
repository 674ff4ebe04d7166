import numpy as np
import pytest

from qaedenoise import network, noise, qmath, train
from qaedenoise.noise import DataPair, DataSet, NoiseSpec
from conftest import all_archs


def small_set(m, p, n, seed):
    return noise.make_training_set(m, p, n, np.random.default_rng(seed))


class TestCost:
    def test_zero_params_clean_pair(self):
        arch = network.build_qae_nisq(2)
        pair = DataPair(qmath.dm(noise.ghz(2)), noise.ghz(2))
        assert train.fidelity_cost(arch, np.zeros(27), pair) == pytest.approx(0.5, abs=1e-12)

    def test_orthogonal_reference(self):
        # zero params output |00>, orthogonal to the odd-parity GHZ partner
        arch = network.build_qae_conj(2)
        odd = noise.flip(noise.ghz(2), [True, False])
        pair = DataPair(qmath.dm(noise.ghz(2)), odd)
        assert train.fidelity_cost(arch, np.zeros(12), pair) == pytest.approx(0, abs=1e-12)

    def test_matches_unitary_oracle(self, rng):
        arch = network.build_qae_conj_mod_dec(3, 3)
        pair = small_set(3, 0.3, 1, 1).pairs[0]
        params = rng.uniform(-np.pi, np.pi, arch.n_slots)
        u = network.unitary_of(arch, params)
        anc = np.zeros((16, 16))
        anc[0, 0] = 1
        out = qmath.partial_trace(u @ np.kron(pair.input, anc) @ u.conj().T, arch.layout.outputs)
        expect = np.vdot(pair.reference, out @ pair.reference).real
        assert train.fidelity_cost(arch, params, pair) == pytest.approx(expect, abs=1e-12)

    def test_average_single_pair(self, rng):
        arch = network.build_qae_nisq(2)
        ds = small_set(2, 0.2, 1, 3)
        params = rng.uniform(-np.pi, np.pi, 27)
        assert train.average_cost(arch, params, ds) == pytest.approx(train.fidelity_cost(arch, params, ds.pairs[0]), abs=1e-12)

    def test_average_duplicate_invariance(self, rng):
        arch = network.build_qae_nisq(2)
        ds = small_set(2, 0.2, 5, 3)
        dup = DataSet(ds.pairs * 3, ds.m, ds.spec)
        params = rng.uniform(-np.pi, np.pi, 27)
        assert train.average_cost(arch, params, dup) == pytest.approx(train.average_cost(arch, params, ds), abs=1e-12)

    def test_average_of_30(self, rng):
        arch = network.build_qae_conj(2)
        ds = small_set(2, 0.2, 30, 4)
        params = rng.uniform(-np.pi, np.pi, 12)
        total = sum(train.fidelity_cost(arch, params, p) for p in ds.pairs)
        assert train.average_cost(arch, params, ds) == pytest.approx(total / 30, abs=1e-12)

    def test_mixed_inputs(self, rng):
        arch = network.build_qae_conj_mod_dec(2, 3)
        ds = noise.make_validation_set(2, 0.6, 6, rng)
        params = rng.uniform(-np.pi, np.pi, 12)
        total = sum(train.fidelity_cost(arch, params, p) for p in ds.pairs)
        assert train.average_cost(arch, params, ds) == pytest.approx(total / 6, abs=1e-12)

    def test_empty_dataset(self):
        with pytest.raises(ValueError):
            DataSet([], 2, NoiseSpec("bitflip", 0.1))


class TestGradients:
    @pytest.mark.parametrize("arch", all_archs(), ids=lambda a: f"{a.name}-{a.m}-{a.model}")
    def test_param_shift_matches_finite_diff(self, arch):
        r = np.random.default_rng(arch.n_slots + 10 * (arch.model or 0))
        ds = small_set(arch.m, 0.25, 4, 5)
        for _ in range(3 if arch.m == 3 else 10):
            params = r.uniform(-np.pi, np.pi, arch.n_slots)
            ps = train.grad_param_shift(arch, params, ds)
            fd = train.grad_finite_diff(arch, params, ds, 1e-5)
            assert np.max(np.abs(ps - fd)) < 1e-6

    def test_constant_landscape(self):
        # references spanning a full basis: the average is Tr(rho_out)/4 = 1/4 for any params
        arch = network.build_qae_nisq(2)
        basis = np.eye(4)
        pairs = [DataPair(np.eye(4) / 4, basis[k]) for k in range(4)]
        ds = DataSet(pairs, 2, NoiseSpec("bitflip", 0.0))
        g = train.grad_param_shift(arch, np.random.default_rng(0).uniform(-3, 3, 27), ds)
        np.testing.assert_allclose(g, 0, atol=1e-12)

    def test_tied_slot_is_sum_of_occurrences(self, rng):
        arch = network.build_qae_conj(2)
        ds = small_set(2, 0.2, 3, 9)
        params = rng.uniform(-np.pi, np.pi, 12)
        h = 1e-5
        # shift one occurrence at a time by editing the instance's realized angles
        circ = network.Circuit(arch, params)
        comps = ds.components()
        for slot in range(12):
            total = 0.0
            for k, g in enumerate(arch.gates):
                for j in range(3):
                    if g.slot_for(j) != slot:
                        continue
                    ang = g.angles(params)
                    up, dn = ang.copy(), ang.copy()
                    up[j] += g.sign * h
                    dn[j] -= g.sign * h
                    fu = network.mean_fidelity(circ.block_with(k, g.matrix_from_angles(up)), comps, 3, 2)
                    fd = network.mean_fidelity(circ.block_with(k, g.matrix_from_angles(dn)), comps, 3, 2)
                    total += (fu - fd) / (2 * h)
            terms = [v for (_, _, s, v) in train.occurrence_terms(arch, params, ds) if s == slot]
            assert len(terms) == 2
            assert sum(terms) == pytest.approx(total, abs=1e-6)

    def test_fd_convergence_order(self):
        # a deliberately smooth 1-slot landscape: error drops ~4x when h halves
        arch = network.build_qae_conj_mod_dec(2, 3)
        ds = small_set(2, 0.2, 3, 1)
        params = np.random.default_rng(1).uniform(-np.pi, np.pi, 12)
        exact = train.grad_param_shift(arch, params, ds)
        e1 = np.max(np.abs(train.grad_finite_diff(arch, params, ds, 1e-2) - exact))
        e2 = np.max(np.abs(train.grad_finite_diff(arch, params, ds, 5e-3) - exact))
        assert 3.0 < e1 / e2 < 5.0

    def test_fd_rejects_bad_step(self):
        arch = network.build_qae_conj(2)
        with pytest.raises(ValueError):
            train.grad_finite_diff(arch, np.zeros(12), small_set(2, 0, 1, 0), 0.0)

    def test_corrupted_shift_detected(self):
        arch = network.build_qae_nisq(2)
        ds = small_set(2, 0.2, 3, 2)
        params = np.random.default_rng(2).uniform(-np.pi, np.pi, 27)
        bad = train.grad_param_shift(arch, params, ds, shifts=(np.pi / 3, np.pi / 4))
        assert np.max(np.abs(bad - train.grad_finite_diff(arch, params, ds))) > 1e-3


class TestSGD:
    def test_trivial_steps(self, rng):
        p = rng.normal(size=5)
        np.testing.assert_array_equal(train.sgd_step(p, np.zeros(5), 0.4), p)
        np.testing.assert_array_equal(train.sgd_step(p, rng.normal(size=5), 0.0), p)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            train.sgd_step(np.zeros(3), np.zeros(4), 0.1)

    def test_step_moves_uphill(self):
        # 1-D scan along one slot, compare with the direction of the update
        arch = network.build_qae_conj(2)
        ds = small_set(2, 0.1, 5, 6)
        base = np.random.default_rng(6).uniform(-np.pi, np.pi, 12)
        slot = 7
        grid = np.linspace(-0.01, 0.01, 21)
        vals = [train.average_cost(arch, base + np.eye(12)[slot] * d, ds) for d in grid]
        uphill = np.sign(vals[-1] - vals[0])
        g = np.zeros(12)
        g[slot] = train.grad_param_shift(arch, base, ds)[slot]
        new = train.sgd_step(base, g, 0.01)
        assert np.sign(new[slot] - base[slot]) == uphill
        assert train.average_cost(arch, new, ds) > train.average_cost(arch, base, ds)


class TestLoops:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            train.TrainConfig(iterations=0)
        with pytest.raises(ValueError):
            train.TrainConfig(learning_rate=-1)
        with pytest.raises(ValueError):
            train.TrainConfig(strategy="adam")

    def test_one_iteration_two_records(self):
        arch = network.build_qae_conj(2)
        tr, va = small_set(2, 0.2, 3, 0), noise.make_validation_set(2, 0.2, 3, np.random.default_rng(0))
        hist = train.train_average(arch, train.TrainConfig(iterations=1), tr, va)
        assert [r.iter for r in hist.records] == [0, 1]

    def test_noiseless_cost_mostly_increases(self):
        arch = network.build_qae_nisq(2)
        tr = small_set(2, 0.0, 30, 0)
        va = noise.make_validation_set(2, 0.0, 5, np.random.default_rng(0))
        hist = train.train_average(arch, train.TrainConfig(iterations=50, seed=3), tr, va)
        costs = [r.cost_train for r in hist.records]
        ups = sum(b >= a - 1e-12 for a, b in zip(costs, costs[1:]))
        assert ups >= 0.9 * 50

    def test_deterministic(self):
        arch = network.build_qae_conj_mod_dec(2, 3)
        tr = small_set(2, 0.2, 10, 0)
        va = noise.make_validation_set(2, 0.2, 5, np.random.default_rng(1))
        cfg = train.TrainConfig(iterations=5, seed=42)
        a = train.train_average(arch, cfg, tr, va)
        b = train.train_average(arch, cfg, tr, va)
        assert a.records == b.records
        assert np.array_equal(a.final_params, b.final_params)

    def test_wrong_strategy(self):
        arch = network.build_qae_conj(2)
        tr = small_set(2, 0.2, 2, 0)
        with pytest.raises(ValueError):
            train.train_average(arch, train.TrainConfig(strategy="per_sample"), tr, tr)

    def test_per_sample_one_step(self):
        arch = network.build_qae_conj(2)
        tr = small_set(2, 0.2, 1, 0)
        cfg = train.TrainConfig(strategy="per_sample", seed=1)
        init = np.random.default_rng(5).uniform(-np.pi, np.pi, 12)
        norms = []
        out = train.train_per_sample(arch, cfg, tr, init, step_norms=norms)
        assert len(norms) == 1
        expect = train.sgd_step(init, train.grad_param_shift(arch, init, tr), 0.4)
        np.testing.assert_allclose(out, expect)

    def test_per_sample_step_bound(self):
        arch = network.build_qae_nisq(2)
        tr = small_set(2, 0.2, 8, 0)
        cfg = train.TrainConfig(strategy="per_sample")
        init = np.random.default_rng(5).uniform(-np.pi, np.pi, 27)
        norms = []
        out = train.train_per_sample(arch, cfg, tr, init, step_norms=norms)
        assert len(norms) == 8
        assert np.max(np.abs(out - init)) <= sum(norms) + 1e-12

    def test_warm_start_sigma_zero(self):
        arch = network.build_qae_conj(2)
        tr = small_set(2, 0.2, 4, 0)
        cfg = train.TrainConfig(init="warm_start", warm_sigma=0.0)
        rng1, rng2 = np.random.default_rng(3), np.random.default_rng(3)
        got = train.warm_start(arch, cfg, tr, rng1)
        expect = train.train_per_sample(arch, cfg, tr, train.uniform_init(arch, rng2))
        np.testing.assert_array_equal(got, expect)

    def test_warm_start_perturbation_std(self):
        # sigma check on the perturbation alone: difference to the sigma=0 result
        arch = network.build_qae_conj(2)
        tr = small_set(2, 0.2, 2, 0)
        sigma = 0.1
        cfg = train.TrainConfig(init="warm_start", warm_sigma=sigma, warm_steps=1)
        cfg0 = train.TrainConfig(init="warm_start", warm_sigma=0.0, warm_steps=1)
        diffs = []
        for s in range(850):  # 850 * 12 slots > 10^4 draws
            a = train.warm_start(arch, cfg, tr, np.random.default_rng(s))
            b = train.warm_start(arch, cfg0, tr, np.random.default_rng(s))
            diffs.append(a - b)
        std = np.std(np.concatenate(diffs))
        assert abs(std - sigma) / sigma < 0.02

    def test_warm_start_reproducible(self):
        arch = network.build_qae_conj(2)
        tr = small_set(2, 0.2, 4, 0)
        cfg = train.TrainConfig(init="warm_start")
        a = train.initial_params(arch, cfg, tr)
        b = train.initial_params(arch, cfg, tr)
        np.testing.assert_array_equal(a, b)


class TestParamsFile:
    def test_round_trip(self, rng):
        arch = network.build_qae_conj_mod_dec(3, 2)
        params = rng.uniform(-np.pi, np.pi, arch.n_slots)
        text = train.dumps_params(arch, params)
        assert text.splitlines()[0] == "# qae_conj_mod_dec m=3 model=2 n_slots=18"
        head, vals = train.loads_params(text)
        assert head == {"name": "qae_conj_mod_dec", "m": 3, "model": 2, "n_slots": 18}
        np.testing.assert_array_equal(vals, params)

    def test_count_mismatch(self):
        text = train.dumps_params(network.build_qae_conj(2), np.zeros(12))
        with pytest.raises(ValueError):
            train.loads_params(text + "0.0\n")
