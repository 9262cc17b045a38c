"""Exit criteria. Each test carries an ``acceptance`` marker and is reported as
one PASS/FAIL line in the terminal summary. Tolerances and runtime budgets are
the stated ones and are not relaxed here."""
import time

import numpy as np
import pytest

from kcwalk import cli
from kcwalk.fock import coherent_state_distribution, single_photon_amplitudes, two_photon_distribution
from kcwalk.hilbert import mode_index
from kcwalk.lindblad import (
    DiagonalInitialState,
    ObservableBasis,
    amplitude_damping,
    generalized_C,
    generalized_K,
    one_time_probabilities,
    random_diagonal_state,
    random_generator,
    walk_generator,
)
from kcwalk.montecarlo import LossModel, PerturbationSpec, imperfect_K, lossy_C, sample_quantifiers
from kcwalk.quantifiers import (
    coherence_C_prob,
    kolmogorov_K,
    randomizing_K,
    verify_identity,
    visualize_difference,
)
from kcwalk.walk import WalkConfig, initial_density

ANGLES = (0, 7, 11, 23, 34, 47)
THEORY = (0.000, 0.237, 0.343, 0.720, 0.644, 0.612)
RANDOMIZING = (1.909, 1.477, 1.464, 1.248, 1.085, 0.954)
REF_TOL = 0.0005
REFERENCE_STD_K = 0.093


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f} s, budget {self.seconds} s"


@pytest.mark.acceptance("1 reference grid, theory K within 0.0005 (< 5 s)")
def test_reference_grid_theory():
    with Budget(5):
        for theta, expected in zip(ANGLES, THEORY):
            ks = [kolmogorov_K(WalkConfig.pure(theta, c, 20, 10)) for c in ("V", "H")]
            for k in ks:
                assert abs(k - expected) <= REF_TOL, (theta, k, expected)
            assert ks[0] == pytest.approx(ks[1], abs=1e-12)


@pytest.mark.acceptance("2 reference grid, randomizing-measurement K within 0.0005 (< 5 s)")
def test_reference_grid_randomizing():
    with Budget(5):
        for theta, expected in zip(ANGLES, RANDOMIZING):
            for c in ("V", "H"):
                k = randomizing_K(WalkConfig.pure(theta, c, 20, 10))
                assert abs(k - expected) <= REF_TOL, (theta, c, k, expected)


@pytest.mark.acceptance("3 K = C identity on 200 random configs within 1e-10 (< 30 s)")
def test_identity_suite():
    rng = np.random.default_rng(5)
    with Budget(30):
        for _ in range(200):
            N = int(rng.integers(2, 13))
            cfg = WalkConfig(
                float(rng.uniform(0, 90)), N, int(rng.integers(1, N)),
                int(rng.choice([-2, 0, 5])), float(rng.choice([0.0, 0.3, 1.0])),
            )
            r = verify_identity(cfg)
            assert abs(r.K - r.C_prob) <= 1e-10
            assert abs(r.C_superop - r.C_prob) <= 1e-10


@pytest.mark.acceptance("4 twelve (C, K) reference points on y = x within 1e-10")
def test_kc_points_on_diagonal():
    for theta in ANGLES:
        for c in ("V", "H"):
            r = verify_identity(WalkConfig.pure(theta, c, 20, 10))
            assert abs(r.K - r.C_prob) <= 1e-10
            assert abs(r.K - r.C_superop) <= 1e-10


@pytest.mark.acceptance("5 difference panels: zero at 0 deg, sum|c| = C, increasing over 7 < 23 < 45 deg (< 5 s)")
def test_difference_panels():
    with Budget(5):
        np.testing.assert_array_equal(np.abs(visualize_difference(WalkConfig.pure(0, "V", 20, 10)).c) < 1e-15, True)
        sums = []
        for theta in (7, 23, 45):
            cfg = WalkConfig.pure(theta, "V", 20, 10)
            t = visualize_difference(cfg)
            assert abs(t.l1() - coherence_C_prob(cfg)) <= 1e-12
            sums.append(t.l1())
        assert sums[0] < sums[1] < sums[2], sums
        rng = np.random.default_rng(8)
        for _ in range(20):
            N = 2 * int(rng.integers(1, 7))
            cfg = WalkConfig(float(rng.uniform(0, 90)), N, N // 2, 0, float(rng.uniform()))
            assert abs(visualize_difference(cfg).l1() - coherence_C_prob(cfg)) <= 1e-12


@pytest.mark.acceptance("6 two-photon and coherent-state statistics equal single-photon |A_m|^2 within 1e-12 (< 5 s)")
def test_multiphoton_oracle():
    with Budget(5):
        for theta in (7, 45, 90):
            for N in (1, 2, 4):
                single = single_photon_amplitudes(theta, N).probabilities()
                np.testing.assert_allclose(two_photon_distribution(theta, N), single, rtol=0, atol=1e-12)
                coh = coherent_state_distribution(0.8 + 0.3j, theta, N)
                np.testing.assert_allclose(coh / coh.sum(), single, rtol=0, atol=1e-12)


@pytest.mark.acceptance("7 open-system K = C on 50 generators, N=6 walk embedding, damping law (< 60 s)")
def test_open_system_equivalence():
    rng = np.random.default_rng(11)
    with Budget(60):
        for _ in range(50):
            d = int(rng.integers(2, 7))
            gen = random_generator(d, int(rng.integers(0, 3)), rng)
            rho0 = random_diagonal_state(d, rng)
            t = float(rng.uniform(0.1, 3.0))
            s = float(rng.uniform(0, t))
            basis = ObservableBasis.range(d)
            assert abs(generalized_K(gen, basis, rho0, s, t) - generalized_C(gen, basis, rho0, s, t)) <= 1e-10

        cfg = WalkConfig.pure(23, "V", 6, 3)
        gen = walk_generator(cfg.theta_deg, cfg.bounds)
        basis = ObservableBasis(tuple(cfg.bounds.modes()))
        rho0 = initial_density(cfg).matrix
        r = verify_identity(cfg)
        assert abs(generalized_K(gen, basis, rho0, cfg.M, cfg.N) - r.K) <= 1e-9
        assert abs(generalized_C(gen, basis, rho0, cfg.M, cfg.N) - r.C_superop) <= 1e-9

        for rate, t in ((0.3, 1.0), (1.0, 2.5), (4.0, 0.2)):
            p = one_time_probabilities(amplitude_damping(rate), DiagonalInitialState([0.0, 1.0]), t)
            assert abs(p[1] - np.exp(-rate * t)) <= 1e-9


@pytest.mark.acceptance("8a homogeneous loss leaves K and C unchanged within 1e-12")
def test_homogeneous_loss():
    for theta in (11, 23, 47):
        cfg = WalkConfig.pure(theta, "V", 20, 10)
        ideal = kolmogorov_K(cfg)
        loss = LossModel(0.9, 0.9)
        assert abs(imperfect_K(cfg, loss) - ideal) <= 1e-12
        assert abs(lossy_C(cfg, loss) - ideal) <= 1e-12


@pytest.mark.acceptance("8b perfect out-coupling recovers the ideal K (roundoff, 1e-12)")
def test_perfect_outcoupling():
    for theta in (7, 23, 34):
        cfg = WalkConfig.pure(theta, "V", 20, 10)
        assert abs(imperfect_K(cfg, LossModel()) - kolmogorov_K(cfg)) <= 1e-12


@pytest.mark.acceptance("8c ordering K(ideal) < K(eps=0.02) < K(randomizing) at 23 deg")
def test_residual_ordering():
    cfg = WalkConfig.pure(23, "V", 20, 10)
    ideal = kolmogorov_K(cfg)
    residual = imperfect_K(cfg, LossModel(residual_transmission=0.02))
    flat = randomizing_K(cfg)
    assert ideal < residual < flat, f"K(ideal)={ideal:.4f}, K(eps=0.02)={residual:.4f}, K(randomizing)={flat:.4f}"


@pytest.mark.acceptance("8d seeded Monte-Carlo output is byte-reproducible")
def test_montecarlo_reproducible(tmp_path):
    cfg = tmp_path / "mc.ini"
    cfg.write_text("[walk]\ntheta_deg = 11\nN = 20\nM = 10\ninitial = V\n[montecarlo]\nsamples = 8\nseed = 2024\n")
    outputs = []
    for run in ("a", "b"):
        assert cli.main(["montecarlo", str(cfg), "--output-dir", str(tmp_path / run)]) == 0
        outputs.append([(tmp_path / run / f).read_bytes() for f in ("montecarlo_summary.csv", "montecarlo_samples.csv")])
    assert outputs[0] == outputs[1]
    a = sample_quantifiers(WalkConfig.pure(11, "V", 20, 10), PerturbationSpec(samples=8, seed=2024))
    b = sample_quantifiers(WalkConfig.pure(11, "V", 20, 10), PerturbationSpec(samples=8, seed=2024))
    assert a == b


@pytest.mark.acceptance("8e std_K at 11 deg within a factor 3 of 0.093, 1000 samples (< 2 min)")
def test_montecarlo_error_bar():
    with Budget(120):
        bars = sample_quantifiers(WalkConfig.pure(11, "V", 20, 10), PerturbationSpec(samples=1000, seed=0))
    print(f"std_K = {bars.std_K:.4f}, std_C = {bars.std_C:.4f}, mean_K = {bars.mean_K:.4f}")
    assert REFERENCE_STD_K / 3 <= bars.std_K <= REFERENCE_STD_K * 3
