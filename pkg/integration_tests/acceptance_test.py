import json
import math
import unittest

import numpy as np

from integration_tests.util import data_file, read_rows, run_command
from photon_scintillation.api import (FockStatistics, PoissonStatistics, normalized_variance_fock,
                                      normalized_variance_poisson, poisson_excess_noise, simulate_count_statistics,
                                      synthetic_probability_ensemble)
from photon_scintillation.api.seeding import stream


class AcceptanceTest(unittest.TestCase):
    def test_quantum_term_structure(self):
        self.assertEqual(0.0, normalized_variance_fock(0.3, 1, 0.7).scint_term)
        self.assertEqual(0.0, normalized_variance_fock(1.0, 25, 0.0).total)
        shot = normalized_variance_fock(1e-4, 10_000, 0.0).shot_term
        self.assertAlmostEqual(1.0, shot * 1e-4 * 10_000, delta=1e-3)

    def test_poisson_exceeds_fock(self):
        grid = [(0.1, 100, 0.0), (0.2, 50, 0.0), (0.5, 20, 0.0), (0.1, 100, 0.05), (0.3, 30, 0.05),
                (0.05, 200, 0.0), (0.2, 100, 0.02)]
        positive = 0
        for index, (a, n, sigma2) in enumerate(grid):
            fock = normalized_variance_fock(a, n, sigma2).total
            poisson = normalized_variance_poisson(a * n, sigma2).total
            self.assertAlmostEqual(poisson - fock, poisson_excess_noise(a, n, sigma2), delta=1e-9)

            rng = stream(1, index)
            probabilities = synthetic_probability_ensemble(a, sigma2, 100_000, rng)
            sampled_fock = simulate_count_statistics(FockStatistics(photons=n), probabilities, rng)
            sampled_poisson = simulate_count_statistics(PoissonStatistics(mean_photons=n), probabilities, rng)
            positive += sampled_poisson.sampled.normalized_variance > sampled_fock.sampled.normalized_variance
        # one-sided sign test, 0.5 ** 7 < 0.01
        self.assertEqual(len(grid), positive)

    def test_scintillation_suppression_by_partial_coherence(self):
        out = run_command("scint", data_file("scint_suppression.yaml"), "--workers", "0")
        manifest = json.loads(out.with_name(out.name + ".manifest.json").read_text())
        self.assertLess(manifest["extras"]["degenerate_share"], 0.1)

        coherent, partial = read_rows(out)
        self.assertLess(partial["sigma2"], coherent["sigma2"])
        self.assertEqual(1.0, coherent["r1_over_r0_sq"])
        self.assertEqual(0.5, partial["r1_over_r0_sq"])
        reduction = 1 - partial["sigma2"] / coherent["sigma2"]
        self.assertTrue(0.25 <= reduction <= 0.75, f"reduction {reduction:.3f}")

    def test_saturation_trend(self):
        rows = read_rows(run_command("scint", data_file("scint_saturation.yaml"), "--workers", "0"))
        self.assertEqual([1e-16, 1e-15, 1e-14, 1e-13], [row["cn2"] for row in rows])
        sigma2 = np.array([row["sigma2"] for row in rows])
        stderr = np.array([row["stderr"] for row in rows])
        for index in range(1, len(rows)):
            combined = math.hypot(stderr[index], stderr[index - 1])
            self.assertGreaterEqual(sigma2[index], sigma2[index - 1] - 2 * combined)

        slopes = np.diff(np.log10(np.maximum(sigma2, 1e-12)))
        self.assertLess(slopes[-1], slopes[1] / 2)
