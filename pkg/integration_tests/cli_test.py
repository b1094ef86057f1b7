import json
import unittest

from integration_tests.util import data_file, read_rows, run_cli, run_command, verify_module_entrypoint


class CliTest(unittest.TestCase):
    def test_module_entrypoint(self):
        verify_module_entrypoint()

    def test_beam(self):
        out = run_command("beam", data_file("beam.yaml"))
        rows = read_rows(out)
        self.assertEqual([0.0, 1_000.0, 5_000.0, 10_000.0], [row["distance_m"] for row in rows])
        self.assertAlmostEqual(0.01 ** 2 / 2, rows[0]["R2_analytic_m2"])
        self.assertTrue(0.98 <= rows[0]["ratio"] <= 1.02)
        self.assertAlmostEqual(0.163, rows[3]["R2_analytic_m2"], delta=0.163 * 0.01)
        for row in rows[1:]:
            self.assertAlmostEqual(1.0, row["ratio"], delta=max(0.02, 3 * row["stderr"] / row["var_x_mc_m2"]))

    def test_beam_without_turbulence(self):
        out = run_command("beam", data_file("beam.yaml"), "--realizations", "4")
        manifest = json.loads(out.with_name(out.name + ".manifest.json").read_text())
        self.assertEqual(4, manifest["config"]["experiment"]["realizations"])

        vacuum = run_command("beam", data_file("beam_vacuum.yaml"))
        self.assertEqual([0.0] * 4, [row["R2_turbulence_m2"] for row in read_rows(vacuum)])

    def test_count(self):
        rows = read_rows(run_command("count", data_file("count.yaml")))
        self.assertEqual(["fock", "poisson"], [row["source_kind"] for row in rows])
        fock, poisson = rows
        self.assertGreater(poisson["nvar_analytic"], fock["nvar_analytic"])
        self.assertEqual(fock["sigma2_used"], poisson["sigma2_used"])

    def test_count_single_photon_has_no_scintillation_term(self):
        rows = read_rows(run_command("count", data_file("count_single_photon.yaml")))
        self.assertEqual(0.0, rows[0]["scint_term"])

    def test_config_error(self):
        self.assertEqual(2, run_cli(["beam", "--config", data_file("invalid.yaml")]))
        self.assertEqual(2, run_cli(["scint", "--config", data_file("beam.yaml")]))

    def test_validate_with_corrupted_tolerance(self):
        self.assertEqual(3, run_cli(["validate", "--tolerance-scale", "0"]))

    def test_validate(self):
        self.assertEqual(0, run_cli(["validate", "--workers", "0"]))
