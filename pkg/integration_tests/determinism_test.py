import unittest

from integration_tests.util import data_file, run_command


class DeterminismTest(unittest.TestCase):
    def test_scint_independent_of_worker_count(self):
        serial = run_command("scint", data_file("scint_small.yaml"), "--workers", "1")
        parallel = run_command("scint", data_file("scint_small.yaml"), "--workers", "8")
        self.assertEqual(serial.read_bytes(), parallel.read_bytes())

    def test_beam_independent_of_worker_count(self):
        serial = run_command("beam", data_file("beam.yaml"), "--workers", "1", "--realizations", "8")
        parallel = run_command("beam", data_file("beam.yaml"), "--workers", "3", "--realizations", "8")
        self.assertEqual(serial.read_bytes(), parallel.read_bytes())

    def test_seed_changes_results(self):
        first = run_command("scint", data_file("scint_small.yaml"), "--seed", "1")
        second = run_command("scint", data_file("scint_small.yaml"), "--seed", "2")
        self.assertNotEqual(first.read_bytes(), second.read_bytes())
