"""Integration tests for heun-forge.

This module contains end-to-end tests that run the command line entry
point and check the emitted reports and exit codes.
"""

import unittest
from unittest.mock import patch
import json
import os
import tempfile
from io import StringIO

import pytest

from heun_forge import main
from src.config import Config
from src.exceptions import EXIT_INTERNAL, EXIT_OK, EXIT_PRECONDITION, EXIT_RESONANCE, EXIT_USAGE


NO_CONFIG = ["--config", "nonexistent-heun-forge.yaml"]


def run(*args):
    """Run main with the given arguments, returning (exit code, stdout)."""
    with patch('sys.stdout', new_callable=StringIO) as captured:
        exit_code = main(list(args) + NO_CONFIG)
    return exit_code, captured.getvalue()


class TestEigenCommand(unittest.TestCase):
    """End-to-end tests of the eigen command."""

    def test_default_run(self):
        """Test the default couplings give an exact eigenvalue series."""
        exit_code, output = run("eigen", "--order", "2")
        self.assertEqual(exit_code, EXIT_OK)
        report = json.loads(output)
        self.assertEqual(report["schema"], Config.SCHEMA)
        self.assertEqual(report["command"], "eigen")
        self.assertEqual(report["E0"], "49/576")
        self.assertEqual(report["E_coeffs"][0], report["E0"])
        self.assertEqual(len(report["E_coeffs"]), 3)
        self.assertEqual(report["resonance_report"], [])
        self.assertIsNone(report["timing"])

    def test_lame_example(self):
        """Test g = 1/2 at kappa = 0 has E^(0) = 9/4 and no first order correction."""
        exit_code, output = run("eigen", "--g", "1/2,1/2,1/2,1/2", "--n", "1", "--order", "2")
        self.assertEqual(exit_code, EXIT_OK)
        report = json.loads(output)
        self.assertEqual(report["E_coeffs"][:2], ["9/4", "0/1"])

    def test_output_is_deterministic(self):
        """Test repeated runs give byte-identical output."""
        first = run("eigen", "--order", "3", "--kappa", "1/3", "--mode", "bridge")
        second = run("eigen", "--order", "3", "--kappa", "1/3", "--mode", "bridge")
        self.assertEqual(first, second)

    def test_engines_agree(self):
        """Test alg1 and bridge report the same series."""
        _, direct = run("eigen", "--order", "3", "--kappa", "1/3")
        _, bridged = run("eigen", "--order", "3", "--kappa", "1/3", "--mode", "bridge")
        self.assertEqual(json.loads(direct)["E_coeffs"], json.loads(bridged)["E_coeffs"])

    def test_csv_output(self):
        """Test CSV output has one row per order."""
        exit_code, output = run("eigen", "--order", "2", "--format", "csv")
        self.assertEqual(exit_code, EXIT_OK)
        lines = output.splitlines()
        self.assertEqual(lines[0], "l,re,im")
        self.assertEqual(lines[1], "0,49/576,0")
        self.assertEqual(len(lines), 4)

    def test_timing(self):
        """Test --timing reports elapsed seconds."""
        _, output = run("eigen", "--order", "1", "--timing")
        self.assertGreaterEqual(json.loads(output)["timing"], 0)


class TestExitCodes(unittest.TestCase):
    """End-to-end tests of error handling."""

    def test_resonance(self):
        """Test a vanishing denominator exits with the resonance code."""
        exit_code, output = run("eigen", "--g", "1,1,1,1", "--order", "2")
        self.assertEqual(exit_code, EXIT_RESONANCE)
        self.assertEqual(output, "")

    def test_precondition(self):
        """Test an excluded mode exits with the precondition code."""
        exit_code, _ = run("eigen", "--g", "0,1,1,0", "--kappa", "4", "--n", "1", "--order", "2")
        self.assertEqual(exit_code, EXIT_PRECONDITION)

    def test_inconsistent_options(self):
        """Test a frozen eigenvalue mode at kappa = 0 is a usage error."""
        exit_code, _ = run("eigen", "--mode", "alg2", "--kappa", "0")
        self.assertEqual(exit_code, EXIT_USAGE)

    @patch('sys.stderr', new_callable=StringIO)
    def test_bad_argument(self, mock_stderr):
        """Test argparse errors map to the usage code."""
        exit_code, _ = run("eigen", "--mode", "fast")
        self.assertEqual(exit_code, EXIT_USAGE)

    @patch('sys.stderr', new_callable=StringIO)
    def test_missing_command(self, mock_stderr):
        """Test a missing command is a usage error."""
        exit_code, _ = run()
        self.assertEqual(exit_code, EXIT_USAGE)

    def test_wrong_coupling_count(self):
        """Test three couplings are refused."""
        exit_code, _ = run("eigen", "--g", "1,2,3")
        self.assertEqual(exit_code, EXIT_USAGE)

    def test_unexpected_error(self):
        """Test unexpected exceptions exit with the internal code."""
        with patch('heun_forge.compute_eigen', side_effect=RuntimeError("boom")):
            exit_code, _ = run("eigen")
        self.assertEqual(exit_code, EXIT_INTERNAL)


class TestPolyCommand(unittest.TestCase):
    """End-to-end tests of the poly command."""

    def test_json(self):
        """Test polynomial blocks and normalization are reported."""
        exit_code, output = run("poly", "--order", "1", "--kappa", "1/3")
        self.assertEqual(exit_code, EXIT_OK)
        report = json.loads(output)
        self.assertEqual(report["command"], "poly")
        self.assertEqual(len(report["poly"]), 2)
        self.assertEqual(report["norm"], "1/1")
        self.assertEqual(report["poly"][0], ["1/1"])

    def test_csv_to_file(self):
        """Test --out writes the report and leaves stdout empty."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "poly.csv")
            exit_code, output = run("poly", "--order", "1", "--n", "1", "--format", "csv", "--out", path)
            self.assertEqual(exit_code, EXIT_OK)
            self.assertEqual(output, "")
            with open(path, encoding="utf-8") as f:
                self.assertEqual(f.readline().strip(), "l,power,re,im")


class TestEvalCommand(unittest.TestCase):
    """End-to-end tests of the eval command."""

    def test_residual_is_small(self):
        """Test the evaluated solution satisfies the equation."""
        exit_code, output = run(
            "eval", "--scalar", "complex", "--g", "1.3,0.45,0.4,0.9", "--n", "1",
            "--order", "4", "--tau", "0,2", "--x", "1.1,0",
        )
        self.assertEqual(exit_code, EXIT_OK)
        report = json.loads(output)
        self.assertEqual(report["tau"], [0.0, 2.0])
        self.assertEqual(len(report["psi"]), 2)
        self.assertLess(report["relative_residual"], 1e-6)

    def test_bad_nome(self):
        """Test |q| >= 1 is a usage error."""
        exit_code, _ = run("eval", "--q", "1.5")
        self.assertEqual(exit_code, EXIT_USAGE)


class TestVerifyCommand(unittest.TestCase):
    """End-to-end tests of the verify command."""

    def test_passing_suite(self):
        """Test a passing suite exits with zero."""
        exit_code, output = run("verify", "--suite", "eta1")
        self.assertEqual(exit_code, EXIT_OK)
        report = json.loads(output)
        self.assertEqual(report["suite"], "eta1")
        self.assertTrue(report["pass"])

    def test_failing_suite(self):
        """Test a failing suite exits with the internal code."""
        failing = {"suite": "appc", "cases": 1, "max_deviation": 1.0, "pass": False, "failures": ["x"]}
        with patch('heun_forge.run_suite', return_value=failing):
            exit_code, output = run("verify", "--suite", "appc")
        self.assertEqual(exit_code, EXIT_INTERNAL)
        self.assertFalse(json.loads(output)["pass"])

    def test_missing_suite(self):
        """Test verify without --suite is a usage error."""
        exit_code, _ = run("verify")
        self.assertEqual(exit_code, EXIT_USAGE)

    @pytest.mark.slow
    def test_residual_suite_with_nome(self):
        """Test the residual suite passes at q = 0.05 from the command line."""
        exit_code, output = run("verify", "--suite", "residual", "--q", "0.05")
        report = json.loads(output)
        self.assertTrue(report["pass"], report["failures"])
        self.assertEqual(exit_code, EXIT_OK)

    @pytest.mark.slow
    def test_engines_suite(self):
        """Test the engine cross-validation suite passes from the command line."""
        exit_code, output = run("verify", "--suite", "engines-xval")
        self.assertEqual(exit_code, EXIT_OK, output)
        self.assertEqual(json.loads(output)["max_deviation"], 0)


class TestConfigFile(unittest.TestCase):
    """End-to-end tests of YAML defaults."""

    def test_yaml_defaults_apply(self):
        """Test values from the config file are used and flags override them."""
        with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
            f.write('format: csv\norder: 1\n')
            temp_file = f.name
        try:
            with patch('sys.stdout', new_callable=StringIO) as captured:
                exit_code = main(["eigen", "--config", temp_file])
            self.assertEqual(exit_code, EXIT_OK)
            self.assertTrue(captured.getvalue().startswith("l,re,im\n"))
            self.assertEqual(len(captured.getvalue().splitlines()), 3)

            with patch('sys.stdout', new_callable=StringIO) as captured:
                main(["eigen", "--config", temp_file, "--format", "json"])
            self.assertEqual(len(json.loads(captured.getvalue())["E_coeffs"]), 2)
        finally:
            os.unlink(temp_file)


if __name__ == '__main__':
    unittest.main()
