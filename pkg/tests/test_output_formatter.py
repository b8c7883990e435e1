"""Unit tests for output_formatter module."""

import unittest
import json
from src.output_formatter import OutputFormatter, format_float, split_value


class TestOutputFormatter(unittest.TestCase):
    """Test cases for output formatter functionality."""

    def setUp(self):
        """Set up test fixtures."""
        self.eigen_report = {
            "schema": "heun-forge/1",
            "command": "eigen",
            "n": 1,
            "N": 2,
            "E_coeffs": ["9/4", "0/1", "-1/8"],
            "resonance_report": [],
        }
        self.poly_report = {
            "command": "poly",
            "poly": [[[1.0, 0.0], [0.5, -0.25]], [[0.0, 0.0]]],
        }

    def test_format_json_sorted_and_stable(self):
        """Test JSON output has sorted keys and ends in a newline."""
        result = OutputFormatter.format_json(self.eigen_report)
        self.assertTrue(result.endswith("\n"))
        self.assertEqual(json.loads(result), self.eigen_report)
        self.assertLess(result.index('"E_coeffs"'), result.index('"schema"'))
        reordered = dict(reversed(list(self.eigen_report.items())))
        self.assertEqual(OutputFormatter.format_json(reordered), result)

    def test_format_csv_eigen(self):
        """Test eigen reports give one row per order."""
        result = OutputFormatter.format_csv(self.eigen_report)
        self.assertEqual(result, "l,re,im\n0,9/4,0\n1,0/1,0\n2,-1/8,0\n")

    def test_format_csv_poly(self):
        """Test poly reports give one row per coefficient with 17 digit floats."""
        lines = OutputFormatter.format_csv(self.poly_report).splitlines()
        self.assertEqual(lines[0], "l,power,re,im")
        self.assertEqual(lines[1], "0,0,1,0")
        self.assertEqual(lines[2], "0,1,0.5,-0.25")
        self.assertEqual(len(lines), 4)

    def test_format_csv_verify(self):
        """Test verify reports give a summary row."""
        report = {"command": "verify", "suite": "appc", "cases": 12, "max_deviation": 0.0, "pass": True}
        result = OutputFormatter.format_csv(report)
        self.assertEqual(result, "suite,cases,max_deviation,pass\nappc,12,0,true\n")

    def test_format_csv_eval(self):
        """Test eval reports list x, tau, psi, E and the residual."""
        report = {
            "command": "eval",
            "x": [1.1, 0.3],
            "tau": [0.0, 1.0],
            "psi": [0.25, -0.5],
            "E": [2.0, 0.0],
            "relative_residual": 1e-9,
        }
        rows = OutputFormatter.csv_rows(report)
        self.assertEqual([row[0] for row in rows[1:]], ["x", "tau", "psi", "E", "relative_residual"])
        self.assertEqual(rows[3], ["psi", "0.25", "-0.5"])

    def test_format_csv_unknown_command(self):
        """Test reports without a CSV layout raise ValueError."""
        with self.assertRaises(ValueError):
            OutputFormatter.format_csv({"command": "plot"})

    def test_format_report_json(self):
        """Test format_report with JSON format."""
        result = OutputFormatter.format_report(self.eigen_report, "json")
        self.assertEqual(result, OutputFormatter.format_json(self.eigen_report))

    def test_format_report_csv(self):
        """Test format_report with CSV format."""
        result = OutputFormatter.format_report(self.eigen_report, "csv")
        self.assertTrue(result.startswith("l,re,im\n"))

    def test_format_report_invalid(self):
        """Test format_report with invalid format raises ValueError."""
        with self.assertRaises(ValueError) as context:
            OutputFormatter.format_report(self.eigen_report, "xml")
        self.assertIn("Invalid format type", str(context.exception))

    def test_format_float(self):
        """Test floats are written with up to 17 significant digits."""
        self.assertEqual(format_float(0.1), "0.10000000000000001")
        self.assertEqual(format_float(2.0), "2")

    def test_split_value(self):
        """Test rational strings and complex pairs split into re, im."""
        self.assertEqual(split_value("3/4"), ["3/4", "0"])
        self.assertEqual(split_value([1.5, -2.0]), ["1.5", "-2"])


if __name__ == '__main__':
    unittest.main()
