"""Unit tests for config module."""

import unittest
from fractions import Fraction

from src.config import Config, RunConfig, parse_couplings, parse_pair
from src.exceptions import ConfigError


class TestConfig(unittest.TestCase):
    """Test cases for configuration constants."""

    def test_valid_modes(self):
        """Test that all engines are listed."""
        self.assertEqual(Config.VALID_MODES, ["alg1", "alg2", "thm1", "thm2", "bridge"])

    def test_defaults(self):
        """Test default order, mode, scalar and format."""
        self.assertEqual(Config.DEFAULT_ORDER, 8)
        self.assertEqual(Config.DEFAULT_MODE, "alg1")
        self.assertEqual(Config.DEFAULT_SCALAR, "rational")
        self.assertEqual(Config.DEFAULT_FORMAT, "json")
        self.assertEqual(Config.SCHEMA, "heun-forge/1")

    def test_tolerances_positive(self):
        """Test that every tolerance is positive."""
        for value in (Config.EPS_EQ, Config.EPS_DIV, Config.EPS_RES, Config.FD_STEP):
            self.assertGreater(value, 0)


class TestParsing(unittest.TestCase):
    """Test cases for command line value parsing."""

    def test_parse_pair(self):
        """Test RE,IM pairs and single numbers."""
        self.assertEqual(parse_pair("1.1,0.3"), 1.1 + 0.3j)
        self.assertEqual(parse_pair("0.05"), 0.05)
        self.assertEqual(parse_pair("2i"), 2j)

    def test_parse_pair_invalid(self):
        """Test malformed pairs raise ConfigError."""
        with self.assertRaises(ConfigError):
            parse_pair("a,b")
        with self.assertRaises(ConfigError):
            parse_pair("1,2,3")

    def test_parse_couplings(self):
        """Test four values from text or a list."""
        self.assertEqual(parse_couplings("1/3, 1/4,1/5,1/6"), ("1/3", "1/4", "1/5", "1/6"))
        self.assertEqual(parse_couplings([1, "1/2", 0.5, 2]), ("1", "1/2", "0.5", "2"))

    def test_parse_couplings_wrong_count(self):
        """Test anything but four values raises ConfigError."""
        with self.assertRaises(ConfigError):
            parse_couplings("1,2,3")
        with self.assertRaises(ConfigError):
            parse_couplings("1,,2,3")


class TestRunConfig(unittest.TestCase):
    """Test cases for run configuration validation."""

    def test_defaults_validate(self):
        """Test the default eigen run is consistent."""
        config = RunConfig("eigen")
        config.validate()
        self.assertEqual(config.effective_order, Config.DEFAULT_ORDER)

    def test_rational_params(self):
        """Test couplings are converted exactly in rational mode."""
        params = RunConfig("eigen", g=("1/3", "1/4", "1/5", "1/6"), kappa="2/7").params()
        self.assertEqual(params.g[0], Fraction(1, 3))
        self.assertEqual(params.kappa, Fraction(2, 7))

    def test_complex_value_in_rational_mode(self):
        """Test a complex kappa is refused in rational mode."""
        config = RunConfig("eigen", kappa="0.4+1j")
        with self.assertRaises(ConfigError):
            config.validate()
        RunConfig("eigen", kappa="0.4+1j", scalar="complex").validate()

    def test_invalid_choices(self):
        """Test unknown command, mode, scalar and format raise ConfigError."""
        for config in (
            RunConfig("solve"),
            RunConfig("eigen", mode="alg3"),
            RunConfig("eigen", scalar="real"),
            RunConfig("eigen", output_format="xml"),
        ):
            with self.assertRaises(ConfigError):
                config.validate()

    def test_kappa_requirements(self):
        """Test thm1 needs kappa = 0 and the frozen eigenvalue modes need kappa != 0."""
        with self.assertRaises(ConfigError):
            RunConfig("eigen", mode="thm1", kappa="1/2").validate()
        for mode in ("alg2", "thm2", "bridge"):
            with self.assertRaises(ConfigError):
                RunConfig("poly", mode=mode, kappa="0").validate()
        RunConfig("poly", mode="bridge", kappa="1/2").validate()

    def test_numeric_limits(self):
        """Test negative order, too few points and non-positive tolerances."""
        for config in (
            RunConfig("eigen", order=-1),
            RunConfig("eigen", points=4),
            RunConfig("eigen", eps_res=0.0),
            RunConfig("eigen", fd_step=-1e-3),
        ):
            with self.assertRaises(ConfigError):
                config.validate()

    def test_verify_needs_known_suite(self):
        """Test verify requires a registered suite."""
        with self.assertRaises(ConfigError):
            RunConfig("verify").validate()
        with self.assertRaises(ConfigError):
            RunConfig("verify", suite="everything").validate()
        RunConfig("verify", suite="eta1").validate()

    def test_q_and_tau_exclusive(self):
        """Test --q and --tau cannot both be given."""
        with self.assertRaises(ConfigError):
            RunConfig("eval", q="0.1", tau="0,1").validate()

    def test_tau_value(self):
        """Test tau from the nome and directly."""
        self.assertAlmostEqual(RunConfig("eval", tau="0.2,1.5").tau_value(), 0.2 + 1.5j)
        tau = RunConfig("eval", q="0.1").tau_value()
        self.assertAlmostEqual(tau.real, 0.0)
        self.assertGreater(tau.imag, 0)
        with self.assertRaises(ConfigError):
            RunConfig("eval", q="1.5").tau_value()
        with self.assertRaises(ConfigError):
            RunConfig("eval", tau="0,-1").tau_value()

    def test_omega1_value(self):
        """Test omega1 is optional and must be nonzero."""
        self.assertIsNone(RunConfig("eval").omega1_value())
        self.assertEqual(RunConfig("eval", omega1="2,0").omega1_value(), 2)
        with self.assertRaises(ConfigError):
            RunConfig("eval", omega1="0").omega1_value()


if __name__ == '__main__':
    unittest.main()
