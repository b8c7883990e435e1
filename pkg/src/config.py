"""Configuration module for heun-forge.

This module holds the built-in defaults (truncation order, tolerances,
quadrature settings, valid choices for every option) and the ``RunConfig``
that the command line builds from flags and YAML values.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Any, List, Optional, Tuple

from .basis import Params
from .exceptions import ConfigError, HeunForgeError
from .seriescore import ScalarField, get_field
from .specfun import Nome


logger = logging.getLogger(__name__)


class Config:
    """Application configuration and constants."""

    SCHEMA = "heun-forge/1"

    # Truncation
    DEFAULT_ORDER = 8
    DEFAULT_N = 0
    DEFAULT_G = "1/3,1/4,1/5,1/6"
    DEFAULT_KAPPA = "0"

    # Tolerances
    EPS_EQ = 1e-10
    EPS_DIV = 1e-12
    EPS_RES = 1e-8
    FD_STEP = 1e-3
    THETA_CUT = 1e-18
    WP_CUT = 1e-16

    # Contour quadrature
    QUADRATURE_POINTS = 512
    MIN_QUADRATURE_POINTS = 8

    # Evaluation defaults
    DEFAULT_Q = "0.05"
    DEFAULT_X = "1.1,0.3"

    SUBCOMMANDS = ["eigen", "poly", "verify", "eval"]

    VALID_MODES = ["alg1", "alg2", "thm1", "thm2", "bridge"]
    DEFAULT_MODE = "alg1"

    VALID_SCALARS = ["rational", "complex"]
    DEFAULT_SCALAR = "rational"

    VALID_FORMATS = ["json", "csv"]
    DEFAULT_FORMAT = "json"

    VALID_SUITES = [
        "jacobi-limit",
        "appc",
        "engines-xval",
        "s4",
        "residual",
        "kernel",
        "basis",
        "eta1",
        "integrals",
    ]

    # Modes that keep the eigenvalue fixed need kappa != 0
    KAPPA_MODES = ["alg2", "thm2", "bridge"]


def parse_pair(text: str) -> complex:
    """Parse "re,im" (or a single real number) into a complex value.

    Raises:
        ConfigError: If the text is not one or two numbers
    """
    parts = [part.strip() for part in str(text).split(",")]
    try:
        if len(parts) == 1:
            return complex(parts[0].replace("i", "j"))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise ConfigError(f"Not a complex value: {text!r}") from e
    raise ConfigError(f"Expected RE,IM, got {text!r}")


def parse_couplings(text: Any) -> Tuple[str, str, str, str]:
    """Split "a,b,c,d" (or a YAML list) into four value strings.

    Raises:
        ConfigError: If there are not exactly four values
    """
    if isinstance(text, (list, tuple)):
        values = [str(v).strip() for v in text]
    else:
        values = [part.strip() for part in str(text).split(",")]
    if len(values) != 4 or not all(values):
        raise ConfigError(f"--g needs four comma-separated values g0,g1,g2,g3, got {text!r}")
    return values[0], values[1], values[2], values[3]


@dataclass
class RunConfig:
    """Everything one command needs, after merging flags, YAML and defaults.

    Couplings and kappa are kept as strings until ``params()`` converts them
    in the chosen scalar field, so rational mode sees the exact input text.
    """

    subcommand: str
    n: int = Config.DEFAULT_N
    g: Tuple[str, str, str, str] = ("1/3", "1/4", "1/5", "1/6")
    kappa: str = Config.DEFAULT_KAPPA
    order: Optional[int] = None
    mode: str = Config.DEFAULT_MODE
    scalar: str = Config.DEFAULT_SCALAR
    output_format: str = Config.DEFAULT_FORMAT
    eps_eq: float = Config.EPS_EQ
    eps_div: float = Config.EPS_DIV
    eps_res: float = Config.EPS_RES
    fd_step: float = Config.FD_STEP
    points: int = Config.QUADRATURE_POINTS
    q: Optional[str] = None
    tau: Optional[str] = None
    x: Optional[str] = None
    omega1: Optional[str] = None
    suite: Optional[str] = None
    out: Optional[str] = None
    timing: bool = False

    @property
    def effective_order(self) -> int:
        return Config.DEFAULT_ORDER if self.order is None else self.order

    def field(self) -> ScalarField:
        return get_field(self.scalar, eps_eq=self.eps_eq, eps_div=self.eps_div)

    def params(self) -> Params:
        """Couplings and kappa in the configured scalar field.

        Raises:
            ConfigError: If a value cannot be represented (e.g. a decimal complex in rational mode)
        """
        try:
            return Params.create(list(self.g), self.kappa, self.field())
        except HeunForgeError as e:
            raise ConfigError(f"Invalid couplings for {self.scalar} mode: {e}") from e

    def tau_value(self) -> complex:
        """tau from --tau, or from --q (principal branch), or the default nome.

        Raises:
            ConfigError: If the point is outside the upper half plane or the unit disc
        """
        try:
            if self.tau is not None:
                return complex(Nome.from_tau(parse_pair(self.tau)).tau)
            q = Nome.from_q(parse_pair(self.q if self.q is not None else Config.DEFAULT_Q)).q
        except HeunForgeError as e:
            raise ConfigError(str(e)) from e
        if q == 0:
            raise ConfigError("q = 0 has no tau; pass --tau with a large imaginary part")
        return cmath.log(q) / (1j * math.pi)

    def x_value(self) -> complex:
        return parse_pair(self.x if self.x is not None else Config.DEFAULT_X)

    def omega1_value(self) -> Optional[complex]:
        if self.omega1 is None:
            return None
        value = parse_pair(self.omega1)
        if value == 0:
            raise ConfigError("--omega1 must be nonzero")
        return value

    def validate(self) -> None:
        """Check the mutual consistency of the options.

        Raises:
            ConfigError: On the first inconsistency found
        """
        if self.subcommand not in Config.SUBCOMMANDS:
            raise ConfigError(
                f"Unknown command: {self.subcommand}. Valid options are: {', '.join(Config.SUBCOMMANDS)}"
            )
        self._check_choice("mode", self.mode, Config.VALID_MODES)
        self._check_choice("scalar", self.scalar, Config.VALID_SCALARS)
        self._check_choice("format", self.output_format, Config.VALID_FORMATS)
        if self.order is not None and self.order < 0:
            raise ConfigError(f"--order must be >= 0, got {self.order}")
        if self.points < Config.MIN_QUADRATURE_POINTS:
            raise ConfigError(
                f"Quadrature needs at least {Config.MIN_QUADRATURE_POINTS} points, got {self.points}"
            )
        for name in ("eps_eq", "eps_div", "eps_res", "fd_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name.replace('_', '-')} must be positive")
        if self.tau is not None and self.q is not None:
            raise ConfigError("Give either --q or --tau, not both")

        if self.subcommand == "verify":
            if self.suite is None:
                raise ConfigError("verify needs --suite")
            self._check_choice("suite", self.suite, Config.VALID_SUITES)
            return

        params = self.params()
        if self.mode == "thm1" and not params.kappa_is_zero:
            raise ConfigError("thm1 requires kappa = 0")
        if self.mode in Config.KAPPA_MODES and params.kappa_is_zero:
            raise ConfigError(f"{self.mode} requires kappa != 0")
        if self.subcommand == "eval":
            self.tau_value()
            self.x_value()
            self.omega1_value()

    @staticmethod
    def _check_choice(name: str, value: Any, valid: List[str]) -> None:
        if value not in valid:
            raise ConfigError(f"Invalid {name}: {value}. Valid options are: {', '.join(valid)}")
