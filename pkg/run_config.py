"""
Run configuration for the hyperpoly command-line tool.

Values come from command-line flags, then environment variables, then
built-in defaults. A .env file next to this module (or in the current
working directory) is loaded into the environment first.

Environment variables:
    HYPERPOLY_MODE  default scalar mode (exact | approx)
    HYPERPOLY_TOL   default approx-mode tolerance
    HYPERPOLY_SEED  default random seed
"""

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

# Try to load .env file if it exists
try:
    from dotenv import load_dotenv
    # Look for .env file in the script's directory
    script_dir = Path(__file__).parent.resolve()
    env_path = script_dir / '.env'

    # Also check current working directory
    cwd_env_path = Path.cwd() / '.env'

    if env_path.exists():
        load_dotenv(env_path)
    elif cwd_env_path.exists():
        load_dotenv(cwd_env_path)
except ImportError:
    # python-dotenv not installed, will fall back to environment variables
    pass

from scalar_linalg import DEFAULT_TOLERANCE, EXACT, check_mode
from hyperpolygon import WeightVector
from higgs import MarkedPoints, default_points
from hyperpoly_errors import ConfigError

DEFAULT_N = 4
DEFAULT_SEED = 0
DEFAULT_TRIALS = 100
DEFAULT_GRID = 3

SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class RunConfig:
    """Validated settings shared by every sub-command."""

    n: int = DEFAULT_N
    alpha: Optional[WeightVector] = None
    points_text: Optional[str] = None
    mode: str = EXACT
    seed: int = DEFAULT_SEED
    tolerance: float = DEFAULT_TOLERANCE
    trials: int = DEFAULT_TRIALS
    grid: int = DEFAULT_GRID
    perturb: Optional[float] = None
    collinear: bool = False
    quiet: bool = False

    def __post_init__(self):
        if self.n < 3:
            raise ConfigError(f"n must be at least 3, got {self.n}")
        try:
            check_mode(self.mode)
        except ValueError as e:
            raise ConfigError(str(e))
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ConfigError(f"seed must be a non-negative 64-bit integer, got {self.seed}")
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if self.grid < 1:
            raise ConfigError(f"grid must be at least 1, got {self.grid}")
        if self.perturb is not None and not self.perturb > 0:
            raise ConfigError(f"perturbation size must be positive, got {self.perturb}")
        if self.alpha is not None and len(self.alpha) != self.n:
            raise ConfigError(f"{len(self.alpha)} weights given for n = {self.n}")
        if self.points_text is not None:
            self.points_for(self.n)

    def weights_for(self, n):
        """Configured weights for an n-point problem (all 1/3 by default)."""
        if self.alpha is None:
            return WeightVector.uniform(n)
        if len(self.alpha) != n:
            raise ConfigError(f"{len(self.alpha)} weights given for a point with n = {n}")
        return self.alpha

    def points_for(self, n, mode=None):
        """Configured marked points for an n-point problem (0, 1, ..., n-1 by default)."""
        mode = mode or self.mode
        if self.points_text is None:
            return default_points(n, mode)
        points = MarkedPoints.parse(self.points_text, mode)
        if len(points) != n:
            raise ConfigError(f"{len(points)} marked points given for n = {n}")
        return points

    def with_n(self, n):
        """Same settings for a problem of size n read from input."""
        if self.alpha is not None and len(self.alpha) != n:
            raise ConfigError(f"{len(self.alpha)} weights given for a point with n = {n}")
        return replace(self, n=n)

    @classmethod
    def from_args(cls, args, environ=None):
        """
        Build a configuration from parsed arguments.

        Args:
            args: argparse namespace; missing or None attributes use the
                environment or the defaults
            environ: mapping used instead of os.environ (for tests)

        Raises:
            ConfigError: on any invalid value
        """
        environ = os.environ if environ is None else environ

        def pick(name, env_name, default, convert):
            value = getattr(args, name, None)
            if value is None and env_name and environ.get(env_name):
                value = environ[env_name]
            if value is None:
                return default
            try:
                return convert(value)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"invalid value for {name}: {value!r} ({e})")

        alpha_text = getattr(args, 'alpha', None)
        alpha = WeightVector.parse(alpha_text) if alpha_text else None
        points_text = getattr(args, 'points', None) or None
        # without --n, the size follows --alpha or --points
        if alpha is not None:
            default_n = len(alpha)
        elif points_text is not None:
            default_n = len([part for part in points_text.split(',') if part.strip()])
        else:
            default_n = DEFAULT_N
        n = pick('n', None, default_n, int)
        return cls(
            n=n,
            alpha=alpha,
            points_text=points_text,
            mode=pick('mode', 'HYPERPOLY_MODE', EXACT, lambda v: str(v).strip().lower()),
            seed=pick('seed', 'HYPERPOLY_SEED', DEFAULT_SEED, int),
            tolerance=pick('tol', 'HYPERPOLY_TOL', DEFAULT_TOLERANCE, float),
            trials=pick('trials', None, DEFAULT_TRIALS, int),
            grid=pick('grid', None, DEFAULT_GRID, int),
            perturb=pick('perturb', None, None, float),
            collinear=bool(getattr(args, 'collinear', False)),
            quiet=bool(getattr(args, 'quiet', False)),
        )
