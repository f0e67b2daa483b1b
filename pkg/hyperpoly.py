#!/usr/bin/env python3
"""
Command-line front end for the hyperpolygon / parabolic Higgs toolkit.

Sub-commands:
    sample  draw a point of the moment-map level set (JSON to stdout)
    check   level-set membership, strong parabolicity and stability of a point
    map     Higgs data (lines, residues, det M) of a level-set point
    verify  run the symplectic identity suites at sampled points
    scan    stable fraction of sampled points over a grid of weights (CSV)

Progress and errors go to stderr; stdout carries JSON or CSV only.

Usage:
    python hyperpoly.py sample --n 5 --seed 7
    python hyperpoly.py check point.json --alpha 1/3,1/3,1/3,1/3
"""

import argparse
import itertools
import json
import sys
from datetime import datetime
from fractions import Fraction

import numpy as np
import pandas as pd

from scalar_linalg import (
    EXACT,
    APPROX,
    Covector2,
    det2,
    is_zero,
    mat_add,
    mat_mul,
    mat_scale,
    identity2,
    matrix_is_zero,
    random_scalar,
    set_tolerance,
    to_scalar,
)
from polyrat import rf_eval
from hyperpolygon import (
    HyperpolygonPoint,
    WeightVector,
    act,
    dimension_counts,
    group_element_from_dict,
    is_in_level_set,
    level_set_residual,
    point_from_dict,
    point_to_dict,
    sample_collinear,
    sample_level_set,
)
from higgs import (
    check_strong_parabolicity,
    det_rational,
    evaluate,
    higgs_to_dict,
    is_regular_at_infinity,
    is_stable,
    stability_report,
    to_higgs,
)
from symplectic import check_equivariance, verify_theorem1
from run_config import RunConfig
from hyperpoly_errors import (
    ExactModeRequired,
    HyperpolyError,
    MalformedInputError,
    StabilityError,
)

VERIFY_SUITES = (
    'level-set',
    'higgs-invariants',
    'theorem1',
    'two-form',
    'descent',
    'equivariance',
    'dimension',
    'rank',
)

# Draws allowed when verify looks for a stable sample
MAX_STABLE_DRAWS = 20

# Random evaluation points for the Higgs-field self-checks
HIGGS_CHECK_POINTS = 20


class Console:
    """Human-readable progress on stderr, silenced by --quiet."""

    def __init__(self, quiet=False):
        self.quiet = quiet

    def line(self, message=""):
        if not self.quiet:
            print(message, file=sys.stderr)

    def banner(self, title):
        self.line("=" * 80)
        self.line(title)
        self.line("=" * 80)

    def error(self, message):
        print(message, file=sys.stderr)


def emit_json(data):
    print(json.dumps(data, indent=2))


def read_json(path):
    """
    Load a JSON document from a file path or '-' for stdin.

    Raises:
        MalformedInputError: when the file is missing or not valid JSON
    """
    try:
        if path == '-':
            return json.load(sys.stdin)
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MalformedInputError(f"cannot read JSON from {path}: {e}")


def read_point(path):
    data = read_json(path)
    if not isinstance(data, dict):
        raise MalformedInputError("malformed point: expected a JSON object")
    return point_from_dict(data)


def draw_point(config, rng):
    if config.collinear:
        return sample_collinear(config.n, rng, config.mode)
    return sample_level_set(config.n, config.weights_for(config.n), rng, config.mode)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_sample(config, console):
    """Sample one level-set point, reproducibly from the seed."""
    console.banner("HYPERPOLYGON SAMPLER")
    console.line(f"n = {config.n}, mode = {config.mode}, seed = {config.seed}"
                 + (", collinear" if config.collinear else ""))
    rng = np.random.default_rng(config.seed)
    point = draw_point(config, rng)
    console.line(f"✓ Sampled point on the level set (residual {level_set_residual(point)})")
    emit_json(point_to_dict(point))
    return point


def cmd_check(path, config, console):
    """
    Report level-set membership, strong parabolicity and stability.

    Raises:
        ExactModeRequired: stability cannot be decided for approx data
    """
    point = read_point(path)
    config = config.with_n(point.n)
    console.banner(f"CHECK {path}")
    if point.mode == APPROX or config.mode == APPROX:
        raise ExactModeRequired("stability requires exact scalars")

    weights = config.weights_for(point.n)
    points = config.points_for(point.n, point.mode)
    on_level_set = is_in_level_set(point)
    report = {
        "n": point.n,
        "mode": point.mode,
        "alpha": weights.to_json(),
        "level_set": on_level_set,
    }
    if not on_level_set:
        console.line(f"✗ Not on the level set (residual {level_set_residual(point)})")
        report.update({
            "strong_parabolicity": None,
            "regular_at_infinity": None,
            "stable": None,
            "semistable": None,
            "stability": None,
        })
        emit_json(report)
        return report

    h = to_higgs(point, points, weights)
    stability = stability_report(h)
    report.update({
        "strong_parabolicity": check_strong_parabolicity(h),
        "regular_at_infinity": is_regular_at_infinity(h),
        "stable": stability["stable"],
        "semistable": stability["semistable"],
        "stability": stability,
    })
    mark = "✓" if stability["stable"] else "✗"
    console.line(f"✓ On the level set")
    console.line(f"{mark} stable = {stability['stable']} (max pardeg {stability['max_pardeg']}, "
                 f"threshold {stability['threshold']}, case {stability['case']})")
    emit_json(report)
    return report


def cmd_map(path, config, console, act_path=None):
    """Serialize the Higgs data of a level-set point, optionally after a group action."""
    point = read_point(path)
    config = config.with_n(point.n)
    console.banner(f"MAP {path}")
    if act_path:
        data = read_json(act_path)
        if not isinstance(data, dict):
            raise MalformedInputError("malformed group element: expected a JSON object")
        g = group_element_from_dict(data, point.mode)
        if len(g.lam) != point.n:
            raise MalformedInputError(f"group element has {len(g.lam)} scalars for n = {point.n}")
        point = act(g, point)
        console.line(f"✓ Applied group element from {act_path}")
    h = to_higgs(point, config.points_for(point.n, point.mode), config.weights_for(point.n))
    console.line(f"✓ Mapped {point.n} residues")
    data = higgs_to_dict(h)
    emit_json(data)
    return data


def perturb_point(point, size):
    """Shift the first covector off the level set by size in its first entry."""
    delta = to_scalar(str(size), point.mode)
    y = list(point.y)
    y[0] = Covector2(y[0].c0 + delta, y[0].c1)
    return HyperpolygonPoint(tuple(y), point.z)


def _sample_for_verify(config, rng, console):
    if config.mode == APPROX:
        return draw_point(config, rng)
    weights = config.weights_for(config.n)
    points = config.points_for(config.n)
    for _ in range(MAX_STABLE_DRAWS):
        point = draw_point(config, rng)
        if is_stable(to_higgs(point, points, weights)):
            return point
        console.line("⚠ Sample is not stable, drawing again")
    raise StabilityError("stable locus required")


def higgs_invariants_suite(h, rng):
    """Construction invariants of the Higgs data plus pointwise self-checks."""
    checks = {
        "strong_parabolicity": check_strong_parabolicity(h),
        "regular_at_infinity": is_regular_at_infinity(h),
    }
    det = det_rational(h) if h.mode == EXACT else None
    cayley_hamilton = True
    det_match = True
    scale = h.scale()
    for _ in range(HIGGS_CHECK_POINTS):
        x0 = random_scalar(rng, h.mode, 50) + to_scalar("1/2", h.mode)
        if any(is_zero(x0 - x) for x in h.points):
            continue
        M = evaluate(h, x0)
        d = det2(M)
        if not matrix_is_zero(mat_add(mat_mul(M, M), mat_scale(d, identity2(h.mode))), scale * scale):
            cayley_hamilton = False
        if det is not None and rf_eval(det, x0) != d:
            det_match = False
    checks["cayley_hamilton"] = cayley_hamilton
    if det is not None:
        checks["det_rational"] = det_match
    checks["pass"] = all(checks.values())
    return checks


def cmd_verify(config, console, point_path=None):
    """
    Run every verification suite at a sampled point, or at the point read
    from point_path.

    Returns:
        (report, name of the first failing suite or None)
    """
    console.banner("SYMPLECTIC IDENTITY VERIFICATION")
    console.line(f"Start time: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    rng = np.random.default_rng(config.seed)
    if point_path is not None:
        point = read_point(point_path)
        config = config.with_n(point.n)
        console.line(f"Point: {point_path}")
    else:
        point = _sample_for_verify(config, rng, console)
    mode = point.mode
    console.line(f"n = {config.n}, mode = {mode}, seed = {config.seed}, trials = {config.trials}")
    console.line()

    if config.perturb is not None:
        point = perturb_point(point, config.perturb)
        console.line(f"⚠ Perturbed y_1 by {config.perturb}")
    weights = config.weights_for(config.n)
    points = config.points_for(config.n, mode)

    suites = {}
    failed = None

    def record(name, result):
        nonlocal failed
        suites[name] = result
        mark = "✓" if result["pass"] else "✗"
        console.line(f"  {mark} {name}")
        if not result["pass"] and failed is None:
            failed = name

    residual = level_set_residual(point)
    record('level-set', {"pass": is_in_level_set(point), "residual": str(residual)})
    if failed is None:
        h = to_higgs(point, points, weights)
        record('higgs-invariants', higgs_invariants_suite(h, rng))
    if failed is None:
        report = verify_theorem1(point, config.trials, rng, points, weights)
        record('theorem1', report["theorem1"])
        record('two-form', report["two_form"])
        record('descent', report["descent"])
        equivariance = check_equivariance(point, config.trials, rng, points, weights)
        record('equivariance', equivariance)
        counts = dimension_counts(point)
        counts["pass"] = all(c["expected"] == c["got"] for c in counts.values())
        record('dimension', counts)
        record('rank', report["rank"])

    for name in VERIFY_SUITES:
        if name not in suites:
            suites[name] = {"pass": None, "skipped": True}

    result = {
        "n": config.n,
        "mode": mode,
        "seed": config.seed,
        "trials": config.trials,
        "alpha": weights.to_json(),
        "point": point_to_dict(point),
        "suites": [{"name": name, **suites[name]} for name in VERIFY_SUITES],
        "pass": failed is None,
        "failed": failed,
    }
    emit_json(result)

    console.line()
    console.banner("SUMMARY")
    if failed is None:
        console.line("✓ All suites passed")
    else:
        console.error(f"✗ FAILED: {failed}")
    return result, failed


def weight_grid(n, grid):
    """Weight vectors with every entry k/(grid+1), k = 1..grid."""
    axis = [Fraction(k, grid + 1) for k in range(1, grid + 1)]
    return [WeightVector(values) for values in itertools.product(axis, repeat=n)]


def cmd_scan(config, console):
    """
    Stable fraction of sampled points for every weight vector on a grid.

    Returns:
        pandas DataFrame with columns alpha, samples, stable_count
    """
    if config.mode != EXACT:
        raise ExactModeRequired("stability requires exact scalars")
    console.banner("STABILITY SCAN")
    rng = np.random.default_rng(config.seed)
    samples = [draw_point(config, rng) for _ in range(config.trials)]
    points = config.points_for(config.n)
    console.line(f"Sampled {len(samples)} point(s), n = {config.n}, grid = {config.grid}")

    rows = []
    for weights in weight_grid(config.n, config.grid):
        stable_count = sum(1 for p in samples if is_stable(to_higgs(p, points, weights)))
        rows.append({
            "alpha": ";".join(weights.to_json()),
            "samples": len(samples),
            "stable_count": stable_count,
        })
    frame = pd.DataFrame(rows, columns=["alpha", "samples", "stable_count"])
    console.line(f"✓ {len(frame)} weight vector(s), {int((frame['stable_count'] > 0).sum())} with stable samples")
    frame.to_csv(sys.stdout, index=False)
    return frame


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--n', type=int, help='Number of marked points (default: 4)')
    common.add_argument('--alpha', help='Comma-separated weights, e.g. 1/3,1/3,1/3,1/3 (default: all 1/3)')
    common.add_argument('--points', help='Comma-separated marked points (default: 0,1,...,n-1)')
    common.add_argument('--mode', help='Scalar mode: exact or approx (default: HYPERPOLY_MODE or exact)')
    common.add_argument('--seed', type=int, help='Random seed (default: HYPERPOLY_SEED or 0)')
    common.add_argument('--tol', type=float, help='Approx-mode tolerance (default: HYPERPOLY_TOL or 1e-9)')
    common.add_argument('--trials', type=int, help='Trials per suite / samples per weight (default: 100)')
    common.add_argument('--quiet', action='store_true', help='Suppress progress output on stderr')

    parser = argparse.ArgumentParser(
        prog='hyperpoly',
        description='Hyperpolygon spaces and their parabolic Higgs bundle counterparts.',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Sample a point with n = 5 and save it
  %(prog)s sample --n 5 --seed 7 > point.json

  # Check stability of a point for given weights
  %(prog)s check point.json --alpha 1/3,1/3,1/3,1/3,1/3

  # Higgs data after applying a group element
  %(prog)s map point.json --act g.json

  # Floating-point verification run
  %(prog)s verify --mode approx --n 6 --trials 1000

  # Weight scan over a 2-point grid
  %(prog)s scan --n 4 --grid 2 --trials 20 > scan.csv
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    sample = sub.add_parser('sample', parents=[common], help='Sample a level-set point')
    sample.add_argument('--collinear', action='store_true', help='Sample with all z_i on one line')

    check = sub.add_parser('check', parents=[common], help='Check a point')
    check.add_argument('point', help="Point JSON file ('-' for stdin)")

    map_ = sub.add_parser('map', parents=[common], help='Map a point to Higgs data')
    map_.add_argument('point', help="Point JSON file ('-' for stdin)")
    map_.add_argument('--act', help='Group element JSON applied before mapping')

    verify = sub.add_parser('verify', parents=[common], help='Run the verification suites')
    verify.add_argument('point', nargs='?', help="Point JSON file ('-' for stdin); sampled when omitted")
    verify.add_argument('--perturb', type=float, help='Move y_1 off the level set by this amount')

    scan = sub.add_parser('scan', parents=[common], help='Scan weights for stable samples')
    scan.add_argument('--grid', type=int, help='Grid points per weight axis (default: 3)')
    scan.add_argument('--collinear', action='store_true', help='Scan collinear samples')

    return parser


def main(argv=None):
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    console = Console(quiet=args.quiet)

    try:
        config = RunConfig.from_args(args)
        set_tolerance(config.tolerance)

        if args.command == 'sample':
            cmd_sample(config, console)
        elif args.command == 'check':
            cmd_check(args.point, config, console)
        elif args.command == 'map':
            cmd_map(args.point, config, console, act_path=args.act)
        elif args.command == 'verify':
            _, failed = cmd_verify(config, console, point_path=args.point)
            if failed is not None:
                return 1
        elif args.command == 'scan':
            cmd_scan(config, console)
        return 0

    except HyperpolyError as e:
        console.error(f"✗ ERROR: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        console.error("\n\n✗ Interrupted by user")
        return 130
    except Exception as e:
        console.error(f"\n✗ ERROR: {e}")
        import traceback
        traceback.print_exc()
        return 1


if __name__ == '__main__':
    sys.exit(main())
