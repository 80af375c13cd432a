import os, sys, argparse

import analysis_helpers as helpers
from src.app_logger import install_crash_handler, log_crash, restore_logging, setup_logging
from src.errors import SafetyViolation, SolverError, ValidationError
from src.version import VERSION

# Paths relative to the executable or script location
if getattr(sys, 'frozen', False):
    # Running as compiled EXE
    BASE_DIR = os.path.dirname(sys.executable)
else:
    # Running as Python script
    BASE_DIR = os.path.dirname(os.path.abspath(__file__))

RESULT_DIR = os.path.join(BASE_DIR, "results")

EXIT_OK = 0
EXIT_CRASH = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_SAFETY = 4


def parse_point(text: str):
    """'x,y' -> (x, y)."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2:
        raise ValidationError(f"expected 'x,y', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ValidationError(f"expected 'x,y' with numeric coordinates, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=f"Channel planner {VERSION}: elliptic grids, sandwich A*, MPC tracking")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--env", default=helpers.BENCHMARK_ENV, help="Environment file (JSON or YAML).")
        p.add_argument("--out", default=None, help="Output directory (default: results/<command>).")
        p.add_argument("--config", default=None, help="Config YAML with solver/planning/control sections.")
        p.add_argument("--seed", type=int, default=None, help="Seed recorded in the run manifest.")
        p.add_argument("--quiet", action="store_true", help="Disable progress bars.")

    def query(p):
        p.add_argument("--start", required=True, help="Start point x,y in meters.")
        p.add_argument("--goal", required=True, help="Goal point x,y in meters.")
        p.add_argument("--cell-size", type=float, default=None, help="Baseline occupancy cell size in meters.")

    common(sub.add_parser("grid", help="Solve channel grids and plot potential/stream lines."))

    p = sub.add_parser("plan", help="Sandwich A* (and optionally the regular A* baseline).")
    common(p)
    query(p)
    p.add_argument("--baseline", action="store_true", help="Also run the occupancy-grid baseline.")

    p = sub.add_parser("track", help="Closed-loop MPC tracking of a planned path.")
    common(p)
    p.add_argument("--path", default=None, help="Path CSV from 'plan' (default: <out>/path.csv).")

    p = sub.add_parser("compare", help="Grid artifacts plus both planners on one query.")
    common(p)
    query(p)
    return parser


def _dispatch(args) -> dict:
    progress = not args.quiet
    if args.command == "grid":
        return helpers.run_grid(args.env, args.out, args.config, args.seed, progress)
    if args.command == "plan":
        return helpers.run_plan(args.env, args.out, parse_point(args.start), parse_point(args.goal),
                                baseline=args.baseline, config_path=args.config, cell_size=args.cell_size,
                                seed=args.seed, progress=progress)
    if args.command == "track":
        path_csv = args.path if args.path is not None else os.path.join(args.out, "path.csv")
        return helpers.run_track(args.env, args.out, path_csv, args.config, args.seed, progress)
    return helpers.run_compare(args.env, args.out, parse_point(args.start), parse_point(args.goal),
                               config_path=args.config, cell_size=args.cell_size, seed=args.seed,
                               progress=progress)


def run_cli(argv=None) -> int:
    """Run one subcommand and return its exit code."""
    args = build_parser().parse_args(argv)
    if args.out is None:
        args.out = os.path.join(RESULT_DIR, args.command)
    os.makedirs(args.out, exist_ok=True)

    setup_logging(os.path.join(args.out, "logs"))
    try:
        print(f"--- Channel planner {VERSION}: {args.command} ---")
        artifacts = _dispatch(args)
        print(f"[cli] {args.command}: wrote {len(artifacts)} artifacts to {args.out}")
        return EXIT_OK
    except SafetyViolation as e:
        print(f"[cli] SAFETY VIOLATION: {e}", file=sys.stderr)
        return EXIT_SAFETY
    except SolverError as e:
        print(f"[cli] SOLVER FAILURE: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except ValidationError as e:
        print(f"[cli] INVALID INPUT: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception:
        log_crash(*sys.exc_info())
        return EXIT_CRASH
    finally:
        restore_logging()


if __name__ == "__main__":
    install_crash_handler()
    sys.exit(run_cli())
