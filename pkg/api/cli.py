# ============================================
# FILE: api/cli.py
# ============================================
"""Command line front end.

    python -m api.cli solve --config run.env
    python -m api.cli verify --config run.env --suite inequality --seed 7
    python -m api.cli convergence --config run.env --refine 4

Exit status: 0 when the command succeeded and every threshold passed,
1 on a numerical or domain failure (the report is still written),
2 on configuration and usage errors.
"""
import argparse
import logging
import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import config
from models.errors import ConfigError, HelicalError, UnknownSuiteError
from models.reports import SolveReport
from models.run_config import RunConfig
from solver.convergence import convergence_study, convergence_table, refinement_resolutions, relative_l2_error
from solver.solver import solve_full
from utils.data_loader import FieldTables, write_table
from utils.preprocessor import ProblemPreprocessor
from verification.suites import SUITES, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog='helical',
        description='Helically reduced wave equation on the ball: solver and verification suites.',
    )
    parser.add_argument('--log-level', default=None, help='Override LOG_LEVEL from the environment')
    commands = parser.add_subparsers(dest='command', required=True)

    solve = commands.add_parser('solve', help='Solve the configured problem and write field files')
    solve.add_argument('--config', required=True, help='Run configuration (KEY=value file)')
    solve.add_argument('--allow-incompatible', action='store_true',
                       help="Accept incompatible data by shifting tau's m = 0 component")

    verify = commands.add_parser('verify', help='Run one verification suite')
    verify.add_argument('--config', required=True, help='Run configuration (KEY=value file)')
    verify.add_argument('--suite', default=None, help=f"One of {', '.join(SUITES)}")
    verify.add_argument('--seed', type=int, default=None, help='Seed for sampled suites')
    verify.add_argument('--refine', type=int, default=None, help='Number of resolutions')

    convergence = commands.add_parser('convergence', help='Manufactured-solution refinement study')
    convergence.add_argument('--config', required=True, help='Run configuration (KEY=value file)')
    convergence.add_argument('--refine', type=int, default=None, help='Number of resolutions')
    convergence.add_argument('--seed', type=int, default=None, help='Seed of the manufactured solution')
    return parser


def _load_run(args):
    run = RunConfig.from_file(args.config)
    return run.with_overrides(
        seed=getattr(args, 'seed', None),
        refine=getattr(args, 'refine', None),
        suite=getattr(args, 'suite', None),
        allow_incompatible=True if getattr(args, 'allow_incompatible', False) else None,
    )


def cmd_solve(run):
    problem, exact = ProblemPreprocessor(run).prepare()
    run.output_path.mkdir(parents=True, exist_ok=True)
    report_path = run.output('report_file')

    try:
        result = solve_full(problem, path=run.path, allow_incompatible=run.allow_incompatible, workers=run.workers,
                            nullspace_modes=run.nullspace_modes)
    except HelicalError as e:
        report = getattr(e, 'report', None) or SolveReport.for_problem(problem)
        report.status = 'failed'
        report.error = report.error or f"{type(e).__name__}: {e}"
        report.write(report_path)
        logger.error(f"❌ Solve failed: {report.error} (report: {report_path})")
        return EXIT_FAILED

    tables = FieldTables(result.grid)
    write_table(tables.field_frame(result.field), run.output('field_file'))
    write_table(tables.mode_frame(result.modes), run.output('modes_file'))
    result.report.write(report_path)
    if exact is not None:
        error = relative_l2_error(result.field, exact.values(result.grid), result.grid)
        logger.info(f"📊 Relative L2 error against the analytic solution: {error:.3e}")
    logger.info(f"✅ Report written to {report_path}")
    return EXIT_OK


def cmd_verify(run, suite=None):
    suite = suite or run.suite
    if suite is None:
        raise UnknownSuiteError(f"no suite selected, expected one of {sorted(SUITES)}")
    report = run_suite(suite, run)
    run.output_path.mkdir(parents=True, exist_ok=True)
    report.write(run.output('report_file'))
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_convergence(run):
    preprocessor = ProblemPreprocessor(run)
    _, exact = preprocessor.prepare()
    if exact is None:
        raise ConfigError(f"preset '{run.preset}' has no analytic solution for a convergence study")

    resolutions = refinement_resolutions(run.resolution, run.n, max(2, run.refine))
    run.output_path.mkdir(parents=True, exist_ok=True)
    try:
        report = convergence_study(
            run.helical, exact, resolutions,
            M=run.M, n_phi=preprocessor.n_phi, path=run.path, min_order=run.min_order,
        )
    except HelicalError as e:
        logger.error(f"❌ Convergence study failed: {e}")
        return EXIT_FAILED

    write_table(convergence_table(report), run.output('table_file'))
    report.write(run.output('report_file'))
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    config.setup_logging(args.log_level)

    try:
        run = _load_run(args)
        if args.command == 'solve':
            return cmd_solve(run)
        if args.command == 'verify':
            return cmd_verify(run)
        return cmd_convergence(run)
    except (ConfigError, UnknownSuiteError) as e:
        logger.error(f"❌ {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except HelicalError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_FAILED


if __name__ == '__main__':
    raise SystemExit(main())
