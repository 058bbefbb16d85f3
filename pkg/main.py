"""
Command-line entry point for the distinguishability filter simulator
"""
import argparse
import json
import logging
import math
import sys
from typing import List, Optional

from config import output_config, search_config
from core.data_models import RestartOutcome, SearchSpec, SimulationError
from core.fock import state_from_json
from core.scenarios import (
    PRESETS, SCENARIOS, ScenarioRunner, preset_state, report_to_json
)
from core.search import search_spec_from_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


def _grid(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Grid must be comma-separated numbers: {e}")
    if not values:
        raise argparse.ArgumentTypeError("Grid is empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        description="Simulate System interferometers that filter Label distinguishability"
    )
    p.add_argument("--scenario", choices=SCENARIOS + ('all',), default='all',
                   help="Scenario to run (default: all)")
    p.add_argument("--alpha", type=complex, default=1 / math.sqrt(2),
                   help="Amplitude of the indistinguishable term")
    p.add_argument("--beta", type=complex, default=1 / math.sqrt(2),
                   help="Amplitude of the distinguishable term")
    p.add_argument("--grid", type=_grid, default=None,
                   help="Comma-separated Label overlaps in [0, 1] for the HOM dip")
    p.add_argument("--seed", type=int, default=search_config.SEED,
                   help="Seed for the family sweep and the search")
    p.add_argument("--oracle", action="store_true",
                   help="Recompute every evolution by operator expansion and compare")
    p.add_argument("--out-dir", type=str, default=output_config.OUT_DIR,
                   help="Directory for CSV output")
    p.add_argument("--spec", type=str, default=None,
                   help="JSON file: a state for 'schmidt', a search spec for 'search'")
    p.add_argument("--preset", choices=PRESETS, default=None,
                   help="Built-in state for 'schmidt' (default: every preset)")
    p.add_argument("--log-level", type=str, default=output_config.LOG_LEVEL,
                   help="Logging level (default from QFILTER_LOG_LEVEL)")
    return p


def _load_json(path: str) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise SimulationError(f"Cannot read {path}: {e}") from e


def _stream_restart(outcome: RestartOutcome):
    logger.info(f"restart {outcome.index}: residual {outcome.residual!r}")


def run(args: argparse.Namespace) -> List[dict]:
    runner = ScenarioRunner(oracle=args.oracle, out_dir=args.out_dir)
    selected = SCENARIOS if args.scenario == 'all' else (args.scenario,)
    reports = []
    for name in selected:
        logger.info(f"Running scenario {name}")
        if name == 'hom':
            reports.append(runner.run_hom(args.grid))
        elif name == 'filter':
            reports.append(runner.run_filter(args.alpha, args.beta))
        elif name == 'schmidt':
            if args.spec and args.scenario == 'schmidt':
                reports.append(runner.run_schmidt(state_from_json(_load_json(args.spec)), label=args.spec))
            else:
                for preset in ([args.preset] if args.preset else PRESETS):
                    state = preset_state(preset, args.alpha, args.beta, evolve=runner.evolve)
                    reports.append(runner.run_schmidt(state, label=preset))
        elif name == 'family':
            reports.append(runner.run_family(args.seed))
        elif name == 'search':
            if args.spec and args.scenario == 'search':
                spec = search_spec_from_json(_load_json(args.spec))
            else:
                spec = SearchSpec(S=3, input_ports=(1, 2), output_ports=(2, 3), seed=args.seed)
            reports.append(runner.run_search(spec, on_restart=_stream_restart))
    if args.oracle:
        logger.info(f"Oracle confirmed {runner.oracle_comparisons} evolutions")
    return [report_to_json(r) for r in reports]


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        reports = run(args)
    except SimulationError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR

    passed = all(r['passed'] for r in reports)
    document = {'passed': passed, 'reports': reports}
    sys.stdout.write(json.dumps(document, indent=2) + "\n")
    if not passed:
        failed = [c['name'] for r in reports for c in r['checks'] if not c['passed']]
        logger.error(f"{len(failed)} checks failed: {failed}")
        return EXIT_CHECK_FAILED
    logger.info("All checks passed")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
