"""
Main decomposition manager that orchestrates parsing, decomposition, verification and notifications.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from config import EnvSettings, RunConfig, config
from errors import DimensionError, InstanceParseError, NormalFormError, UfssError
from independent_engine import decompose_independent
from instance_generator import write_corpus
from instance_io import (
    Decomposition, Instance, LinearInstance, decomposition_to_wire, parse_decomposition, parse_instance,
    trace_to_wire, write_json,
)
from integrations.slack_integration import SlackIntegration
from linear_engine import decompose_linear
from rcf_engine import decompose_family
from ufss_core import UFSS, ChoiceDecomposition, ChoiceInstance, DecompositionResult
from verification import (
    SampleGrid, VerificationReport, verify_choice, verify_injectivity, verify_oracle, verify_small_containment,
    verify_termination_trace, verify_union,
)

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


class InputMismatch(UfssError):
    """Instance kind, decomposition kind, grid and requested case do not fit together."""


# Instance kind each --case runs on
CASE_KINDS = {'rcf': UFSS, 'linear': LinearInstance, 'indep': ChoiceInstance}
KIND_NAMES = {'rcf': 'ufss', 'linear': 'linear', 'indep': 'indep'}


def _read(parse, path: Path):
    """Parse a file, reporting engine errors raised while building it as parse errors."""
    try:
        return parse(path)
    except InstanceParseError:
        raise
    except UfssError as e:
        raise InstanceParseError(str(e)) from e


class DecompositionManager:
    """Main class for running decompositions and reporting on them."""

    def __init__(self, settings: Optional[EnvSettings] = None):
        """Initialize the decomposition manager."""
        self.settings = settings or EnvSettings()
        self.slack_integration = None

        if self.settings.slack_webhook_url:
            self.slack_integration = SlackIntegration(self.settings.slack_webhook_url,
                                                      config.integrations.slack_channel)
            logger.info("Slack integration initialized")
        elif config.integrations.slack_enabled:
            logger.warning("Slack webhook URL not found in environment variables")

    # -- steps ----------------------------------------------------------------

    def grid_for(self, cfg: RunConfig, k: int) -> SampleGrid:
        spec = cfg.grid if cfg.grid is not None else config.get_default_grid(k)
        try:
            grid = SampleGrid.parse(spec, config.grid.random_points, cfg.seed)
            size = len(grid.points(k))
        except (ValueError, DimensionError) as e:
            raise InputMismatch(f"Invalid --grid {spec!r}: {e}") from e
        if size < config.grid.min_points:
            logger.warning(f"Grid {spec!r} has {size} samples, fewer than {config.grid.min_points}")
        return grid

    def check_case(self, instance: Instance, case: str) -> None:
        """Raise InputMismatch unless ``instance`` is the kind ``case`` runs on."""
        if not isinstance(instance, CASE_KINDS[case]):
            raise InputMismatch(f"Case {case} needs a {KIND_NAMES[case]} instance, got {type(instance).__name__}")

    def decompose(self, instance: Instance, case: str, grid: SampleGrid) -> Decomposition:
        """
        Run the engine selected by ``case``.

        Args:
            instance: parsed instance
            case: rcf, linear or indep
            grid: samples at which the reductions check containment

        Returns:
            DecompositionResult for rcf, ChoiceDecomposition otherwise
        """
        self.check_case(instance, case)
        if case == 'rcf':
            return decompose_family(instance, grid.points(instance.k))
        if case == 'linear':
            return decompose_linear(instance.h, instance.S)
        return decompose_independent(instance.cells, instance.h, instance.S)

    def verify(self, instance: Instance, decomposition: Decomposition, grid: SampleGrid) -> VerificationReport:
        """
        Check a decomposition of ``instance`` on every grid sample.

        Returns:
            Merged report of every applicable oracle
        """
        if isinstance(instance, UFSS):
            if not isinstance(decomposition, DecompositionResult):
                raise InputMismatch("A ufss instance needs a ufss decomposition")
            report = verify_union(instance, decomposition, grid).merge(
                verify_injectivity(decomposition, grid),
                verify_small_containment(decomposition, grid),
                verify_oracle(instance, decomposition, grid),
            )
            for trace in decomposition.traces:
                report = report.merge(verify_termination_trace(trace))
            return report
        if not isinstance(decomposition, ChoiceDecomposition):
            raise InputMismatch("A choice instance needs a choice decomposition")
        choice = instance.choice if isinstance(instance, LinearInstance) else instance
        return verify_choice(choice, decomposition, grid)

    # -- reporting ------------------------------------------------------------

    def summarize(self, cfg: RunConfig, decomposition: Decomposition,
                  report: Optional[VerificationReport]) -> Dict[str, Any]:
        fallback = decomposition.fallback_pieces if isinstance(decomposition, DecompositionResult) else ()
        tags: Dict[str, int] = {}
        for piece_tags in decomposition.provenance:
            for tag in piece_tags:
                tags[tag] = tags.get(tag, 0) + 1
        return {
            'case': cfg.case,
            'instance': str(cfg.input or cfg.instance or ''),
            'status': report.status if report is not None else 'N/A',
            'pieces': len(decomposition.pieces),
            'fallback_pieces': len(fallback),
            'tags': tags,
            'failures': [c.name for c in report.failures] if report is not None else [],
        }

    def _display_summary_console(self, summary: Dict[str, Any], report: Optional[VerificationReport]) -> None:
        """
        Display a run summary in the console.

        Args:
            summary: Output of ``summarize``
            report: Verification report, if the command verified
        """
        print("\n" + "=" * 60)
        print(f"     UFSS DECOMPOSITION - CASE {summary['case'].upper()}")
        print("=" * 60)
        print(f"Instance: {summary['instance']}")
        print()
        print("📦 PIECES:")
        print(f"   Total pieces:            {summary['pieces']}")
        print(f"   Fallback pieces:         {summary['fallback_pieces']}")
        for tag, count in sorted(summary['tags'].items()):
            print(f"   {tag:<25}{count}")
        print()
        if report is not None:
            print("🔎 VERIFICATION:")
            print(report.summary_table())
            print()
            status = "✅ PASS" if report.passed else "❌ FAIL"
            print(f"Status: {status}")
        print("=" * 60)

    def send_notifications(self, summary: Dict[str, Any]) -> None:
        """
        Send the run summary to all configured integrations.

        Args:
            summary: Output of ``summarize``
        """
        logger.info("Sending notifications...")

        if self.slack_integration:
            try:
                if self.slack_integration.send_verification_report(summary):
                    logger.info("Verification summary sent to Slack successfully")
                else:
                    logger.error("Failed to send verification summary to Slack")
            except Exception as e:
                logger.error(f"Error sending to Slack: {e}")
        else:
            logger.warning("Notification requested but UFSS_SLACK_WEBHOOK_URL is not set")

    # -- pipeline -------------------------------------------------------------

    def _finish(self, cfg: RunConfig, decomposition: Decomposition,
                report: Optional[VerificationReport]) -> int:
        summary = self.summarize(cfg, decomposition, report)
        self._display_summary_console(summary, report)
        if cfg.notify:
            self.send_notifications(summary)
        if report is not None and not report.passed:
            return EXIT_FAIL
        if cfg.fail_on_fallback and summary['fallback_pieces']:
            logger.error(f"{summary['fallback_pieces']} fallback pieces and --fail-on-fallback is set")
            return EXIT_FAIL
        return EXIT_PASS

    def _write_decomposition(self, cfg: RunConfig, decomposition: Decomposition) -> None:
        if cfg.output is not None:
            write_json(cfg.output, decomposition_to_wire(decomposition))
            logger.info(f"Decomposition written to {cfg.output}")
        if cfg.emit_trace is not None:
            traces = decomposition.traces if isinstance(decomposition, DecompositionResult) else ()
            write_json(cfg.emit_trace, [trace_to_wire(t) for t in traces])
            logger.info(f"Recursion trace written to {cfg.emit_trace}")

    def _k_of(self, instance: Instance) -> int:
        return instance.h.k if isinstance(instance, LinearInstance) else instance.k

    def run_pipeline(self, cfg: RunConfig) -> int:
        """
        Execute one command.

        Returns:
            0 on PASS, 1 on verification failure or contract violation, 2 on input errors
        """
        logger.info(f"Running {cfg.command} (case {cfg.case})")
        try:
            if cfg.command == 'gen':
                out_dir = cfg.out_dir or Path('corpus').resolve()
                paths = write_corpus(out_dir, cfg.count, cfg.seed)
                print(f"\nWrote {len(paths)} instances to {out_dir}")
                return EXIT_PASS

            if cfg.command == 'verify':
                if cfg.instance is None or cfg.decomposition is None:
                    raise InputMismatch("verify needs --instance and --decomposition")
                instance = _read(parse_instance, cfg.instance)
                self.check_case(instance, cfg.case)
                decomposition = _read(parse_decomposition, cfg.decomposition)
                report = self.verify(instance, decomposition, self.grid_for(cfg, self._k_of(instance)))
                if cfg.output is not None:
                    cfg.output.parent.mkdir(parents=True, exist_ok=True)
                    cfg.output.write_text(report.to_json() + "\n")
                return self._finish(cfg, decomposition, report)

            if cfg.input is None:
                raise InputMismatch(f"{cfg.command} needs --input")
            instance = _read(parse_instance, cfg.input)
            grid = self.grid_for(cfg, self._k_of(instance))
            decomposition = self.decompose(instance, cfg.case, grid)
            self._write_decomposition(cfg, decomposition)
            report = None
            if cfg.command == 'roundtrip':
                report = self.verify(instance, decomposition, grid)
                if cfg.output is not None:
                    cfg.output.with_suffix('.report.json').write_text(report.to_json() + "\n")
            return self._finish(cfg, decomposition, report)

        except (InstanceParseError, InputMismatch, NormalFormError) as e:
            logger.error(f"Input error: {e}")
            print(f"\nERROR: {e}")
            return EXIT_INPUT
        except UfssError as e:
            logger.error(f"Engine contract violated: {e}")
            print(f"\nFAIL: {e}")
            witness = getattr(e, 'witness', None)
            if witness:
                print(f"Witness: {witness}")
            return EXIT_FAIL
        except Exception as e:
            logger.exception(f"Unexpected failure in {cfg.command}: {e}")
            print(f"\nFAIL: unexpected {type(e).__name__}: {e}")
            return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='decomposition_manager',
        description="Decompose uniform families of small sets into injective pieces and verify them exactly.",
    )
    sub = parser.add_subparsers(dest='command', required=True)

    def engine_options(p: argparse.ArgumentParser) -> None:
        p.add_argument('--case', choices=['rcf', 'linear', 'indep'], default='rcf', help="Engine to run")
        p.add_argument('--input', type=Path, required=True, help="Instance JSON file")
        p.add_argument('--output', type=Path, help="Where to write the decomposition JSON")
        p.add_argument('--emit-trace', type=Path, help="Where to write the recursion trace JSON")
        p.add_argument('--fail-on-fallback', action='store_true', help="Exit 1 if enumerative pieces were emitted")

    def grid_options(p: argparse.ArgumentParser) -> None:
        p.add_argument('--grid', help='Parameter grid "lo:hi:step,..." (default from config)')
        p.add_argument('--seed', type=int, default=0, help="Seed of the random grid points")

    decompose = sub.add_parser('decompose', help="Decompose an instance")
    engine_options(decompose)
    grid_options(decompose)
    decompose.add_argument('--notify', action='store_true', help="Send the summary to Slack")

    verify = sub.add_parser('verify', help="Verify a decomposition against its instance")
    verify.add_argument('--case', choices=['rcf', 'linear', 'indep'], default='rcf', help="Engine that produced it")
    verify.add_argument('--instance', type=Path, required=True, help="Instance JSON file")
    verify.add_argument('--decomposition', type=Path, required=True, help="Decomposition JSON file")
    verify.add_argument('--output', type=Path, help="Where to write the report JSON")
    verify.add_argument('--fail-on-fallback', action='store_true', help="Exit 1 if enumerative pieces are present")
    verify.add_argument('--notify', action='store_true', help="Send the summary to Slack")
    grid_options(verify)

    roundtrip = sub.add_parser('roundtrip', help="Decompose and verify")
    engine_options(roundtrip)
    grid_options(roundtrip)
    roundtrip.add_argument('--notify', action='store_true', help="Send the summary to Slack")

    gen = sub.add_parser('gen', help="Write a seeded instance corpus")
    gen.add_argument('--count', type=int, default=config.generator.count, help="Number of ufss families")
    gen.add_argument('--seed', type=int, default=config.generator.seed, help="Generator seed")
    gen.add_argument('--out', dest='out_dir', type=Path, help="Output directory")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main function to run the command line."""
    load_dotenv()
    settings = EnvSettings()

    logging.basicConfig(
        level=settings.log_level.upper(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    args = build_parser().parse_args(argv)
    fields = {key: value for key, value in vars(args).items() if value is not None}
    try:
        cfg = RunConfig(**fields)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        print(f"\nERROR: {e}")
        return EXIT_INPUT

    return DecompositionManager(settings).run_pipeline(cfg)


if __name__ == "__main__":
    sys.exit(main())
