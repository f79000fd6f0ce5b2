"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or configuration error,
3 feed failure, 4 acceptance check failed.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .actuators import ActuatorRouter, LogSink
from .baseline import DEFAULT_THRESHOLDS, ThresholdConfig
from .config import load_config
from .controller import ClimateController, ClimateInputs
from .engine import DEFAULT_CENTROID_STEP
from .errors import FeedUnavailableError, FuzzyHvacError
from .ingestion import CHANNELS, FeedKind, FeedSource, load_day_csv, merge_feeds, replay_readings
from .simulation import BASELINE, FUZZY, compare, emit_report, make_policy, run_simulation

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_FEED, EXIT_ACCEPTANCE = 0, 1, 2, 3, 4

log = logging.getLogger("fuzzy_hvac")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzy-hvac", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="replay a day of readings")
    sim.add_argument("--data", type=Path, help="day CSV (default: bundled day)")
    sim.add_argument("--config", type=Path, help="rules file (default: bundled rules)")
    sim.add_argument("--mode", choices=(FUZZY, BASELINE, "compare"), default="compare")
    sim.add_argument("--report", type=Path, help="write the report here instead of stdout")
    sim.add_argument("--format", choices=("text", "csv"), default="text")
    sim.add_argument("--centroid-step", type=_positive, default=DEFAULT_CENTROID_STEP)
    sim.add_argument("--thresholds", type=Path, help="JSON file overriding baseline bands")

    poll = sub.add_parser("poll", help="stream live decisions to the log sink")
    poll.add_argument("--source", action="append", choices=[k.value for k in FeedKind],
                      required=True, help="feed kind; repeat once per channel")
    poll.add_argument("--endpoint", action="append", required=True)
    poll.add_argument("--field", action="append", default=[],
                      help="JSON field (network kinds) for each --source")
    poll.add_argument("--channel", action="append", choices=CHANNELS,
                      help="channel of each --source (default: humidity, outdoor_temp, indoor_temp)")
    poll.add_argument("--interval", type=float, default=60.0, help="seconds between polls")
    poll.add_argument("--max-failures", type=int, default=3)
    poll.add_argument("--max-ticks", type=int)
    poll.add_argument("--config", type=Path)
    poll.add_argument("--centroid-step", type=_positive, default=DEFAULT_CENTROID_STEP)

    sub.add_parser("acceptance", help="run the acceptance checks on the bundled data")
    return parser


def _controller(args):
    return ClimateController(load_config(args.config), centroid_step=args.centroid_step)


def cmd_simulate(args) -> int:
    readings = load_day_csv(args.data)
    thresholds = ThresholdConfig.from_json(args.thresholds) if args.thresholds else DEFAULT_THRESHOLDS
    modes = (BASELINE, FUZZY) if args.mode == "compare" else (args.mode,)
    controller = _controller(args) if FUZZY in modes else None
    reports = [run_simulation(readings, make_policy(m, controller=controller, thresholds=thresholds))
               for m in modes]
    summary = compare(*reports) if len(reports) == 2 else None
    text = emit_report(summary, reports, args.format)
    if args.report:
        args.report.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _poll_readings(args):
    sources, endpoints, fields = args.source, args.endpoint, args.field
    if len(endpoints) != len(sources):
        raise UsageError("give one --endpoint per --source")
    if sources == [FeedKind.FILE.value]:
        return replay_readings(endpoints[0], args.interval)
    if FeedKind.FILE.value in sources:
        raise UsageError("a file source replays every channel and cannot be mixed")
    channels = args.channel or list(CHANNELS)
    if len(sources) != len(CHANNELS) or len(channels) != len(sources) or set(channels) != set(CHANNELS):
        raise UsageError(f"network polling needs one --source per channel {CHANNELS}")
    if len(fields) != len(sources):
        raise UsageError("give one --field per network --source")
    if not args.interval > 0:
        raise UsageError("--interval must be positive")
    feeds = {ch: FeedSource(FeedKind(kind), url, field, args.interval)
             for ch, kind, url, field in zip(channels, sources, endpoints, fields)}
    return merge_feeds(feeds, tick=args.interval, max_ticks=args.max_ticks,
                       max_failures=args.max_failures)


def cmd_poll(args) -> int:
    controller = _controller(args)
    router = ActuatorRouter(LogSink(sys.stdout))
    for n, reading in enumerate(_poll_readings(args)):
        if args.max_ticks is not None and n >= args.max_ticks:
            break
        _, cmd = controller.decide(
            ClimateInputs(reading.outdoor_temp, reading.humidity, reading.indoor_temp))
        router.dispatch(cmd.state, reading.timestamp)
    return EXIT_OK


def cmd_acceptance(args) -> int:
    from .acceptance import run_all

    results = run_all()
    for result in results:
        print(result.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE


COMMANDS = {"simulate": cmd_simulate, "poll": cmd_poll, "acceptance": cmd_acceptance}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fuzzy-hvac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FeedUnavailableError as exc:
        print(f"fuzzy-hvac: feed failure: {exc}", file=sys.stderr)
        return EXIT_FEED
    except (FuzzyHvacError, OSError, ValueError) as exc:
        print(f"fuzzy-hvac: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
