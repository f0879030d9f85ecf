"""
Command-line interface for the MTSS toolkit.

stdout carries only the payload of a command; everything meant for a human
(progress, summaries, errors) goes to stderr.
"""

import argparse
import os
import sys
from enum import IntEnum
from pathlib import Path
from typing import Any, List, Optional, Sequence, TextIO

from .. import __version__
from ..core.analyzer import CorpusScanner, script_stats
from ..core.edits import apply_all, parse_edit_script
from ..core.errors import (
    EditError,
    EditScriptError,
    EvalError,
    MTSSError,
    UnknownRuleCode,
    ValidationErrorsPresent,
)
from ..core.evalx import EvalReport, evaluate
from ..core.parser import ParseDiagnostic, dump_document, parse_document, serialize
from ..core.render import render_branch_prompts, render_monolithic, render_shot_prompts
from ..core.schema import Script
from ..core.timeline import boundaries, build_index, infer_active_events
from ..core.validator import Diagnostic, explain_rule, validate
from ..utils.config import OUTPUT_FORMATS, PRESETS, ToolConfig, get_preset, read_config_file
from ..utils.helpers import read_input
from ..utils.logger import get_logger, level_for_verbosity, setup_logging

logger = get_logger("cli")


class ExitCode(IntEnum):
    OK = 0
    FINDINGS = 1
    USAGE = 2
    PARSE = 3


class UsageError(Exception):
    pass


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems as exceptions instead of exiting."""

    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _clean(text: str) -> str:
    return " ".join(str(text).split())


def build_parser() -> UsageParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON or YAML configuration file")
    common.add_argument("--preset", choices=sorted(PRESETS), default="default",
                        help="built-in configuration preset")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="more logging on stderr (-vv for debug)")
    common.add_argument("--log-file", type=Path, help="also write the log to this file")
    common.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS,
                        help="diagnostic output style")

    parser = UsageParser(prog="mtss", description="Multi-Stream Scene Script toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=UsageParser)
    sub.required = True

    p = sub.add_parser("validate", parents=[common], help="lint documents")
    p.add_argument("inputs", nargs="+", help="files, directories, or - for stdin")
    p.add_argument("--strict", action="store_true", default=None,
                   help="promote warnings to errors")

    p = sub.add_parser("fmt", parents=[common], help="rewrite documents in canonical form")
    p.add_argument("inputs", nargs="+", help="files, directories, or - for stdin")
    p.add_argument("--check", action="store_true", help="only report files that would change")

    p = sub.add_parser("render", parents=[common], help="flatten a script to text")
    p.add_argument("input")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--monolithic", dest="mode", action="store_const", const="monolithic")
    mode.add_argument("--shot-prompts", dest="mode", action="store_const", const="shot-prompts")
    mode.add_argument("--branches", dest="mode", action="store_const", const="branches")
    expansion = p.add_mutually_exclusive_group()
    expansion.add_argument("--no-expand", action="store_true",
                           help="never expand entity appearance")
    expansion.add_argument("--every-mention", action="store_true",
                           help="expand entity appearance at every mention")

    p = sub.add_parser("query", parents=[common], help="temporal queries")
    p.add_argument("input")
    p.add_argument("--at", type=float, metavar="SECONDS", help="shots and events active at a time")
    p.add_argument("--boundaries", action="store_true", help="interior shot boundaries")
    p.add_argument("--infer", action="store_true", help="active events inferred per shot")

    p = sub.add_parser("edit", parents=[common], help="apply an edit script")
    p.add_argument("input")
    p.add_argument("--apply", dest="edit_script", required=True, metavar="EDIT_SCRIPT")
    target = p.add_mutually_exclusive_group()
    target.add_argument("--output", type=Path, help="write the edited document here")
    target.add_argument("--in-place", action="store_true", help="overwrite the input document")

    p = sub.add_parser("eval", parents=[common], help="score a candidate against a gold script")
    p.add_argument("input", help="candidate document")
    p.add_argument("--gold", required=True, help="gold document")
    p.add_argument("--min-f1", type=float, help="exit 1 when any stream F1 is below this")
    p.add_argument("--penalty", type=float, help="seconds per unmatched boundary")
    p.add_argument("--json", action="store_true", help="print the report as a document")

    p = sub.add_parser("stats", parents=[common], help="counts, redundancy and footprint figures")
    p.add_argument("inputs", nargs="+")

    p = sub.add_parser("explain", parents=[common], help="describe a lint rule")
    p.add_argument("code")

    return parser


class App:
    """One CLI invocation: resolved configuration plus output streams."""

    def __init__(self, args: argparse.Namespace, stdout: TextIO, stderr: TextIO):
        self.args = args
        self.out = stdout
        self.err = stderr
        self.config = self._resolve_config(args)

    # Configuration: preset, then file, then environment, then flags
    @staticmethod
    def _resolve_config(args: argparse.Namespace) -> ToolConfig:
        config = get_preset(args.preset)
        config = config.merged(read_config_file(args.config))
        config.apply_environment(os.environ)
        if getattr(args, "strict", None):
            config.strict = True
        if getattr(args, "output_format", None):
            config.output_format = args.output_format
        if getattr(args, "min_f1", None) is not None:
            config.min_f1 = args.min_f1
        if getattr(args, "penalty", None) is not None:
            config.eval.unmatched_penalty = args.penalty
        if getattr(args, "no_expand", False):
            config.expand_first_mention = False
        return config

    def emit(self, text: str) -> None:
        self.out.write(text)

    def note(self, message: str) -> None:
        self.err.write(message.rstrip("\n") + "\n")

    def write_file(self, path: Path, text: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)

    # --- input ---

    def read(self, name: str) -> bytes:
        try:
            return read_input(name)
        except OSError as e:
            raise UsageError(f"cannot read {name}: {e.strerror or e}")

    def load(self, name: str) -> Optional[Script]:
        """Parse a document; prints diagnostics and returns None on failure."""
        outcome = parse_document(self.read(name))
        if not outcome.ok:
            self.print_parse_diagnostics(name, outcome.diagnostics, self.err)
            return None
        return outcome.script

    def inputs(self, names: Sequence[str]) -> List[str]:
        paths = [n for n in names if n != "-"]
        scanner = CorpusScanner(self.config)
        found = [str(p) for p in scanner.discover([Path(p) for p in paths])]
        return (["-"] if "-" in names else []) + found

    # --- output ---

    def format_line(self, code: str, severity: str, path: str, message: str) -> str:
        if self.config.output_format == "lines":
            return "\t".join((code, severity, _clean(path), _clean(message)))
        return f"{path}: {code} [{severity}] {message}"

    def print_parse_diagnostics(self, name: str, diagnostics: List[ParseDiagnostic],
                                stream: TextIO) -> None:
        for d in diagnostics:
            location = f"{d.span.line}:{d.span.column}"
            if self.config.output_format == "text":
                location = f"{name}:{location}"
            stream.write(self.format_line(d.code, "error", location, d.message) + "\n")

    def print_diagnostics(self, name: str, diagnostics: Sequence[Diagnostic],
                          prefix: bool) -> None:
        for d in diagnostics:
            path = f"{name}#{d.subject}" if prefix else d.subject
            self.emit(self.format_line(d.code, d.severity.value, path, d.message) + "\n")

    # --- commands ---

    def cmd_validate(self) -> int:
        names = self.inputs(self.args.inputs)
        worst = ExitCode.OK
        for name in names:
            outcome = parse_document(self.read(name))
            if not outcome.ok:
                self.print_parse_diagnostics(name, outcome.diagnostics, self.out)
                worst = max(worst, ExitCode.PARSE)
                continue
            diagnostics = validate(outcome.script).without(self.config.disabled_rules)
            if self.config.strict:
                diagnostics = diagnostics.promoted()
            self.print_diagnostics(name, diagnostics, prefix=len(names) > 1)
            counts = diagnostics.counts
            logger.info("%s: %d error(s), %d warning(s)", name, counts["error"], counts["warning"])
            if diagnostics.has_errors:
                worst = max(worst, ExitCode.FINDINGS)
        return worst

    def cmd_fmt(self) -> int:
        worst = ExitCode.OK
        for name in self.inputs(self.args.inputs):
            raw = self.read(name)
            outcome = parse_document(raw)
            if not outcome.ok:
                self.print_parse_diagnostics(name, outcome.diagnostics, self.err)
                worst = max(worst, ExitCode.PARSE)
                continue
            text = serialize(outcome.script)
            unchanged = raw == text.encode("utf-8")
            if name == "-":
                if self.args.check:
                    worst = max(worst, ExitCode.OK if unchanged else ExitCode.FINDINGS)
                else:
                    self.emit(text)
            elif unchanged:
                logger.info("%s already canonical", name)
            elif self.args.check:
                self.emit(f"{name}\n")
                worst = max(worst, ExitCode.FINDINGS)
            else:
                self.write_file(Path(name), text)
                logger.info("reformatted %s", name)
        return worst

    def cmd_render(self) -> int:
        script = self.load(self.args.input)
        if script is None:
            return ExitCode.PARSE
        mode = self.args.mode or "monolithic"
        try:
            if mode == "shot-prompts":
                self.emit(dump_document([p.to_dict() for p in render_shot_prompts(script)]))
            elif mode == "branches":
                self.emit(dump_document(render_branch_prompts(script).to_dict()))
            else:
                self.emit(render_monolithic(script, self.config.expand_first_mention,
                                            every_mention=self.args.every_mention))
        except ValidationErrorsPresent as e:
            self.note(f"{self.args.input}: cannot render, {e}")
            for d in e.diagnostics:
                self.note(self.format_line(d.code, d.severity.value, d.subject, d.message))
            return ExitCode.FINDINGS
        return ExitCode.OK

    def cmd_query(self) -> int:
        if self.args.at is None and not self.args.boundaries and not self.args.infer:
            raise UsageError("query: give at least one of --at, --boundaries, --infer")
        script = self.load(self.args.input)
        if script is None:
            return ExitCode.PARSE
        result: dict = {}
        index = build_index(script)
        if self.args.at is not None:
            result["at"] = float(self.args.at)
            result["shots"] = [s.id for s in index.shots_active_at(self.args.at)]
            result["events"] = [e.id for e in index.events_active_at(self.args.at)]
        if self.args.boundaries:
            result["boundaries"] = boundaries(script) if script.shots else []
        if self.args.infer:
            result["active_events"] = infer_active_events(script, index)
        self.emit(dump_document(result))
        return ExitCode.OK

    def cmd_edit(self) -> int:
        script = self.load(self.args.input)
        if script is None:
            return ExitCode.PARSE
        edit_text = self.read(self.args.edit_script).decode("utf-8", errors="replace")
        try:
            edits = parse_edit_script(edit_text)
            edited, footprints = apply_all(script, edits)
        except EditError as e:
            self.note(f"{self.args.input}: {e}")
            return ExitCode.USAGE if isinstance(e, EditScriptError) else ExitCode.FINDINGS
        self.emit(dump_document([f.to_dict() for f in footprints]))

        target = self.args.output
        if self.args.in_place:
            if self.args.input == "-":
                raise UsageError("edit: --in-place needs a file input")
            target = Path(self.args.input)
        if target is not None:
            self.write_file(target, serialize(edited))
            logger.info("wrote %s", target)
        return ExitCode.OK

    def cmd_eval(self) -> int:
        gold = self.load(self.args.gold)
        cand = self.load(self.args.input)
        if gold is None or cand is None:
            return ExitCode.PARSE
        try:
            report = evaluate(gold, cand, self.config.eval)
        except EvalError as e:
            self.note(str(e))
            return ExitCode.USAGE
        self.emit(dump_document(report.to_dict()) if self.args.json else format_report(report))
        if report.min_f1 < self.config.min_f1:
            self.note(f"F1 {report.min_f1:.3f} is below the required {self.config.min_f1:.3f}")
            return ExitCode.FINDINGS
        return ExitCode.OK

    def cmd_stats(self) -> int:
        names = self.inputs(self.args.inputs)
        results = {}
        worst = ExitCode.OK
        for name in names:
            script = self.load(name)
            if script is None:
                worst = ExitCode.PARSE
                continue
            results[name] = script_stats(script)
        payload: Any = results[names[0]] if len(names) == 1 and results else results
        self.emit(dump_document(payload))
        return worst

    def cmd_explain(self) -> int:
        try:
            info = explain_rule(self.args.code)
        except UnknownRuleCode as e:
            self.note(str(e))
            return ExitCode.USAGE
        self.emit(f"{info.code} [{info.severity.value}] {info.title}\n{info.rationale}\n")
        return ExitCode.OK

    def run(self) -> int:
        handler = getattr(self, "cmd_" + self.args.command)
        return int(handler())


def format_report(report: EvalReport) -> str:
    """Fixed-order text table of an EvalReport."""
    rows = [f"{'stream':<10}{'precision':>10}{'recall':>10}{'f1':>10}{'mean':>10}{'pairs':>8}"]
    for name in ("shots", "entities", "events"):
        score = getattr(report, name)
        rows.append(f"{name:<10}{score.precision:>10.3f}{score.recall:>10.3f}"
                    f"{score.f1:>10.3f}{score.mean_score:>10.3f}{len(score.matching.pairs):>8}")
    rows.append(f"boundary deviation: {report.boundary_deviation_seconds:.3f} s "
                f"({report.boundary_deviation_frames} frames at {report.fps:.3f} fps)")
    return "\n".join(rows) + "\n"


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None,
         stderr: Optional[TextIO] = None) -> int:
    """Run the CLI and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        stderr.write(f"{e}\n")
        return ExitCode.USAGE
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)

    try:
        app = App(args, stdout, stderr)
        setup_logging(level_for_verbosity(args.verbose, app.config.log_level), args.log_file)
        return app.run()
    except UsageError as e:
        stderr.write(f"mtss: {e}\n")
        return ExitCode.USAGE
    except (ValueError, OSError) as e:
        stderr.write(f"mtss: {e}\n")
        return ExitCode.USAGE
    except MTSSError as e:
        stderr.write(f"mtss: {e}\n")
        return ExitCode.FINDINGS
