"""Command-line entry point.

Subcommands: validate, plot, strip, accumulate, compare, export3d, serve.
Exit codes: 0 success, 1 validation errors, 2 usage errors.  All outputs
are deterministic functions of (inputs, flags).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analyze, colorchart, curves, ingest, render
from .errors import MomentsError
from .model import EQUAL_WEIGHTS, Session, Track, TrackKind, Weights

PROG = "moments"


def _use_color(stream) -> bool:
    if os.environ.get("MOMENTS_NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _print_diagnostics(diags, json_mode: bool) -> None:
    if json_mode:
        print(json.dumps([d.to_dict() for d in diags], indent=2), file=sys.stderr)
        return
    color = _use_color(sys.stderr)
    for d in diags:
        line = d.format()
        if color:
            tint = "\x1b[31m" if d.severity == "error" else "\x1b[33m"
            line = f"{tint}{line}\x1b[0m"
        print(line, file=sys.stderr)


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_output(path: str | None, data) -> None:
    binary = isinstance(data, (bytes, bytearray))
    if path is None or path == "-":
        if binary:
            sys.stdout.buffer.write(data)
        else:
            sys.stdout.write(data)
        return
    p = Path(path)
    if binary:
        p.write_bytes(data)
    else:
        p.write_text(data, encoding="utf-8")


def _load(path: str, args) -> tuple[Session | None, list]:
    mode = ingest.ValidationMode(
        mode="strict" if getattr(args, "strict", False) else "lenient",
        clarity_rule=getattr(args, "clarity_rule", "confusion-only"),
    )
    result = ingest.parse_session(_read_input(path), mode)
    return result.session, result.diagnostics


def _weights(args) -> Weights:
    raw = getattr(args, "weights", None)
    if raw is None:
        return EQUAL_WEIGHTS
    parts = raw.split(",")
    if len(parts) != 3:
        raise MomentsError(f"--weights needs three comma-separated numbers, got {raw!r}")
    return Weights(*(float(p) for p in parts))


def _find_track(session: Session, subject: str, kind: str | None) -> Track:
    track = session.track(subject, TrackKind(kind) if kind else None)
    if track is None:
        raise MomentsError(f"no track for subject {subject!r} in session")
    if len(track) == 0:
        raise MomentsError(f"track {subject!r} has no moments")
    return track


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strict", action="store_true", help="strict validation mode")
    p.add_argument(
        "--clarity-rule",
        choices=["confusion-only", "free"],
        default="confusion-only",
        dest="clarity_rule",
        help="story clarity recording rule (default: confusion-only)",
    )
    p.add_argument(
        "--json-diagnostics",
        action="store_true",
        dest="json_diagnostics",
        help="emit diagnostics as JSON on stderr",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG, description="Storytelling-moment analysis toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a session document")
    p.add_argument("input", help="session JSON path, or - for stdin")
    _add_common(p)

    p = sub.add_parser("plot", help="render curve plots as SVG")
    p.add_argument("input")
    p.add_argument("--track", required=True, help="subject to plot")
    p.add_argument("--kind", choices=["discourse", "story"], default=None)
    p.add_argument("--accumulated", action="store_true", help="plot F instead of f")
    p.add_argument("--combined", action="store_true", help="plot the combined curve too")
    p.add_argument("--weights", default=None, help="a0,a1,a2 (default 1/3 each)")
    p.add_argument("--degree", type=int, default=None, help="B-spline smoothing degree")
    p.add_argument("--step", type=float, default=1.0, help="grid step in seconds (default 1.0)")
    p.add_argument("--out", default=None, help="output SVG path (default stdout)")
    _add_common(p)

    p = sub.add_parser("strip", help="render color-chart strips as PPM/PNG")
    p.add_argument("input")
    p.add_argument("--track", action="append", default=None, help="subject(s); default all")
    p.add_argument(
        "--mode",
        choices=list(colorchart.STRIP_MODES),
        default="instant",
    )
    p.add_argument("--grayscale", action="store_true", help="single-channel output")
    p.add_argument("--weights", default=None)
    p.add_argument(
        "--seconds-per-pixel",
        type=float,
        default=colorchart.DEFAULT_SECONDS_PER_PIXEL,
        dest="seconds_per_pixel",
    )
    p.add_argument("--row-height", type=int, default=colorchart.DEFAULT_ROW_HEIGHT, dest="row_height")
    p.add_argument("--out", default=None, help=".ppm or .png output path")
    p.add_argument("--metadata-out", default=None, dest="metadata_out", help="JSON sidecar path")
    _add_common(p)

    p = sub.add_parser("accumulate", help="export accumulated tracks")
    p.add_argument("input")
    p.add_argument("--out", default=None)
    _add_common(p)

    p = sub.add_parser("compare", help="compare tracks across sessions")
    p.add_argument("inputs", nargs="+", help="session JSON paths")
    p.add_argument("--track", action="append", default=None, help="restrict to subject(s)")
    p.add_argument("--offset", type=float, default=1.5, help="shared first-moment minute (default 1.5)")
    p.add_argument("--weights", default=None)
    p.add_argument("--step", type=float, default=30.0, help="grid step in seconds (default 30)")
    p.add_argument("--json", action="store_true", dest="json_out", help="emit JSON instead of a table")
    p.add_argument("--out", default=None)
    _add_common(p)

    p = sub.add_parser("export3d", help="export the 3D parametric curve as CSV")
    p.add_argument("input")
    p.add_argument("--track", required=True)
    p.add_argument("--kind", choices=["discourse", "story"], default=None)
    p.add_argument("--accumulated", action="store_true")
    p.add_argument("--step", type=float, default=60.0, help="grid step in seconds (default 60)")
    p.add_argument("--out", default=None)
    _add_common(p)

    p = sub.add_parser("serve", help="run the live annotation server")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--data-dir", default=None, dest="data_dir", help="journal directory")
    p.add_argument("--ui-dir", default=None, dest="ui_dir", help="static web console directory")

    return parser


def _cmd_validate(args) -> int:
    session, diags = _load(args.input, args)
    _print_diagnostics(diags, args.json_diagnostics)
    errors = [d for d in diags if d.severity == "error"]
    warnings = [d for d in diags if d.severity == "warning"]
    print(f"{len(errors)} errors, {len(warnings)} warnings")
    return 0 if session is not None else 1


def _cmd_plot(args) -> int:
    session, diags = _load(args.input, args)
    _print_diagnostics(diags, args.json_diagnostics)
    if session is None:
        return 1
    track = _find_track(session, args.track, args.kind)
    w = _weights(args)

    if args.degree is not None:
        selector = "smoothed-accumulated" if args.accumulated else "smoothed"
        axis_series = curves.sample(
            selector, track, degree=args.degree, step_seconds=args.step
        )
    else:
        selector = "accumulated" if args.accumulated else "instant"
        axis_series = curves.sample(selector, track, step_seconds=args.step)

    axes = track.axes()
    plotted = [
        render.PlotSeries(axis_series, f"axis{i}", axes[i].name) for i in range(3)
    ]
    if args.combined:
        csel = "accumulated-combined" if args.accumulated else "combined"
        combined = curves.sample(csel, track, w=w, step_seconds=args.step)
        plotted.append(render.PlotSeries(combined, "combined", "combined"))

    value_range = None if args.accumulated else (-1.0, 1.0)
    spec = render.PlotSpec(
        series=tuple(plotted),
        title=f"{session.title}: {track.subject}"
        + (" (accumulated)" if args.accumulated else ""),
        value_range=value_range,
    )
    _write_output(args.out, render.plot_curves(spec))
    return 0


def _cmd_strip(args) -> int:
    session, diags = _load(args.input, args)
    _print_diagnostics(diags, args.json_diagnostics)
    if session is None:
        return 1
    if args.track:
        tracks = [_find_track(session, s, None) for s in args.track]
    else:
        tracks = [tr for tr in session.tracks if len(tr) > 0]
        if not tracks:
            raise MomentsError("session has no nonempty tracks")
    if args.grayscale:
        image = colorchart.render_grayscale_strip(
            tracks,
            _weights(args),
            mode=args.mode,
            seconds_per_pixel=args.seconds_per_pixel,
            row_height=args.row_height,
        )
    else:
        image = colorchart.render_strip(
            tracks,
            mode=args.mode,
            seconds_per_pixel=args.seconds_per_pixel,
            row_height=args.row_height,
        )
    if args.out and args.out.endswith(".png"):
        _write_output(args.out, image.to_png())
    else:
        _write_output(args.out, image.to_ppm())
    if args.metadata_out:
        _write_output(args.metadata_out, image.metadata_json())
    return 0


def _cmd_accumulate(args) -> int:
    session, diags = _load(args.input, args)
    _print_diagnostics(diags, args.json_diagnostics)
    if session is None:
        return 1
    accs = [curves.accumulate(tr) for tr in session.tracks if len(tr) > 0]
    _write_output(args.out, ingest.write_accumulated(session.title, accs))
    return 0


def _cmd_compare(args) -> int:
    tracks: list[Track] = []
    labels: list[str] = []
    any_error = False
    for path in args.inputs:
        session, diags = _load(path, args)
        _print_diagnostics(diags, args.json_diagnostics)
        if session is None:
            any_error = True
            continue
        for tr in session.tracks:
            if len(tr) == 0:
                continue
            if args.track and tr.subject not in args.track:
                continue
            tracks.append(tr)
            label = tr.subject
            if len(args.inputs) > 1:
                label = f"{session.title}: {tr.subject}"
            labels.append(label)
    if any_error:
        return 1
    if len(tracks) < 2:
        raise MomentsError("compare needs at least two nonempty tracks")
    report = analyze.compare(
        tracks,
        _weights(args),
        offset_minutes=args.offset,
        step_seconds=args.step,
        labels=labels,
    )
    if args.json_out:
        _write_output(args.out, json.dumps(report.to_dict(), indent=2) + "\n")
    else:
        _write_output(args.out, _format_report(report))
    return 0


def _format_report(report) -> str:
    lines = [
        f"comparison window: {report.window[0]:g} to {report.window[1]:g} min "
        f"(offset {report.offset_minutes:g})",
        "",
        f"{'rank':<5}{'subject':<40}{'final F-bar':>14}{'area':>14}",
    ]
    for i, s in enumerate(report.ranking, start=1):
        lines.append(
            f"{i:<5}{s:<40}{report.final_values[s]:>14.4f}{report.areas[s]:>14.4f}"
        )
    lines.append("")
    lines.append("pairwise similarity (Pearson over shared window):")
    header = " " * 40 + "".join(f"{s[:12]:>14}" for s in report.subjects)
    lines.append(header)
    for a, row in zip(report.subjects, report.similarity):
        lines.append(f"{a:<40}" + "".join(f"{v:>14.4f}" for v in row))
    return "\n".join(lines) + "\n"


def _cmd_export3d(args) -> int:
    session, diags = _load(args.input, args)
    _print_diagnostics(diags, args.json_diagnostics)
    if session is None:
        return 1
    track = _find_track(session, args.track, args.kind)
    source = curves.accumulate(track) if args.accumulated else track
    _write_output(args.out, render.export_curve3d(source, step_seconds=args.step))
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    serve(args.port, data_dir=args.data_dir, ui_dir=args.ui_dir)
    return 0


COMMANDS = {
    "validate": _cmd_validate,
    "plot": _cmd_plot,
    "strip": _cmd_strip,
    "accumulate": _cmd_accumulate,
    "compare": _cmd_compare,
    "export3d": _cmd_export3d,
    "serve": _cmd_serve,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except MomentsError as exc:
        diag = ingest.Diagnostic("error", exc.code, exc.message, exc.location)
        _print_diagnostics([diag], getattr(args, "json_diagnostics", False))
        return 1
    except FileNotFoundError as exc:
        print(f"error[IO]: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
