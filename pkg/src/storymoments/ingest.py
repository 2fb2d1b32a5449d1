"""Session document parsing, validation, and canonical serialization.

The session format is UTF-8 JSON:

    {
      "schema_version": "1",
      "film": {"title": "...", "runtime_minutes": 94},
      "analyst": "...",
      "tracks": [
        {"subject": "Marion", "kind": "discourse",
         "axes": ["concern", "endearment", "justice"],
         "moments": [{"t": 1.5, "v": [0.2, 0.0, 0.0], "note": "..."}]}
      ]
    }

Accumulated exports carry `"accumulated": true` and are rejected here so
prefix sums can never be accumulated twice by accident.

Validation never throws for document-level problems; it returns a
deterministic list of diagnostics, and the session is rejected iff any of
them is an error.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import MomentsError
from .model import (
    MomentVector,
    Session,
    TimedMoment,
    Track,
    TrackKind,
    axis_names,
)

SUPPORTED_SCHEMA_VERSIONS = ("1",)

CSV_HEADER = ["t_minutes", "axis0", "axis1", "axis2"]


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    location: Optional[dict] = None

    def to_dict(self) -> dict:
        d = {"severity": self.severity, "code": self.code, "message": self.message}
        if self.location:
            d["location"] = self.location
        return d

    def format(self) -> str:
        loc = ""
        if self.location:
            loc = " (" + ", ".join(f"{k}={v}" for k, v in self.location.items()) + ")"
        return f"{self.severity}[{self.code}]: {self.message}{loc}"


@dataclass(frozen=True)
class ValidationMode:
    mode: str = "lenient"  # "strict" | "lenient"
    clarity_rule: str = "confusion-only"  # "confusion-only" | "free"


@dataclass
class ParseResult:
    session: Optional[Session]
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.session is not None

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]


def _err(code: str, message: str, location: dict | None = None) -> Diagnostic:
    return Diagnostic("error", code, message, location)


def _warn(code: str, message: str, location: dict | None = None) -> Diagnostic:
    return Diagnostic("warning", code, message, location)


def _check_number(value, label: str, location: dict, diags: list[Diagnostic]) -> Optional[float]:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        diags.append(_err("Syntax", f"{label} must be a number, got {value!r}", location))
        return None
    value = float(value)
    if not math.isfinite(value):
        diags.append(_err("NotFinite", f"{label} is not finite", location))
        return None
    return value


def parse_session(document: str, mode: ValidationMode = ValidationMode()) -> ParseResult:
    """Parse and validate a session document.

    Returns the Session plus diagnostics; the session is None when any
    error diagnostic was produced.
    """
    diags: list[Diagnostic] = []
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        diags.append(
            _err("Syntax", f"invalid JSON: {exc.msg}", {"line": exc.lineno, "column": exc.colno})
        )
        return ParseResult(None, diags)

    if not isinstance(data, dict):
        diags.append(_err("Syntax", "top level must be a JSON object"))
        return ParseResult(None, diags)

    if data.get("accumulated") is True:
        diags.append(
            _err(
                "AccumulatedDocument",
                "document holds accumulated values and cannot be re-ingested "
                "as a session (re-accumulation would double-count)",
            )
        )
        return ParseResult(None, diags)

    version = data.get("schema_version")
    if version not in SUPPORTED_SCHEMA_VERSIONS:
        diags.append(
            _err(
                "SchemaVersionUnsupported",
                f"schema_version {version!r} not in {SUPPORTED_SCHEMA_VERSIONS}",
            )
        )
        return ParseResult(None, diags)

    film = data.get("film")
    if not isinstance(film, dict) or not isinstance(film.get("title"), str):
        diags.append(_err("Syntax", "film.title (string) is required"))
        return ParseResult(None, diags)
    title = film["title"]

    runtime = None
    if "runtime_minutes" in film and film["runtime_minutes"] is not None:
        runtime = _check_number(film["runtime_minutes"], "film.runtime_minutes", {}, diags)
        if runtime is not None and runtime <= 0:
            diags.append(_err("OutOfRange", f"runtime_minutes must be positive, got {runtime!r}"))
            runtime = None

    analyst = data.get("analyst")
    if analyst is not None and not isinstance(analyst, str):
        diags.append(_err("Syntax", "analyst must be a string"))
        analyst = None

    raw_tracks = data.get("tracks", [])
    if not isinstance(raw_tracks, list):
        diags.append(_err("Syntax", "tracks must be an array"))
        raw_tracks = []

    tracks: list[Track] = []
    seen: set[tuple[str, str]] = set()
    for ti, raw in enumerate(raw_tracks):
        track = _parse_track(raw, ti, mode, diags)
        if track is None:
            continue
        key = (track.subject, track.kind.value)
        if key in seen:
            diags.append(
                _err(
                    "DuplicateSubject",
                    f"duplicate track for subject {track.subject!r} ({track.kind.value})",
                    {"subject": track.subject, "track": ti},
                )
            )
            continue
        seen.add(key)
        if runtime is not None:
            for mi, tm in enumerate(track.moments):
                if tm.t > runtime:
                    diags.append(
                        _err(
                            "OutOfRange",
                            f"timestamp {tm.t!r} exceeds runtime {runtime!r} minutes",
                            {"subject": track.subject, "moment": mi},
                        )
                    )
        tracks.append(track)

    if any(d.severity == "error" for d in diags):
        return ParseResult(None, diags)

    session = Session(
        title=title,
        tracks=tuple(tracks),
        runtime_minutes=runtime,
        analyst=analyst,
        created=data.get("created"),
        modified=data.get("modified"),
        schema_version=version,
    )
    return ParseResult(session, diags)


def _parse_track(raw, index: int, mode: ValidationMode, diags: list[Diagnostic]) -> Optional[Track]:
    loc = {"track": index}
    if not isinstance(raw, dict):
        diags.append(_err("Syntax", "track must be an object", loc))
        return None
    subject = raw.get("subject")
    if not isinstance(subject, str) or not subject:
        diags.append(_err("Syntax", "track.subject (non-empty string) is required", loc))
        return None
    loc = {"subject": subject}
    kind_raw = raw.get("kind")
    try:
        kind = TrackKind(kind_raw)
    except ValueError:
        diags.append(_err("Syntax", f"track.kind must be 'discourse' or 'story', got {kind_raw!r}", loc))
        return None
    if (subject == "story") != (kind is TrackKind.STORY):
        diags.append(
            _err(
                "SubjectKindMismatch",
                f"kind {kind.value!r} requires subject 'story' exactly; got {subject!r}",
                loc,
            )
        )
        return None
    expected_axes = axis_names(kind)
    axes = raw.get("axes")
    if axes != expected_axes:
        diags.append(
            _err("Syntax", f"track.axes must be {expected_axes} for kind {kind.value!r}", loc)
        )
        return None

    raw_moments = raw.get("moments", [])
    if not isinstance(raw_moments, list):
        diags.append(_err("Syntax", "track.moments must be an array", loc))
        return None

    moments: list[TimedMoment] = []
    prev_t: Optional[float] = None
    bad = False
    for mi, rm in enumerate(raw_moments):
        mloc = {"subject": subject, "moment": mi}
        if not isinstance(rm, dict):
            diags.append(_err("Syntax", "moment must be an object", mloc))
            bad = True
            continue
        t = _check_number(rm.get("t"), "moment.t", mloc, diags)
        if t is None:
            bad = True
            continue
        if t < 0:
            diags.append(_err("OutOfRange", f"moment.t must be >= 0, got {t!r}", mloc))
            bad = True
            continue
        if prev_t is not None and not t > prev_t:
            diags.append(
                _err(
                    "NonMonotoneTime",
                    f"timestamps must strictly increase: {prev_t!r} then {t!r}",
                    mloc,
                )
            )
            bad = True
            continue
        prev_t = t
        v = rm.get("v")
        if not isinstance(v, list) or len(v) != 3:
            diags.append(_err("Syntax", "moment.v must be an array of three numbers", mloc))
            bad = True
            continue
        comps = []
        for ci, c in enumerate(v):
            num = _check_number(c, f"moment.v[{ci}]", mloc, diags)
            if num is None:
                bad = True
                break
            if not -1.0 <= num <= 1.0:
                diags.append(_err("OutOfRange", f"moment.v[{ci}] outside [-1, 1]: {num!r}", mloc))
                bad = True
                break
            comps.append(num)
        if len(comps) != 3:
            continue
        note = rm.get("note")
        if note is not None and not isinstance(note, str):
            diags.append(_err("Syntax", "moment.note must be a string", mloc))
            bad = True
            continue
        if (
            kind is TrackKind.STORY
            and mode.clarity_rule == "confusion-only"
            and comps[2] > 0.0
        ):
            severity = "error" if mode.mode == "strict" else "warning"
            diags.append(
                Diagnostic(
                    severity,
                    "ClarityPositive",
                    f"clarity {comps[2]!r} is positive; confusion-only recording "
                    "expects clarity values <= 0",
                    mloc,
                )
            )
            if severity == "error":
                bad = True
                continue
        moments.append(TimedMoment(t, MomentVector(*comps), note))
    if bad:
        return None
    return Track(subject, kind, tuple(moments))


def write_session(session: Session) -> str:
    """Canonical serialization: fixed field order, shortest float repr,
    2-space indent, trailing newline.  A parse/write round trip is the
    identity and write is idempotent."""
    doc: dict = {"schema_version": session.schema_version}
    film: dict = {"title": session.title}
    if session.runtime_minutes is not None:
        film["runtime_minutes"] = session.runtime_minutes
    doc["film"] = film
    if session.analyst is not None:
        doc["analyst"] = session.analyst
    if session.created is not None:
        doc["created"] = session.created
    if session.modified is not None:
        doc["modified"] = session.modified
    doc["tracks"] = []
    for tr in session.tracks:
        rt: dict = {
            "subject": tr.subject,
            "kind": tr.kind.value,
            "axes": axis_names(tr.kind),
            "moments": [],
        }
        for tm in tr.moments:
            rm: dict = {"t": tm.t, "v": [tm.moment.m0, tm.moment.m1, tm.moment.m2]}
            if tm.note is not None:
                rm["note"] = tm.note
            rt["moments"].append(rm)
        doc["tracks"].append(rt)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_session(document: str, mode: ValidationMode = ValidationMode()) -> Session:
    """parse_session that raises on the first error diagnostic."""
    result = parse_session(document, mode)
    if result.session is None:
        first = result.errors()[0]
        err = MomentsError(first.message, first.location)
        err.code = first.code
        raise err
    return result.session


def import_csv_track(
    table: str, subject: str, kind: TrackKind
) -> tuple[Optional[Track], list[Diagnostic]]:
    """Import one track from CSV with header t_minutes,axis0,axis1,axis2
    and an optional trailing note column.  Blank axis cells default to 0
    with a warning."""
    diags: list[Diagnostic] = []
    reader = csv.reader(io.StringIO(table))
    rows = list(reader)
    if not rows:
        diags.append(_err("Syntax", "empty CSV document"))
        return None, diags
    header = [h.strip() for h in rows[0]]
    if header[:4] != CSV_HEADER or (len(header) == 5 and header[4] != "note") or len(header) > 5:
        diags.append(
            _err("Syntax", f"header must be {','.join(CSV_HEADER)}[,note]; got {','.join(header)}")
        )
        return None, diags

    moments: list[TimedMoment] = []
    prev_t: Optional[float] = None
    bad = False
    for li, row in enumerate(rows[1:], start=2):
        loc = {"line": li}
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 4:
            diags.append(_err("Syntax", f"expected at least 4 columns, got {len(row)}", loc))
            bad = True
            continue
        try:
            t = float(row[0])
        except ValueError:
            diags.append(_err("Syntax", f"bad t_minutes value {row[0]!r}", loc))
            bad = True
            continue
        if not math.isfinite(t) or t < 0:
            diags.append(_err("OutOfRange", f"t_minutes must be finite and >= 0, got {row[0]!r}", loc))
            bad = True
            continue
        if prev_t is not None and not t > prev_t:
            diags.append(
                _err("NonMonotoneTime", f"timestamps must strictly increase: {prev_t!r} then {t!r}", loc)
            )
            bad = True
            continue
        prev_t = t
        comps = []
        for ci in range(3):
            cell = row[1 + ci].strip()
            if cell == "":
                diags.append(
                    _warn("BlankCellDefaulted", f"blank axis{ci} cell treated as 0", loc)
                )
                comps.append(0.0)
                continue
            try:
                num = float(cell)
            except ValueError:
                diags.append(_err("Syntax", f"bad axis{ci} value {cell!r}", loc))
                bad = True
                break
            if not math.isfinite(num):
                diags.append(_err("NotFinite", f"axis{ci} is not finite", loc))
                bad = True
                break
            if not -1.0 <= num <= 1.0:
                diags.append(_err("OutOfRange", f"axis{ci} outside [-1, 1]: {num!r}", loc))
                bad = True
                break
            comps.append(num)
        if len(comps) != 3:
            continue
        note = row[4].strip() if len(row) > 4 and row[4].strip() else None
        moments.append(TimedMoment(t, MomentVector(*comps), note))
    if bad:
        return None, diags
    try:
        track = Track(subject, TrackKind(kind), tuple(moments))
    except MomentsError as exc:
        diags.append(_err(exc.code, exc.message, exc.location))
        return None, diags
    return track, diags


# --- accumulated exports -----------------------------------------------------

def write_accumulated(session_title: str, accs, weights=None) -> str:
    """Serialize accumulated tracks as a distinctly-marked document so the
    CLI can refuse to accumulate twice."""
    doc: dict = {
        "schema_version": "1",
        "accumulated": True,
        "film": {"title": session_title},
        "tracks": [
            {
                "subject": acc.subject,
                "kind": acc.kind.value,
                "axes": axis_names(acc.kind),
                "entries": [{"t": t, "M": list(v)} for t, v in acc.entries],
            }
            for acc in accs
        ],
    }
    if weights is not None:
        doc["weights"] = list(weights.as_tuple())
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
