"""HTTP server for live annotation sessions.

One film = one session.  The server owns the film clock (so every client
sees the same film time), appends moments as the analyst enters them,
and serves computed curves and color strips for live feedback.  Every
mutation bumps a per-session revision; responses for the same revision
are byte-identical.

Sessions journal to append-only JSONL files (one per session) and are
replayed on startup; there is no database.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from . import colorchart, curves, ingest
from .errors import (
    ClockStopped,
    EmptyTrack,
    MomentsError,
    NonMonotoneTime,
    UnknownSession,
    UnknownTrack,
)
from .model import (
    EQUAL_WEIGHTS,
    MomentVector,
    Session,
    TimedMoment,
    Track,
    TrackKind,
    Weights,
)

WallClock = Callable[[], float]  # wall time in seconds

STATUS_BY_CODE = {
    "UnknownSession": 404,
    "UnknownTrack": 404,
    "NonMonotoneTime": 409,
    "ClockStopped": 409,
    "EmptyTrack": 409,
    "OutOfRange": 400,
    "NotFinite": 400,
    "BadWeights": 400,
    "SubjectKindMismatch": 400,
    "DegreeTooHigh": 400,
    "Syntax": 400,
}


@dataclass
class ClockState:
    running: bool = False
    offset_minutes: float = 0.0  # film time at anchor (or frozen when stopped)
    anchor_wall: Optional[float] = None

    def film_minutes(self, now: float) -> float:
        if not self.running:
            return self.offset_minutes
        return self.offset_minutes + (now - self.anchor_wall) / 60.0

    def to_dict(self, now: float) -> dict:
        return {
            "state": "running" if self.running else "stopped",
            "offset_minutes": round(self.film_minutes(now), 3),
        }


@dataclass
class LiveSession:
    id: str
    title: str
    runtime_minutes: Optional[float] = None
    analyst: Optional[str] = None
    tracks: dict = field(default_factory=dict)  # (subject, kind) -> [TimedMoment]
    order: list = field(default_factory=list)
    clock: ClockState = field(default_factory=ClockState)
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def get_track(self, subject: str, kind: TrackKind) -> Track:
        key = (subject, kind)
        if key not in self.tracks:
            raise UnknownTrack(
                f"no track for subject {subject!r} ({kind.value})",
                {"subject": subject},
            )
        return Track(subject, kind, tuple(self.tracks[key]))

    def to_session(self) -> Session:
        return Session(
            title=self.title,
            runtime_minutes=self.runtime_minutes,
            analyst=self.analyst,
            tracks=tuple(
                Track(subject, kind, tuple(self.tracks[(subject, kind)]))
                for subject, kind in self.order
            ),
        )


class SessionStore:
    """All live sessions plus their append-only journals."""

    def __init__(self, data_dir: Optional[Path] = None, clock: Optional[WallClock] = None):
        self.data_dir = Path(data_dir) if data_dir else None
        self.clock: WallClock = clock or time.time
        self.sessions: dict[str, LiveSession] = {}
        self._journal_lock = threading.Lock()
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._replay_all()

    # -- journal ----------------------------------------------------------

    def _journal_path(self, session_id: str) -> Optional[Path]:
        if not self.data_dir:
            return None
        return self.data_dir / f"{session_id}.jsonl"

    def _journal(self, session_id: str, event: dict) -> None:
        path = self._journal_path(session_id)
        if not path:
            return
        with self._journal_lock:
            with path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _replay_all(self) -> None:
        for path in sorted(self.data_dir.glob("*.jsonl")):
            session_id = path.stem
            live = None
            for line in path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                ev = json.loads(line)
                if ev["event"] == "create":
                    live = LiveSession(
                        id=session_id,
                        title=ev["title"],
                        runtime_minutes=ev.get("runtime_minutes"),
                        analyst=ev.get("analyst"),
                    )
                elif live is not None and ev["event"] == "append":
                    self._apply_append(
                        live,
                        ev["subject"],
                        TrackKind(ev["kind"]),
                        ev["t"],
                        ev["v"],
                        ev.get("note"),
                    )
                elif live is not None and ev["event"] == "undo":
                    self._apply_undo(live, ev["subject"], TrackKind(ev["kind"]))
            if live is not None:
                self.sessions[session_id] = live

    # -- state transitions (journal-replayable) ----------------------------

    @staticmethod
    def _apply_append(
        live: LiveSession,
        subject: str,
        kind: TrackKind,
        t: float,
        v: list,
        note: Optional[str],
    ) -> None:
        moment = TimedMoment(t, MomentVector(*v), note)
        key = (subject, kind)
        if key not in live.tracks:
            # validates the subject/kind pairing before the track exists
            Track(subject, kind, ())
            live.tracks[key] = []
            live.order.append(key)
        existing = live.tracks[key]
        if existing and not moment.t > existing[-1].t:
            raise NonMonotoneTime(
                f"timestamp {moment.t!r} is not after {existing[-1].t!r}",
                {"subject": subject},
            )
        if live.runtime_minutes is not None and moment.t > live.runtime_minutes:
            from .errors import OutOfRange

            raise OutOfRange(
                f"timestamp {moment.t!r} exceeds runtime {live.runtime_minutes!r}",
                {"subject": subject},
            )
        existing.append(moment)
        live.revision += 1

    @staticmethod
    def _apply_undo(live: LiveSession, subject: str, kind: TrackKind) -> None:
        key = (subject, kind)
        if key not in live.tracks:
            raise UnknownTrack(
                f"no track for subject {subject!r} ({kind.value})", {"subject": subject}
            )
        if not live.tracks[key]:
            raise EmptyTrack(f"track {subject!r} has no moments to undo", {"subject": subject})
        live.tracks[key].pop()
        live.revision += 1

    # -- public operations --------------------------------------------------

    def create_session(
        self,
        title: str,
        runtime_minutes: Optional[float] = None,
        analyst: Optional[str] = None,
    ) -> LiveSession:
        session_id = uuid.uuid4().hex
        live = LiveSession(
            id=session_id, title=title, runtime_minutes=runtime_minutes, analyst=analyst
        )
        self.sessions[session_id] = live
        self._journal(
            session_id,
            {
                "event": "create",
                "title": title,
                "runtime_minutes": runtime_minutes,
                "analyst": analyst,
            },
        )
        return live

    def get(self, session_id: str) -> LiveSession:
        live = self.sessions.get(session_id)
        if live is None:
            raise UnknownSession(f"no session {session_id!r}")
        return live

    def append_moment(
        self,
        session_id: str,
        subject: str,
        kind: TrackKind,
        values: list,
        t: Optional[float] = None,
        note: Optional[str] = None,
    ) -> tuple[int, float]:
        live = self.get(session_id)
        with live.lock:
            if t is None:
                if not live.clock.running:
                    raise ClockStopped(
                        "no timestamp given and the session clock is stopped"
                    )
                # quantized so exported documents stay canonical
                t = round(live.clock.film_minutes(self.clock()) * 1000.0) / 1000.0
            self._apply_append(live, subject, kind, float(t), values, note)
            self._journal(
                session_id,
                {
                    "event": "append",
                    "subject": subject,
                    "kind": kind.value,
                    "t": float(t),
                    "v": list(values),
                    "note": note,
                },
            )
            return live.revision, float(t)

    def undo_last(self, session_id: str, subject: str, kind: TrackKind) -> int:
        live = self.get(session_id)
        with live.lock:
            self._apply_undo(live, subject, kind)
            self._journal(
                session_id,
                {"event": "undo", "subject": subject, "kind": kind.value},
            )
            return live.revision

    def clock_control(
        self, session_id: str, action: str, offset_minutes: Optional[float] = None
    ) -> dict:
        live = self.get(session_id)
        now = self.clock()
        with live.lock:
            clock = live.clock
            if action == "start":
                if offset_minutes is not None:
                    clock.offset_minutes = float(offset_minutes)
                elif clock.running:
                    clock.offset_minutes = clock.film_minutes(now)
                clock.running = True
                clock.anchor_wall = now
            elif action == "pause":
                clock.offset_minutes = clock.film_minutes(now)
                clock.running = False
                clock.anchor_wall = None
            elif action == "seek":
                if offset_minutes is None:
                    raise MomentsError("seek requires offset_minutes")
                clock.offset_minutes = float(offset_minutes)
                if clock.running:
                    clock.anchor_wall = now
            else:
                raise MomentsError(f"unknown clock action {action!r}")
            return clock.to_dict(now)


def _error_response(exc: MomentsError) -> JSONResponse:
    status = STATUS_BY_CODE.get(exc.code, 400)
    return JSONResponse(status_code=status, content=exc.to_dict())


def _parse_weights(raw: Optional[str]) -> Weights:
    if raw is None:
        return EQUAL_WEIGHTS
    parts = [float(p) for p in raw.split(",")]
    if len(parts) != 3:
        raise MomentsError(f"weights must be three comma-separated numbers, got {raw!r}")
    return Weights(*parts)


def create_app(
    data_dir: Optional[str] = None,
    clock: Optional[WallClock] = None,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="storymoments", version="0.1.0")
    store = SessionStore(Path(data_dir) if data_dir else None, clock)
    app.state.store = store

    @app.exception_handler(MomentsError)
    async def moments_error_handler(request: Request, exc: MomentsError):
        return _error_response(exc)

    @app.post("/sessions")
    async def create_session(body: dict):
        title = body.get("title")
        if not isinstance(title, str) or not title:
            raise MomentsError("title (non-empty string) is required")
        live = store.create_session(
            title, body.get("runtime_minutes"), body.get("analyst")
        )
        return {"id": live.id, "revision": live.revision}

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        live = store.get(session_id)
        return {
            "id": live.id,
            "revision": live.revision,
            "clock": live.clock.to_dict(store.clock()),
            "session": json.loads(
                ingest.write_session(live.to_session())
            ),
        }

    @app.post("/sessions/{session_id}/clock")
    async def clock_control(session_id: str, body: dict):
        state = store.clock_control(
            session_id, body.get("action"), body.get("offset_minutes")
        )
        live = store.get(session_id)
        return {"revision": live.revision, "clock": state}

    @app.post("/sessions/{session_id}/moments")
    async def append_moment(session_id: str, body: dict):
        subject = body.get("subject")
        if not isinstance(subject, str) or not subject:
            raise MomentsError("subject (non-empty string) is required")
        try:
            kind = TrackKind(body.get("kind"))
        except ValueError:
            raise MomentsError(f"kind must be 'discourse' or 'story', got {body.get('kind')!r}")
        values = body.get("values")
        if not isinstance(values, list) or len(values) != 3:
            raise MomentsError("values must be an array of three numbers")
        revision, t = store.append_moment(
            session_id, subject, kind, values, body.get("t"), body.get("note")
        )
        return {"revision": revision, "t": t}

    @app.delete("/sessions/{session_id}/moments/last")
    async def undo_last(
        session_id: str,
        subject: str = Query(...),
        kind: str = Query("discourse"),
    ):
        revision = store.undo_last(session_id, subject, TrackKind(kind))
        return {"revision": revision}

    @app.get("/sessions/{session_id}/curves")
    async def get_curves(
        session_id: str,
        subject: str = Query(...),
        kind: str = Query("discourse"),
        fn: str = Query("instant"),
        step: float = Query(curves.DEFAULT_STEP_SECONDS),
        weights: Optional[str] = Query(None),
        degree: Optional[int] = Query(None),
    ):
        live = store.get(session_id)
        with live.lock:
            track = live.get_track(subject, TrackKind(kind))
            revision = live.revision
        w = _parse_weights(weights) if "combined" in fn else None
        series = curves.sample(fn, track, w=w, degree=degree, step_seconds=step)
        payload = {
            "revision": revision,
            "subject": subject,
            "times": list(series.times),
            "values": [
                list(v) if isinstance(v, tuple) else v for v in series.values
            ],
            "provenance": series.provenance,
        }
        # fixed serialization so equal revisions yield equal bytes
        return Response(
            content=json.dumps(payload, ensure_ascii=False, sort_keys=True),
            media_type="application/json",
        )

    @app.get("/sessions/{session_id}/strip")
    async def get_strip(
        session_id: str,
        subject: str = Query(...),
        kind: str = Query("discourse"),
        mode: str = Query("instant"),
        format: str = Query("ppm"),
        seconds_per_pixel: float = Query(colorchart.DEFAULT_SECONDS_PER_PIXEL),
        row_height: int = Query(colorchart.DEFAULT_ROW_HEIGHT),
    ):
        live = store.get(session_id)
        with live.lock:
            track = live.get_track(subject, TrackKind(kind))
            revision = live.revision
        image = colorchart.render_strip(
            track, mode=mode, seconds_per_pixel=seconds_per_pixel, row_height=row_height
        )
        if format == "png":
            data, media = image.to_png(), "image/png"
        else:
            data, media = image.to_ppm(), "image/x-portable-pixmap"
        return Response(
            content=data, media_type=media, headers={"X-Revision": str(revision)}
        )

    @app.get("/sessions/{session_id}/export")
    async def export_session(session_id: str):
        live = store.get(session_id)
        with live.lock:
            doc = ingest.write_session(live.to_session())
        return PlainTextResponse(content=doc, media_type="application/json")

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(port: int, data_dir: Optional[str] = None, ui_dir: Optional[str] = None) -> None:
    import uvicorn

    app = create_app(data_dir=data_dir, ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=port)
