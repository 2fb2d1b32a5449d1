import json

import pytest

from storymoments.ingest import (
    Diagnostic,
    ValidationMode,
    import_csv_track,
    parse_session,
    write_accumulated,
    write_session,
)
from storymoments.curves import accumulate
from storymoments.model import Session, TrackKind


def minimal_doc(**overrides):
    doc = {
        "schema_version": "1",
        "film": {"title": "Test Film"},
        "tracks": [
            {
                "subject": "Alice",
                "kind": "discourse",
                "axes": ["concern", "endearment", "justice"],
                "moments": [{"t": 1.0, "v": [0.2, 0.0, 0.0]}],
            }
        ],
    }
    doc.update(overrides)
    return doc


class TestParse:
    def test_minimal_valid(self):
        result = parse_session(json.dumps(minimal_doc()))
        assert result.ok
        assert len(result.session.tracks[0]) == 1

    def test_duplicate_timestamps_rejected(self):
        doc = minimal_doc()
        doc["tracks"][0]["moments"] = [
            {"t": 5.0, "v": [0.1, 0, 0]},
            {"t": 5.0, "v": [0.2, 0, 0]},
        ]
        result = parse_session(json.dumps(doc))
        assert not result.ok
        assert result.errors()[0].code == "NonMonotoneTime"

    def test_positive_clarity_warns_in_lenient(self):
        doc = minimal_doc()
        doc["tracks"] = [
            {
                "subject": "story",
                "kind": "story",
                "axes": ["curiosity", "surprise", "clarity"],
                "moments": [{"t": 2.0, "v": [0.0, 0.0, 0.5]}],
            }
        ]
        result = parse_session(json.dumps(doc))
        assert result.ok
        warns = [d for d in result.diagnostics if d.code == "ClarityPositive"]
        assert len(warns) == 1
        assert warns[0].severity == "warning"

    def test_positive_clarity_error_in_strict(self):
        doc = minimal_doc()
        doc["tracks"] = [
            {
                "subject": "story",
                "kind": "story",
                "axes": ["curiosity", "surprise", "clarity"],
                "moments": [{"t": 2.0, "v": [0.0, 0.0, 0.5]}],
            }
        ]
        result = parse_session(json.dumps(doc), ValidationMode(mode="strict"))
        assert not result.ok
        assert result.errors()[0].code == "ClarityPositive"

    def test_positive_clarity_fine_when_free(self):
        doc = minimal_doc()
        doc["tracks"] = [
            {
                "subject": "story",
                "kind": "story",
                "axes": ["curiosity", "surprise", "clarity"],
                "moments": [{"t": 2.0, "v": [0.0, 0.0, 0.5]}],
            }
        ]
        result = parse_session(json.dumps(doc), ValidationMode(clarity_rule="free"))
        assert result.ok
        assert result.diagnostics == []

    def test_coarse_plus_minus_one_coding_is_valid(self):
        doc = minimal_doc()
        doc["tracks"][0]["moments"] = [
            {"t": 1.0, "v": [1, -1, 1]},
            {"t": 2.0, "v": [-1, 1, -1]},
        ]
        assert parse_session(json.dumps(doc)).ok


MALFORMED = [
    ("not json {", "Syntax"),
    ('["top", "level", "array"]', "Syntax"),
    (json.dumps(minimal_doc(schema_version="99")), "SchemaVersionUnsupported"),
    (json.dumps({"schema_version": "1", "tracks": []}), "Syntax"),  # missing film
    (json.dumps(minimal_doc(film={"title": 42})), "Syntax"),
    (json.dumps(minimal_doc(accumulated=True)), "AccumulatedDocument"),
    # bad component range
    (
        json.dumps(
            {
                **minimal_doc(),
                "tracks": [
                    {
                        "subject": "Alice",
                        "kind": "discourse",
                        "axes": ["concern", "endearment", "justice"],
                        "moments": [{"t": 1.0, "v": [1.2, 0, 0]}],
                    }
                ],
            }
        ),
        "OutOfRange",
    ),
    # non-monotone time
    (
        json.dumps(
            {
                **minimal_doc(),
                "tracks": [
                    {
                        "subject": "Alice",
                        "kind": "discourse",
                        "axes": ["concern", "endearment", "justice"],
                        "moments": [
                            {"t": 4.0, "v": [0, 0, 0]},
                            {"t": 3.0, "v": [0, 0, 0]},
                        ],
                    }
                ],
            }
        ),
        "NonMonotoneTime",
    ),
    # duplicate subject
    (
        json.dumps(
            {
                **minimal_doc(),
                "tracks": [
                    {
                        "subject": "Alice",
                        "kind": "discourse",
                        "axes": ["concern", "endearment", "justice"],
                        "moments": [],
                    },
                    {
                        "subject": "Alice",
                        "kind": "discourse",
                        "axes": ["concern", "endearment", "justice"],
                        "moments": [],
                    },
                ],
            }
        ),
        "DuplicateSubject",
    ),
    # story kind with a character subject
    (
        json.dumps(
            {
                **minimal_doc(),
                "tracks": [
                    {
                        "subject": "Alice",
                        "kind": "story",
                        "axes": ["curiosity", "surprise", "clarity"],
                        "moments": [],
                    }
                ],
            }
        ),
        "SubjectKindMismatch",
    ),
    # wrong axes for the kind
    (
        json.dumps(
            {
                **minimal_doc(),
                "tracks": [
                    {
                        "subject": "Alice",
                        "kind": "discourse",
                        "axes": ["curiosity", "surprise", "clarity"],
                        "moments": [],
                    }
                ],
            }
        ),
        "Syntax",
    ),
    # negative timestamp
    (
        json.dumps(
            {
                **minimal_doc(),
                "tracks": [
                    {
                        "subject": "Alice",
                        "kind": "discourse",
                        "axes": ["concern", "endearment", "justice"],
                        "moments": [{"t": -1.0, "v": [0, 0, 0]}],
                    }
                ],
            }
        ),
        "OutOfRange",
    ),
    # v wrong arity
    (
        json.dumps(
            {
                **minimal_doc(),
                "tracks": [
                    {
                        "subject": "Alice",
                        "kind": "discourse",
                        "axes": ["concern", "endearment", "justice"],
                        "moments": [{"t": 1.0, "v": [0, 0]}],
                    }
                ],
            }
        ),
        "Syntax",
    ),
    # t not a number
    (
        json.dumps(
            {
                **minimal_doc(),
                "tracks": [
                    {
                        "subject": "Alice",
                        "kind": "discourse",
                        "axes": ["concern", "endearment", "justice"],
                        "moments": [{"t": "soon", "v": [0, 0, 0]}],
                    }
                ],
            }
        ),
        "Syntax",
    ),
    # timestamp beyond runtime
    (
        json.dumps(
            {
                **minimal_doc(film={"title": "T", "runtime_minutes": 10}),
            }
        ).replace('"t": 1.0', '"t": 11.0'),
        "OutOfRange",
    ),
    # unknown kind
    (
        json.dumps(
            {
                **minimal_doc(),
                "tracks": [
                    {
                        "subject": "Alice",
                        "kind": "poem",
                        "axes": ["concern", "endearment", "justice"],
                        "moments": [],
                    }
                ],
            }
        ),
        "Syntax",
    ),
]


class TestMalformedCorpus:
    @pytest.mark.parametrize("doc,code", MALFORMED, ids=[c for _, c in MALFORMED])
    def test_documented_code(self, doc, code):
        result = parse_session(doc)
        assert not result.ok
        assert any(d.code == code for d in result.errors())

    @pytest.mark.parametrize("doc,code", MALFORMED, ids=[c for _, c in MALFORMED])
    def test_deterministic(self, doc, code):
        a = parse_session(doc).diagnostics
        b = parse_session(doc).diagnostics
        assert a == b


class TestRoundTrip:
    @pytest.mark.parametrize(
        "name", ["lady_bird.json", "psycho.json", "fugitive.json", "solace.json"]
    )
    def test_fixture_round_trip(self, fixtures_dir, name):
        text = (fixtures_dir / name).read_text(encoding="utf-8")
        result = parse_session(text)
        assert result.ok, [d.format() for d in result.errors()]
        written = write_session(result.session)
        assert written == text  # fixtures are stored canonically
        again = parse_session(written)
        assert again.session == result.session
        assert write_session(again.session) == written  # idempotent

    def test_empty_tracks_session(self):
        s = Session(title="Nothing Yet")
        written = write_session(s)
        result = parse_session(written)
        assert result.ok
        assert result.session.tracks == ()

    def test_write_parse_write_fixed_point(self):
        doc = json.dumps(minimal_doc())
        s1 = parse_session(doc).session
        w1 = write_session(s1)
        w2 = write_session(parse_session(w1).session)
        assert w1 == w2


class TestCsvImport:
    def test_two_rows(self):
        table = "t_minutes,axis0,axis1,axis2\n1.0,0.2,0,0\n2.5,0,0.3,-0.1\n"
        track, diags = import_csv_track(table, "Alice", TrackKind.DISCOURSE)
        assert track is not None
        assert len(track) == 2
        assert diags == []

    def test_out_of_range_cell(self):
        table = "t_minutes,axis0,axis1,axis2\n1.0,1.2,0,0\n"
        track, diags = import_csv_track(table, "Alice", TrackKind.DISCOURSE)
        assert track is None
        assert diags[0].code == "OutOfRange"

    def test_blank_cell_defaults_with_warning(self):
        table = "t_minutes,axis0,axis1,axis2\n1.0,,0.3,0\n"
        track, diags = import_csv_track(table, "Alice", TrackKind.DISCOURSE)
        assert track is not None
        assert track.moments[0].moment.as_tuple() == (0.0, 0.3, 0.0)
        assert any(d.code == "BlankCellDefaulted" and d.severity == "warning" for d in diags)

    def test_note_column(self):
        table = "t_minutes,axis0,axis1,axis2,note\n1.0,0.2,0,0,the ticket\n"
        track, _ = import_csv_track(table, "Alice", TrackKind.DISCOURSE)
        assert track.moments[0].note == "the ticket"

    def test_bad_header(self):
        table = "minutes,a,b,c\n1.0,0,0,0\n"
        track, diags = import_csv_track(table, "Alice", TrackKind.DISCOURSE)
        assert track is None
        assert diags[0].code == "Syntax"

    def test_non_monotone(self):
        table = "t_minutes,axis0,axis1,axis2\n2.0,0,0,0\n1.0,0,0,0\n"
        track, diags = import_csv_track(table, "Alice", TrackKind.DISCOURSE)
        assert track is None
        assert diags[0].code == "NonMonotoneTime"


class TestAccumulatedDocument:
    def test_marked_and_rejected(self, fixtures_dir):
        text = (fixtures_dir / "psycho.json").read_text(encoding="utf-8")
        session = parse_session(text).session
        accs = [accumulate(tr) for tr in session.tracks]
        doc = write_accumulated(session.title, accs)
        data = json.loads(doc)
        assert data["accumulated"] is True
        result = parse_session(doc)
        assert not result.ok
        assert result.errors()[0].code == "AccumulatedDocument"
