import json
import urllib.request

import pytest

import lff

MARY = """Sorts:
  person.
  animal.
  size enum: little, medium, big.
  colour enum: green, white, purple.
  place.
Vocabulary:
  predicate {
    had(person,animal).
    Went(person,place).
    went(animal,place).
    lamb(animal).
  }
  function {
    hue(animal): colour.
    stature(animal): size.
  }
  name Mary: person.
  name hue_of_snow: colour.
Constraints:
  SOME x (had(Mary,x) & stature(x) = little & lamb(x) &
          (hue_of_snow = white -> hue(x) = white) &
          ALL y (Went(Mary,y) -> went(x,y))).
"""

THREE = "Sorts:\n s.\nVocabulary:\n predicate p.\n predicate q.\nConstraints:\n p.\n ~p.\n q.\n"


def test_check():
    assert lff.check(MARY)["kind"] == "ok"
    bad = lff.check("Sorts:\n s.\nVocabulary:\nConstraints:\n q(x).\n")
    assert bad["kind"] == "input-errors"
    assert bad["diagnostics"][0]["severity"] == "error"


def test_solve_mary_singletons():
    out = lff.solve(MARY, maxModels=100, bounds={"lo": 1, "hi": 1})
    assert out["kind"] == "solutions"
    assert len(out["models"]) == 21
    assert out["exhausted"] and not out["unique"]
    assert any(
        m["functions"]["hue"][0]["value"] == "green" and m["names"]["hue_of_snow"] == "purple"
        for m in out["models"]
    )


def test_bad_options():
    with pytest.raises(ValueError):
        lff.solve(MARY, maxModels="many")
    with pytest.raises(ValueError):
        lff.diagnose(THREE, kind="everything")


def test_diagnose():
    mus = lff.diagnose(THREE)
    assert [c["line"] for c in mus["constraints"]] == [7, 8]
    approx = lff.diagnose(THREE, kind="approx")
    assert approx["satisfiedCount"] == 2 and approx["total"] == 3


def test_corpus():
    ids = [p["id"] for p in lff.puzzles(level="Beginner")]
    assert "mary-lamb" in ids
    assert lff.puzzle("logic-games")["level"] == "Advanced"
    with pytest.raises(KeyError):
        lff.puzzle("no-such-puzzle")
    assert all(r["pass"] for r in lff.verify_corpus())


def test_usage_csv(tmp_path):
    log = tmp_path / "usage.jsonl"
    rows = [
        ("2026-05-01T09:00:00.000Z", "s1", "check"),
        ("2026-05-01T09:00:01.500Z", "s1", "solve"),
        ("2026-05-02T10:00:00.000Z", "s2", "solve"),
    ]
    log.write_text(
        "".join(
            json.dumps({"timestamp": t, "sessionId": s, "action": a, "fullText": "",
                        "outcomeKind": "ok", "durationMs": 1}) + "\n"
            for t, s, a in rows
        )
    )
    assert lff.by_day_csv(log) == "date,count\n2026-05-01,2\n2026-05-02,1\n"
    assert lff.intervals_csv(log, "s1").splitlines()[1] == "2026-05-01T09:00:01.500Z,1.500,solve,check"


def test_service(tmp_path):
    svc = lff.Service(log_path=str(tmp_path / "usage.jsonl"), data_dir=str(tmp_path / "data"), pool=1)
    port = svc.start()
    try:
        req = urllib.request.Request(
            f"http://127.0.0.1:{port}/api/solve",
            data=json.dumps({"text": MARY, "options": {"bounds": {"hi": 1}}}).encode(),
            headers={"Content-Type": "application/json"},
        )
        with urllib.request.urlopen(req, timeout=30) as resp:
            body = json.loads(resp.read())
        assert body["kind"] == "solutions"
    finally:
        svc.stop()
    assert lff.by_day_csv(tmp_path / "usage.jsonl").count("\n") == 2
