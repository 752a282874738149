from __future__ import annotations

import math
import sys
from pathlib import Path

import pytest

from epistom.elot import parse_elot
from epistom.translator import (
    BackendError,
    ExternalBackend,
    FixtureBackend,
    LookupFailedError,
    MalformedResponseError,
    NoValidCandidateError,
    backend_from_spec,
    fixture_backend,
    load_corpus,
    translate,
    validate,
)

MOCK = [sys.executable, str(Path(__file__).with_name("mock_translator.py"))]
GOOD = "believes(player, formula(empty(box3)))"


@pytest.fixture
def external():
    with ExternalBackend(MOCK, timeout=5.0) as backend:
        yield backend


def test_fixture_corpus_translates_every_sentence():
    corpus = load_corpus()
    backend = fixture_backend()
    for sentence, cands in corpus.items():
        out = translate(sentence, backend)
        assert math.isclose(sum(c.weight for c in out), 1.0)
        assert {c.text for c in out} <= {text for text, _ in cands}


def test_fixture_multiple_candidates_ranked():
    out = translate("The player initially expected to find a key in box 3.", fixture_backend())
    assert len(out) == 2
    assert out[0].weight > out[1].weight
    assert out[0].weight == pytest.approx(0.677, abs=1e-3)


def test_fixture_lookup_failure():
    with pytest.raises(LookupFailedError, match="external backend"):
        translate("a sentence nobody wrote down", fixture_backend())
    with pytest.raises(KeyError):
        fixture_backend({"x": GOOD}).propose("y", 1)


def test_fixture_plain_mapping_and_n():
    backend = fixture_backend({"s": GOOD})
    assert translate("s", backend)[0].formula == parse_elot(GOOD)
    many = FixtureBackend({"s": [(GOOD, 0.1), ("believes(player, formula(empty(box1)))", 0.9)]})
    assert [c.weight for c in translate("s", many, n=1)] == [1.0]
    with pytest.raises(ValueError):
        translate("s", backend, n=0)


def test_validate():
    assert validate(GOOD) == parse_elot(GOOD)
    assert validate("believes(player, empty(box3))") is None
    assert validate("believes(player") is None


def test_external_single(external):
    out = translate("anything", external)
    assert [(c.text, c.weight) for c in out] == [(GOOD, 1.0)]


def test_external_merges_drops_and_renormalizes(external):
    out = translate("two options", external)
    assert [c.text for c in out] == [GOOD, "believes(player, formula(empty(box2)))"]
    assert [c.weight for c in out] == pytest.approx([0.8, 0.2])


def test_external_no_valid_candidate(external):
    with pytest.raises(NoValidCandidateError):
        translate("untyped", external)
    # the process survives a request with nothing usable
    assert translate("again", external)[0].weight == 1.0


def test_external_bad_weight(external):
    with pytest.raises(MalformedResponseError):
        translate("negative", external)


def test_external_malformed_then_recovers(external):
    with pytest.raises(MalformedResponseError):
        translate("garbage", external)
    assert translate("fine", external)[0].text == GOOD


def test_external_exit_then_restart(external):
    with pytest.raises(BackendError, match="exited"):
        translate("die", external)
    assert translate("fine", external)[0].text == GOOD


def test_external_timeout():
    with ExternalBackend(MOCK, timeout=0.5) as backend:
        with pytest.raises(BackendError, match="timed out"):
            translate("slow", backend)


def test_external_rejects_tabs(external):
    with pytest.raises(ValueError):
        external.propose("a\tb", 1)


def test_missing_executable():
    with pytest.raises(BackendError, match="cannot start"):
        ExternalBackend(["/nonexistent/translator"]).propose("x", 1)


def test_backend_from_spec(tmp_path):
    assert isinstance(backend_from_spec("fixture"), FixtureBackend)
    corpus = tmp_path / "c.tsv"
    corpus.write_text(f"hello\t{GOOD}\n")
    assert translate("hello", backend_from_spec("fixture", corpus))[0].text == GOOD
    ext = backend_from_spec("external:" + " ".join(MOCK))
    assert isinstance(ext, ExternalBackend)
    ext.close()
    for bad in ("external:", "llm", ""):
        with pytest.raises(ValueError):
            backend_from_spec(bad)
