"""Sentence to ELoT translation behind a pluggable backend.

Backends propose ``(formula text, weight)`` pairs. Whatever they return,
``translate`` parses and typechecks each proposal, drops the ones that fail
and renormalizes the rest, so callers only ever see well-typed formulas.

The external protocol is line based. A request is
``TRANSLATE<TAB>n<TAB>sentence`` and the reply is up to ``n`` lines of
``formula<TAB>weight`` followed by an empty line.
"""

from __future__ import annotations

import csv
import math
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol, Sequence

from .elot import DEFAULT_SIGNATURE, DomainSignature, ElotError, Node, TypeTag, parse_elot, print_elot, typecheck

GOLD_CORPUS = Path(__file__).parent / "data" / "gold_translations.tsv"


class TranslationError(RuntimeError):
    pass


class BackendError(TranslationError):
    pass


class MalformedResponseError(BackendError):
    pass


class NoValidCandidateError(TranslationError):
    pass


class LookupFailedError(TranslationError, KeyError):
    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class TranslationCandidate:
    formula: Node
    weight: float

    @property
    def text(self) -> str:
        return print_elot(self.formula)


class TranslatorBackend(Protocol):
    def propose(self, sentence: str, n: int) -> list[tuple[str, float]]: ...


class FixtureBackend:
    """Exact-match lookup in a fixed corpus."""

    def __init__(self, corpus: Mapping[str, Sequence[tuple[str, float]]]):
        self.corpus = {s: list(c) for s, c in corpus.items()}

    def propose(self, sentence: str, n: int) -> list[tuple[str, float]]:
        try:
            found = self.corpus[sentence]
        except KeyError:
            raise LookupFailedError(
                f"sentence not in the fixture corpus: {sentence!r}; use an external backend for new sentences"
            ) from None
        return sorted(found, key=lambda c: -c[1])[:n]


def load_corpus(path: str | Path = GOLD_CORPUS) -> dict[str, list[tuple[str, float]]]:
    """TSV rows ``sentence, elot[, weight]``; repeated sentences give several candidates."""
    corpus: dict[str, list[tuple[str, float]]] = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh, dialect="excel-tab"):
            if not row or row[0].startswith("#"):
                continue
            if len(row) not in (2, 3):
                raise ValueError(f"{path}: expected 2 or 3 columns, got {len(row)}")
            weight = float(row[2]) if len(row) == 3 else 1.0
            corpus.setdefault(row[0], []).append((row[1], weight))
    return corpus


def fixture_backend(corpus: Mapping[str, Sequence[tuple[str, float]] | str] | None = None) -> FixtureBackend:
    """A plain ``sentence -> formula`` mapping is accepted too (weight 1)."""
    if corpus is None:
        return FixtureBackend(load_corpus())
    return FixtureBackend({s: [(c, 1.0)] if isinstance(c, str) else c for s, c in corpus.items()})


def _pump(stream, sink: queue.Queue) -> None:
    try:
        for line in stream:
            sink.put(line)
    except (OSError, ValueError):
        pass
    sink.put(None)


class ExternalBackend:
    """A long-running child process; one request at a time."""

    def __init__(self, command: str | Sequence[str], timeout: float = 30.0):
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.argv:
            raise ValueError("empty backend command")
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()

    def _start(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(self.argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                              text=True, bufsize=1)
            except OSError as exc:
                raise BackendError(f"cannot start backend {self.argv[0]!r}: {exc}") from None
            self._lines = queue.Queue()
            threading.Thread(target=_pump, args=(self._proc.stdout, self._lines), daemon=True).start()
        return self._proc

    def _readline(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            self.close()
            raise BackendError(f"backend timed out after {self.timeout}s") from None
        if line is None:
            code = self._proc.wait()
            self.close()
            raise BackendError(f"backend exited unexpectedly (status {code})")
        return line.rstrip("\n")

    def propose(self, sentence: str, n: int) -> list[tuple[str, float]]:
        if "\t" in sentence or "\n" in sentence:
            raise ValueError("sentence may not contain tabs or newlines")
        proc = self._start()
        try:
            proc.stdin.write(f"TRANSLATE\t{n}\t{sentence}\n")
            proc.stdin.flush()
        except OSError as exc:
            self.close()
            raise BackendError(f"backend write failed: {exc}") from None
        out = []
        while (line := self._readline()) != "":
            parts = line.split("\t")
            try:
                if len(parts) != 2:
                    raise ValueError
                weight = float(parts[1])
            except ValueError:
                self.close()
                raise MalformedResponseError(f"malformed backend line: {line!r}") from None
            out.append((parts[0], weight))
        return out

    def close(self) -> None:
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            proc.stdin.close()
        except OSError:
            pass
        if proc.poll() is None:
            proc.kill()
        proc.wait()

    def __enter__(self) -> ExternalBackend:
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


def external_backend(command: str | Sequence[str], timeout: float = 30.0) -> ExternalBackend:
    return ExternalBackend(command, timeout)


def backend_from_spec(spec: str, corpus: str | Path | None = None) -> TranslatorBackend:
    """``fixture`` or ``external:<command line>``."""
    if spec == "fixture":
        return fixture_backend(load_corpus(corpus) if corpus else None)
    if spec.startswith("external:") and spec[len("external:"):].strip():
        return external_backend(spec[len("external:"):])
    raise ValueError(f"backend must be 'fixture' or 'external:<cmd>', got {spec!r}")


def validate(text: str, signature: DomainSignature = DEFAULT_SIGNATURE) -> Node | None:
    try:
        node = parse_elot(text)
        return node if typecheck(node, signature) is TypeTag.EPISTEMIC else None
    except ElotError:
        return None


def translate(sentence: str, backend: TranslatorBackend, n: int = 5,
              signature: DomainSignature = DEFAULT_SIGNATURE) -> list[TranslationCandidate]:
    """Validated candidates, heaviest first, weights summing to 1."""
    if n < 1:
        raise ValueError("n must be at least 1")
    kept: dict[Node, float] = {}
    for text, weight in backend.propose(sentence, n):
        if not (weight >= 0 and math.isfinite(weight)):
            raise MalformedResponseError(f"bad candidate weight {weight!r}")
        node = validate(text, signature)
        if node is not None:
            kept[node] = kept.get(node, 0.0) + weight
    total = math.fsum(kept.values())
    if not kept or total <= 0:
        raise NoValidCandidateError(f"no well-typed translation for {sentence!r}")
    ranked = sorted(kept.items(), key=lambda kv: -kv[1])
    return [TranslationCandidate(node, w / total) for node, w in ranked]
