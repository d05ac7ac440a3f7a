"""Wire protocol client for process-hosted black-box samplers.

Transport is newline-delimited JSON over the child's stdin/stdout, one
document per LF-terminated UTF-8 line.  The child's first line is the
handshake ``{"hello": {"k": <int>, "vocab_size": <int>}}``; afterwards the
client sends ``{"id": <int>, "context": [<int>...], "num_samples": <int>,
"seed": <int>}`` and expects ``{"id": <int>, "samples": [[<int>...], ...]}``
with the matching id, ``num_samples`` rows, exactly ``k`` token ids per row,
each in ``[0, vocab_size)``.  Unknown fields are ignored.  Requests are
strictly sequential: one outstanding request per child, so ids never
interleave.

Set ``LFREE_PROTO_TRACE=1`` to mirror every protocol line to stderr.
"""

from __future__ import annotations

import json
import os
import queue
import shlex
import subprocess
import sys
import threading
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Outcome, SamplerSource, SeedLike, make_rng

__all__ = [
    "ProtocolError",
    "SamplerLaunchError",
    "HandshakeError",
    "MalformedResponse",
    "IdMismatch",
    "TokenRangeViolation",
    "ChunkLengthViolation",
    "RemoteError",
    "Handshake",
    "ExternalSampler",
    "spawn_external_sampler",
    "RoundtripReport",
    "roundtrip_check",
]


class ProtocolError(RuntimeError):
    """Base class for every external-sampler failure."""


class SamplerLaunchError(ProtocolError):
    """Child process could not be started."""


class HandshakeError(ProtocolError):
    """No valid handshake line within the timeout."""


class MalformedResponse(ProtocolError):
    """Response line is not valid JSON or lacks the required shape."""


class IdMismatch(ProtocolError):
    """Response id does not match the outstanding request id."""


class TokenRangeViolation(ProtocolError):
    """A sampled token id falls outside [0, vocab_size)."""


class ChunkLengthViolation(ProtocolError):
    """A sampled chunk does not have exactly k tokens."""


class RemoteError(ProtocolError):
    """Child answered with an error document instead of samples."""


@dataclass(frozen=True)
class Handshake:
    k: int
    vocab_size: int

    def __post_init__(self):
        if self.k < 1:
            raise HandshakeError(f"handshake k must be >= 1, got {self.k}")
        if self.vocab_size < 2:
            raise HandshakeError(f"handshake vocab_size must be >= 2, got {self.vocab_size}")


def _trace_enabled() -> bool:
    return os.environ.get("LFREE_PROTO_TRACE", "") == "1"


class _LineReader:
    """Background reader so blocking pipe reads can honor timeouts."""

    def __init__(self, stream):
        self._queue: queue.Queue = queue.Queue()
        self._thread = threading.Thread(target=self._pump, args=(stream,), daemon=True)
        self._thread.start()

    def _pump(self, stream):
        try:
            for line in stream:
                self._queue.put(line)
        except ValueError:
            pass  # stream closed under us
        self._queue.put(None)  # EOF marker

    def readline(self, timeout: float) -> str | None:
        try:
            return self._queue.get(timeout=timeout)
        except queue.Empty:
            raise TimeoutError


class ExternalSampler(SamplerSource):
    """SamplerSource backed by a child process speaking the wire protocol.

    Not shareable across threads (the protocol is strictly sequential); use
    one handle per child.  Closing (or garbage collection) terminates the
    child.
    """

    kind = "external"

    def __init__(self, command: str, args: Sequence[str] = (),
                 handshake_timeout: float = 30.0, request_timeout: float = 30.0):
        argv = [command, *args]
        try:
            self._proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1, encoding="utf-8")
        except OSError as exc:
            raise SamplerLaunchError(f"cannot launch {argv!r}: {exc}") from exc
        self._reader = _LineReader(self._proc.stdout)
        self._next_id = 0
        self._request_timeout = request_timeout
        self._trace = _trace_enabled()
        self.handshake = self._read_handshake(handshake_timeout)

    # -- framing -----------------------------------------------------------

    def _read_line(self, timeout: float, phase: str) -> str:
        err_cls = HandshakeError if phase == "handshake" else MalformedResponse
        try:
            line = self._reader.readline(timeout)
        except TimeoutError:
            raise err_cls(f"{phase}: no line within {timeout}s") from None
        if line is None:
            raise err_cls(f"{phase}: child closed its output")
        if self._trace:
            sys.stderr.write(f"[lfree.extproto <-] {line}")
        return line

    def _write_line(self, doc: dict) -> None:
        line = json.dumps(doc) + "\n"
        if self._trace:
            sys.stderr.write(f"[lfree.extproto ->] {line}")
        try:
            self._proc.stdin.write(line)
            self._proc.stdin.flush()
        except (BrokenPipeError, ValueError) as exc:
            raise MalformedResponse(f"child pipe closed while writing: {exc}") from exc

    def _read_handshake(self, timeout: float) -> Handshake:
        line = self._read_line(timeout, "handshake")
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise HandshakeError(f"handshake line is not JSON: {line!r}") from exc
        hello = doc.get("hello") if isinstance(doc, dict) else None
        if not isinstance(hello, dict) or "k" not in hello or "vocab_size" not in hello:
            raise HandshakeError(f"invalid handshake document: {line!r}")
        return Handshake(k=int(hello["k"]), vocab_size=int(hello["vocab_size"]))

    # -- protocol ----------------------------------------------------------

    def request(self, context: Sequence[int], num_samples: int, seed: int) -> list[Outcome]:
        """One raw wire request; validates every response invariant."""
        if num_samples < 1:
            raise ValueError("num_samples must be >= 1")
        req_id = self._next_id
        self._next_id += 1
        self._write_line({"id": req_id, "context": [int(t) for t in context],
                          "num_samples": int(num_samples), "seed": int(seed)})
        line = self._read_line(self._request_timeout, "response")
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedResponse(f"response is not valid JSON: {line!r}") from exc
        if not isinstance(doc, dict):
            raise MalformedResponse(f"response is not an object: {line!r}")
        if "error" in doc:
            raise RemoteError(f"child reported error: {doc['error']!r}")
        if doc.get("id") != req_id:
            raise IdMismatch(f"protocol id mismatch: sent {req_id}, got {doc.get('id')!r}")
        samples = doc.get("samples")
        if not isinstance(samples, list) or len(samples) != num_samples:
            raise MalformedResponse(
                f"expected {num_samples} samples, got {samples!r}")
        out: list[Outcome] = []
        k, vocab = self.handshake.k, self.handshake.vocab_size
        for row in samples:
            if not isinstance(row, list) or len(row) != k:
                raise ChunkLengthViolation(
                    f"chunk length {len(row) if isinstance(row, list) else 'n/a'} != k={k}")
            toks = tuple(int(t) for t in row)
            if any(t < 0 or t >= vocab for t in toks):
                raise TokenRangeViolation(f"token id outside [0, {vocab}): {toks}")
            out.append(toks)
        return out

    def draw_with_rng(self, context: Sequence[int], count: int,
                      rng: np.random.Generator) -> list[Outcome]:
        # One 53-bit seed per request, consumed from the caller's stream
        # (53 bits keeps the value exact in any IEEE-double JSON parser).
        seed = int(rng.integers(0, 2**53))
        return self.request(context, count, seed)

    # -- lifecycle ---------------------------------------------------------

    def close(self) -> None:
        proc = getattr(self, "_proc", None)
        if proc is None or proc.poll() is not None:
            return
        try:
            proc.stdin.close()
        except (BrokenPipeError, OSError, ValueError):
            pass
        try:
            proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()

    def __enter__(self) -> "ExternalSampler":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


def spawn_external_sampler(command: str, args: Sequence[str] | None = None,
                           handshake_timeout: float = 30.0) -> ExternalSampler:
    """Launch ``command args...`` and complete the protocol handshake.

    When ``args`` is None the command string is shell-split, so
    ``spawn_external_sampler("python3 sampler.py --k 4")`` works directly.
    """
    if args is None:
        parts = shlex.split(command)
        command, args = parts[0], parts[1:]
    return ExternalSampler(command, args, handshake_timeout=handshake_timeout)


@dataclass
class RoundtripReport:
    """Validation summary for a live external sampler."""

    trials: int
    violations: dict[str, int] = field(default_factory=dict)
    latency_ms: dict[str, float] = field(default_factory=dict)

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())

    def to_dict(self) -> dict:
        return {"trials": self.trials,
                "violations": dict(sorted(self.violations.items())),
                "total_violations": self.total_violations,
                "latency_ms": self.latency_ms}


def roundtrip_check(source: ExternalSampler, trials: int, seed: SeedLike) -> RoundtripReport:
    """Issue ``trials`` varied requests and validate every protocol invariant.

    Violations are tallied per error class instead of aborting, so fault
    injection can be observed; a conformant sampler reports zero.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = make_rng(seed)
    vocab = source.handshake.vocab_size
    violations: dict[str, int] = {}
    latencies = np.empty(trials)
    for t in range(trials):
        ctx_len = int(rng.integers(0, 9))
        context = [int(x) for x in rng.integers(0, vocab, size=ctx_len)]
        num_samples = int(rng.integers(1, 5))
        req_seed = int(rng.integers(0, 2**53))
        start = time.perf_counter()
        try:
            source.request(context, num_samples, req_seed)
        except ProtocolError as exc:
            name = type(exc).__name__
            violations[name] = violations.get(name, 0) + 1
        latencies[t] = (time.perf_counter() - start) * 1e3
    pcts = np.percentile(latencies, [50, 90, 99])
    return RoundtripReport(
        trials=trials,
        violations=violations,
        latency_ms={"p50": float(pcts[0]), "p90": float(pcts[1]), "p99": float(pcts[2])},
    )
