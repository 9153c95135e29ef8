"""Client for out-of-process systems under test.

The child process speaks newline-delimited single-line JSON over its
stdin/stdout:

    child -> parent on start:  {"type":"hello","dims":N}
    parent -> child:           {"type":"eval","id":I,"params":[...]}
    child -> parent:           {"type":"result","id":I,"score":S}
                               or {"type":"error","id":I,"message":"..."}
    parent -> child:           {"type":"shutdown"}

The child's stderr is inherited (passed through for logging, never parsed).
Floats are serialized as shortest round-trip decimals (json's repr-based
formatting on both sides).

A session is lock-step: one request in flight, ids strictly increasing for
the lifetime of the session (including across child restarts). Transport
failures (timeout, malformed line, id mismatch, child death, non-finite
score) relaunch the child and replay only the failed request, up to
max_restarts; an explicit error response is an oracle fault and is not
retried.
"""
import json
import math
import queue
import subprocess
import threading

import numpy as np

from .errors import (
    EvalTimeout,
    HandshakeError,
    HelloDimsMismatch,
    IdMismatch,
    MalformedMessage,
    OracleFault,
    ProtocolError,
    SessionClosed,
    SpawnError,
)
from .sut import SCORE_SIGNS

_EOF = object()


class _ChildExited(ProtocolError):
    pass


class _NonFiniteScore(OracleFault):
    pass


_RESTARTABLE = (EvalTimeout, MalformedMessage, IdMismatch, _ChildExited,
                _NonFiniteScore)


class ProcessConfig:
    """How to launch and talk to one adapter process."""

    def __init__(self, command, args=(), handshake_timeout=10.0,
                 eval_timeout=30.0, max_restarts=0):
        self.command = str(command)
        self.args = tuple(str(a) for a in args)
        self.handshake_timeout = float(handshake_timeout)
        self.eval_timeout = float(eval_timeout)
        self.max_restarts = int(max_restarts)
        if not self.handshake_timeout > 0:
            raise ProtocolError("handshake_timeout must be > 0")
        if not self.eval_timeout > 0:
            raise ProtocolError("eval_timeout must be > 0")
        if self.max_restarts < 0:
            raise ProtocolError("max_restarts must be >= 0")

    def argv(self):
        return [self.command, *self.args]

    def to_json(self):
        return {
            "command": self.command,
            "args": list(self.args),
            "handshake_timeout": self.handshake_timeout,
            "eval_timeout": self.eval_timeout,
            "max_restarts": self.max_restarts,
        }


class Session:
    """One adapter child process, owned by a single caller."""

    def __init__(self, cfg, expected_dims):
        self.cfg = cfg
        self.expected_dims = int(expected_dims)
        self._closed = False
        self._next_id = 1
        self._restarts_used = 0
        self._proc = None
        self._queue = None
        self._spawn_and_handshake()

    # -- process management -------------------------------------------------

    def _spawn_and_handshake(self):
        try:
            self._proc = subprocess.Popen(
                self.cfg.argv(),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=None,  # inherit: child logging goes to our stderr
                text=True,
            )
        except OSError as exc:
            raise SpawnError(f"could not launch {self.cfg.argv()!r}: {exc}") from exc
        self._queue = queue.Queue()
        reader = threading.Thread(
            target=_pump_lines, args=(self._proc.stdout, self._queue), daemon=True
        )
        reader.start()

        try:
            line = self._queue.get(timeout=self.cfg.handshake_timeout)
        except queue.Empty:
            self._kill()
            raise HandshakeError(
                f"no hello within {self.cfg.handshake_timeout}s"
            ) from None
        if line is _EOF:
            self._kill()
            raise HandshakeError("SUT process exited before sending hello")
        try:
            msg = json.loads(line)
        except ValueError:
            self._kill()
            raise HandshakeError(f"malformed hello line: {line[:200]!r}") from None
        if not isinstance(msg, dict) or msg.get("type") != "hello":
            self._kill()
            raise HandshakeError(f"expected a hello message, got {line[:200]!r}")
        dims = msg.get("dims")
        if not isinstance(dims, int) or isinstance(dims, bool):
            self._kill()
            raise HandshakeError(f"hello carries a non-integer dims: {dims!r}")
        if dims != self.expected_dims:
            self._kill()
            raise HelloDimsMismatch(
                f"SUT declared dims={dims}, expected {self.expected_dims}"
            )

    def _kill(self):
        proc = self._proc
        if proc is None:
            return
        try:
            proc.kill()
        except OSError:
            pass
        try:
            proc.wait(timeout=2.0)
        except subprocess.TimeoutExpired:
            pass

    def _restart(self):
        self._kill()
        self._restarts_used += 1
        self._spawn_and_handshake()

    # -- wire ---------------------------------------------------------------

    def _send(self, obj):
        try:
            self._proc.stdin.write(json.dumps(obj) + "\n")
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise _ChildExited(f"could not write to SUT process: {exc}") from exc

    def _read_line(self, timeout):
        try:
            item = self._queue.get(timeout=timeout)
        except queue.Empty:
            raise EvalTimeout(f"no response within {timeout}s") from None
        if item is _EOF:
            if self._closed:
                raise SessionClosed("session closed during evaluation")
            raise _ChildExited("SUT process closed its output stream")
        return item

    def _evaluate_once(self, params):
        req_id = self._next_id
        self._next_id += 1
        self._send({"type": "eval", "id": req_id,
                    "params": [float(x) for x in params]})
        line = self._read_line(self.cfg.eval_timeout)
        try:
            msg = json.loads(line)
        except ValueError:
            raise MalformedMessage(f"not valid JSON: {line[:200]!r}") from None
        if not isinstance(msg, dict):
            raise MalformedMessage(f"expected an object, got {line[:200]!r}")
        kind = msg.get("type")
        if kind == "result":
            if msg.get("id") != req_id:
                raise IdMismatch(
                    f"request id {req_id} answered with id {msg.get('id')!r}"
                )
            score = msg.get("score")
            if (isinstance(score, bool) or not isinstance(score, (int, float))
                    or not math.isfinite(score)):
                raise _NonFiniteScore(
                    f"unusable score {score!r}", params=params
                )
            return float(score)
        if kind == "error":
            if msg.get("id") != req_id:
                raise IdMismatch(
                    f"request id {req_id} answered with error id {msg.get('id')!r}"
                )
            raise OracleFault(
                f"SUT reported an error: {msg.get('message')!r}", params=params
            )
        raise MalformedMessage(f"unexpected message type {kind!r}")

    def evaluate(self, params):
        """Raw score for one parameter vector, replaying across restarts."""
        if self._closed:
            raise SessionClosed("session already closed")
        while True:
            try:
                return self._evaluate_once(params)
            except SessionClosed:
                raise
            except _RESTARTABLE as exc:
                if self._closed:
                    raise SessionClosed("session closed during evaluation") from exc
                if self._restarts_used < self.cfg.max_restarts:
                    self._restart()
                    continue
                raise

    def close(self):
        """Best-effort shutdown; idempotent."""
        if self._closed:
            return
        self._closed = True
        proc = self._proc
        if proc is None:
            return
        try:
            proc.stdin.write(json.dumps({"type": "shutdown"}) + "\n")
            proc.stdin.flush()
        except (OSError, ValueError):
            pass
        try:
            proc.stdin.close()
        except OSError:
            pass
        try:
            proc.wait(timeout=2.0)
        except subprocess.TimeoutExpired:
            proc.terminate()
            try:
                proc.wait(timeout=1.0)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def open_session(cfg, expected_dims):
    """Launch the adapter and complete the hello handshake."""
    return Session(cfg, expected_dims)


def evaluate_remote(session, params):
    return session.evaluate(params)


def close_session(session):
    session.close()


class SessionPool:
    """Fixed set of sessions evaluating batches concurrently.

    Results are re-associated by batch index before returning, so outputs do
    not depend on scheduling; if several evaluations fail, the failure with
    the lowest batch index is raised.
    """

    def __init__(self, cfg, expected_dims, size=1):
        if size < 1:
            raise ProtocolError("pool size must be >= 1")
        self.sessions = []
        try:
            for _ in range(size):
                self.sessions.append(Session(cfg, expected_dims))
        except Exception:
            self.close()
            raise

    def evaluate_one(self, params):
        return self.sessions[0].evaluate(params)

    def evaluate_batch(self, points):
        points = np.asarray(points, dtype=np.float64)
        m = points.shape[0]
        if len(self.sessions) == 1 or m == 1:
            return np.array(
                [self.sessions[0].evaluate(points[k]) for k in range(m)]
            )
        results = [None] * m
        failures = {}
        indices = queue.Queue()
        for k in range(m):
            indices.put(k)

        def worker(session):
            while True:
                try:
                    k = indices.get_nowait()
                except queue.Empty:
                    return
                try:
                    results[k] = session.evaluate(points[k])
                except Exception as exc:  # re-raised by index order below
                    failures[k] = exc

        threads = [
            threading.Thread(target=worker, args=(s,), daemon=True)
            for s in self.sessions
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        if failures:
            raise failures[min(failures)]
        return np.array(results, dtype=np.float64)

    def close(self):
        for s in self.sessions:
            s.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class ExternalSut:
    """SUT interface over a session pool."""

    deterministic = False

    def __init__(self, process_config, dims, score_sign="loss-as-is", jobs=1):
        if score_sign not in SCORE_SIGNS:
            raise OracleFault(f"unknown score_sign {score_sign!r}")
        self.score_sign = score_sign
        self._dims = int(dims)
        self._pool = SessionPool(process_config, self._dims, size=jobs)

    @property
    def dims(self):
        return self._dims

    def raw_score(self, v):
        return float(self._pool.evaluate_one(np.asarray(v, dtype=np.float64)))

    def raw_batch(self, points):
        return self._pool.evaluate_batch(points)

    def loss(self, v):
        raw = self.raw_score(v)
        return raw if self.score_sign == "loss-as-is" else -raw

    def loss_batch(self, points):
        raw = self.raw_batch(points)
        return raw if self.score_sign == "loss-as-is" else -raw

    def close(self):
        self._pool.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _pump_lines(stream, sink):
    try:
        for line in stream:
            sink.put(line.rstrip("\n"))
    except (OSError, ValueError):
        pass
    finally:
        sink.put(_EOF)
