"""Completion backends, code extraction and log-probability ranking."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

import httpx

from .prompts import Prompt

log = logging.getLogger(__name__)

API_KEY_ENV = "MODEL_API_KEY"
FIXTURE_FORMAT = "promptfix-fixtures/1"
DEFAULT_STOP_MARKERS = ("###", "# Buggy Program #")
RETRYABLE_STATUS = frozenset({408, 409, 429, 500, 502, 503, 504})


class BackendError(RuntimeError):
    def __init__(self, message: str, status: Optional[int] = None):
        super().__init__(message)
        self.status = status


class FixtureMiss(BackendError):
    def __init__(self, digest: str):
        super().__init__(f"no fixture for prompt digest {digest}")
        self.digest = digest


class EmptyGeneration(ValueError):
    """Nothing usable remained after stripping a generation."""


@dataclass(frozen=True)
class GenParams:
    temperature: float = 0.8
    samples_per_prompt: int = 10
    max_new_tokens: int = 512
    stop_markers: tuple[str, ...] = DEFAULT_STOP_MARKERS

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.samples_per_prompt < 1:
            raise ValueError("samples_per_prompt must be >= 1")


@dataclass(frozen=True)
class Generation:
    text: str
    mean_logprob: Optional[float] = None


def prompt_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class Backend:
    """Base class; subclasses return at most ``samples_per_prompt`` generations."""

    def complete(self, prompt: Prompt, params: GenParams) -> list[Generation]:
        raise NotImplementedError


# -- fixture replay -----------------------------------------------------------


def _gen_to_json(g: Generation) -> dict:
    d = {"text": g.text}
    if g.mean_logprob is not None:
        d["mean_logprob"] = g.mean_logprob
    return d


def load_fixtures(path: Union[str, Path]) -> dict[str, list[Generation]]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = data.get("entries", data) if isinstance(data, dict) else {}
    fixtures = {}
    for digest, entry in entries.items():
        items = entry["completions"] if isinstance(entry, dict) else entry
        fixtures[digest] = [Generation(i["text"], i.get("mean_logprob")) for i in items]
    return fixtures


def save_fixtures(path: Union[str, Path], fixtures: dict[str, list[Generation]], prompts: Optional[dict[str, str]] = None):
    prompts = prompts or {}
    entries = {}
    for digest in sorted(fixtures):
        entry = {}
        if digest in prompts:
            entry["prompt"] = prompts[digest]
        entry["completions"] = [_gen_to_json(g) for g in fixtures[digest]]
        entries[digest] = entry
    payload = {"format": FIXTURE_FORMAT, "entries": entries}
    Path(path).write_text(json.dumps(payload, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


class MockBackend(Backend):
    """Replays fixture completions keyed by the SHA-256 of the prompt text."""

    def __init__(self, fixtures: dict[str, list[Generation]]):
        self.fixtures = fixtures
        self.calls: list[str] = []

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "MockBackend":
        return cls(load_fixtures(path))

    def complete(self, prompt: Prompt, params: GenParams) -> list[Generation]:
        digest = prompt_digest(prompt.text)
        self.calls.append(digest)
        if digest not in self.fixtures:
            raise FixtureMiss(digest)
        return list(self.fixtures[digest][: params.samples_per_prompt])


class RuleBackend(Backend):
    """Scripted backend: the first rule returning non-None answers the prompt.

    Used to author fixture files; wrap it in a :class:`RecordingBackend`.
    """

    def __init__(self, rules: Sequence[Callable[[Prompt], Optional[Sequence[Generation]]]]):
        self.rules = list(rules)

    def complete(self, prompt: Prompt, params: GenParams) -> list[Generation]:
        for rule in self.rules:
            out = rule(prompt)
            if out is not None:
                return list(out)[: params.samples_per_prompt]
        return []


class RecordingBackend(Backend):
    def __init__(self, inner: Backend):
        self.inner = inner
        self.fixtures: dict[str, list[Generation]] = {}
        self.prompts: dict[str, str] = {}
        self._lock = threading.Lock()

    def complete(self, prompt: Prompt, params: GenParams) -> list[Generation]:
        out = self.inner.complete(prompt, params)
        digest = prompt_digest(prompt.text)
        with self._lock:
            self.fixtures[digest] = list(out)
            self.prompts[digest] = prompt.text
        return out

    def save(self, path: Union[str, Path]):
        save_fixtures(path, self.fixtures, self.prompts)


# -- remote backend -------------------------------------------------------------


@dataclass
class HttpConfig:
    endpoint: str
    model: str
    api_key: Optional[str] = None
    timeout: float = 60.0
    max_retries: int = 5
    backoff: float = 1.0
    max_backoff: float = 30.0
    max_in_flight: int = 4
    min_interval: float = 0.0

    @classmethod
    def from_env(cls, endpoint: str, model: str, **kw) -> "HttpConfig":
        return cls(endpoint=endpoint, model=model, api_key=os.environ.get(API_KEY_ENV), **kw)


class HttpBackend(Backend):
    """Client for an OpenAI-compatible ``/completions`` endpoint."""

    def __init__(
        self,
        config: HttpConfig,
        client: Optional[httpx.Client] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        headers = {"Content-Type": "application/json"}
        if config.api_key:
            headers["Authorization"] = f"Bearer {config.api_key}"
        self.client = client or httpx.Client(timeout=config.timeout)
        self.headers = headers
        self.sleep = sleep
        self._slots = threading.BoundedSemaphore(config.max_in_flight)
        self._pace_lock = threading.Lock()
        self._last_request = 0.0

    def _pace(self):
        if self.config.min_interval <= 0:
            return
        with self._pace_lock:
            wait = self._last_request + self.config.min_interval - time.monotonic()
            if wait > 0:
                self.sleep(wait)
            self._last_request = time.monotonic()

    def _delay(self, attempt: int, response: Optional[httpx.Response]) -> float:
        if response is not None:
            retry_after = response.headers.get("Retry-After")
            if retry_after:
                try:
                    return min(float(retry_after), self.config.max_backoff)
                except ValueError:
                    pass
        delay = min(self.config.backoff * 2**attempt, self.config.max_backoff)
        return delay * (0.5 + random.random() / 2)

    def _payload(self, prompt: Prompt, params: GenParams) -> dict:
        payload = {
            "model": self.config.model,
            "prompt": prompt.text,
            "temperature": params.temperature,
            "n": params.samples_per_prompt,
            "max_tokens": params.max_new_tokens,
            "logprobs": 1,
        }
        if params.stop_markers:
            payload["stop"] = list(params.stop_markers[:4])
        return payload

    def complete(self, prompt: Prompt, params: GenParams) -> list[Generation]:
        payload = self._payload(prompt, params)
        last_status = None
        with self._slots:
            for attempt in range(self.config.max_retries + 1):
                self._pace()
                response = None
                try:
                    response = self.client.post(self.config.endpoint, json=payload, headers=self.headers)
                except httpx.TransportError as exc:
                    log.warning("transport error on attempt %d: %s", attempt + 1, exc)
                    last_status = None
                else:
                    if response.status_code == 200:
                        return parse_completions(response.json())[: params.samples_per_prompt]
                    last_status = response.status_code
                    if last_status not in RETRYABLE_STATUS:
                        raise BackendError(f"backend returned HTTP {last_status}", last_status)
                    log.warning("HTTP %d on attempt %d", last_status, attempt + 1)
                if attempt < self.config.max_retries:
                    self.sleep(self._delay(attempt, response))
        raise BackendError(
            f"backend unavailable after {self.config.max_retries + 1} attempts (last status {last_status})",
            last_status,
        )


def parse_completions(body: dict) -> list[Generation]:
    gens = []
    for choice in body.get("choices", []):
        mean = None
        lp = choice.get("logprobs") or {}
        values = [v for v in (lp.get("token_logprobs") or []) if v is not None]
        if values:
            mean = sum(values) / len(values)
        gens.append(Generation(choice.get("text", ""), mean))
    return gens


# -- post-processing ------------------------------------------------------------


def extract_code(gen: Generation, kind: str = "semantic", stop_markers: Iterable[str] = DEFAULT_STOP_MARKERS) -> str:
    """Cut a generation down to the code it contains.

    Leading indentation of the first code line is kept: syntax-phase output
    replaces an indented chunk verbatim.
    """
    text = gen.text.replace("\r\n", "\n")
    cut = len(text)
    for marker in stop_markers:
        i = text.find(marker)
        if i != -1:
            cut = min(cut, i)
    text = text[:cut]
    lines = [l for l in text.split("\n") if not l.lstrip().startswith("```")]
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise EmptyGeneration(f"empty {kind} generation")
    return "\n".join(l.rstrip() for l in lines)


def top_k_by_logprob(gens: Sequence[Generation], k: int = 10) -> list[Generation]:
    best: dict[str, tuple[int, Generation]] = {}
    for i, g in enumerate(gens):
        if g.text not in best:
            best[g.text] = (i, g)
        else:
            j, prev = best[g.text]
            if g.mean_logprob is not None and (prev.mean_logprob is None or g.mean_logprob > prev.mean_logprob):
                best[g.text] = (j, g)
    unique = sorted(best.values(), key=lambda t: t[0])
    ranked = sorted((t for t in unique if t[1].mean_logprob is not None), key=lambda t: -t[1].mean_logprob)
    unranked = [t for t in unique if t[1].mean_logprob is None]
    return [g for _, g in ranked + unranked][:k]


def make_backend(kind: str, endpoint: Optional[str] = None, model: Optional[str] = None, timeout: float = 60.0) -> Backend:
    """Build a backend from ``mock:<fixtures.json>`` or ``http``."""
    if kind.startswith("mock:"):
        return MockBackend.from_file(kind[len("mock:") :])
    if kind == "http":
        endpoint = endpoint or os.environ.get("MODEL_ENDPOINT")
        model = model or os.environ.get("MODEL_NAME")
        if not endpoint or not model:
            raise ValueError("http backend needs an endpoint and a model name")
        return HttpBackend(HttpConfig.from_env(endpoint, model, timeout=timeout))
    raise ValueError(f"unknown backend: {kind!r}")
