"""Synthetic key/value streams and the key,value CSV interchange format.

Streams are columnar (one uint64 key array, one float64 value array) so a
10^7-item benchmark stream costs ~160 MB instead of a gigabyte of tuples.
Key draws use an explicit cumulative table + binary search and value draws use
explicit inverse CDFs over one seeded uniform source, so a (spec, seed) pair
pins the stream bit for bit.

CSV format: one "key,value" pair per line, LF terminated; keys are unsigned
decimal integers, values are decimal integers or finite reals (both parse to
float64); blank lines and lines starting with "#" are ignored.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np


@dataclass(frozen=True)
class ZipfKeys:
    """Keys 1..n_keys with probability proportional to 1 / rank^alpha."""

    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"zipf alpha must be positive and finite, got {self.alpha!r}")

    def spec_text(self) -> str:
        return f"zipf({self.alpha})"


@dataclass(frozen=True)
class UniformKeys:
    def spec_text(self) -> str:
        return "uniform"


@dataclass(frozen=True)
class ParetoValues:
    alpha: float = 1.0
    x_min: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"pareto alpha must be positive and finite, got {self.alpha!r}")
        if not (math.isfinite(self.x_min) and self.x_min > 0):
            raise ValueError(f"pareto x_min must be positive and finite, got {self.x_min!r}")

    def spec_text(self) -> str:
        return f"pareto({self.alpha},{self.x_min})"


@dataclass(frozen=True)
class ExponentialValues:
    rate: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"exponential rate must be positive and finite, got {self.rate!r}")

    def spec_text(self) -> str:
        return f"exponential({self.rate})"


@dataclass(frozen=True)
class UniformValues:
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo <= self.hi):
            raise ValueError(f"uniform bounds must be finite with lo <= hi, got ({self.lo!r}, {self.hi!r})")

    def spec_text(self) -> str:
        return f"uniform({self.lo},{self.hi})"


KeyDist = Union[ZipfKeys, UniformKeys]
ValueDist = Union[ParetoValues, ExponentialValues, UniformValues]


@dataclass(frozen=True)
class StreamSpec:
    n_items: int = 1_000_000
    n_keys: int = 10_000
    key_dist: KeyDist = ZipfKeys(1.0)
    value_dist: ValueDist = ParetoValues(1.0, 1.0)
    seed: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.n_items, int) or self.n_items < 0:
            raise ValueError(f"n_items must be a nonnegative integer, got {self.n_items!r}")
        if not isinstance(self.n_keys, int) or self.n_keys < 1:
            raise ValueError(f"n_keys must be a positive integer, got {self.n_keys!r}")

    def describe(self) -> dict:
        """Config-echo form used in benchmark reports."""
        return {
            "source": "synthetic",
            "n_items": self.n_items,
            "n_keys": self.n_keys,
            "key_dist": self.key_dist.spec_text(),
            "value_dist": self.value_dist.spec_text(),
        }


class Stream:
    """Columnar (key, value) sequence."""

    __slots__ = ("keys", "values")

    def __init__(self, keys: np.ndarray, values: np.ndarray) -> None:
        if keys.shape != values.shape or keys.ndim != 1:
            raise ValueError("keys and values must be 1-d arrays of equal length")
        self.keys = np.ascontiguousarray(keys, dtype=np.uint64)
        self.values = np.ascontiguousarray(values, dtype=np.float64)

    def __len__(self) -> int:
        return int(self.keys.shape[0])

    def chunks(self, size: int = 65536) -> Iterator[tuple[list[int], list[float]]]:
        """Plain-list windows; keeps peak Python-object overhead bounded."""
        for start in range(0, len(self), size):
            stop = start + size
            yield self.keys[start:stop].tolist(), self.values[start:stop].tolist()

    def __iter__(self) -> Iterator[tuple[int, float]]:
        for keys, values in self.chunks():
            yield from zip(keys, values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Stream):
            return NotImplemented
        return bool(np.array_equal(self.keys, other.keys) and np.array_equal(self.values, other.values))

    def __repr__(self) -> str:
        return f"Stream(items={len(self)})"


def _draw_keys(dist: KeyDist, n_keys: int, n_items: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(dist, UniformKeys):
        return rng.integers(1, n_keys + 1, size=n_items, dtype=np.uint64)
    weights = np.arange(1, n_keys + 1, dtype=np.float64) ** (-dist.alpha)
    table = np.cumsum(weights)
    table /= table[-1]
    draws = rng.random(n_items)
    return (np.searchsorted(table, draws, side="right") + 1).astype(np.uint64)


def _draw_values(dist: ValueDist, n_items: int, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(n_items)
    if isinstance(dist, ParetoValues):
        # 1 - u lies in (0, 1], so the tail stays finite.
        return dist.x_min / np.power(1.0 - u, 1.0 / dist.alpha)
    if isinstance(dist, ExponentialValues):
        return -np.log1p(-u) / dist.rate
    return dist.lo + u * (dist.hi - dist.lo)


def generate(spec: StreamSpec) -> Stream:
    """Materialize the stream a spec describes. Same spec, same bits."""
    rng = np.random.default_rng(spec.seed)
    keys = _draw_keys(spec.key_dist, spec.n_keys, spec.n_items, rng)
    values = _draw_values(spec.value_dist, spec.n_items, rng)
    return Stream(keys, values)


_DIST_RE = re.compile(r"^([a-z_]+)(?:\(([^()]*)\))?$")


def _parse_dist(text: str, kinds: dict) -> object:
    m = _DIST_RE.match(text.strip())
    if not m:
        raise ValueError(f"malformed distribution {text!r}")
    name, arg_text = m.group(1), m.group(2)
    if name not in kinds:
        raise ValueError(f"unknown distribution {name!r} (expected one of {sorted(kinds)})")
    args = []
    if arg_text is not None and arg_text.strip():
        for part in arg_text.split(","):
            try:
                args.append(float(part))
            except ValueError:
                raise ValueError(f"bad numeric argument {part!r} in distribution {text!r}") from None
    try:
        return kinds[name](*args)
    except TypeError:
        raise ValueError(f"wrong argument count in distribution {text!r}") from None


_KEY_KINDS = {"zipf": ZipfKeys, "uniform": UniformKeys}
_VALUE_KINDS = {"pareto": ParetoValues, "exponential": ExponentialValues, "uniform": UniformValues}


def parse_stream_spec(text: str, seed: int = 1) -> StreamSpec:
    """Parse a compact spec string into a StreamSpec.

    Grammar: comma-separated fields "n_items=N,n_keys=N,key_dist=D,value_dist=D"
    (split at top level only, so distribution arguments may contain commas);
    any field may be omitted, and the bare word "default" means all defaults.
    """
    fields: dict[str, str] = {}
    text = text.strip()
    if text and text != "default":
        # Split on commas not inside parentheses.
        parts: list[str] = []
        depth = 0
        start = 0
        for i, ch in enumerate(text):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth < 0:
                    raise ValueError(f"unbalanced parentheses in stream spec {text!r}")
            elif ch == "," and depth == 0:
                parts.append(text[start:i])
                start = i + 1
        if depth != 0:
            raise ValueError(f"unbalanced parentheses in stream spec {text!r}")
        parts.append(text[start:])
        for part in parts:
            if "=" not in part:
                raise ValueError(f"stream spec field {part!r} is not name=value")
            name, _, value = part.partition("=")
            name = name.strip()
            if name in fields:
                raise ValueError(f"duplicate stream spec field {name!r}")
            fields[name] = value.strip()
    known = {"n_items", "n_keys", "key_dist", "value_dist"}
    unknown = set(fields) - known
    if unknown:
        raise ValueError(f"unknown stream spec fields {sorted(unknown)} (expected {sorted(known)})")
    kwargs: dict = {"seed": seed}
    if "n_items" in fields:
        kwargs["n_items"] = int(fields["n_items"])
    if "n_keys" in fields:
        kwargs["n_keys"] = int(fields["n_keys"])
    if "key_dist" in fields:
        kwargs["key_dist"] = _parse_dist(fields["key_dist"], _KEY_KINDS)
    if "value_dist" in fields:
        kwargs["value_dist"] = _parse_dist(fields["value_dist"], _VALUE_KINDS)
    return StreamSpec(**kwargs)


def write_csv(stream: Stream, path) -> None:
    """Write "key,value" lines, LF terminated. Deterministic bytes."""
    with open(path, "w", newline="\n") as fh:
        for keys, values in stream.chunks():
            fh.writelines(f"{k},{v!r}\n" for k, v in zip(keys, values))


def read_csv(path) -> Stream:
    """Read a key,value CSV. Malformed input reports its 1-based line number."""
    keys: list[int] = []
    values: list[float] = []
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            left, sep, right = line.partition(",")
            if not sep or "," in right:
                raise ValueError(f"line {lineno}: expected exactly one 'key,value' pair, got {line!r}")
            try:
                key = int(left)
            except ValueError:
                raise ValueError(f"line {lineno}: key {left!r} is not a decimal integer") from None
            if key < 0 or key >= 1 << 64:
                raise ValueError(f"line {lineno}: key {key} outside the unsigned 64-bit range")
            try:
                value = float(right)
            except ValueError:
                raise ValueError(f"line {lineno}: value {right!r} is not a decimal real") from None
            if not math.isfinite(value):
                raise ValueError(f"line {lineno}: value {right!r} is not finite")
            keys.append(key)
            values.append(value)
    return Stream(np.array(keys, dtype=np.uint64), np.array(values, dtype=np.float64))
