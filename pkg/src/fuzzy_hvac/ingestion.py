"""Data collection: the day CSV, IoT feed documents and polling.

The canonical offline format is a CSV with header
``time,humidity,temp_outdoor,temp_indoor`` (``hh:mm`` times, ``.`` decimal
point).  Live data comes from JSON feeds polled over HTTP; every source ends
up as :class:`ClimateReading` values.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import logging
import math
import queue
import re
import threading
import time
import urllib.request
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable, Iterator, Mapping

from .errors import (
    DataError,
    EmptyFeedError,
    FeedDocumentError,
    FeedUnavailableError,
    MissingFieldError,
    NonNumericValueError,
)

log = logging.getLogger(__name__)

CSV_HEADER = ("time", "humidity", "temp_outdoor", "temp_indoor")
BUNDLED_DAY = "day.csv"
HOURS_PER_DAY = 24
HTTP_TIMEOUT = 5.0
STALE_AFTER = 2  # missed polls before a reused value is flagged stale

CHANNELS = ("humidity", "outdoor_temp", "indoor_temp")
_TIME = re.compile(r"([01]\d|2[0-3]):[0-5]\d\Z")


@dataclass(frozen=True)
class ClimateReading:
    timestamp: str
    humidity: float
    outdoor_temp: float
    indoor_temp: float
    # Channels whose value was reused after ``STALE_AFTER`` missed polls.
    stale: frozenset = field(default=frozenset(), compare=False)


def normalize(reading: ClimateReading) -> ClimateReading:
    """Clamp humidity into [0, 100]; reject non-finite values."""
    for name in CHANNELS:
        value = getattr(reading, name)
        if not math.isfinite(value):
            raise DataError(f"{reading.timestamp}: {name} is not finite ({value})")
    if not 0.0 <= reading.humidity <= 100.0:
        clamped = min(max(reading.humidity, 0.0), 100.0)
        log.warning("%s: humidity %s clamped to %s", reading.timestamp, reading.humidity, clamped)
        reading = replace(reading, humidity=clamped)
    return reading


def _number(text, lineno, column):
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"line {lineno}: {column} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise DataError(f"line {lineno}: {column} is not finite: {text!r}")
    return value


def parse_day_csv(text: str) -> list[ClimateReading]:
    rows = list(csv.reader(io.StringIO(text)))
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise DataError("no data rows")
    header = tuple(cell.strip() for cell in rows[0])
    if header != CSV_HEADER:
        raise DataError(f"line 1: expected header {','.join(CSV_HEADER)}, got {','.join(header)}")
    readings = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise DataError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        stamp = row[0].strip()
        if not _TIME.match(stamp):
            raise DataError(f"line {lineno}: bad time {stamp!r}, expected hh:mm")
        values = [_number(cell.strip(), lineno, col) for cell, col in zip(row[1:], CSV_HEADER[1:])]
        readings.append(normalize(ClimateReading(stamp, *values)))
    if not readings:
        raise DataError("no data rows")
    if len(readings) != HOURS_PER_DAY:
        log.warning("expected %d hourly rows, got %d", HOURS_PER_DAY, len(readings))
    return readings


def load_day_csv(path=None) -> list[ClimateReading]:
    """Readings of a day CSV in file order; ``None`` loads the bundled day."""
    if path is None:
        text = resources.files("fuzzy_hvac.data").joinpath(BUNDLED_DAY).read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_day_csv(text)


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def dump_day_csv(readings) -> str:
    lines = [",".join(CSV_HEADER)]
    for r in readings:
        lines.append(",".join((r.timestamp, _fmt(r.humidity), _fmt(r.outdoor_temp), _fmt(r.indoor_temp))))
    return "\n".join(lines) + "\n"


def _load_json(body):
    if isinstance(body, (bytes, bytearray)):
        body = body.decode("utf-8")
    if isinstance(body, str):
        try:
            return json.loads(body)
        except json.JSONDecodeError as exc:
            raise FeedDocumentError(f"invalid JSON: {exc}") from exc
    return body


def _coerce(value, field_name):
    if value is None:
        raise MissingFieldError(field_name)
    if isinstance(value, bool):
        raise NonNumericValueError(field_name, value)
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise NonNumericValueError(field_name, value) from None
    if not math.isfinite(number):
        raise NonNumericValueError(field_name, value)
    return number


def parse_thingspeak_json(body, field_selector: str = "field1") -> tuple[str, float]:
    """Newest ``(created_at, value)`` pair of a channel-feed document.

    Channel feeds are listed oldest first, so the newest entry is the last.
    """
    doc = _load_json(body)
    if not isinstance(doc, dict) or "feeds" not in doc:
        raise MissingFieldError("feeds")
    feeds = doc["feeds"]
    if not isinstance(feeds, list):
        raise FeedDocumentError("'feeds' is not an array")
    if not feeds:
        raise EmptyFeedError("feed has no entries")
    entry = feeds[-1]
    if not isinstance(entry, dict) or field_selector not in entry:
        raise MissingFieldError(field_selector)
    value = _coerce(entry[field_selector], field_selector)
    stamp = entry.get("created_at")
    if not isinstance(stamp, str):
        raise MissingFieldError("created_at")
    return stamp, value


def parse_midgar_json(body, field_selector: str = "value") -> tuple[str, float]:
    """``(timestamp, value)`` of a ``{"sensor", "value", "timestamp"}`` document.

    Numeric strings such as ``"15"`` are accepted.
    """
    doc = _load_json(body)
    if not isinstance(doc, dict):
        raise FeedDocumentError("document is not a JSON object")
    if field_selector not in doc:
        raise MissingFieldError(field_selector)
    value = _coerce(doc[field_selector], field_selector)
    stamp = doc.get("timestamp")
    if not isinstance(stamp, str):
        raise MissingFieldError("timestamp")
    return stamp, value


class FeedKind(enum.Enum):
    THINGSPEAK = "thingspeak"
    MIDGAR = "midgar"
    FILE = "file"


@dataclass(frozen=True)
class FeedSource:
    kind: FeedKind
    endpoint: str
    field_selector: str
    poll_interval: float = 60.0

    def __post_init__(self):
        object.__setattr__(self, "kind", FeedKind(self.kind))
        if self.kind is not FeedKind.FILE and not self.poll_interval > 0:
            raise ValueError(f"poll interval must be positive, got {self.poll_interval}")
        if self.poll_interval < 0:
            raise ValueError(f"poll interval must not be negative, got {self.poll_interval}")


def http_get(url: str, timeout: float = HTTP_TIMEOUT) -> bytes:
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


_PARSERS = {
    FeedKind.THINGSPEAK: parse_thingspeak_json,
    FeedKind.MIDGAR: parse_midgar_json,
}

_CSV_FIELDS = {
    "humidity": "humidity",
    "temp_outdoor": "outdoor_temp",
    "outdoor_temp": "outdoor_temp",
    "temp_indoor": "indoor_temp",
    "indoor_temp": "indoor_temp",
}


def poll_feed(source: FeedSource, *, max_failures: int = 3, backoff: float = 1.0,
              fetch: Callable[[str], bytes] = http_get,
              sleep: Callable[[float], None] = time.sleep,
              limit: int | None = None) -> Iterator[tuple[str, float]]:
    """Yield one ``(timestamp, value)`` sample per poll tick.

    Network kinds retry failed polls with exponential backoff and raise
    :class:`FeedUnavailableError` after ``max_failures`` consecutive failures.
    The file kind replays a day CSV, one row per tick.
    """
    if max_failures < 1:
        raise ValueError("max_failures must be at least 1")
    if source.kind is FeedKind.FILE:
        yield from _replay_column(source, sleep, limit)
        return
    parse = _PARSERS[source.kind]
    emitted = failures = 0
    while limit is None or emitted < limit:
        try:
            sample = parse(fetch(source.endpoint), source.field_selector)
        except (OSError, FeedDocumentError) as exc:
            failures += 1
            log.warning("%s: poll failed (%d/%d): %s", source.endpoint, failures, max_failures, exc)
            if failures >= max_failures:
                raise FeedUnavailableError(source.endpoint, failures, exc) from exc
            sleep(backoff * 2 ** (failures - 1))
            continue
        failures = 0
        emitted += 1
        yield sample
        if limit is None or emitted < limit:
            sleep(source.poll_interval)


def _replay_column(source, sleep, limit):
    try:
        attr = _CSV_FIELDS[source.field_selector]
    except KeyError:
        raise DataError(f"unknown CSV column {source.field_selector!r}") from None
    for i, reading in enumerate(load_day_csv(source.endpoint)):
        if limit is not None and i >= limit:
            return
        if i and source.poll_interval:
            sleep(source.poll_interval)
        yield reading.timestamp, getattr(reading, attr)


def replay_readings(path, interval: float = 0.0, sleep=time.sleep) -> Iterator[ClimateReading]:
    """Replay a day CSV as a live stream, pausing ``interval`` seconds per row."""
    for i, reading in enumerate(load_day_csv(path)):
        if i and interval:
            sleep(interval)
        yield reading


class ReadingAssembler:
    """Merges per-channel samples into complete readings, one per tick.

    A channel that misses a tick keeps its last value; after ``stale_after``
    consecutive misses the reading lists it in ``stale``.
    """

    def __init__(self, channels=CHANNELS, stale_after: int = STALE_AFTER):
        self.channels = tuple(channels)
        self.stale_after = stale_after
        self._last: dict[str, float] = {}
        self._fresh: set[str] = set()
        self._missed = dict.fromkeys(self.channels, 0)

    def offer(self, channel: str, value: float):
        if channel not in self._missed:
            raise KeyError(f"unknown channel {channel!r}")
        self._last[channel] = value
        self._fresh.add(channel)

    @property
    def ready(self) -> bool:
        return all(c in self._last for c in self.channels)

    def tick(self, timestamp: str) -> ClimateReading | None:
        """Reading for this tick, or ``None`` until every channel has reported."""
        for c in self.channels:
            self._missed[c] = 0 if c in self._fresh else self._missed[c] + 1
        self._fresh.clear()
        if not self.ready:
            return None
        stale = frozenset(c for c in self.channels if self._missed[c] >= self.stale_after)
        for c in stale:
            log.warning("%s: %s is stale (%d missed polls)", timestamp, c, self._missed[c])
        return normalize(ClimateReading(timestamp, stale=stale, **self._last))


def merge_feeds(feeds: Mapping[str, FeedSource], tick: float, *,
                clock: Callable[[], str] | None = None,
                poll: Callable[..., Iterator] = poll_feed,
                max_ticks: int | None = None, **poll_kwargs) -> Iterator[ClimateReading]:
    """Poll each channel's feed on its own thread and yield merged readings.

    Samples travel through one queue, so the consumer sees them in arrival
    order.  A feed that gives up raises its error in the consumer.
    """
    if set(feeds) != set(CHANNELS):
        raise ValueError(f"need one feed per channel {CHANNELS}, got {tuple(feeds)}")
    clock = clock or (lambda: time.strftime("%H:%M"))
    samples: queue.Queue = queue.Queue()
    stop = threading.Event()

    def worker(channel, source):
        try:
            for _, value in poll(source, **poll_kwargs):
                if stop.is_set():
                    return
                samples.put((channel, value, None))
        except Exception as exc:  # handed to the consumer
            samples.put((channel, None, exc))

    threads = [threading.Thread(target=worker, args=item, daemon=True) for item in feeds.items()]
    for t in threads:
        t.start()
    assembler = ReadingAssembler(tuple(feeds))
    emitted = 0
    try:
        while max_ticks is None or emitted < max_ticks:
            deadline = time.monotonic() + tick
            while True:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                try:
                    channel, value, exc = samples.get(timeout=remaining)
                except queue.Empty:
                    break
                if exc is not None:
                    raise exc
                assembler.offer(channel, value)
            reading = assembler.tick(clock())
            if reading is not None:
                emitted += 1
                yield reading
    finally:
        stop.set()
