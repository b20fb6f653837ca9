"""Event-log and id-map file I/O.

Event logs are TSV with one event per line:

    time<TAB>src<TAB>dst<TAB>delta_weight<TAB>label

where label is 0 or 1 (1 marks a ground-truth anomalous edge). Lines
starting with ``#`` are comments; a single optional header line with
non-numeric fields is skipped. Node ids in the file may be arbitrary
strings; they are remapped to dense 0-based integers in order of first
appearance, and the mapping is persisted as a TSV sidecar with
``original_id<TAB>dense_id`` rows.
"""

from __future__ import annotations

import hashlib

from .errors import EventLogError
from .graph import EdgeEvent


def _parse_line(parts, line_no):
    if len(parts) < 4:
        raise EventLogError(
            f"expected at least 4 tab-separated fields, got {len(parts)}", line=line_no
        )
    try:
        time = float(parts[0])
        delta = float(parts[3])
    except ValueError as exc:
        raise EventLogError(f"non-numeric time or delta: {exc}", line=line_no)
    label = False
    if len(parts) >= 5 and parts[4] != "":
        if parts[4] not in ("0", "1"):
            raise EventLogError(f"label must be 0 or 1, got {parts[4]!r}", line=line_no)
        label = parts[4] == "1"
    return time, parts[1], parts[2], delta, label


def read_event_log(path, allow_unsorted: bool = False):
    """Parse a TSV event log into raw (time, src, dst, delta, label) rows.

    ``src``/``dst`` stay as strings until id remapping. Self-loop rows
    are dropped (and counted). Raises on malformed lines and, unless
    ``allow_unsorted``, on non-monotone timestamps; with the flag set
    the rows are stable-sorted by time instead.
    """
    rows = []
    skipped_self_loops = 0
    last_time = None
    unsorted = False
    header_allowed = True
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if header_allowed:
                # tolerate one leading header line with a non-numeric field
                header_allowed = False
                try:
                    float(parts[0])
                except (ValueError, IndexError):
                    continue
            time, src, dst, delta, label = _parse_line(parts, line_no)
            if src == dst:
                skipped_self_loops += 1
                continue
            if last_time is not None and time < last_time:
                unsorted = True
            last_time = time
            rows.append((time, src, dst, delta, label, line_no))
    if unsorted:
        if not allow_unsorted:
            raise EventLogError(
                "timestamps are not non-decreasing; pass --allow-unsorted to sort"
            )
        rows.sort(key=lambda r: r[0])
    return rows, skipped_self_loops


def build_id_map(rows) -> dict[str, int]:
    """Dense ids in order of first appearance across the whole log."""
    id_map: dict[str, int] = {}
    for _, src, dst, _, _, _ in rows:
        for node in (src, dst):
            if node not in id_map:
                id_map[node] = len(id_map)
    return id_map


def events_from_rows(rows, id_map) -> list[EdgeEvent]:
    return [
        EdgeEvent(
            time=time,
            src=id_map[src],
            dst=id_map[dst],
            delta_weight=delta,
            anomalous=label,
            line=line_no,
        )
        for time, src, dst, delta, label, line_no in rows
    ]


def write_id_map(path, id_map) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# original_id\tdense_id\n")
        for orig, dense in sorted(id_map.items(), key=lambda kv: kv[1]):
            fh.write(f"{orig}\t{dense}\n")


def read_id_map(path) -> dict[str, int]:
    id_map = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise EventLogError("id-map rows need exactly 2 fields", line=line_no)
            try:
                id_map[parts[0]] = int(parts[1])
            except ValueError:
                raise EventLogError(f"bad dense id {parts[1]!r}", line=line_no)
    return id_map


def write_event_log(path, events) -> None:
    """Write (time, src, dst, delta, label) tuples in the TSV format."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# time\tsrc\tdst\tdelta_weight\tlabel\n")
        for time, src, dst, delta, label in events:
            fh.write(f"{time:.10g}\t{src}\t{dst}\t{delta:.10g}\t{1 if label else 0}\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
