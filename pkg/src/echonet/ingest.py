"""Interaction-log ingestion: parsing, filtering, indexing and summaries.

The interchange format is JSONL, one object per line with keys
user/page/post/action/ts; CSV with the fixed column order
user,page,post,action,ts is accepted as a convenience. Canonical
serialization sorts records so that round-tripping is byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import date

from .timebins import (
    day_end,
    day_start,
    format_timestamp,
    parse_date,
    parse_timestamp,
    quarter_of,
)

ACTIONS = ("post", "like", "comment")
ENGAGEMENT_ACTIONS = ("like", "comment")

DEFAULT_MIN_POSTS = 10
DEFAULT_RANGE = (date(2010, 1, 1), date(2017, 5, 31))

CSV_HEADER = ["user", "page", "post", "action", "ts"]
LABELS = ("pro", "anti")


class ParseError(ValueError):
    """Raised in strict mode for a malformed input line."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


@dataclass(frozen=True)
class InteractionRecord:
    """One user action (post, like or comment) on a page's post."""

    user: str
    page: str
    post: str
    action: str
    ts: int  # epoch seconds, UTC

    def sort_key(self):
        return (self.ts, self.page, self.post, self.user, self.action)


class Dataset:
    """Immutable indexed collection of interaction records.

    Secondary indices: by page, by user (like/comment actors only) and by
    (action, calendar quarter). Users are defined as the actors of like and
    comment actions; post records carry the page's publisher as actor and do
    not contribute to the user set.
    """

    def __init__(self, records):
        self.records: tuple[InteractionRecord, ...] = tuple(records)
        self.by_page: dict[str, list[int]] = {}
        self.by_user: dict[str, list[int]] = {}
        self.by_action_quarter: dict[tuple[str, tuple[int, int]], list[int]] = {}
        self.skipped_lines = 0
        for i, r in enumerate(self.records):
            self.by_page.setdefault(r.page, []).append(i)
            if r.action in ENGAGEMENT_ACTIONS:
                self.by_user.setdefault(r.user, []).append(i)
            self.by_action_quarter.setdefault((r.action, quarter_of(r.ts)), []).append(i)

    @property
    def pages(self) -> set[str]:
        return set(self.by_page)

    @property
    def users(self) -> set[str]:
        return set(self.by_user)

    def __len__(self) -> int:
        return len(self.records)

    def quarter_span(self) -> list[tuple[int, int]]:
        """All calendar quarters between the first and last record, inclusive."""
        from .timebins import quarter_range

        if not self.records:
            return []
        quarters = [q for (_a, q) in self.by_action_quarter]
        return quarter_range(min(quarters), max(quarters))

    def validate(self) -> None:
        """Consistency of the secondary indices with the record store."""
        n = sum(len(v) for v in self.by_page.values())
        assert n == len(self.records), "by_page index incomplete"
        n = sum(len(v) for v in self.by_action_quarter.values())
        assert n == len(self.records), "by_action_quarter index incomplete"
        for page, idxs in self.by_page.items():
            assert all(self.records[i].page == page for i in idxs)
        for user, idxs in self.by_user.items():
            for i in idxs:
                r = self.records[i]
                assert r.user == user and r.action in ENGAGEMENT_ACTIONS


def _record_from_obj(obj, line_no: int) -> InteractionRecord:
    if not isinstance(obj, dict):
        raise ParseError(line_no, "not a JSON object")
    try:
        user, page, post = obj["user"], obj["page"], obj["post"]
        action, ts = obj["action"], obj["ts"]
    except KeyError as exc:
        raise ParseError(line_no, f"missing field {exc.args[0]!r}") from exc
    return _make_record(user, page, post, action, ts, line_no)


def _make_record(user, page, post, action, ts, line_no: int) -> InteractionRecord:
    for name, value in (("user", user), ("page", page), ("post", post)):
        if not isinstance(value, str) or not value:
            raise ParseError(line_no, f"{name} must be a non-empty string")
    if action not in ACTIONS:
        raise ParseError(line_no, f"unknown action {action!r}")
    try:
        epoch = parse_timestamp(ts)
    except ValueError as exc:
        raise ParseError(line_no, str(exc)) from exc
    return InteractionRecord(user, page, post, action, epoch)


def parse_records(stream, format: str = "jsonl", strict: bool = True) -> Dataset:
    """Parse a line-oriented text stream into an indexed Dataset.

    In strict mode a malformed line raises ParseError with the line number;
    in lenient mode bad lines are skipped and counted in
    ``Dataset.skipped_lines``.
    """
    if isinstance(stream, (str, bytes)):
        if isinstance(stream, bytes):
            stream = stream.decode("utf-8")
        stream = io.StringIO(stream)
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unknown format {format!r}")

    records = []
    skipped = 0
    if format == "jsonl":
        for line_no, line in enumerate(stream, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                records.append(_record_from_obj(obj, line_no))
            except (json.JSONDecodeError, ParseError) as exc:
                if strict:
                    if isinstance(exc, ParseError):
                        raise
                    raise ParseError(line_no, f"invalid JSON: {exc}") from exc
                skipped += 1
    else:
        reader = csv.reader(stream)
        for line_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if line_no == 1 and row == CSV_HEADER:
                continue
            try:
                if len(row) != 5:
                    raise ParseError(line_no, f"expected 5 columns, got {len(row)}")
                records.append(_make_record(*row, line_no))
            except ParseError:
                if strict:
                    raise
                skipped += 1

    ds = Dataset(records)
    ds.skipped_lines = skipped
    return ds


def record_to_json(r: InteractionRecord) -> str:
    return json.dumps(
        {"user": r.user, "page": r.page, "post": r.post, "action": r.action,
         "ts": format_timestamp(r.ts)},
        separators=(",", ":"),
    )


def serialize_records(d: Dataset, format: str = "jsonl") -> str:
    """Canonical serialization: records sorted by (ts, page, post, user, action).

    Parsing the output and re-serializing reproduces it byte for byte.
    """
    ordered = sorted(d.records, key=InteractionRecord.sort_key)
    if format == "jsonl":
        return "".join(record_to_json(r) + "\n" for r in ordered)
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in ordered:
            w.writerow([r.user, r.page, r.post, r.action, format_timestamp(r.ts)])
        return buf.getvalue()
    raise ValueError(f"unknown format {format!r}")


def filter_dataset(d: Dataset, min_posts: int = DEFAULT_MIN_POSTS,
                   date_range=DEFAULT_RANGE) -> Dataset:
    """Apply the activity filters: date window first, then the post-count floor.

    Records outside the (inclusive) date range are dropped; pages left with
    fewer than ``min_posts`` post records are then removed together with all
    of their records. Idempotent for fixed parameters.
    """
    start, end = parse_date(date_range[0]), parse_date(date_range[1])
    if start > end:
        raise ValueError(f"empty date range {start}..{end}")
    lo, hi = day_start(start), day_end(end)

    in_range = [r for r in d.records if lo <= r.ts <= hi]
    post_counts: dict[str, int] = {}
    for r in in_range:
        if r.action == "post":
            post_counts[r.page] = post_counts.get(r.page, 0) + 1
    keep = {p for p, n in post_counts.items() if n >= min_posts}
    return Dataset(r for r in in_range if r.page in keep)


@dataclass
class SummaryRow:
    pages: int = 0
    posts: int = 0
    likes: int = 0
    likers: int = 0
    comments: int = 0
    commenters: int = 0
    users: int = 0


@dataclass
class SummaryTable:
    """Per-label dataset description: page/post/action and unique-user counts."""

    rows: dict[str, SummaryRow] = field(default_factory=dict)

    FIELDS = ("pages", "posts", "likes", "likers", "comments", "commenters", "users")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        labels = list(self.rows)
        w.writerow(["measure"] + labels)
        for f in self.FIELDS:
            w.writerow([f] + [getattr(self.rows[lab], f) for lab in labels])
        return buf.getvalue()


def dataset_summary(d: Dataset, labels: dict[str, str]) -> SummaryTable:
    """Count pages, posts, likes/likers, comments/commenters and users per label.

    Likers (commenters) are unique users with at least one like (comment) on a
    page of the label; users is the union of both. Pages missing from
    ``labels`` are reported under a separate "unlabeled" row, never merged.
    """
    pages_present = set(d.by_page)
    row_labels = list(LABELS)
    if any(p not in labels for p in pages_present):
        row_labels.append("unlabeled")

    rows = {lab: SummaryRow() for lab in row_labels}
    likers: dict[str, set[str]] = {lab: set() for lab in row_labels}
    commenters: dict[str, set[str]] = {lab: set() for lab in row_labels}

    for page in sorted(pages_present):
        lab = labels.get(page, "unlabeled")
        if lab not in rows:  # label value outside {pro, anti}
            rows[lab] = SummaryRow()
            likers[lab] = set()
            commenters[lab] = set()
            row_labels.append(lab)
        row = rows[lab]
        row.pages += 1
        for i in d.by_page[page]:
            r = d.records[i]
            if r.action == "post":
                row.posts += 1
            elif r.action == "like":
                row.likes += 1
                likers[lab].add(r.user)
            else:
                row.comments += 1
                commenters[lab].add(r.user)

    for lab in row_labels:
        rows[lab].likers = len(likers[lab])
        rows[lab].commenters = len(commenters[lab])
        rows[lab].users = len(likers[lab] | commenters[lab])
    return SummaryTable(rows)


def read_labels(stream) -> dict[str, str]:
    """Read a page label file: CSV ``page_id,label`` with optional header."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    out: dict[str, str] = {}
    for line_no, row in enumerate(csv.reader(stream), start=1):
        if not row:
            continue
        if line_no == 1 and [c.strip() for c in row] == ["page_id", "label"]:
            continue
        if len(row) != 2:
            raise ParseError(line_no, f"expected 2 columns, got {len(row)}")
        page, label = row[0].strip(), row[1].strip()
        if page in out and out[page] != label:
            raise ParseError(line_no, f"conflicting label for page {page!r}")
        out[page] = label
    return out


def write_labels(labels: dict[str, str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["page_id", "label"])
    for page in sorted(labels):
        w.writerow([page, labels[page]])
    return buf.getvalue()
