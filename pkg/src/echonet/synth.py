"""Seeded planted-polarization dataset generator.

Produces datasets with a known page/user side assignment so every downstream
analysis can be checked against ground truth. Each entity (page or user) draws
from its own counter-based Philox stream keyed by (seed, entity index), so the
output is independent of generation order and reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date

import numpy as np

from .ingest import Dataset, InteractionRecord
from .timebins import day_end, day_start, parse_date

SIDES = ("pro", "anti")

# disjoint stream namespaces inside the 128-bit Philox key space
_PAGE_STREAM = 1 << 40
_USER_STREAM = 2 << 40

ACTIVITY_CAP = 5000


@dataclass(frozen=True)
class SynthConfig:
    users_per_side: tuple[int, int]  # (pro, anti)
    pages_per_side: tuple[int, int] = (145, 98)
    p_out: float = 0.02
    # ("fixed", n) or ("lognormal", mu, sigma): per-user action count
    actions_per_user: tuple = ("lognormal", 2.0, 1.0)
    comment_fraction: float = 0.2
    posts_per_page: int = 50
    time_range: tuple = (date(2010, 1, 1), date(2017, 5, 31))
    seed: int = 0
    # optional user-disjoint page blocks per side, e.g. ((6, 5, 4), (15,)):
    # users split across blocks proportionally to block page counts, and
    # own-side actions stay within the user's block
    sub_blocks: tuple | None = None

    def validate(self) -> None:
        if not 0.0 <= self.p_out <= 1.0:
            raise ValueError(f"p_out must be in [0,1], got {self.p_out}")
        if not 0.0 <= self.comment_fraction <= 1.0:
            raise ValueError(f"comment_fraction must be in [0,1], got {self.comment_fraction}")
        if min(self.users_per_side) < 0 or min(self.pages_per_side) < 0:
            raise ValueError("counts must be non-negative")
        if self.posts_per_page < 0:
            raise ValueError("posts_per_page must be non-negative")
        for side, users, pages in zip(SIDES, self.users_per_side, self.pages_per_side):
            if users > 0 and pages == 0:
                raise ValueError(f"side {side!r} has {users} users but no pages")
        kind = self.actions_per_user[0]
        if kind == "fixed":
            if len(self.actions_per_user) != 2 or self.actions_per_user[1] < 0:
                raise ValueError(f"bad fixed activity spec {self.actions_per_user}")
        elif kind == "lognormal":
            if len(self.actions_per_user) != 3 or self.actions_per_user[2] < 0:
                raise ValueError(f"bad lognormal activity spec {self.actions_per_user}")
        else:
            raise ValueError(f"unknown activity distribution {kind!r}")
        if self.sub_blocks is not None:
            for side, blocks, pages in zip(SIDES, self.sub_blocks, self.pages_per_side):
                if min(blocks) <= 0 or sum(blocks) != pages:
                    raise ValueError(
                        f"{side} sub_blocks {blocks} must be positive and sum to {pages}")
        start, end = parse_date(self.time_range[0]), parse_date(self.time_range[1])
        if start > end:
            raise ValueError(f"empty time range {start}..{end}")


@dataclass(frozen=True)
class PlantedTruth:
    """Ground-truth side of every generated page and user."""

    page_side: dict[str, str]
    user_side: dict[str, str]


def _entity_rng(seed: int, entity: int) -> np.random.Generator:
    key = (seed & 0xFFFFFFFFFFFFFFFF) | (entity << 64)
    return np.random.Generator(np.random.Philox(key=key))


def _split_proportional(total: int, weights: tuple[int, ...]) -> list[int]:
    """Largest-remainder split of ``total`` across ``weights``."""
    wsum = sum(weights)
    raw = [total * w / wsum for w in weights]
    out = [int(math.floor(x)) for x in raw]
    rest = total - sum(out)
    order = sorted(range(len(weights)), key=lambda i: (-(raw[i] - out[i]), i))
    for i in order[:rest]:
        out[i] += 1
    return out


def generate(config: SynthConfig):
    """Generate (Dataset, PlantedTruth, page label map) from a config.

    Every page emits ``posts_per_page`` post records at uniform times in the
    range; every user draws an action count, then each action independently
    targets a uniform own-side page with probability 1 - p_out (restricted to
    the user's block when sub-blocks are configured) and a uniform page on the
    opposite side otherwise. Actions are comments with probability
    ``comment_fraction``, likes otherwise.
    """
    config.validate()
    t0 = day_start(parse_date(config.time_range[0]))
    t1 = day_end(parse_date(config.time_range[1]))

    pages_by_side = {}
    for side, n_pages in zip(SIDES, config.pages_per_side):
        pages_by_side[side] = [f"{side}_p{i:04d}" for i in range(n_pages)]
    all_pages = pages_by_side["pro"] + pages_by_side["anti"]

    # block boundaries: list of (start, stop) page-index slices per side
    blocks_by_side = {}
    for si, side in enumerate(SIDES):
        if config.sub_blocks is None:
            blocks_by_side[side] = [(0, config.pages_per_side[si])]
        else:
            bounds, at = [], 0
            for b in config.sub_blocks[si]:
                bounds.append((at, at + b))
                at += b
            blocks_by_side[side] = bounds

    page_side: dict[str, str] = {}
    user_side: dict[str, str] = {}
    records: list[InteractionRecord] = []

    # page posts, one Philox stream per page
    post_ids: dict[str, list[str]] = {}
    side_of_index = ["pro"] * config.pages_per_side[0] + ["anti"] * config.pages_per_side[1]
    for page_index, page in enumerate(all_pages):
        page_side[page] = side_of_index[page_index]
        rng = _entity_rng(config.seed, _PAGE_STREAM + page_index)
        ts = rng.integers(t0, t1 + 1, size=config.posts_per_page)
        ids = [f"{page}_s{j:05d}" for j in range(config.posts_per_page)]
        post_ids[page] = ids
        for j, pid in enumerate(ids):
            records.append(InteractionRecord(page, page, pid, "post", int(ts[j])))

    # per-user action streams
    user_index = 0
    for si, side in enumerate(SIDES):
        other = SIDES[1 - si]
        n_users = config.users_per_side[si]
        blocks = blocks_by_side[side]
        users_per_block = _split_proportional(
            n_users, tuple(b - a for a, b in blocks)) if len(blocks) > 1 else [n_users]
        block_of_user = np.repeat(np.arange(len(blocks)), users_per_block)
        for u in range(n_users):
            user = f"{side}_u{u:06d}"
            user_side[user] = side
            rng = _entity_rng(config.seed, _USER_STREAM + user_index)
            user_index += 1

            if config.actions_per_user[0] == "fixed":
                n_act = int(config.actions_per_user[1])
            else:
                _, mu, sigma = config.actions_per_user
                n_act = int(min(math.ceil(rng.lognormal(mu, sigma)), ACTIVITY_CAP))
            if n_act == 0:
                continue

            # fixed draw order keeps the stream layout independent of outcomes
            cross = rng.random(n_act) < config.p_out
            page_u = rng.random(n_act)
            post_idx = rng.integers(0, max(config.posts_per_page, 1), size=n_act)
            is_comment = rng.random(n_act) < config.comment_fraction
            ts = rng.integers(t0, t1 + 1, size=n_act)

            lo, hi = blocks[block_of_user[u]] if len(blocks) > 1 else blocks[0]
            own_pages = pages_by_side[side][lo:hi]
            other_pages = pages_by_side[other]
            for k in range(n_act):
                if cross[k]:
                    pool = other_pages
                else:
                    pool = own_pages
                page = pool[int(page_u[k] * len(pool))]
                post = post_ids[page][post_idx[k]] if config.posts_per_page else f"{page}_s0"
                action = "comment" if is_comment[k] else "like"
                records.append(InteractionRecord(user, page, post, action, int(ts[k])))

    labels = dict(page_side)
    return Dataset(records), PlantedTruth(page_side, user_side), labels
