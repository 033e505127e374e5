"""Canonical file formats: JSONL records, snapshots, and the embedding container.

JSONL files carry one object per line with keys exactly matching the domain
type fields. The embedding container is a little-endian binary format that
round-trips bit-exactly:

    magic "CTEM" | version u16 | dimension u32 | count u64
    then per observation: frame_index u32 | dimension * f32
"""

from __future__ import annotations

import datetime as dt
import json
import struct
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .model import (
    ChannelRecord,
    ContractError,
    FaceObservation,
    PopularitySeries,
    Sample,
    VideoRecord,
)

EMBEDDING_MAGIC = b"CTEM"
EMBEDDING_VERSION = 1

_HEADER = struct.Struct("<4sHIQ")


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _parse_date(raw: str) -> dt.date:
    return dt.date.fromisoformat(raw)


# -- channels ---------------------------------------------------------------

def channel_to_dict(c: ChannelRecord) -> dict:
    return {
        "channel_id": c.channel_id,
        "title": c.title,
        "category": c.category,
        "mcn": c.mcn,
        "featured_channels": list(c.featured_channels),
        "video_count": c.video_count,
    }


def channel_from_dict(d: dict) -> ChannelRecord:
    return ChannelRecord(
        channel_id=d["channel_id"],
        title=d["title"],
        category=d["category"],
        mcn=d.get("mcn"),
        featured_channels=tuple(d.get("featured_channels", ())),
        video_count=int(d.get("video_count", 0)),
    )


# -- videos -----------------------------------------------------------------

def video_to_dict(v: VideoRecord) -> dict:
    return {
        "video_id": v.video_id,
        "channel_id": v.channel_id,
        "upload_date": v.upload_date.isoformat(),
        "category": v.category,
        "frame_count": v.frame_count,
        "frame_rate": v.frame_rate,
    }


def video_from_dict(d: dict) -> VideoRecord:
    return VideoRecord(
        video_id=d["video_id"],
        channel_id=d["channel_id"],
        upload_date=_parse_date(d["upload_date"]),
        category=d["category"],
        frame_count=int(d["frame_count"]),
        frame_rate=float(d["frame_rate"]),
    )


# -- snapshots ---------------------------------------------------------------

def snapshot_row(subject_id: str, date: dt.date, views: int,
                 subscribers: int | None) -> dict:
    return {
        "subject_id": subject_id,
        "date": date.isoformat(),
        "views": int(views),
        "subscribers": None if subscribers is None else int(subscribers),
    }


def write_jsonl(path: Path | str, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(_dumps(row))
            fh.write("\n")


def read_jsonl(path: Path | str) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def write_channels(path: Path | str, channels: Iterable[ChannelRecord]) -> None:
    write_jsonl(path, (channel_to_dict(c) for c in channels))


def read_channels(path: Path | str) -> list[ChannelRecord]:
    return [channel_from_dict(d) for d in read_jsonl(path)]


def write_videos(path: Path | str, videos: Iterable[VideoRecord]) -> None:
    write_jsonl(path, (video_to_dict(v) for v in videos))


def read_videos(path: Path | str) -> list[VideoRecord]:
    return [video_from_dict(d) for d in read_jsonl(path)]


def read_series(path: Path | str) -> dict[str, PopularitySeries]:
    """Group snapshot rows by subject into date-ordered series."""
    by_subject: dict[str, list[Sample]] = {}
    for d in read_jsonl(path):
        sample = Sample(
            date=_parse_date(d["date"]),
            views=int(d["views"]),
            subscribers=None if d.get("subscribers") is None else int(d["subscribers"]),
        )
        by_subject.setdefault(d["subject_id"], []).append(sample)
    return {
        subject: PopularitySeries(subject, tuple(sorted(samples, key=lambda s: s.date)))
        for subject, samples in by_subject.items()
    }


# -- embedding container ------------------------------------------------------

def write_embeddings(target: Path | str | IO[bytes],
                     observations: Iterable[FaceObservation],
                     dimension: int) -> None:
    obs = list(observations)
    for o in obs:
        if o.embedding.shape != (dimension,):
            raise ContractError(
                f"embedding of frame {o.frame_index} has shape {o.embedding.shape}, "
                f"expected ({dimension},)"
            )

    def _write(fh: IO[bytes]) -> None:
        fh.write(_HEADER.pack(EMBEDDING_MAGIC, EMBEDDING_VERSION, dimension, len(obs)))
        for o in obs:
            fh.write(struct.pack("<I", o.frame_index))
            fh.write(np.asarray(o.embedding, dtype="<f4").tobytes())

    if isinstance(target, (str, Path)):
        with open(target, "wb") as fh:
            _write(fh)
    else:
        _write(target)


def read_embeddings(source: Path | str | IO[bytes], video_id: str = "") -> list[FaceObservation]:
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()

    if len(data) < _HEADER.size:
        raise ContractError("embedding container truncated before header")
    magic, version, dimension, count = _HEADER.unpack_from(data)
    if magic != EMBEDDING_MAGIC:
        raise ContractError(f"bad embedding container magic {magic!r}")
    if version != EMBEDDING_VERSION:
        raise ContractError(f"unsupported embedding container version {version}")

    record = struct.Struct(f"<I{dimension}f")
    expected = _HEADER.size + count * record.size
    if len(data) != expected:
        raise ContractError(
            f"embedding container size {len(data)} does not match header ({expected})"
        )

    out = []
    offset = _HEADER.size
    for _ in range(count):
        frame_index = struct.unpack_from("<I", data, offset)[0]
        vec = np.frombuffer(data, dtype="<f4", count=dimension, offset=offset + 4).copy()
        out.append(FaceObservation(video_id=video_id, frame_index=frame_index, embedding=vec))
        offset += record.size
    return out


# -- data store ----------------------------------------------------------------

class DataStore:
    """A directory holding the canonical dataset files.

    Layout: channels.jsonl, videos.jsonl, snapshots.jsonl, and one
    embeddings/<video_id>.ctem container per analyzed video.
    """

    def __init__(self, root: Path | str):
        self.root = Path(root)

    @property
    def channels_path(self) -> Path:
        return self.root / "channels.jsonl"

    @property
    def videos_path(self) -> Path:
        return self.root / "videos.jsonl"

    @property
    def snapshots_path(self) -> Path:
        return self.root / "snapshots.jsonl"

    @property
    def embeddings_dir(self) -> Path:
        return self.root / "embeddings"

    def ensure(self) -> "DataStore":
        self.root.mkdir(parents=True, exist_ok=True)
        return self

    def load_channels(self) -> list[ChannelRecord]:
        if not self.channels_path.exists():
            return []
        return read_channels(self.channels_path)

    def save_channels(self, channels: Iterable[ChannelRecord]) -> None:
        self.ensure()
        write_channels(self.channels_path, sorted(channels, key=lambda c: c.channel_id))

    def load_videos(self) -> list[VideoRecord]:
        if not self.videos_path.exists():
            return []
        return read_videos(self.videos_path)

    def save_videos(self, videos: Iterable[VideoRecord]) -> None:
        self.ensure()
        write_videos(self.videos_path, sorted(videos, key=lambda v: v.video_id))

    def load_series(self) -> dict[str, PopularitySeries]:
        if not self.snapshots_path.exists():
            return {}
        return read_series(self.snapshots_path)

    def upsert_snapshots(self, rows: Iterable[dict]) -> None:
        """Insert snapshot rows, replacing any existing (subject, date) entry."""
        self.ensure()
        existing: dict[tuple[str, str], dict] = {}
        if self.snapshots_path.exists():
            for row in read_jsonl(self.snapshots_path):
                existing[(row["subject_id"], row["date"])] = row
        for row in rows:
            existing[(row["subject_id"], row["date"])] = row
        write_jsonl(self.snapshots_path, (existing[k] for k in sorted(existing)))

    def embeddings_path(self, video_id: str) -> Path:
        return self.embeddings_dir / f"{video_id}.ctem"

    def save_embeddings(self, video_id: str, observations: Iterable[FaceObservation],
                        dimension: int) -> None:
        self.embeddings_dir.mkdir(parents=True, exist_ok=True)
        write_embeddings(self.embeddings_path(video_id), observations, dimension)

    def load_embeddings(self, video_id: str) -> list[FaceObservation]:
        return read_embeddings(self.embeddings_path(video_id), video_id)
