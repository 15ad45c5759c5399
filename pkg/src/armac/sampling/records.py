"""Training records produced by the acting loop, and their binary format.

Advantages come from a stored critic, never from importance weights. The
file layout is documented in ``docs/formats.md``.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np

from armac.games import InfoStateKey

from .trajectory import Trajectory

MAGIC = b"ARMACREC"
VERSION = 1


class RecordFormatError(ValueError):
    pass


@dataclass
class RecordStep:
    history_key: bytes
    info_key: InfoStateKey
    player: int
    action: int
    legal: np.ndarray  # legal action ids, ascending
    policy: np.ndarray  # pi^j(s) over ``legal``
    advantages: np.ndarray | None = None  # r over ``legal``; learner steps only
    value: float | None = None  # v_j(h) used to form the advantages


@dataclass
class EpisodeRecord:
    learner: int
    snapshot_index: int
    returns: np.ndarray
    steps: list[RecordStep]
    candidate: int = -1
    primary: bool = True
    truncated: bool = False
    final_history_key: bytes = b""
    final_info_key: InfoStateKey | None = None
    final_legal: np.ndarray | None = field(default=None, repr=False)

    def learner_steps(self):
        return [s for s in self.steps if s.player == self.learner]

    def max_abs_advantage(self) -> float:
        vals = [np.abs(s.advantages).max() for s in self.steps if s.advantages is not None and len(s.advantages)]
        return max(vals, default=0.0)


def build_episode_record(traj: Trajectory, learner: int, snapshot_index: int, snapshot, candidate=-1, primary=True):
    """Attach snapshot-critic advantages to the learner's decisions.

    ``snapshot`` must provide ``policy(key, legal_mask)`` (pi^j) and
    ``q_values(history_key)`` returning an ``(n, max_actions)`` array.
    """
    if snapshot is None:
        raise ValueError(f"snapshot {snapshot_index} is not available")
    steps = []
    for s in traj.steps:
        legal = np.flatnonzero(s.legal)
        if s.player == learner:
            pi = np.asarray(snapshot.policy(s.info_key, s.legal))
            q = np.asarray(snapshot.q_values(s.history_key))[learner]
            v = float(np.dot(pi[legal], q[legal]))
            steps.append(RecordStep(s.history_key, s.info_key, s.player, s.action, legal, pi[legal], q[legal] - v, v))
        else:
            # other players followed pi^j exactly, so the behavior dist is pi^j(s)
            steps.append(RecordStep(s.history_key, s.info_key, s.player, s.action, legal, s.dist[legal]))
    return EpisodeRecord(
        learner=learner,
        snapshot_index=snapshot_index,
        returns=traj.returns.copy(),
        steps=steps,
        candidate=candidate,
        primary=primary,
        truncated=traj.truncated,
        final_history_key=traj.final_history_key,
        final_info_key=traj.final_info_key,
        final_legal=traj.final_legal,
    )


# -- binary format -----------------------------------------------------------

_HEAD = struct.Struct("<BhiiB")  # num_players, learner, snapshot, candidate, flags
_STEP = struct.Struct("<bBBHH")  # player, action, num_legal, history len, info len


def _blob(b: bytes) -> bytes:
    return struct.pack("<H", len(b)) + b


def encode_record(rec: EpisodeRecord) -> bytes:
    flags = (1 if rec.primary else 0) | (2 if rec.truncated else 0)
    out = [_HEAD.pack(len(rec.returns), rec.learner, rec.snapshot_index, rec.candidate, flags)]
    out.append(np.asarray(rec.returns, dtype="<f8").tobytes())
    out.append(struct.pack("<I", len(rec.steps)))
    for s in rec.steps:
        has_adv = s.advantages is not None
        out.append(_STEP.pack(s.player, s.action, len(s.legal), len(s.history_key), len(s.info_key.data)))
        out.append(s.history_key + s.info_key.data)
        out.append(np.asarray(s.legal, dtype=np.uint8).tobytes())
        out.append(np.asarray(s.policy, dtype="<f8").tobytes())
        out.append(struct.pack("<B", has_adv))
        if has_adv:
            out.append(np.asarray(s.advantages, dtype="<f8").tobytes() + struct.pack("<d", s.value))
    out.append(_blob(rec.final_history_key))
    if rec.final_info_key is None:
        out.append(struct.pack("<b", -1))
    else:
        out.append(struct.pack("<b", rec.final_info_key.player) + _blob(rec.final_info_key.data))
        out.append(_blob(np.asarray(rec.final_legal, dtype=np.uint8).tobytes()))
    return b"".join(out)


class _Reader:
    def __init__(self, buf: bytes):
        self.buf, self.pos = buf, 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise RecordFormatError("record truncated")
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, st: struct.Struct | str):
        st = struct.Struct(st) if isinstance(st, str) else st
        return st.unpack(self.take(st.size))

    def floats(self, n: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * n), dtype="<f8").astype(np.float64)

    def blob(self) -> bytes:
        (n,) = self.unpack("<H")
        return self.take(n)


def decode_record(buf: bytes) -> EpisodeRecord:
    r = _Reader(buf)
    n, learner, snap, cand, flags = r.unpack(_HEAD)
    returns = r.floats(n)
    (num_steps,) = r.unpack("<I")
    steps = []
    for _ in range(num_steps):
        player, action, nl, hl, il = r.unpack(_STEP)
        hist = r.take(hl)
        info = InfoStateKey(player, r.take(il))
        legal = np.frombuffer(r.take(nl), dtype=np.uint8).astype(np.int64)
        policy = r.floats(nl)
        (has_adv,) = r.unpack("<B")
        adv = value = None
        if has_adv:
            adv = r.floats(nl)
            (value,) = r.unpack("<d")
        steps.append(RecordStep(hist, info, player, action, legal, policy, adv, value))
    final_hist = r.blob()
    (fp,) = r.unpack("<b")
    final_key = final_legal = None
    if fp >= 0:
        final_key = InfoStateKey(fp, r.blob())
        final_legal = np.frombuffer(r.blob(), dtype=np.uint8).astype(bool)
    if r.pos != len(buf):
        raise RecordFormatError("trailing bytes in record")
    return EpisodeRecord(
        learner, snap, returns, steps, cand, bool(flags & 1), bool(flags & 2), final_hist, final_key, final_legal
    )


def write_records(fh, records) -> None:
    fh.write(MAGIC + struct.pack("<H", VERSION))
    for rec in records:
        payload = encode_record(rec)
        fh.write(struct.pack("<I", len(payload)))
        fh.write(payload)


def read_records(fh) -> list[EpisodeRecord]:
    head = fh.read(len(MAGIC) + 2)
    if head[: len(MAGIC)] != MAGIC:
        raise RecordFormatError("bad record file magic")
    (version,) = struct.unpack("<H", head[len(MAGIC) :])
    if version != VERSION:
        raise RecordFormatError(f"unsupported record version {version}")
    out = []
    while True:
        size = fh.read(4)
        if not size:
            return out
        if len(size) < 4:
            raise RecordFormatError("truncated length prefix")
        (length,) = struct.unpack("<I", size)
        payload = fh.read(length)
        if len(payload) != length:
            raise RecordFormatError("record truncated")
        out.append(decode_record(payload))


def dumps(records) -> bytes:
    buf = io.BytesIO()
    write_records(buf, records)
    return buf.getvalue()


def loads(blob: bytes) -> list[EpisodeRecord]:
    return read_records(io.BytesIO(blob))
