"""Binary parameter checkpoints.

Layout (all integers little-endian)::

    8 bytes   magic b"ARMACPRM"
    u32       format version (1)
    u32       header length L
    L bytes   UTF-8 JSON header: kind, spec, parameter version, array sizes
    rest      float64 '<f8' payload, arrays back to back in header order
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .feedforward import FeedForward
from .spec import RegressorSpec
from .tabular import TabularMean

MAGIC = b"ARMACPRM"
VERSION = 1


class CheckpointError(ValueError):
    pass


def _arrays(model):
    if isinstance(model, FeedForward):
        if model.optimizer is None:
            return {"params": model.params.flat}
        return {"params": model.params.flat, "optimizer": model.optimizer.state()}
    n = len(model.index)
    return {"means": model._means[:n], "weights": model._weights[:n]}


def dumps(model, spec: RegressorSpec) -> bytes:
    arrays = _arrays(model)
    header = {
        "kind": spec.kind,
        "spec": spec.to_dict(),
        "version": int(model.params.version if isinstance(model, FeedForward) else model.version),
        "arrays": [[name, list(a.shape)] for name, a in arrays.items()],
    }
    if isinstance(model, TabularMean):
        header["keys"] = [k.hex() for k in sorted(model.index, key=model.index.get)]
    raw = json.dumps(header, sort_keys=True).encode()
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays.values())
    return MAGIC + struct.pack("<II", VERSION, len(raw)) + raw + payload


def loads(blob: bytes):
    if blob[:8] != MAGIC:
        raise CheckpointError("bad checkpoint magic")
    try:
        version, hlen = struct.unpack_from("<II", blob, 8)
        if version != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        header = json.loads(blob[16 : 16 + hlen].decode())
        spec = RegressorSpec.from_dict(header["spec"])
        data = {}
        offset = 16 + hlen
        for name, shape in header["arrays"]:
            size = int(np.prod(shape))
            end = offset + 8 * size
            if end > len(blob):
                raise CheckpointError("truncated checkpoint")
            data[name] = np.frombuffer(blob[offset:end], dtype="<f8").reshape(shape).astype(np.float64)
            offset = end
    except (struct.error, KeyError, TypeError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"corrupt checkpoint: {exc}") from exc
    if offset != len(blob):
        raise CheckpointError("trailing bytes in checkpoint")
    if spec.kind == "feedforward":
        model = FeedForward(spec)
        model.params.assign(data["params"])
        if "optimizer" in data:
            model.optimizer.load_state(data["optimizer"])
        else:
            model.optimizer = None
        model.params.version = header["version"]
    else:
        model = TabularMean(spec.output_width)
        for i, k in enumerate(header["keys"]):
            model.rows([bytes.fromhex(k)], create=True)
        n = len(header["keys"])
        model._means[:n] = data["means"]
        model._weights[:n] = data["weights"]
        model.version = header["version"]
    return model, spec


def save(path, model, spec: RegressorSpec) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps(model, spec))


def load(path):
    with open(path, "rb") as fh:
        return loads(fh.read())
