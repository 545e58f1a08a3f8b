"""JSON channel/policy spec files.

Keys: ``k``, ``q_size``, ``v_sizes``, ``x_sizes``, ``y_size``, ``z_size``,
``p_q`` (length ``q_size``), ``p_v_given_q`` (one ``q_size x |V_i|`` table per
transmitter), ``p_x_given_v`` (one ``|V_i| x |X_i|`` table per transmitter)
and ``p_yz_given_x``. The channel may be nested or flat; flat arrays are
row-major with ``x_1`` outermost, then ``x_2 .. x_k``, then ``y``, then ``z``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .infotheory import ChannelSpec, DistributionError, InputPolicy

LOAD_TOL = 1e-9
REQUIRED = ("k", "q_size", "v_sizes", "x_sizes", "y_size", "z_size",
            "p_q", "p_v_given_q", "p_x_given_v", "p_yz_given_x")


class SpecParseError(ValueError):
    """The file is not valid JSON or lacks required keys (exit code 2)."""


class SpecInvariantError(ValueError):
    """Shapes or pmf slices violate the declared alphabets (exit code 3)."""


@dataclass(frozen=True)
class SpecFile:
    channel: ChannelSpec
    policy: InputPolicy

    @property
    def k(self) -> int:
        return self.channel.k


def _array(name: str, value, shape: tuple[int, ...]) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise SpecInvariantError(f"{name} is not a rectangular numeric array") from None
    if arr.shape != shape:
        if arr.size == int(np.prod(shape)) and arr.ndim == 1 and len(shape) > 1:
            arr = arr.reshape(shape)
        else:
            raise SpecInvariantError(f"{name} has shape {arr.shape}, declared alphabets give {shape}")
    return arr


def _normalize(name: str, arr: np.ndarray, axes) -> np.ndarray:
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise SpecInvariantError(f"{name} has negative or non-finite entries")
    sums = arr.sum(axis=axes, keepdims=True)
    bad = np.argwhere(np.abs(np.squeeze(sums, axis=axes) - 1.0) > LOAD_TOL)
    if bad.size or (np.ndim(np.squeeze(sums, axis=axes)) == 0 and abs(float(sums.sum()) - 1.0) > LOAD_TOL):
        where = ",".join(str(int(i)) for i in bad[0]) if bad.size else ""
        total = float(np.squeeze(sums, axis=axes)[tuple(bad[0])]) if bad.size else float(sums.sum())
        label = f"{name}[{where}]" if where else name
        raise SpecInvariantError(f"{label} sums to {total:.12g}, expected 1 (tolerance {LOAD_TOL})")
    return arr / sums


def parse_spec(data: dict) -> SpecFile:
    if not isinstance(data, dict):
        raise SpecParseError("spec must be a JSON object")
    missing = [key for key in REQUIRED if key not in data]
    if missing:
        raise SpecParseError(f"spec is missing keys: {', '.join(missing)}")
    try:
        k = int(data["k"])
        q_size = int(data["q_size"])
        v_sizes = [int(v) for v in data["v_sizes"]]
        x_sizes = [int(v) for v in data["x_sizes"]]
        y_size, z_size = int(data["y_size"]), int(data["z_size"])
    except (TypeError, ValueError) as exc:
        raise SpecParseError(f"bad size field: {exc}") from None
    if k < 1:
        raise SpecInvariantError(f"k must be positive, got {k}")
    if len(v_sizes) != k or len(x_sizes) != k:
        raise SpecInvariantError(f"v_sizes and x_sizes must have k={k} entries")
    if min([q_size, y_size, z_size, *v_sizes, *x_sizes]) < 1:
        raise SpecInvariantError("alphabet sizes must be positive")
    if len(data["p_v_given_q"]) != k or len(data["p_x_given_v"]) != k:
        raise SpecInvariantError(f"p_v_given_q and p_x_given_v need one table per transmitter (k={k})")

    p_q = _normalize("p_q", _array("p_q", data["p_q"], (q_size,)), (0,))
    p_vq, p_xv = [], []
    for i in range(k):
        name = f"p_v_given_q[{i + 1}]"
        p_vq.append(_normalize(name, _array(name, data["p_v_given_q"][i], (q_size, v_sizes[i])), (1,)))
        name = f"p_x_given_v[{i + 1}]"
        p_xv.append(_normalize(name, _array(name, data["p_x_given_v"][i], (v_sizes[i], x_sizes[i])), (1,)))
    w = _array("p_yz_given_x", data["p_yz_given_x"], (*x_sizes, y_size, z_size))
    w = _normalize("p_yz_given_x", w, (-2, -1))
    try:
        return SpecFile(ChannelSpec(w, k), InputPolicy(p_q, tuple(p_vq), tuple(p_xv)))
    except DistributionError as exc:
        raise SpecInvariantError(str(exc)) from None


def load_spec(path: str | Path) -> SpecFile:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{path} is not valid JSON: {exc}") from None
    return parse_spec(data)


def dump_spec(channel: ChannelSpec, policy: InputPolicy) -> dict:
    return {
        "k": channel.k,
        "q_size": policy.q_size,
        "v_sizes": list(policy.v_sizes),
        "x_sizes": list(channel.x_sizes),
        "y_size": channel.y_size,
        "z_size": channel.z_size,
        "p_q": policy.p_q.tolist(),
        "p_v_given_q": [a.tolist() for a in policy.p_v_given_q],
        "p_x_given_v": [a.tolist() for a in policy.p_x_given_v],
        "p_yz_given_x": channel.w.reshape(-1).tolist(),
    }
