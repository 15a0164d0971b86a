"""Travel-time cost tensors c[i,k,w,j,m,l] plus a binary disk cache."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dubins
from .model import Instance, instance_hash, standard_heading
from .trajectory import AxisLimits, axis_duration_batch

TBTSP = "TBTSP"
DDTSP = "DDTSP"

_MAGIC = b"TBCT"
_VERSION = 1
_KIND_CODES = {TBTSP: 0, DDTSP: 1}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}


class StaleCacheError(RuntimeError):
    """Cache file does not belong to the requested instance."""


@dataclass(frozen=True)
class EdgeCount:
    omega: int


def edge_count(n: int, h: int, s: int) -> EdgeCount:
    """Number of edge trajectories n^2 * h^2 * s^2."""
    return EdgeCount((n * h * s) ** 2)


@dataclass
class CostTensor:
    """Dense travel times indexed (i, k, w, j, m, l); self-loops are +inf."""

    n: int
    h: int
    s: int
    kind: str
    costs: np.ndarray
    instance_hash: str

    def __post_init__(self):
        expected = (self.n, self.h, self.s, self.n, self.h, self.s)
        if self.costs.shape != expected:
            raise ValueError(f"cost array shape {self.costs.shape} != {expected}")
        if self.kind not in _KIND_CODES:
            raise ValueError(f"unknown tensor kind {self.kind!r}")

    @property
    def config_count(self) -> int:
        return self.h * self.s

    def flat(self) -> np.ndarray:
        """View shaped (n, h*s, n, h*s); config index c = heading_idx*s + speed_idx."""
        k = self.config_count
        return self.costs.reshape(self.n, k, self.n, k)

    def config_of(self, flat_idx: int) -> tuple[int, int]:
        return divmod(flat_idx, self.s)

    def flat_index(self, heading_idx: int, speed_idx: int) -> int:
        return heading_idx * self.s + speed_idx


def _config_velocities(instance: Instance) -> tuple[np.ndarray, np.ndarray]:
    th = np.array(instance.scheme.headings)
    sp = np.array(instance.scheme.speeds)
    vx = np.sin(th)[:, None] * sp[None, :]
    vy = np.cos(th)[:, None] * sp[None, :]
    return vx.reshape(-1), vy.reshape(-1)


def build_tbtsp_costs(instance: Instance, cache_dir=None) -> CostTensor:
    """Planar time-optimal durations for every ordered configuration pair.

    Vectorized over (start config, target waypoint, end config) blocks per
    source waypoint; entries match the scalar planar solver exactly.
    """
    cached = _try_cache(instance, TBTSP, cache_dir)
    if cached is not None:
        return cached
    n = instance.n
    h = len(instance.scheme.headings)
    s = len(instance.scheme.speeds)
    xs = np.array([w.x for w in instance.waypoints])
    ys = np.array([w.y for w in instance.waypoints])
    vxf, vyf = _config_velocities(instance)
    axis_limits = AxisLimits(instance.limits.v_axis, instance.limits.a_axis)

    k = h * s
    hold_x = 4.0 * np.abs(vxf) / axis_limits.a_axis  # matches position_hold_duration
    hold_y = 4.0 * np.abs(vyf) / axis_limits.a_axis
    flat = np.empty((n, k, n, k))
    for i in range(n):
        tx = axis_duration_batch((xs - xs[i])[None, :, None],
                                 vxf[:, None, None], vxf[None, None, :], axis_limits)
        ty = axis_duration_batch((ys - ys[i])[None, :, None],
                                 vyf[:, None, None], vyf[None, None, :], axis_limits)
        # zero-duration axes with moving boundaries cannot linger: price them
        # at the position-hold loop so every cost is a realizable duration
        tx = np.where(tx == 0.0, hold_x[:, None, None], tx)
        ty = np.where(ty == 0.0, hold_y[:, None, None], ty)
        block = np.maximum(tx, ty)
        block[:, i, :] = np.inf
        flat[i] = block
    tensor = CostTensor(n, h, s, TBTSP, flat.reshape(n, h, s, n, h, s),
                        instance_hash(instance))
    _store_cache(tensor, instance, cache_dir)
    return tensor


def build_ddtsp_costs(instance: Instance, cache_dir=None) -> CostTensor:
    """Dubins travel times between heading-only poses (speed dimension is 1)."""
    cached = _try_cache(instance, DDTSP, cache_dir)
    if cached is not None:
        return cached
    n = instance.n
    h = len(instance.scheme.headings)
    psis = [standard_heading(th) for th in instance.scheme.headings]
    radius = dubins.min_turn_radius(instance.limits)
    v = instance.limits.v_max
    costs = np.full((n, h, 1, n, h, 1), np.inf)
    poses = [[dubins.Pose(w.x, w.y, psi) for psi in psis] for w in instance.waypoints]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for ki in range(h):
                a = poses[i][ki]
                for mj in range(h):
                    costs[i, ki, 0, j, mj, 0] = \
                        dubins.shortest_dubins(a, poses[j][mj], radius).length / v
    tensor = CostTensor(n, h, 1, DDTSP, costs, instance_hash(instance))
    _store_cache(tensor, instance, cache_dir)
    return tensor


# --- disk cache -------------------------------------------------------------
#
# Layout: magic, version u32, kind u8, n/h/s u32 (little-endian), 64 hex chars
# of the instance hash, then row-major float64 payload.  Roundtrips are
# bit-identical.


def cache_path(cache_dir, instance: Instance, kind: str) -> Path:
    return Path(cache_dir) / f"{kind.lower()}_{instance_hash(instance)[:24]}.cost"


def save_tensor(tensor: CostTensor, path) -> None:
    header = _MAGIC + struct.pack("<IBIII", _VERSION, _KIND_CODES[tensor.kind],
                                  tensor.n, tensor.h, tensor.s)
    payload = np.ascontiguousarray(tensor.costs, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(tensor.instance_hash.encode("ascii"))
        fh.write(payload)


def load_tensor(path, expected_hash: str | None = None) -> CostTensor:
    with open(path, "rb") as fh:
        blob = fh.read()
    head_len = 4 + struct.calcsize("<IBIII")
    if blob[:4] != _MAGIC:
        raise ValueError(f"{path}: not a cost tensor file")
    version, kind_code, n, h, s = struct.unpack("<IBIII", blob[4:head_len])
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported cache version {version}")
    stored_hash = blob[head_len:head_len + 64].decode("ascii")
    if expected_hash is not None and stored_hash != expected_hash:
        raise StaleCacheError(
            f"{path}: cached tensor belongs to instance {stored_hash[:12]}..., "
            f"expected {expected_hash[:12]}...")
    data = np.frombuffer(blob[head_len + 64:], dtype="<f8")
    costs = data.reshape(n, h, s, n, h, s).copy()
    return CostTensor(n, h, s, _KIND_NAMES[kind_code], costs, stored_hash)


def cache_roundtrip(tensor: CostTensor, path) -> CostTensor:
    """Write then re-read a tensor; the result is bit-identical."""
    save_tensor(tensor, path)
    return load_tensor(path, expected_hash=tensor.instance_hash)


def _try_cache(instance: Instance, kind: str, cache_dir) -> CostTensor | None:
    if cache_dir is None:
        return None
    path = cache_path(cache_dir, instance, kind)
    if not path.exists():
        return None
    return load_tensor(path, expected_hash=instance_hash(instance))


def _store_cache(tensor: CostTensor, instance: Instance, cache_dir) -> None:
    if cache_dir is None:
        return
    directory = Path(cache_dir)
    directory.mkdir(parents=True, exist_ok=True)
    save_tensor(tensor, cache_path(directory, instance, tensor.kind))
