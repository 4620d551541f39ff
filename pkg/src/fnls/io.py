"""Run configuration, CSV output, and the binary snapshot format.

Config files are a single JSON document whose keys are exactly the
RunConfig field names; unknown keys are an error so typos in experiment
scripts fail loudly.  CSV numeric fields are written with 17 significant
digits, enough to reproduce every float64 bit-exactly on re-parse.

Snapshot files are a self-describing binary container: the magic bytes
"FNLS1", then little-endian u32 N, f64 L, f64 s, f64 t, then N
interleaved (re, im) float64 pairs.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Iterable, Union

import numpy as np

from .errors import ParameterError
from .spectral import Field, SpectralGrid

__all__ = [
    "SolitonInitial",
    "ProfileFileInitial",
    "PetviashviliInitial",
    "InitialSpec",
    "RunConfig",
    "load_config",
    "Snapshot",
    "write_snapshot",
    "read_snapshot",
    "SnapshotWriter",
    "format_float",
    "write_invariants_csv",
    "write_tracking_csv",
    "write_convergence_csv",
    "write_errorgrowth_csv",
]

SNAPSHOT_MAGIC = b"FNLS1"
_SNAPSHOT_HEADER = struct.Struct("<Iddd")


@dataclass(frozen=True)
class SolitonInitial:
    lambda1: float
    lambda2: float = 0.0
    x0: float = 0.0
    theta0: float = 0.0


@dataclass(frozen=True)
class ProfileFileInitial:
    path: Path


@dataclass(frozen=True)
class PetviashviliInitial:
    lambda1: float
    lambda2: float = 0.0
    tol: float = 1e-12


InitialSpec = Union[SolitonInitial, ProfileFileInitial, PetviashviliInitial]


@dataclass(frozen=True)
class RunConfig:
    """Complete description of one run; see load_config for the JSON form."""

    L: float
    N: int
    s: float
    dt: float
    T: float
    scheme_p: int
    initial: InitialSpec
    fp_tol: float = 1e-13
    fp_max_iters: int = 200
    dealias: bool = False
    invariant_stride: int = 1
    snapshot_stride: int = 100
    output_dir: Path = Path(".")

    def validate(self) -> None:
        """Check every field against its operation preconditions.

        Raises ParameterError naming the offending field.
        """
        if self.N < 4 or self.N % 2:
            raise ParameterError(f"N: must be an even integer >= 4, got {self.N!r}")
        if not self.L > 0:
            raise ParameterError(f"L: must be positive, got {self.L!r}")
        if not 0.0 < self.s <= 1.0:
            raise ParameterError(f"s: must lie in (0, 1], got {self.s!r}")
        if not self.dt > 0:
            raise ParameterError(f"dt: must be positive, got {self.dt!r}")
        if not self.T > 0:
            raise ParameterError(f"T: must be positive, got {self.T!r}")
        ratio = self.T / self.dt
        if abs(ratio - round(ratio)) > 0.5 * math.ulp(abs(ratio)) or round(ratio) < 1:
            raise ParameterError(
                f"dt: T/dt = {ratio!r} must be a positive integer (dt must "
                "divide T exactly)"
            )
        if self.scheme_p < 1:
            raise ParameterError(f"scheme_p: must be >= 1, got {self.scheme_p!r}")
        if not self.fp_tol > 0:
            raise ParameterError(f"fp_tol: must be positive, got {self.fp_tol!r}")
        if self.fp_max_iters < 1:
            raise ParameterError(f"fp_max_iters: must be >= 1, got {self.fp_max_iters!r}")
        if self.invariant_stride < 1:
            raise ParameterError(
                f"invariant_stride: must be >= 1, got {self.invariant_stride!r}"
            )
        if self.snapshot_stride < 1:
            raise ParameterError(
                f"snapshot_stride: must be >= 1, got {self.snapshot_stride!r}"
            )
        init = self.initial
        if isinstance(init, SolitonInitial):
            if not init.lambda1 - 0.25 * init.lambda2**2 > 0:
                raise ParameterError(
                    "initial: soliton requires lambda1 - lambda2^2/4 > 0, got "
                    f"lambda1 = {init.lambda1!r}, lambda2 = {init.lambda2!r}"
                )
        elif isinstance(init, PetviashviliInitial):
            if not init.tol > 0:
                raise ParameterError(f"initial.tol: must be positive, got {init.tol!r}")

    def with_output_dir(self, output_dir: Path) -> "RunConfig":
        return replace(self, output_dir=Path(output_dir))


def _take(data: dict, key: str, kind: type, where: str) -> Any:
    if key not in data:
        raise ParameterError(f"{where}{key}: missing required config key")
    value = data.pop(key)
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParameterError(f"{where}{key}: expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParameterError(f"{where}{key}: expected an integer, got {value!r}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ParameterError(f"{where}{key}: expected a boolean, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ParameterError(f"{where}{key}: expected a string, got {value!r}")
        return value
    raise AssertionError(kind)


def _parse_initial(data: Any) -> InitialSpec:
    if not isinstance(data, dict):
        raise ParameterError(f"initial: expected an object, got {data!r}")
    data = dict(data)
    kind = _take(data, "kind", str, "initial.")
    if kind == "soliton":
        lambda1 = _take(data, "lambda1", float, "initial.")
        lambda2 = _take(data, "lambda2", float, "initial.") if "lambda2" in data else 0.0
        x0 = _take(data, "x0", float, "initial.") if "x0" in data else 0.0
        theta0 = _take(data, "theta0", float, "initial.") if "theta0" in data else 0.0
        spec: InitialSpec = SolitonInitial(lambda1, lambda2, x0, theta0)
    elif kind == "profile_file":
        spec = ProfileFileInitial(Path(_take(data, "path", str, "initial.")))
    elif kind == "petviashvili":
        lambda1 = _take(data, "lambda1", float, "initial.")
        lambda2 = _take(data, "lambda2", float, "initial.") if "lambda2" in data else 0.0
        tol = _take(data, "tol", float, "initial.") if "tol" in data else 1e-12
        spec = PetviashviliInitial(lambda1, lambda2, tol)
    else:
        raise ParameterError(
            f"initial.kind: expected 'soliton', 'profile_file', or "
            f"'petviashvili', got {kind!r}"
        )
    if data:
        raise ParameterError(
            f"initial: unknown key(s) {sorted(data)} for kind {kind!r}"
        )
    return spec


def load_config(path: Path | str) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as err:
        raise ParameterError(f"config: cannot read {path}: {err}") from None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as err:
        raise ParameterError(f"config: invalid JSON in {path}: {err}") from None
    if not isinstance(data, dict):
        raise ParameterError("config: top-level JSON value must be an object")
    if "initial" not in data:
        raise ParameterError("initial: missing required config key")

    config = RunConfig(
        L=_take(data, "L", float, ""),
        N=_take(data, "N", int, ""),
        s=_take(data, "s", float, ""),
        dt=_take(data, "dt", float, ""),
        T=_take(data, "T", float, ""),
        scheme_p=_take(data, "scheme_p", int, ""),
        initial=_parse_initial(data.pop("initial")),
        fp_tol=_take(data, "fp_tol", float, "") if "fp_tol" in data else 1e-13,
        fp_max_iters=_take(data, "fp_max_iters", int, "") if "fp_max_iters" in data else 200,
        dealias=_take(data, "dealias", bool, "") if "dealias" in data else False,
        invariant_stride=_take(data, "invariant_stride", int, "") if "invariant_stride" in data else 1,
        snapshot_stride=_take(data, "snapshot_stride", int, "") if "snapshot_stride" in data else 100,
        output_dir=Path(_take(data, "output_dir", str, "")) if "output_dir" in data else Path("."),
    )
    if data:
        raise ParameterError(f"config: unknown key(s) {sorted(data)}")
    config.validate()
    return config


# --- snapshot container ------------------------------------------------------

@dataclass(frozen=True)
class Snapshot:
    field: Field
    s: float
    t: float


def write_snapshot(path: Path | str, field: Field, s: float, t: float) -> None:
    """Write a field snapshot in the FNLS1 binary container."""
    g = field.grid
    payload = np.ascontiguousarray(field.values, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(_SNAPSHOT_HEADER.pack(g.N, g.L, s, t))
        fh.write(payload)


def read_snapshot(path: Path | str) -> Snapshot:
    """Read an FNLS1 snapshot; the round trip is bit-exact."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as err:
        raise ParameterError(f"snapshot: cannot read {path}: {err}") from None
    if blob[: len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise ParameterError(f"snapshot: {path} is not an FNLS1 snapshot file")
    offset = len(SNAPSHOT_MAGIC)
    try:
        N, L, s, t = _SNAPSHOT_HEADER.unpack_from(blob, offset)
    except struct.error:
        raise ParameterError(f"snapshot: {path} is truncated") from None
    offset += _SNAPSHOT_HEADER.size
    expected = offset + 16 * N
    if len(blob) != expected:
        raise ParameterError(
            f"snapshot: {path} has {len(blob)} bytes, expected {expected} for N = {N}"
        )
    values = np.frombuffer(blob, dtype="<c16", count=N, offset=offset).copy()
    return Snapshot(field=Field(values, SpectralGrid(N, L)), s=s, t=t)


class SnapshotWriter:
    """Observer writing one snapshot file every ``stride`` steps."""

    def __init__(self, directory: Path | str, s: float, stride: int = 100,
                 prefix: str = "snapshot"):
        self.directory = Path(directory)
        self.s = s
        self.stride = stride
        self.prefix = prefix
        self.paths: list[Path] = []

    def __call__(self, n: int, t: float, field: Field) -> None:
        path = self.directory / f"{self.prefix}_{n:08d}.bin"
        write_snapshot(path, field, self.s, t)
        self.paths.append(path)


# --- CSV output --------------------------------------------------------------

def format_float(x: float) -> str:
    """17 significant digits: enough to round-trip any float64 bit-exactly."""
    return f"{x:.17g}"


def _write_csv(path: Path | str, header: str, rows: Iterable[Iterable[Any]]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join("" if v is None else format_float(v) for v in row))
            fh.write("\n")


def write_invariants_csv(path: Path | str, records) -> None:
    _write_csv(path, "t,I1,I2,H", ((r.t, r.I1, r.I2, r.H) for r in records))


def write_tracking_csv(path: Path | str, records) -> None:
    _write_csv(path, "t,amplitude,peak_x,speed",
               ((r.t, r.amplitude, r.peak_x, r.speed) for r in records))


def write_convergence_csv(path: Path | str, rows) -> None:
    _write_csv(path, "dt,err_v,rate_v,err_w,rate_w",
               ((r.dt, r.err_v, r.rate_v, r.err_w, r.rate_w) for r in rows))


def write_errorgrowth_csv(path: Path | str, series) -> None:
    _write_csv(path, "t,err_v,err_w", ((p.t, p.err_v, p.err_w) for p in series))
