#!/usr/bin/env python3
"""
1D and 2D parameter sweeps over the closed-form scattering powers.

Grid points are evaluated in fixed-size chunks on a thread pool. The
chunk partition depends only on the chunk size, never on the number of
threads, so the gathered tables are bit-identical for any thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from processors.errors import ConfigError, DegenerateDenominator, SweepPointError
from processors.scatter_core import (
    PARAMETER_UNITS,
    QUANTITIES,
    RATE_PARAMETERS,
    Number,
    ParameterName,
    Quantity,
    SystemParams,
    grid_amplitudes,
    powers,
)
from utils.config_manager import config_manager

FIELDS = ("eta", "g", "h", "omega1", "omega2", "gamma", "theta")


class AxisSpec(BaseModel):
    """Inclusive linear grid over one parameter"""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    name: ParameterName
    start: Number
    stop: Number
    count: int = Field(default_factory=lambda: config_manager.default("resolution"), ge=2)

    @model_validator(mode="after")
    def _check_range(self):
        if not self.stop > self.start:
            raise ValueError(f"axis '{self.name}': stop must be greater than start")
        if self.name in RATE_PARAMETERS and self.start < 0:
            raise ValueError(f"axis '{self.name}': rates cannot be negative")
        return self

    @property
    def unit(self) -> str:
        return PARAMETER_UNITS[self.name]

    @property
    def label(self) -> str:
        return f"{self.name}_{self.unit}"

    def values(self) -> np.ndarray:
        """start + i·(stop−start)/(count−1), with both endpoints exact"""
        i = np.arange(self.count, dtype=float)
        grid = self.start + (i * (self.stop - self.start)) / (self.count - 1)
        grid[0] = self.start
        grid[-1] = self.stop
        return grid

    @property
    def cell(self) -> float:
        return (self.stop - self.start) / (self.count - 1)


@dataclass(frozen=True)
class Provenance:
    tool: str
    version: str
    timestamp: Optional[str] = None

    @classmethod
    def create(cls, stamp: bool = False) -> "Provenance":
        timestamp = None
        if stamp:
            timestamp = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
        return cls(config_manager.get_tool_name(), config_manager.get_version(), timestamp)


@dataclass
class SpectrumTable:
    axis: AxisSpec
    values: np.ndarray
    columns: Dict[str, np.ndarray]
    base: SystemParams
    delta: float = 0.0
    provenance: Provenance = field(default_factory=Provenance.create)

    def column(self, quantity: str) -> np.ndarray:
        if quantity not in self.columns:
            raise KeyError(f"Unknown quantity '{quantity}', expected one of {QUANTITIES}")
        return self.columns[quantity]

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class GridTable:
    axis1: AxisSpec
    axis2: AxisSpec
    quantity: str
    data: np.ndarray  # shape (axis1.count, axis2.count), row-major
    base: SystemParams
    delta: float = 0.0
    provenance: Provenance = field(default_factory=Provenance.create)

    @property
    def cells(self) -> int:
        return int(self.data.size)


def resolve_threads(threads: Optional[int] = None) -> int:
    """--threads, else WGM_SCATTER_THREADS, else machine parallelism"""
    if threads is None:
        env_value = os.getenv("WGM_SCATTER_THREADS")
        if env_value:
            try:
                threads = int(env_value)
            except ValueError:
                raise ConfigError(
                    f"WGM_SCATTER_THREADS must be an integer, got '{env_value}'",
                    key="WGM_SCATTER_THREADS",
                )
        else:
            threads = os.cpu_count() or 1
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}", key="threads")
    return threads


def _evaluate_chunk(base: SystemParams, delta: float, overrides: Dict[str, np.ndarray], offset: int):
    columns = {name: overrides.get(name, getattr(base, name)) for name in FIELDS}
    deltas = overrides.get("delta", delta)
    try:
        amps = grid_amplitudes(deltas, **columns)
    except DegenerateDenominator as e:
        index = offset + e.index
        raise SweepPointError(index, {k: float(np.atleast_1d(v)[e.index]) for k, v in overrides.items()}, e)

    result = powers(amps).as_dict()
    size = max(len(v) for v in overrides.values())
    for name, column in result.items():
        column = np.broadcast_to(column, (size,))
        bad = np.flatnonzero(~np.isfinite(column))
        if bad.size:
            raise SweepPointError(offset + int(bad[0]), None, ValueError(f"non-finite {name}"))
        result[name] = np.array(column, dtype=float)
    return result


def _run_points(
    base: SystemParams,
    delta: float,
    point_values: Dict[str, np.ndarray],
    total: int,
    threads: Optional[int],
    chunk_size: Optional[int],
) -> Dict[str, np.ndarray]:
    chunk_size = chunk_size or int(config_manager.default("chunk_size"))
    starts = list(range(0, total, chunk_size))

    def work(start):
        stop = min(start + chunk_size, total)
        overrides = {name: values[start:stop] for name, values in point_values.items()}
        return _evaluate_chunk(base, delta, overrides, start)

    workers = resolve_threads(threads)
    if workers == 1 or len(starts) == 1:
        chunks = [work(start) for start in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            # map yields in submission order; the first failing chunk in index order raises
            chunks = list(executor.map(work, starts))

    return {name: np.concatenate([chunk[name] for chunk in chunks]) for name in QUANTITIES}


def sweep1d(
    base: SystemParams,
    axis: AxisSpec,
    delta: float = 0.0,
    threads: Optional[int] = None,
    chunk_size: Optional[int] = None,
    stamp: bool = False,
) -> SpectrumTable:
    """
    One closed-form evaluation per grid point. The axis value overrides the
    base parameter pointwise; `delta` is the fixed detuning when the axis is
    not delta.
    """
    values = axis.values()
    columns = _run_points(base, delta, {axis.name: values}, axis.count, threads, chunk_size)
    return SpectrumTable(
        axis=axis,
        values=values,
        columns=columns,
        base=base,
        delta=float(delta),
        provenance=Provenance.create(stamp),
    )


def sweep2d(
    base: SystemParams,
    axis1: AxisSpec,
    axis2: AxisSpec,
    quantity: Quantity,
    delta: float = 0.0,
    threads: Optional[int] = None,
    chunk_size: Optional[int] = None,
    stamp: bool = False,
) -> GridTable:
    """Row-major evaluation: axis1 is the slow index, axis2 the fast one"""
    if axis1.name == axis2.name:
        raise ConfigError(f"axis1 and axis2 both scan '{axis1.name}'", key="axis2")
    if quantity not in QUANTITIES:
        raise ConfigError(f"Unknown quantity '{quantity}'", key="quantity")

    v1 = axis1.values()
    v2 = axis2.values()
    total = axis1.count * axis2.count
    flat = np.arange(total)
    point_values = {
        axis1.name: v1[flat // axis2.count],
        axis2.name: v2[flat % axis2.count],
    }
    columns = _run_points(base, delta, point_values, total, threads, chunk_size)
    data = columns[quantity].reshape(axis1.count, axis2.count)
    return GridTable(
        axis1=axis1,
        axis2=axis2,
        quantity=quantity,
        data=data,
        base=base,
        delta=float(delta),
        provenance=Provenance.create(stamp),
    )
