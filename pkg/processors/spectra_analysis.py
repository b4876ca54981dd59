#!/usr/bin/env python3
"""
Dips, contrasts, regime labels and the dip <-> Zeeman-level correspondence.

A "dip" is a local minimum of R or T over the sweep axis. Detection uses
scipy.signal.find_peaks on the negated spectrum, so prominence is the
usual topographic one: the smaller of the rises to the nearest higher
values on either side. Locations are refined with a 3-point parabola.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks, peak_widths

from processors.errors import ConfigError, EmptySpectrum
from processors.scatter_core import SystemParams
from processors.sweep_engine import AxisSpec, SpectrumTable, sweep1d
from utils.config_manager import config_manager

OPPOSITE = {"R_f": "R_b", "R_b": "R_f", "T_f": "T_b", "T_b": "T_f"}


@dataclass(frozen=True)
class Dip:
    location: float
    depth: float
    prominence: float
    width_at_half_prominence: float  # axis units
    index: int  # grid index of the discrete minimum

    def to_dict(self) -> dict:
        return asdict(self)


def _parabolic_vertex(x: np.ndarray, y: np.ndarray, i: int) -> Tuple[float, float]:
    """Vertex of the parabola through (i-1, i, i+1), shift clipped to half a cell"""
    left, mid, right = y[i - 1], y[i], y[i + 1]
    curvature = left - 2 * mid + right
    if curvature <= 0:
        return float(x[i]), float(mid)
    p = 0.5 * (left - right) / curvature
    p = min(max(p, -0.5), 0.5)
    step = x[i + 1] - x[i] if p >= 0 else x[i] - x[i - 1]
    location = x[i] + p * step
    depth = mid - 0.25 * (left - right) * p
    return float(location), float(max(depth, 0.0))


def find_dips_in(x: Sequence[float], y: Sequence[float], min_prominence: float) -> List[Dip]:
    """Dips of y(x) for an ascending x grid"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise EmptySpectrum("Cannot search an empty spectrum for dips")
    if x.shape != y.shape:
        raise ValueError(f"x and y differ in shape: {x.shape} vs {y.shape}")
    if not min_prominence > 0:
        raise ValueError(f"min_prominence must be positive, got {min_prominence}")
    if x.size < 3:
        return []

    indices, properties = find_peaks(-y, prominence=min_prominence)
    if indices.size == 0:
        return []
    _, _, left_ips, right_ips = peak_widths(
        -y, indices, rel_height=0.5, prominence_data=(
            properties["prominences"], properties["left_bases"], properties["right_bases"]
        )
    )
    grid = np.arange(x.size, dtype=float)
    widths = np.interp(right_ips, grid, x) - np.interp(left_ips, grid, x)

    dips = []
    for k, i in enumerate(indices):
        location, depth = _parabolic_vertex(x, y, int(i))
        dips.append(Dip(
            location=location,
            depth=depth,
            prominence=float(properties["prominences"][k]),
            width_at_half_prominence=float(widths[k]),
            index=int(i),
        ))
    return sorted(dips, key=lambda d: d.location)


def find_dips(spectrum: SpectrumTable, quantity: str, min_prominence: Optional[float] = None) -> List[Dip]:
    if min_prominence is None:
        min_prominence = config_manager.default("min_prominence")
    if len(spectrum) == 0:
        raise EmptySpectrum("Spectrum has no rows")
    return find_dips_in(spectrum.values, spectrum.column(quantity), min_prominence)


def unidirectional_dips(
    spectrum: SpectrumTable,
    quantity: str,
    min_prominence: Optional[float] = None,
    depth_limit: Optional[float] = None,
    margin: Optional[float] = None,
) -> List[Dip]:
    """Dips that are ~0 in one direction while the opposite direction stays high"""
    if quantity not in OPPOSITE:
        raise ValueError(f"No opposite direction for '{quantity}'")
    depth_limit = config_manager.default("dip_depth") if depth_limit is None else depth_limit
    margin = config_manager.default("dip_margin") if margin is None else margin

    opposite = spectrum.column(OPPOSITE[quantity])
    kept = []
    for dip in find_dips(spectrum, quantity, min_prominence):
        other = float(np.interp(dip.location, spectrum.values, opposite))
        if dip.depth < depth_limit and other > dip.depth + margin:
            kept.append(dip)
    return kept


@dataclass(frozen=True)
class ContrastMetrics:
    max_contrast_R: float
    max_contrast_T: float
    mean_contrast_R: float
    mean_contrast_T: float

    def to_dict(self) -> dict:
        return asdict(self)


def contrast_metrics(spectrum: SpectrumTable) -> ContrastMetrics:
    """Pointwise maxima and trapezoid band averages of |R_f−R_b| and |T_f−T_b|"""
    if len(spectrum) == 0:
        raise EmptySpectrum("Spectrum has no rows")
    x = spectrum.values
    contrast_R = np.abs(spectrum.column("R_f") - spectrum.column("R_b"))
    contrast_T = np.abs(spectrum.column("T_f") - spectrum.column("T_b"))
    span = x[-1] - x[0]
    if span > 0:
        mean_R = trapezoid(contrast_R, x) / span
        mean_T = trapezoid(contrast_T, x) / span
    else:
        mean_R, mean_T = contrast_R.mean(), contrast_T.mean()
    return ContrastMetrics(
        max_contrast_R=float(contrast_R.max()),
        max_contrast_T=float(contrast_T.max()),
        mean_contrast_R=float(mean_R),
        mean_contrast_T=float(mean_T),
    )


class Regime(str, Enum):
    UR_DOMINANT = "UR_dominant"
    UT_DOMINANT = "UT_dominant"
    UR_AND_UT = "UR_and_UT"
    NEITHER = "neither"


@dataclass(frozen=True)
class RegimeLabel:
    regime: Regime
    max_contrast_R: float
    max_contrast_T: float
    tau_R: float
    tau_T: float
    band: Tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "max_contrast_R": self.max_contrast_R,
            "max_contrast_T": self.max_contrast_T,
            "tau_R": self.tau_R,
            "tau_T": self.tau_T,
            "band": list(self.band),
        }


def label_for(max_contrast_R: float, max_contrast_T: float, tau_R: float, tau_T: float) -> Regime:
    has_R = max_contrast_R >= tau_R
    has_T = max_contrast_T >= tau_T
    if has_R and has_T:
        return Regime.UR_AND_UT
    if has_R:
        return Regime.UR_DOMINANT
    if has_T:
        return Regime.UT_DOMINANT
    return Regime.NEITHER


def classify_regime(
    base: SystemParams,
    band: Tuple[float, float],
    resolution: Optional[int] = None,
    tau_R: Optional[float] = None,
    tau_T: Optional[float] = None,
    threads: Optional[int] = 1,
) -> RegimeLabel:
    """Sweep Δ over the band and label the system by its maximum contrasts"""
    start, stop = band
    if not stop > start:
        raise ConfigError(f"Band ({start}, {stop}) is empty", key="band")
    resolution = resolution or config_manager.default("resolution")
    tau_R = config_manager.default("tau_R") if tau_R is None else tau_R
    tau_T = config_manager.default("tau_T") if tau_T is None else tau_T

    axis = AxisSpec(name="delta", start=start, stop=stop, count=resolution)
    metrics = contrast_metrics(sweep1d(base, axis, threads=threads))
    return RegimeLabel(
        regime=label_for(metrics.max_contrast_R, metrics.max_contrast_T, tau_R, tau_T),
        max_contrast_R=metrics.max_contrast_R,
        max_contrast_T=metrics.max_contrast_T,
        tau_R=float(tau_R),
        tau_T=float(tau_T),
        band=(float(start), float(stop)),
    )


def expected_positions(quantity: Optional[str], omega1: float, omega2: float) -> List[float]:
    """
    Detunings at which a dip is expected for θ = π.

    Forward reflection dips sit at ±ω1 and backward ones at ±ω2; forward
    transmission dips at −ω1 and −ω2, backward ones at +ω1 and +ω2. With
    no quantity every ±ω1, ±ω2 is expected.
    """
    table = {
        "R_f": [-omega1, omega1],
        "R_b": [-omega2, omega2],
        "T_f": [-omega1, -omega2],
        "T_b": [omega1, omega2],
        None: [-omega1, omega1, -omega2, omega2],
    }
    if quantity not in table:
        raise ValueError(f"No expected dip positions for '{quantity}'")
    return sorted(float(value) for value in table[quantity])


@dataclass(frozen=True)
class MatchedDip:
    expected: float
    dip: Dip
    offset: float  # dip.location - expected

    def to_dict(self) -> dict:
        return {"expected": self.expected, "offset": self.offset, "dip": self.dip.to_dict()}


@dataclass
class CorrespondenceReport:
    quantity: Optional[str]
    tolerance: float
    pairs: List[MatchedDip] = field(default_factory=list)
    unmatched_expected: List[float] = field(default_factory=list)
    unmatched_dips: List[Dip] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.unmatched_expected

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "tolerance": self.tolerance,
            "pairs": [pair.to_dict() for pair in self.pairs],
            "unmatched_expected": self.unmatched_expected,
            "unmatched_dips": [dip.to_dict() for dip in self.unmatched_dips],
        }


def dip_correspondence(
    dips: Sequence[Dip],
    omega1: float,
    omega2: float,
    tolerance: Optional[float] = None,
    quantity: Optional[str] = None,
) -> CorrespondenceReport:
    """
    Greedy nearest matching of dips to expected positions. Candidate pairs
    within tolerance are taken in order of |offset|, then dip location;
    each dip and each expectation is used at most once.
    """
    tolerance = config_manager.default("match_tolerance") if tolerance is None else tolerance
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    expected = expected_positions(quantity, omega1, omega2)

    candidates = []
    for e_index, position in enumerate(expected):
        for d_index, dip in enumerate(dips):
            offset = dip.location - position
            if abs(offset) <= tolerance:
                candidates.append((abs(offset), dip.location, e_index, d_index, offset))
    candidates.sort()

    used_expected, used_dips = set(), set()
    pairs = []
    for _, _, e_index, d_index, offset in candidates:
        if e_index in used_expected or d_index in used_dips:
            continue
        used_expected.add(e_index)
        used_dips.add(d_index)
        pairs.append(MatchedDip(expected=expected[e_index], dip=dips[d_index], offset=float(offset)))

    return CorrespondenceReport(
        quantity=quantity,
        tolerance=float(tolerance),
        pairs=sorted(pairs, key=lambda p: p.expected),
        unmatched_expected=[p for i, p in enumerate(expected) if i not in used_expected],
        unmatched_dips=[d for i, d in enumerate(dips) if i not in used_dips],
    )


@dataclass
class WindowReport:
    parameter: str
    values: List[float]
    labels: List[RegimeLabel]
    intervals: List[Tuple[float, float]]

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "intervals": [list(interval) for interval in self.intervals],
            "points": [
                {"value": value, **label.to_dict()}
                for value, label in zip(self.values, self.labels)
            ],
        }


def regime_window(
    base: SystemParams,
    parameter: str,
    values: Sequence[float],
    band: Tuple[float, float],
    resolution: Optional[int] = None,
    tau_R: Optional[float] = None,
    tau_T: Optional[float] = None,
    threads: Optional[int] = 1,
) -> WindowReport:
    """Contiguous ranges of one parameter over which both UR and UT occur"""
    if parameter == "delta" or parameter not in SystemParams.model_fields:
        raise ConfigError(f"Cannot scan '{parameter}' for an operating window", key="parameter")

    values = [float(v) for v in values]
    labels: List[RegimeLabel] = []
    for value in values:
        params = base.with_values(**{parameter: value})
        labels.append(classify_regime(params, band, resolution, tau_R, tau_T, threads))

    intervals = []
    run_start: Optional[float] = None
    previous: Optional[float] = None
    for value, label in zip(values, labels):
        if label.regime is Regime.UR_AND_UT:
            if run_start is None:
                run_start = value
            previous = value
        elif run_start is not None:
            intervals.append((run_start, previous))
            run_start = None
    if run_start is not None:
        intervals.append((run_start, previous))

    return WindowReport(parameter=parameter, values=values, labels=labels, intervals=intervals)
