#!/usr/bin/env python3
"""
Closed-form single-photon scattering for two WGM resonators side-coupled
to a fiber, each holding a Zeeman-split quantum dot.

Units: every frequency and rate is stored as value/2π in GHz. The
amplitudes are ratios of polynomials of equal total frequency degree:
A, B are degree 2, every C and D term is degree 4, the shared
denominator 4ABe^{2iθ}h²η² + C^A₊C^B₊ is degree 8, and so are the
numerators 2ihη(B·C + A·C) and D·D. Multiplying every frequency by 2π
multiplies numerator and denominator by (2π)⁸, so cyclic units can be
used throughout with no 2π factors.

The closed forms assume both resonator modes sit at the photon
frequency (ω_a = ω_b = ω), identical resonators (G, g, h shared) and a
common loss rate γ for modes and dots.
"""

import math
from dataclasses import dataclass
from typing import Annotated, Any, Literal, Union, get_args

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field

from processors.errors import DegenerateDenominator, NonpositiveVelocity

# |denom| below this is treated as an exact zero
DENOMINATOR_FLOOR = 1e-300

ArrayLike = Union[float, complex, np.ndarray]

# Anything a sweep axis may scan: the detuning plus every SystemParams field
ParameterName = Literal["delta", "theta", "eta", "g", "h", "omega1", "omega2", "gamma"]
PARAMETERS = get_args(ParameterName)
RATE_PARAMETERS = ("eta", "g", "h", "gamma")
PARAMETER_UNITS = {name: ("rad" if name == "theta" else "GHz") for name in PARAMETERS}

Quantity = Literal["R_f", "R_b", "T_f", "T_b", "contrast_R", "contrast_T"]
QUANTITIES = get_args(Quantity)


def parse_number(value: Any) -> Any:
    """Accept plain numbers plus multiples of pi written as '0.9pi' or 'pi'"""
    if isinstance(value, str):
        text = value.strip().lower().replace(" ", "").replace("*", "")
        if text.endswith("pi") or text.endswith("π"):
            prefix = text[:-2] if text.endswith("pi") else text[:-1]
            if prefix in ("", "+"):
                factor = 1.0
            elif prefix == "-":
                factor = -1.0
            else:
                factor = float(prefix)
            return factor * math.pi
        return float(text)
    return value


Number = Annotated[float, BeforeValidator(parse_number)]
Rate = Annotated[float, BeforeValidator(parse_number), Field(ge=0.0)]


class SystemParams(BaseModel):
    """Physical parameter set, all frequencies in GHz (value/2π)"""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    eta: Rate = Field(description="resonator-fiber coupling rate η")
    g: Rate = Field(description="QD-resonator coupling strength")
    h: Rate = Field(description="CW <-> CCW intermode transition rate")
    omega1: Number = Field(description="Zeeman half-splitting of QD 1")
    omega2: Number = Field(description="Zeeman half-splitting of QD 2")
    gamma: Rate = Field(description="loss rate of resonators and QDs")
    theta: Number = Field(description="phase shift kd between the resonators (rad)")

    @classmethod
    def from_raw(cls, G: float, v_g: float, angular: bool = False, **fields) -> "SystemParams":
        return cls(eta=eta_from_raw(G, v_g, angular=angular), **fields)

    def with_values(self, **changes) -> "SystemParams":
        """Validated copy with some fields replaced"""
        return SystemParams(**{**self.model_dump(), **changes})


@dataclass(frozen=True)
class IntermediateTerms:
    A: ArrayLike
    B: ArrayLike
    CA_plus: ArrayLike
    CA_minus: ArrayLike
    CB_plus: ArrayLike
    CB_minus: ArrayLike
    DA_plus: ArrayLike
    DA_minus: ArrayLike
    DB_plus: ArrayLike
    DB_minus: ArrayLike
    phase: ArrayLike  # e^{2iθ}
    denom: ArrayLike


@dataclass(frozen=True)
class ScatteringAmplitudes:
    r_f: ArrayLike
    r_b: ArrayLike
    t_f: ArrayLike
    t_b: ArrayLike


@dataclass(frozen=True)
class ScatteringPowers:
    R_f: ArrayLike
    R_b: ArrayLike
    T_f: ArrayLike
    T_b: ArrayLike
    contrast_R: ArrayLike
    contrast_T: ArrayLike

    def as_dict(self) -> dict:
        return {
            "R_f": self.R_f,
            "R_b": self.R_b,
            "T_f": self.T_f,
            "T_b": self.T_b,
            "contrast_R": self.contrast_R,
            "contrast_T": self.contrast_T,
        }


def _c_term(X, p, g, h, gamma, eta, sign):
    rate = gamma + sign * eta
    return -g**4 + X * (h**2 + rate**2) + 2j * g**2 * p * rate


def _d_term(X, delta, g, h, gamma, eta, omega, sign):
    return (
        g**4
        - X * (h**2 + gamma**2 - eta**2)
        - 2j * g**2 * (delta * gamma + 1j * gamma**2 + sign * eta * omega)
    )


def _terms(delta, eta, g, h, omega1, omega2, gamma, theta) -> IntermediateTerms:
    # Arguments may be scalars or broadcastable numpy arrays
    p = delta + 1j * gamma
    A = p**2 - omega1**2
    B = p**2 - omega2**2

    CA_plus = _c_term(A, p, g, h, gamma, eta, +1)
    CA_minus = _c_term(A, p, g, h, gamma, eta, -1)
    CB_plus = _c_term(B, p, g, h, gamma, eta, +1)
    CB_minus = _c_term(B, p, g, h, gamma, eta, -1)

    DA_plus = _d_term(A, delta, g, h, gamma, eta, omega1, +1)
    DA_minus = _d_term(A, delta, g, h, gamma, eta, omega1, -1)
    DB_plus = _d_term(B, delta, g, h, gamma, eta, omega2, +1)
    DB_minus = _d_term(B, delta, g, h, gamma, eta, omega2, -1)

    # θ is used as given; exp is exactly 2π-periodic up to rounding
    phase = np.exp(2j * np.asarray(theta, dtype=float))
    denom = 4 * A * B * phase * h**2 * eta**2 + CA_plus * CB_plus

    return IntermediateTerms(
        A=A, B=B,
        CA_plus=CA_plus, CA_minus=CA_minus, CB_plus=CB_plus, CB_minus=CB_minus,
        DA_plus=DA_plus, DA_minus=DA_minus, DB_plus=DB_plus, DB_minus=DB_minus,
        phase=phase, denom=denom,
    )


def _check_denominator(terms: IntermediateTerms, delta) -> None:
    magnitude = np.atleast_1d(np.abs(terms.denom)).ravel()
    bad = np.flatnonzero(magnitude < DENOMINATOR_FLOOR)
    if bad.size:
        index = int(bad[0])
        deltas = np.broadcast_to(np.asarray(delta, dtype=float), np.shape(terms.denom))
        delta_at = float(np.atleast_1d(deltas).ravel()[index])
        raise DegenerateDenominator(delta_at, float(magnitude[index]), index=index)


def _amplitudes_from_terms(terms: IntermediateTerms, h, eta) -> ScatteringAmplitudes:
    t = terms
    prefactor = 2j * h * eta
    r_f = prefactor * (t.B * t.phase * t.CA_minus + t.A * t.CB_plus) / t.denom
    r_b = prefactor * (t.A * t.phase * t.CB_minus + t.B * t.CA_plus) / t.denom
    t_f = t.DA_minus * t.DB_minus / t.denom
    t_b = t.DA_plus * t.DB_plus / t.denom
    return ScatteringAmplitudes(r_f=r_f, r_b=r_b, t_f=t_f, t_b=t_b)


def intermediate_terms(params: SystemParams, delta: ArrayLike) -> IntermediateTerms:
    """A, B, C±, D± and the shared denominator at detuning delta (GHz)"""
    terms = _terms(
        delta, params.eta, params.g, params.h,
        params.omega1, params.omega2, params.gamma, params.theta,
    )
    _check_denominator(terms, delta)
    return terms


def amplitudes(params: SystemParams, delta: ArrayLike) -> ScatteringAmplitudes:
    """Complex r_f, r_b, t_f, t_b; delta may be a scalar or a numpy array"""
    terms = intermediate_terms(params, delta)
    return _amplitudes_from_terms(terms, params.h, params.eta)


def grid_amplitudes(delta, eta, g, h, omega1, omega2, gamma, theta) -> ScatteringAmplitudes:
    """Amplitudes over broadcastable per-point parameter arrays (sweeps)"""
    terms = _terms(delta, eta, g, h, omega1, omega2, gamma, theta)
    _check_denominator(terms, delta)
    return _amplitudes_from_terms(terms, h, eta)


def powers(amps: ScatteringAmplitudes) -> ScatteringPowers:
    R_f = np.abs(amps.r_f) ** 2
    R_b = np.abs(amps.r_b) ** 2
    T_f = np.abs(amps.t_f) ** 2
    T_b = np.abs(amps.t_b) ** 2
    return ScatteringPowers(
        R_f=R_f, R_b=R_b, T_f=T_f, T_b=T_b,
        contrast_R=np.abs(R_f - R_b),
        contrast_T=np.abs(T_f - T_b),
    )


def single_resonator_response(params: SystemParams, delta: ArrayLike, which: int):
    """
    Scattering factors of resonator 1 (which=1) or 2 (which=2) alone.

    Returns (tau_f, tau_b, rho): forward and backward transmission and
    the reflection, which is the same for both incidence directions. The
    two-resonator amplitudes are their Fabry-Perot composition with round
    trip factor rho1*rho2*e^{2iθ}.
    """
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which!r}")
    terms = intermediate_terms(params, delta)
    if which == 1:
        X, C_plus, D_plus, D_minus = terms.A, terms.CA_plus, terms.DA_plus, terms.DA_minus
    else:
        X, C_plus, D_plus, D_minus = terms.B, terms.CB_plus, terms.DB_plus, terms.DB_minus
    tau_f = -D_minus / C_plus
    tau_b = -D_plus / C_plus
    rho = 2j * params.eta * params.h * X / C_plus
    return tau_f, tau_b, rho


def eta_from_raw(G: float, v_g: float, angular: bool = False) -> float:
    """
    η = G²/v_g.

    With angular=True, G²/v_g is read as an angular rate and converted to
    the cyclic GHz convention by dividing by 2π.
    """
    if not v_g > 0:
        raise NonpositiveVelocity(f"Group velocity must be positive, got {v_g!r}")
    eta = G**2 / v_g
    if angular:
        eta /= 2 * math.pi
    return eta
