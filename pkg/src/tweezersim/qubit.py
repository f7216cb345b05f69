"""Raman-driven qubit rotations and coherence sequences.

Covers resonant/detuned Rabi rotations, Ramsey interferometry with a
static (shot-to-shot) detuning spread, spin-echo rephasing with a slow
irreversible decay envelope, and the trap-transfer / transport sequences
built on top of them.

Conventions
-----------
A pulse of phase 0 rotates about x: a pi/2 pulse maps |0> to
(|0> - i|1>)/sqrt(2).  Free evolution at detuning ``delta`` advances the
relative phase of |1> by ``exp(-i delta t)``.  Ensemble averages over the
static detuning spread are evaluated through the distribution's
characteristic function, so the sequence signals below are closed-form
and exact for the configured model.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import simpson

from .states import StateVector, apply_unitary

GAUSSIAN_STATIC = "gaussian_static"
THERMAL_3D = "thermal_3d"
_MODEL_KINDS = (GAUSSIAN_STATIC, THERMAL_3D)


@dataclass(frozen=True)
class PulseSpec:
    """One Raman pulse; ``area = rabi_frequency * duration`` by definition."""

    area: float | None = None
    phase: float = 0.0
    rabi_frequency: float = 2 * math.pi * 6.7e6
    detuning: float = 0.0
    duration: float | None = None

    def __post_init__(self):
        if self.rabi_frequency <= 0:
            raise ValueError("rabi_frequency > 0")
        if self.area is None and self.duration is None:
            raise ValueError("give at least one of area, duration")
        if self.area is None:
            object.__setattr__(self, "area", self.rabi_frequency * self.duration)
        if self.duration is None:
            object.__setattr__(self, "duration", self.area / self.rabi_frequency)
        if self.area < 0:
            raise ValueError("area >= 0")
        if self.duration < 0:
            raise ValueError("duration >= 0")
        mismatch = abs(self.area - self.rabi_frequency * self.duration)
        if mismatch / max(self.area, 1e-9) > 1e-9:
            raise ValueError("area and duration are inconsistent with rabi_frequency")


def rotation_matrix(pulse: PulseSpec) -> np.ndarray:
    """2x2 unitary for a constant-amplitude pulse, including detuning."""
    omega = pulse.rabi_frequency
    delta = pulse.detuning
    t = pulse.duration
    w = math.hypot(omega, delta)
    theta = w * t
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    if w == 0.0:
        return np.eye(2, dtype=np.complex128)
    nx = omega * math.cos(pulse.phase) / w
    ny = omega * math.sin(pulse.phase) / w
    nz = delta / w
    sx = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    sy = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    sz = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return c * np.eye(2) - 1j * s * (nx * sx + ny * sy + nz * sz)


def rabi_rotation(state: StateVector, pulse: PulseSpec) -> StateVector:
    """Rotate a qubit state; starting from |0> at zero detuning the
    population of |0> after the pulse is cos^2(area/2)."""
    if state.dim != 2:
        raise ValueError("rabi_rotation acts on a 2-dimensional state")
    return apply_unitary(state, rotation_matrix(pulse))


@dataclass(frozen=True)
class DephasingModel:
    """Static (shot-to-shot) detuning spread plus irreversible decay.

    ``inhomogeneous_tau`` is the 1/e Ramsey contrast time; the spread width
    is calibrated so the contrast hits 1/e there for either model kind:

    * ``gaussian_static``: detuning offset ~ N(0, sigma) with
      sigma = sqrt(2)/tau, giving contrast exp(-(t/tau)^2).
    * ``thermal_3d``: offset ~ theta*(Gamma(3) - 3) (light shift
      proportional to a 3D thermal energy), giving contrast
      (1 + (theta t)^2)^(-3/2) with theta = sqrt(e^(2/3) - 1)/tau.

    ``irreversible_tau`` multiplies every coherence by
    exp(-(T/irreversible_tau)^echo_exponent) with T the total sequence
    time; it is what spin echo cannot undo.  ``math.inf`` disables it.
    """

    inhomogeneous_tau: float = 630e-6
    irreversible_tau: float = 50e-3
    model_kind: str = GAUSSIAN_STATIC
    mean_detuning: float = 0.0
    echo_exponent: float = 2.0

    def __post_init__(self):
        if not self.inhomogeneous_tau > 0:
            raise ValueError("inhomogeneous_tau > 0")
        if not self.irreversible_tau > 0:
            raise ValueError("irreversible_tau > 0")
        if self.irreversible_tau < self.inhomogeneous_tau:
            raise ValueError("irreversible_tau >= inhomogeneous_tau")
        if self.model_kind not in _MODEL_KINDS:
            raise ValueError(f"model_kind in {set(_MODEL_KINDS)}")
        if not self.echo_exponent > 0:
            raise ValueError("echo_exponent > 0")

    @property
    def spread_scale(self) -> float:
        """Width parameter of the zero-mean detuning offset distribution."""
        if self.model_kind == GAUSSIAN_STATIC:
            return math.sqrt(2.0) / self.inhomogeneous_tau
        return math.sqrt(math.exp(2.0 / 3.0) - 1.0) / self.inhomogeneous_tau

    def static_kernel(self, u: float) -> complex:
        """Characteristic function E[exp(-i*offset*u)] of the detuning offset."""
        if self.model_kind == GAUSSIAN_STATIC:
            s = self.spread_scale
            return complex(math.exp(-0.5 * (s * u) ** 2))
        th = self.spread_scale
        return np.exp(3j * th * u) * (1.0 + 1j * th * u) ** -3.0

    def irreversible_envelope(self, total_time: float) -> float:
        if math.isinf(self.irreversible_tau):
            return 1.0
        return math.exp(-((total_time / self.irreversible_tau) ** self.echo_exponent))

    def sample_static_detunings(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Per-shot static detunings (used by Monte Carlo cross-checks)."""
        if self.model_kind == GAUSSIAN_STATIC:
            offs = rng.normal(0.0, self.spread_scale, size=n)
        else:
            th = self.spread_scale
            offs = th * (rng.gamma(3.0, 1.0, size=n) - 3.0)
        return self.mean_detuning + offs


def _mean_cos(model: DephasingModel, u: float, laser_detuning: float) -> float:
    """Ensemble average of cos(delta_total * u) over the static spread."""
    carrier = np.exp(1j * (laser_detuning + model.mean_detuning) * u)
    return float(np.real(carrier * np.conj(model.static_kernel(u))))


def ramsey_contrast(delay: float, model: DephasingModel) -> float:
    """Fringe contrast after a pi/2 - delay - pi/2 sequence."""
    if delay < 0:
        raise ValueError("delay >= 0")
    return abs(model.static_kernel(delay)) * model.irreversible_envelope(delay)


def ramsey_signal(delay: float, model: DephasingModel, laser_detuning: float = 0.0) -> float:
    """P(|0>) after pi/2 - delay - pi/2, averaged over the detuning spread.

    Equals (1 - C(delay) cos(laser_detuning*delay + phi(delay)))/2 with
    C(0) = 1; at zero delay the two pulses concatenate to a pi pulse and
    the signal is exactly 0.
    """
    if delay < 0:
        raise ValueError("delay >= 0")
    osc = _mean_cos(model, delay, laser_detuning) * model.irreversible_envelope(delay)
    return 0.5 * (1.0 - osc)


def spin_echo_signal(total_time: float, pi_pulse_offset: float, model: DephasingModel) -> float:
    """Echo amplitude for pi/2 - t1 - pi - (T - t1) - pi/2.

    A static spread rephases up to the timing imbalance T - 2*t1, so with a
    centered pi pulse and no irreversible decay the amplitude is exactly 1
    for any T.
    """
    if not 0.0 <= pi_pulse_offset <= total_time:
        raise ValueError("pi_pulse_offset must lie in [0, total_time]")
    u = total_time - 2.0 * pi_pulse_offset
    return abs(model.static_kernel(u)) * model.irreversible_envelope(total_time)


def echo_sequence_population(
    total_time: float,
    pi_pulse_offset: float,
    model: DephasingModel,
    laser_detuning: float = 0.0,
    mid_pulse_area: float = math.pi,
) -> float:
    """P(|0>) for pi/2 - t1 - R(theta) - (T - t1) - pi/2 (all about x).

    With ``mid_pulse_area = 0`` this degenerates exactly to
    ``ramsey_signal(total_time, ...)``; with pi it is the spin-echo fringe.
    """
    if not 0.0 <= pi_pulse_offset <= total_time:
        raise ValueError("pi_pulse_offset must lie in [0, total_time]")
    th = mid_pulse_area
    env = model.irreversible_envelope(total_time)
    ramsey_like = _mean_cos(model, total_time, laser_detuning) * env
    echo_like = _mean_cos(model, 2.0 * pi_pulse_offset - total_time, laser_detuning) * env
    c2 = math.cos(th / 2.0) ** 2
    s2 = math.sin(th / 2.0) ** 2
    return 0.5 * (c2 * (1.0 - ramsey_like) + s2 * (1.0 + echo_like))


@dataclass(frozen=True)
class TransportPlan:
    """Geometry and timing of the tweezer hand-off / round trip."""

    max_displacement: float = 9e-6
    round_trip_time: float = 6e-3
    dwell_time: float = 200e-6
    depth_ratio: float = 1.0

    def __post_init__(self):
        if self.max_displacement < 0:
            raise ValueError("max_displacement >= 0")
        if self.round_trip_time < 0:
            raise ValueError("round_trip_time >= 0")
        if self.dwell_time < 0:
            raise ValueError("dwell_time >= 0")
        if not self.depth_ratio > 0:
            raise ValueError("depth_ratio > 0")


def transfer_sequence(
    model: DephasingModel,
    plan: TransportPlan,
    depth_profile=None,
) -> tuple[float, float]:
    """Ramsey sequence with an adiabatic hand-off to a second trap.

    Returns ``(contrast, phase_shift)``.  The ideal hand-off leaves the
    contrast equal to the stationary Ramsey contrast at the same delay;
    the phase shift is the integrated differential-light-shift difference
    between the two traps.  ``model.mean_detuning`` plays the role of the
    differential shift in the reference trap; a trap of relative depth r
    shifts by r times that.  ``depth_profile`` optionally maps time in
    [0, dwell_time] to the relative depth (default: constant
    ``plan.depth_ratio``).
    """
    delay = plan.dwell_time
    contrast = ramsey_contrast(delay, model)
    if depth_profile is None:
        phase = model.mean_detuning * (plan.depth_ratio - 1.0) * plan.dwell_time
    elif plan.dwell_time == 0:
        phase = 0.0
    else:
        t = np.linspace(0.0, plan.dwell_time, 2049)
        shift = model.mean_detuning * (np.asarray(depth_profile(t), dtype=float) - 1.0)
        phase = float(simpson(shift, x=t))
    return contrast, phase


def transport_echo(
    plan: TransportPlan,
    model: DephasingModel,
    displacement: float,
    heating_coefficient: float = 0.0,
) -> float:
    """Spin-echo amplitude after a round trip of the moving tweezer.

    The pi pulse fires at the turning point, i.e. centered in time, so in
    the ideal model the amplitude is the stationary echo amplitude at the
    round-trip time, independent of how far the atom travelled.
    ``heating_coefficient`` (1/m^2) injects an optional excess decay
    exp(-k d^2) to model transport heating.
    """
    if abs(displacement) > plan.max_displacement * (1.0 + 1e-12):
        raise ValueError("displacement exceeds plan.max_displacement")
    base = spin_echo_signal(plan.round_trip_time, plan.round_trip_time / 2.0, model)
    return base * math.exp(-heating_coefficient * displacement**2)
