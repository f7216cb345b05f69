"""Single-atom trap occupancy, fluorescence counting, and state readout.

The collisional blockade forces the trap occupancy to telegraph between
0 and 1: a second atom arriving while one is trapped ejects the pair, so
the occupied state empties at the combined loss + loading rate.  The
fluorescence signal is Poisson counting on top of that telegraph, which
is what produces the familiar two-peak count histogram.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

from .rng import trial_rng
from .states import DensityOperator, StateVector, diagonal_density


@dataclass(frozen=True)
class OccupancyProcess:
    """Loading/loss rates for the trap occupancy jump process."""

    loading_rate: float = 0.5
    loss_rate: float = 0.1
    blockade: bool = True
    bin_width: float = 10e-3

    def __post_init__(self):
        if self.loading_rate < 0:
            raise ValueError("loading_rate >= 0")
        if self.loss_rate < 0:
            raise ValueError("loss_rate >= 0")
        if not self.bin_width > 0:
            raise ValueError("bin_width > 0")

    def stationary_occupied_fraction(self) -> float:
        """Long-run fraction of time with exactly one atom (blockade on)."""
        if not self.blockade:
            raise ValueError("closed form only available for the blockade chain")
        if self.loading_rate == 0:
            return 0.0
        lam, mu = self.loading_rate, self.loss_rate
        # alternating exponential holds: 1/lam empty, 1/(lam+mu) occupied
        return lam / (2.0 * lam + mu)


@dataclass(frozen=True)
class OccupancyTrajectory:
    """Piecewise-constant occupancy: level ``values[i]`` on
    [times[i], times[i+1]) with times[0] = 0 and an implicit end at
    ``duration``."""

    times: np.ndarray
    values: np.ndarray
    duration: float

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.int64))
        if self.times.size != self.values.size or self.times.size < 1:
            raise ValueError("times and values must have equal nonzero length")

    def value_at(self, t: float) -> int:
        i = np.searchsorted(self.times, t, side="right") - 1
        return int(self.values[max(i, 0)])

    def mean_occupancy(self) -> float:
        edges = np.append(self.times, self.duration)
        return float(np.sum(self.values * np.diff(edges)) / self.duration)

    def binned_mean(self, bin_width: float) -> np.ndarray:
        """Time-averaged occupancy per bin of width ``bin_width``."""
        n_bins = int(np.floor(self.duration / bin_width))
        out = np.zeros(n_bins)
        edges = np.append(self.times, self.duration)
        for level, t0, t1 in zip(self.values, edges[:-1], edges[1:]):
            if level == 0 or t0 >= n_bins * bin_width:
                continue
            b0 = int(t0 / bin_width)
            b1 = min(int(np.ceil(t1 / bin_width)), n_bins)
            for b in range(b0, b1):
                lo = max(t0, b * bin_width)
                hi = min(t1, (b + 1) * bin_width)
                if hi > lo:
                    out[b] += level * (hi - lo) / bin_width
        return out


def simulate_occupancy(proc: OccupancyProcess, duration: float, seed: int) -> OccupancyTrajectory:
    """Sample an occupancy trajectory of the given duration.

    With the blockade on, any event while occupied (loss, or a second
    arrival ejecting the pair) empties the trap, so the trajectory is an
    alternating renewal process and is sampled in bulk.  Without the
    blockade, arrivals stack and each atom is lost independently.
    """
    if not duration > 0:
        raise ValueError("duration > 0")
    rng = trial_rng(seed, 0, stream=0)
    if proc.loading_rate == 0:
        return OccupancyTrajectory(np.zeros(1), np.zeros(1, dtype=int), duration)

    if proc.blockade:
        lam = proc.loading_rate
        out_rate = proc.loading_rate + proc.loss_rate
        mean_cycle = 1.0 / lam + 1.0 / out_rate
        times = [0.0]
        t = 0.0
        chunk = max(int(duration / mean_cycle * 1.1) + 16, 1024)
        while t < duration:
            waits = np.empty(2 * chunk)
            waits[0::2] = rng.exponential(1.0 / lam, size=chunk)
            waits[1::2] = rng.exponential(1.0 / out_rate, size=chunk)
            new_times = t + np.cumsum(waits)
            times.extend(new_times.tolist())
            t = new_times[-1]
        arr = np.array(times)
        arr = arr[arr < duration]
        values = np.zeros(arr.size, dtype=int)
        values[1::2] = 1
        return OccupancyTrajectory(arr, values, duration)

    # no blockade: birth-death walk, arrivals at loading_rate,
    # per-atom loss at loss_rate
    times = [0.0]
    values = [0]
    t, n = 0.0, 0
    while True:
        total = proc.loading_rate + n * proc.loss_rate
        if total == 0:
            break
        t += rng.exponential(1.0 / total)
        if t >= duration:
            break
        if rng.random() < proc.loading_rate / total:
            n += 1
        else:
            n -= 1
        times.append(t)
        values.append(n)
    return OccupancyTrajectory(np.array(times), np.array(values), duration)


@dataclass(frozen=True)
class FluorescenceTrace:
    """Per-bin photon counts with the rates that generated them."""

    counts: np.ndarray
    bin_width: float
    background_rate: float
    atom_rate: float

    def __post_init__(self):
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=np.int64))
        if np.any(self.counts < 0):
            raise ValueError("counts >= 0")
        if not self.bin_width > 0:
            raise ValueError("bin_width > 0")
        if not self.atom_rate > self.background_rate:
            raise ValueError("atom_rate > background_rate")

    def histogram(self) -> tuple[np.ndarray, np.ndarray]:
        """(count values 0..max, frequency) of the per-bin counts."""
        top = int(self.counts.max()) if self.counts.size else 0
        freq = np.bincount(self.counts, minlength=top + 1)
        return np.arange(freq.size), freq


def fluorescence_trace(
    occupancy: OccupancyTrajectory,
    background_rate: float,
    atom_rate: float,
    bin_width: float,
    seed: int,
) -> FluorescenceTrace:
    """Poisson counts per bin with mean (background + occ * atom) * width.

    Bins during which the occupancy switches use the exact time-averaged
    occupancy, as a real counter would.
    """
    if background_rate < 0 or atom_rate < 0:
        raise ValueError("rates >= 0")
    occ = occupancy.binned_mean(bin_width)
    means = (background_rate + occ * atom_rate) * bin_width
    rng = trial_rng(seed, 0, stream=1)
    counts = rng.poisson(means)
    return FluorescenceTrace(counts, bin_width, background_rate, atom_rate)


def two_poisson_threshold(lam_empty: float, lam_occupied: float) -> int:
    """Count threshold at the crossing of the two Poisson peaks."""
    if not 0 < lam_empty < lam_occupied:
        raise ValueError("need 0 < lam_empty < lam_occupied")
    k = (lam_occupied - lam_empty) / np.log(lam_occupied / lam_empty)
    return int(round(k))


@dataclass(frozen=True)
class ClassificationResult:
    labels: np.ndarray
    threshold: int
    misclassification_probability: float


def classify_occupancy(trace: FluorescenceTrace, threshold: int) -> ClassificationResult:
    """Label each bin occupied iff counts >= threshold.

    The returned misclassification probability is the equal-prior error of
    the two-Poisson model at this threshold, from exact tail sums:
    (P[Poi(lam0) >= T] + P[Poi(lam1) < T]) / 2.
    """
    if threshold < 0:
        raise ValueError("threshold >= 0")
    labels = (trace.counts >= threshold).astype(np.int64)
    lam0 = trace.background_rate * trace.bin_width
    lam1 = (trace.background_rate + trace.atom_rate) * trace.bin_width
    p_false_occupied = float(poisson.sf(threshold - 1, lam0))
    p_false_empty = float(poisson.cdf(threshold - 1, lam1))
    err = 0.5 * (p_false_occupied + p_false_empty)
    return ClassificationResult(labels, threshold, err)


@dataclass(frozen=True)
class ReadoutParams:
    """Optical pumping and push-out readout imperfections."""

    pumping_efficiency: float = 0.85
    pushout_efficiency: float = 1.0
    background_loss: float = 0.0

    def __post_init__(self):
        for name in ("pumping_efficiency", "pushout_efficiency", "background_loss"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} in [0, 1]")


@dataclass(frozen=True)
class ReadoutResult:
    atom_present: bool
    absent_probability: float


def _population_one(state) -> float:
    if isinstance(state, StateVector):
        if state.dim != 2:
            raise ValueError("readout expects a qubit state")
        return float(np.abs(state.amplitudes[1]) ** 2)
    if isinstance(state, DensityOperator):
        if state.dim != 2:
            raise ValueError("readout expects a qubit state")
        return state.population(1)
    raise TypeError("state must be a StateVector or DensityOperator")


def pushout_readout(qubit_state, params: ReadoutParams, seed) -> ReadoutResult:
    """Map the internal state onto atom presence and sample one shot.

    The push-out beam expels the atom iff it is in |1> (with the
    configured efficiency); background loss can also remove a |0> atom.
    P(absent) = pushout_efficiency * P1 + background_loss * P0, and the
    exact probability is returned alongside the Bernoulli sample, so at
    ideal parameters the only noise is quantum projection noise.
    ``seed`` may be an integer or a numpy Generator.
    """
    p1 = _population_one(qubit_state)
    p_absent = params.pushout_efficiency * p1 + params.background_loss * (1.0 - p1)
    rng = np.random.default_rng(seed)
    absent = bool(rng.random() < p_absent)
    return ReadoutResult(atom_present=not absent, absent_probability=p_absent)


def optical_pump(params: ReadoutParams) -> DensityOperator:
    """Qubit state after pumping toward |0>: diag(eff, 1 - eff)."""
    p = params.pumping_efficiency
    return diagonal_density([p, 1.0 - p], basis_labels=("0", "1"))
