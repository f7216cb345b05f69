"""Two-photon interference and photon-heralded two-atom entanglement.

Each atom decays to its qubit states by emitting a photon whose frequency
(nu1 or nu2) is entangled with the final atomic state.  Recombining the
two photons on a 50/50 beam splitter and demanding a coincidence between
the two output ports filters the joint state down to the atomic singlet:
same-frequency and symmetric components bunch and never produce
coincidences when the photons are indistinguishable.

Partial spatial overlap is treated exactly: photon B's transverse mode is
split into a component parallel to photon A's mode (amplitude = the mode
overlap) and an orthogonal remainder, and the interference is expanded
over port x transverse-mode x frequency occupation states.  The herald
analysis accepts only opposite-frequency coincidences (the two qubit
frequencies differ by the hyperfine splitting and same-frequency double
clicks carry no singlet component); with that acceptance the heralded
fidelity is affine in the squared overlap, F = (1 + |overlap|^2) / 2, and
the herald probability per detected pair stays at 1/4.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np

from .states import (
    DensityOperator,
    ModeOccupationBasis,
    StateVector,
    apply_unitary,
    basis_state,
    beam_splitter_unitary,
    fidelity,
    maximally_mixed,
    partial_trace,
    tensor,
)

_ATOM_LABELS = ("0,0", "0,1", "1,0", "1,1")
_PHOTON_LABELS = ("nu1,nu1", "nu1,nu2", "nu2,nu1", "nu2,nu2")
# 8 photonic modes: transverse (parallel f / orthogonal g) x frequency x port,
# ordered so each (transverse, frequency) label occupies an adjacent port pair
_N_MODES = 8


def _mode_index(transverse: int, freq: int, port: int) -> int:
    return 4 * transverse + 2 * freq + port


def atom_photon_state(label: str) -> StateVector:
    """(|0, nu1> + |1, nu2>)/sqrt(2) for one atom and its photon frequency."""
    amps = np.array([1.0, 0.0, 0.0, 1.0], dtype=np.complex128) / math.sqrt(2.0)
    labels = (
        f"0_{label},nu1",
        f"0_{label},nu2",
        f"1_{label},nu1",
        f"1_{label},nu2",
    )
    return StateVector(amps, labels, (2, 2))


def singlet_state() -> StateVector:
    amps = np.array([0.0, 1.0, -1.0, 0.0], dtype=np.complex128) / math.sqrt(2.0)
    return StateVector(amps, _ATOM_LABELS, (2, 2))


@dataclass(frozen=True)
class BellTerm:
    """One term of the four-sector decomposition: amplitude x atomic x photonic."""

    atomic: StateVector
    photonic: StateVector
    amplitude: complex


_SECTORS = (
    np.array([1.0, 0.0, 0.0, 0.0], dtype=np.complex128),
    np.array([0.0, 0.0, 0.0, 1.0], dtype=np.complex128),
    np.array([0.0, 1.0, 1.0, 0.0], dtype=np.complex128) / math.sqrt(2.0),
    np.array([0.0, 1.0, -1.0, 0.0], dtype=np.complex128) / math.sqrt(2.0),
)
SECTOR_NAMES = ("nu1_nu1", "nu2_nu2", "symmetric", "antisymmetric")


def bell_decomposition(joint: StateVector) -> list[BellTerm]:
    """Expand an (atom A + photon A) x (atom B + photon B) state over the
    four photonic frequency sectors {nu1 nu1, nu2 nu2, symmetric,
    antisymmetric}.

    For the canonical double atom-photon pair all four amplitudes have
    modulus 1/2 and the antisymmetric photons pair with the atomic
    singlet.  Summing amplitude * atomic x photonic over the four terms
    reconstructs the input exactly.
    """
    if joint.dims != (2, 2, 2, 2) or joint.dim != 16:
        raise ValueError("dimension mismatch: expected a (2,2,2,2) joint state")
    # indices (qA, nuA, qB, nuB) -> rows (qA,qB), columns (nuA,nuB)
    m = joint.amplitudes.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    terms = []
    for sector in _SECTORS:
        v = m @ sector.conj()
        norm = np.linalg.norm(v)
        if norm < 1e-15:
            amplitude = 0.0 + 0.0j
            atomic = basis_state(4, 0, _ATOM_LABELS)
        else:
            k = int(np.flatnonzero(np.abs(v) > 1e-12 * norm)[0])
            amplitude = norm * (v[k] / abs(v[k]))
            atomic = StateVector(v / amplitude, _ATOM_LABELS, (2, 2))
        photonic = StateVector(sector, _PHOTON_LABELS, (2, 2))
        terms.append(BellTerm(atomic, photonic, complex(amplitude)))
    return terms


def reconstruct_from_bell_terms(terms: list[BellTerm]) -> np.ndarray:
    """Sum the decomposition back into (qA, nuA, qB, nuB) amplitude order."""
    m = np.zeros((4, 4), dtype=np.complex128)
    for term in terms:
        m += term.amplitude * np.outer(term.atomic.amplitudes, term.photonic.amplitudes)
    return m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(16)


@dataclass(frozen=True)
class PhotonModePair:
    """Spatial-mode relation of the two interfering photons.

    ``overlap`` is the mode-function inner product <f_A|f_B>; its squared
    modulus is the interference visibility.
    """

    overlap: complex
    transverse_displacement: float = 0.0
    mode_waist: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "overlap", complex(self.overlap))
        if abs(self.overlap) > 1.0 + 1e-12:
            raise ValueError("|overlap| <= 1")
        if not self.mode_waist > 0:
            raise ValueError("mode_waist > 0")

    @classmethod
    def from_displacement(cls, displacement: float, mode_waist: float = 1e-6,
                          phase: float = 0.0) -> "PhotonModePair":
        """Gaussian modes translated transversally by ``displacement``:
        |overlap| = exp(-d^2 / (2 w^2))."""
        if not mode_waist > 0:
            raise ValueError("mode_waist > 0")
        mag = math.exp(-(displacement**2) / (2.0 * mode_waist**2))
        return cls(mag * cmath.exp(1j * phase), displacement, mode_waist)


def hom_coincidence_probability(pair: PhotonModePair) -> float:
    """P(one photon in each output port) for one photon per input port.

    (1 - |overlap|^2)/2: zero for indistinguishable photons, 1/2 for fully
    distinguishable ones.
    """
    return 0.5 * (1.0 - abs(pair.overlap) ** 2)


def coincidence_vs_displacement(waist: float, displacements, v_max: float = 1.0):
    """Normalized zero-delay coincidence signal vs. transverse mode offset.

    Returns (d, 1 - v_max * exp(-d^2/w^2)) pairs: the coincidence rate
    relative to the fully-distinguishable level, minimal and equal to
    1 - v_max at zero displacement.  ``v_max`` is the best achievable
    visibility (residual mode mismatch independent of the translation).
    """
    if not waist > 0:
        raise ValueError("waist > 0")
    if not 0.0 <= v_max <= 1.0:
        raise ValueError("v_max in [0, 1]")
    out = []
    for d in displacements:
        overlap_sq = v_max * math.exp(-(d**2) / waist**2)
        out.append((float(d), 1.0 - overlap_sq))
    return out


@dataclass(frozen=True)
class HeraldConfig:
    """Coincidence acceptance and detection imperfections."""

    detector_pair: tuple[int, int] = (0, 1)
    coincidence_window: float = 100e-9
    two_photon_contamination: float = 0.0
    per_photon_detection: float = 1.0

    def __post_init__(self):
        if not self.coincidence_window > 0:
            raise ValueError("coincidence_window > 0")
        if not 0.0 <= self.two_photon_contamination <= 1.0:
            raise ValueError("two_photon_contamination in [0, 1]")
        if not 0.0 <= self.per_photon_detection <= 1.0:
            raise ValueError("per_photon_detection in [0, 1]")
        if tuple(sorted(self.detector_pair)) != (0, 1):
            raise ValueError("detector_pair must name the two output ports (0, 1)")


@dataclass(frozen=True)
class HeraldOutcome:
    heralded: bool
    conditioned_state: DensityOperator
    herald_probability: float
    fidelity_to_singlet: float


def _occupation_with(basis: ModeOccupationBasis, mode_a: int, mode_b: int) -> int:
    occ = [0] * basis.mode_count
    occ[mode_a] += 1
    occ[mode_b] += 1
    return basis.index(occ)


def _coincidence_keep_indices(basis: ModeOccupationBasis, opposite_frequency: bool):
    """Occupation states with exactly one photon in each output port
    (optionally restricted to opposite photon frequencies)."""
    keep = []
    for idx, occ in enumerate(basis.states):
        modes = [m for m, nn in enumerate(occ) for _ in range(nn)]
        if len(modes) != 2:
            continue
        ports = sorted(m % 2 for m in modes)
        if ports != [0, 1]:
            continue
        if opposite_frequency:
            freqs = {(m % 4) // 2 for m in modes}
            if len(freqs) != 2:
                continue
        keep.append(idx)
    return keep


def _heralded_joint_state(overlap: complex):
    """Full two-atom x photonic state after the beam splitter, as a
    StateVector over dims (2, 2, n_occupation)."""
    basis = ModeOccupationBasis(_N_MODES, 2)
    alpha = complex(overlap)
    beta = math.sqrt(max(1.0 - abs(alpha) ** 2, 0.0))
    pair_state = tensor(atom_photon_state("A"), atom_photon_state("B"))
    amp = pair_state.amplitudes.reshape(2, 2, 2, 2)  # (qA, nuA, qB, nuB)

    joint = np.zeros((2, 2, basis.dim), dtype=np.complex128)
    for q_a in range(2):
        for nu_a in range(2):
            for q_b in range(2):
                for nu_b in range(2):
                    c = amp[q_a, nu_a, q_b, nu_b]
                    if c == 0:
                        continue
                    m_a = _mode_index(0, nu_a, 0)  # photon A: parallel mode, port 0
                    m_par = _mode_index(0, nu_b, 1)  # photon B parallel part, port 1
                    m_orth = _mode_index(1, nu_b, 1)  # photon B orthogonal part
                    if alpha != 0:
                        joint[q_a, q_b, _occupation_with(basis, m_a, m_par)] += c * alpha
                    if beta != 0:
                        joint[q_a, q_b, _occupation_with(basis, m_a, m_orth)] += c * beta

    labels = tuple(
        f"{q_a},{q_b},{occ}"
        for q_a in range(2)
        for q_b in range(2)
        for occ in basis.labels()
    )
    sv = StateVector(joint.reshape(-1), labels, (2, 2, basis.dim))
    bs = beam_splitter_unitary(basis)
    # the beam splitter acts on the photonic factor only
    full = np.kron(np.eye(4, dtype=np.complex128), bs)
    out = apply_unitary(sv, full).amplitudes.reshape(2, 2, basis.dim)
    return basis, out, labels


def herald_filter(pair: PhotonModePair, cfg: HeraldConfig) -> HeraldOutcome:
    """Condition the two-atom state on an opposite-frequency coincidence.

    Builds the joint state of both atom-photon pairs, sends the photons
    through the beam splitter (with the overlap decomposition), projects
    onto one photon at each output port with distinct frequencies, and
    traces out the photons.  At unit overlap and detection this yields the
    pure singlet with herald probability 1/4; partial overlap admixes the
    incoherent |01>/|10> background so the fidelity falls to
    (1 + |overlap|^2)/2.  Multi-photon contamination adds false heralds
    conditioned on the fully mixed state.
    """
    basis, joint, labels = _heralded_joint_state(pair.overlap)
    keep = _coincidence_keep_indices(basis, opposite_frequency=True)
    projected = np.zeros_like(joint)
    projected[:, :, keep] = joint[:, :, keep]
    p_coincidence = float(np.sum(np.abs(projected) ** 2))

    p_det = cfg.per_photon_detection**2
    p_true = p_coincidence * p_det
    p_false = cfg.two_photon_contamination * p_det
    p_herald = p_true + p_false

    if p_herald <= 0.0:
        mixed = maximally_mixed((2, 2))
        return HeraldOutcome(False, mixed, 0.0, fidelity(mixed, singlet_state()))

    flat = projected.reshape(-1) / math.sqrt(p_coincidence)
    rho_full = DensityOperator(np.outer(flat, flat.conj()), labels, (2, 2, basis.dim))
    rho_atoms = partial_trace(rho_full, keep={0, 1})

    mixed = np.eye(4, dtype=np.complex128) / 4.0
    blended = (p_true * rho_atoms.matrix + p_false * mixed) / p_herald
    conditioned = DensityOperator(blended, rho_atoms.basis_labels, (2, 2))
    f = fidelity(conditioned, singlet_state())
    return HeraldOutcome(True, conditioned, p_herald, f)


def sector_coincidence_probabilities(overlap: complex = 1.0) -> dict[str, float]:
    """Coincidence probability of each photonic frequency sector.

    At unit overlap the nu1 nu1, nu2 nu2, and symmetric sectors are
    exactly suppressed (two-photon amplitudes cancel) and only the
    antisymmetric sector produces coincidences.
    """
    basis = ModeOccupationBasis(_N_MODES, 2)
    alpha = complex(overlap)
    beta = math.sqrt(max(1.0 - abs(alpha) ** 2, 0.0))
    bs = beam_splitter_unitary(basis)
    keep = _coincidence_keep_indices(basis, opposite_frequency=False)

    def pair_vector(nu_a, nu_b):
        v = np.zeros(basis.dim, dtype=np.complex128)
        m_a = _mode_index(0, nu_a, 0)
        if alpha != 0:
            v[_occupation_with(basis, m_a, _mode_index(0, nu_b, 1))] += alpha
        if beta != 0:
            v[_occupation_with(basis, m_a, _mode_index(1, nu_b, 1))] += beta
        return v

    sectors = {
        "nu1_nu1": pair_vector(0, 0),
        "nu2_nu2": pair_vector(1, 1),
        "symmetric": (pair_vector(0, 1) + pair_vector(1, 0)) / math.sqrt(2.0),
        "antisymmetric": (pair_vector(0, 1) - pair_vector(1, 0)) / math.sqrt(2.0),
    }
    out = {}
    for name, vec in sectors.items():
        after = bs @ vec
        out[name] = float(np.sum(np.abs(after[keep]) ** 2))
    return out


def entanglement_rate(
    cfg: HeraldConfig,
    attempt_rate: float,
    p_emit: float = 1.0,
    emitter_lifetime: float | None = None,
) -> tuple[float, float]:
    """(efficiency per attempt, heralded pairs per second).

    efficiency = (p_emit * per_photon_detection)^2 * 1/4 * window
    acceptance, where the acceptance is the chance that two exponentially
    delayed photons fall inside the coincidence window (1 if no lifetime
    is given).
    """
    if not attempt_rate > 0:
        raise ValueError("attempt_rate > 0")
    if not 0.0 <= p_emit <= 1.0:
        raise ValueError("p_emit in [0, 1]")
    acceptance = 1.0
    if emitter_lifetime is not None:
        if not emitter_lifetime > 0:
            raise ValueError("emitter_lifetime > 0")
        # |t1 - t2| for two iid exponentials is Laplace with the same scale
        acceptance = 1.0 - math.exp(-cfg.coincidence_window / emitter_lifetime)
    efficiency = (p_emit * cfg.per_photon_detection) ** 2 * 0.25 * acceptance
    return efficiency, efficiency * attempt_rate
