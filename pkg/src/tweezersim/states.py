"""Exact linear algebra for small composite quantum systems.

State vectors and density operators over tensor products of small
subsystems (atomic qubits, photonic frequency labels, bosonic mode
occupations), plus the 50/50 beam-splitter unitary lifted to a truncated
occupation-number basis.  Everything here is a pure function over
immutable values, so the Monte Carlo layers can call it from parallel
trial workers without locking.

Basis ordering is fixed at construction (lexicographic) and operations
address subsystems by index, never by label, so results are reproducible
across runs and platforms.
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
import math

import numpy as np

# Tolerance for algebraic identities (norms, traces, hermiticity).
ATOL_ALGEBRA = 1e-12
# Looser tolerance when checking user-supplied matrices for unitarity.
ATOL_UNITARY = 1e-10
# Hard cap on composite dimensions; this library is for desk-scale systems
# (two atoms plus a <=2-photon mode register), not general simulation.
MAX_DIMENSION = 256


def _as_complex_vector(amplitudes) -> np.ndarray:
    a = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if a.size < 1:
        raise ValueError("state must have at least one amplitude")
    return a


def _default_labels(dim: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(dim))


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over an ordered composite basis.

    ``dims`` lists the subsystem dimensions whose product is the total
    dimension; ``basis_labels`` carries one human-readable tag per basis
    state (tags of tensor factors are comma-joined).
    """

    amplitudes: np.ndarray
    basis_labels: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        a = _as_complex_vector(self.amplitudes)
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.basis_labels) != a.size:
            raise ValueError("basis_labels length must equal amplitude count")
        if math.prod(self.dims) != a.size:
            raise ValueError("product of dims must equal amplitude count")
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state vector is not normalized (norm={norm!r})")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_density(self) -> "DensityOperator":
        m = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(m, self.basis_labels, self.dims)


def ket(amplitudes, basis_labels=None, dims=None) -> StateVector:
    """Build a StateVector, normalizing the amplitudes."""
    a = _as_complex_vector(amplitudes)
    norm = np.linalg.norm(a)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    a = a / norm
    if dims is None:
        dims = (a.size,)
    if basis_labels is None:
        basis_labels = _default_labels(a.size)
    return StateVector(a, tuple(basis_labels), tuple(dims))


def basis_state(dim: int, index: int, basis_labels=None) -> StateVector:
    a = np.zeros(dim, dtype=np.complex128)
    a[index] = 1.0
    return ket(a, basis_labels=basis_labels)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace, positive-semidefinite operator."""

    matrix: np.ndarray
    basis_labels: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        d = m.shape[0]
        if len(self.basis_labels) != d:
            raise ValueError("basis_labels length must equal matrix dimension")
        if math.prod(self.dims) != d:
            raise ValueError("product of dims must equal matrix dimension")
        if np.max(np.abs(m - m.conj().T)) > ATOL_ALGEBRA:
            raise ValueError("density matrix is not Hermitian within 1e-12")
        tr = np.trace(m).real
        if abs(tr - 1.0) > ATOL_ALGEBRA:
            raise ValueError(f"density matrix trace must be 1 (got {tr!r})")
        eigs = np.linalg.eigvalsh(m)
        if eigs.min() < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def population(self, index: int) -> float:
        return float(self.matrix[index, index].real)


def diagonal_density(populations, basis_labels=None) -> DensityOperator:
    p = np.asarray(populations, dtype=float)
    if basis_labels is None:
        basis_labels = _default_labels(p.size)
    return DensityOperator(np.diag(p.astype(np.complex128)), tuple(basis_labels), (p.size,))


def maximally_mixed(dims) -> DensityOperator:
    dims = tuple(int(d) for d in dims)
    d = math.prod(dims)
    return DensityOperator(np.eye(d, dtype=np.complex128) / d, _default_labels(d), dims)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product of two pure states; labels concatenate pairwise."""
    d = a.dim * b.dim
    if d > MAX_DIMENSION:
        raise ValueError(
            f"tensor dimension {d} exceeds the configured cap {MAX_DIMENSION}"
        )
    amps = np.kron(a.amplitudes, b.amplitudes)
    labels = tuple(f"{la},{lb}" for la in a.basis_labels for lb in b.basis_labels)
    return StateVector(amps, labels, a.dims + b.dims)


def apply_unitary(state: StateVector, u: np.ndarray) -> StateVector:
    """Apply a unitary matrix to a state; norm is preserved exactly."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("operator must be a square matrix")
    if u.shape[0] != state.dim:
        raise ValueError(
            f"dimension mismatch: operator is {u.shape[0]}, state is {state.dim}"
        )
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > ATOL_UNITARY:
        raise ValueError(f"matrix is not unitary within {ATOL_UNITARY} (error {err:g})")
    return StateVector(u @ state.amplitudes, state.basis_labels, state.dims)


def _split_labels(labels: tuple[str, ...], dims: tuple[int, ...]):
    """Per-subsystem label parts, or None if labels are not comma-consistent."""
    n = len(dims)
    if n == 1:
        return [list(labels)]
    parts = []
    for lab in labels:
        p = lab.split(",")
        if len(p) != n:
            return None
        parts.append(p)
    per_sub = []
    for k, dk in enumerate(dims):
        # label of subsystem k must depend only on index k
        strides = np.array(np.unravel_index(np.arange(len(labels)), dims))
        seen = {}
        for flat, idx in enumerate(strides[k]):
            if idx in seen and seen[idx] != parts[flat][k]:
                return None
            seen[idx] = parts[flat][k]
        per_sub.append([seen[i] for i in range(dk)])
    return per_sub


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Trace out every subsystem not listed in ``keep`` (set of indices)."""
    dims = rho.dims
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices must be a nonempty subset of 0..{n - 1}")
    drop = [i for i in range(n) if i not in keep]
    t = rho.matrix.reshape(dims + dims)
    remaining = n
    for i in sorted(drop, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + remaining)
        remaining -= 1
    kept_dims = tuple(dims[k] for k in keep)
    d = math.prod(kept_dims)
    m = t.reshape(d, d)

    per_sub = _split_labels(rho.basis_labels, dims)
    if per_sub is not None:
        labels = tuple(
            ",".join(per_sub[k][idx[j]] for j, k in enumerate(keep))
            for idx in product(*[range(dims[k]) for k in keep])
        )
    else:
        labels = _default_labels(d)
    return DensityOperator(m, labels, kept_dims)


def fidelity(rho: DensityOperator, target: StateVector) -> float:
    """Overlap <target|rho|target> of a mixed state with a pure target."""
    if rho.dim != target.dim:
        raise ValueError(
            f"dimension mismatch: rho is {rho.dim}, target is {target.dim}"
        )
    v = target.amplitudes
    val = float(np.real(v.conj() @ rho.matrix @ v))
    # clip floating-point spill just outside [0, 1]
    return min(max(val, 0.0), 1.0)


@dataclass(frozen=True)
class ModeOccupationBasis:
    """Occupation-number basis for ``mode_count`` bosonic modes.

    Enumerates every occupation tuple with at most ``max_photons_per_mode``
    photons in any mode *and in total* (with the default cap of 2 this is
    exactly the vacuum + one-photon + two-photon sector).  Capping the
    total keeps number-conserving unitaries exactly unitary on the
    truncated basis.  Enumeration order is lexicographic and fixed.
    """

    mode_count: int
    max_photons_per_mode: int = 2

    def __post_init__(self):
        if self.mode_count < 1:
            raise ValueError("mode_count >= 1")
        if not 1 <= self.max_photons_per_mode <= 2:
            raise ValueError("max_photons_per_mode must be 1 or 2")

    @cached_property
    def states(self) -> tuple[tuple[int, ...], ...]:
        cap = self.max_photons_per_mode
        out = []

        def extend(prefix, budget):
            if len(prefix) == self.mode_count:
                out.append(tuple(prefix))
                return
            for n in range(min(cap, budget) + 1):
                extend(prefix + [n], budget - n)

        extend([], cap)
        return tuple(out)

    @cached_property
    def _index(self) -> dict:
        return {occ: i for i, occ in enumerate(self.states)}

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, occupation) -> int:
        occ = tuple(int(n) for n in occupation)
        try:
            return self._index[occ]
        except KeyError:
            raise ValueError(f"occupation {occ} not in basis") from None

    def labels(self) -> tuple[str, ...]:
        return tuple("".join(str(n) for n in occ) for occ in self.states)


def lift_mode_unitary(u_modes: np.ndarray, basis: ModeOccupationBasis) -> np.ndarray:
    """Lift a single-particle mode unitary to the truncated occupation basis.

    Expands ``prod_j (sum_i u[i,j] a_i^dag)^{n_j} |vac>`` exactly for each
    basis state; with at most two photons in total this needs no further
    truncation, so the lifted matrix is exactly unitary.
    """
    u = np.asarray(u_modes, dtype=np.complex128)
    m = basis.mode_count
    if u.shape != (m, m):
        raise ValueError(f"mode unitary must be {m}x{m}")
    if basis.max_photons_per_mode > 2:
        raise ValueError("occupation cap exceeded: lift supports at most 2 photons")
    err = np.max(np.abs(u.conj().T @ u - np.eye(m)))
    if err > ATOL_UNITARY:
        raise ValueError(f"mode matrix is not unitary within {ATOL_UNITARY}")

    dim = basis.dim
    out = np.zeros((dim, dim), dtype=np.complex128)
    sqrt2 = math.sqrt(2.0)
    vac = basis.index((0,) * m)
    for col, occ in enumerate(basis.states):
        total = sum(occ)
        if total == 0:
            out[vac, col] = 1.0
        elif total == 1:
            j = occ.index(1)
            for i in range(m):
                if u[i, j] != 0:
                    single = [0] * m
                    single[i] = 1
                    out[basis.index(single), col] += u[i, j]
        else:
            # modes carrying the two photons (j == k for a doubly occupied mode)
            occupied = [idx for idx, n in enumerate(occ) for _ in range(n)]
            j, k = occupied
            prefactor = 1.0 / sqrt2 if j == k else 1.0
            for i in range(m):
                if u[i, j] == 0:
                    continue
                for l in range(m):
                    c = prefactor * u[i, j] * u[l, k]
                    if c == 0:
                        continue
                    final = [0] * m
                    final[i] += 1
                    final[l] += 1
                    if i == l:
                        out[basis.index(final), col] += c * sqrt2
                    else:
                        out[basis.index(final), col] += c
    return out


def beam_splitter_unitary(basis: ModeOccupationBasis) -> np.ndarray:
    """50/50 beam splitter on the occupation basis.

    Input modes are paired (0,1), (2,3), ...: even indices are port ``a``
    and odd indices port ``b`` of one distinguishable photon label
    (frequency and/or transverse mode).  Each pair transforms as
    ``a -> (a+b)/sqrt(2)``, ``b -> (a-b)/sqrt(2)``; distinct labels do not
    mix.  Identical photons meeting at the splitter therefore bunch: the
    |1,1> -> (|2,0> - |0,2>)/sqrt(2) amplitude cancellation is exact.
    """
    m = basis.mode_count
    if m % 2 != 0:
        raise ValueError("beam splitter needs an even number of modes (port pairs)")
    if basis.max_photons_per_mode > 2:
        raise ValueError("occupation cap exceeded: at most 2 photons per mode")
    u = np.zeros((m, m), dtype=np.complex128)
    h = 1.0 / math.sqrt(2.0)
    for k in range(0, m, 2):
        u[k, k] = h
        u[k, k + 1] = h
        u[k + 1, k] = h
        u[k + 1, k + 1] = -h
    return lift_mode_unitary(u, basis)
