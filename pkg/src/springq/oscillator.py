"""Classical spring-mass chains: matrices, initial-state encoding, RK4 reference.

The chain has N oscillators with masses m_j and springs k_(j,j+1) between
neighbours; a closed chain adds k_(1,N).  Newton's equations M x'' = -F x
are recast through y = sqrt(M) x into a Schroedinger-form evolution of the
combined state (y' ; i B^dag y), with B = sqrt(M)^-1 Phi sqrt(W) satisfying
B B^dag = sqrt(M)^-1 F sqrt(M)^-1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OPEN_CHAIN, CLOSED_CHAIN = 0, 1


@dataclass(frozen=True)
class OscillatorSystem:
    """masses[j] and springs[e]: e < N-1 couples (e, e+1); springs[N-1] closes the ring."""

    masses: np.ndarray
    springs: np.ndarray
    boundary: int

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        springs = np.asarray(self.springs, dtype=float)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "springs", springs)
        n = len(masses)
        if n < 2:
            raise ValueError("need at least two oscillators")
        if len(springs) != n:
            raise ValueError(f"expected {n} spring constants (chain plus closing), got {len(springs)}")
        if np.any(masses <= 0):
            raise ValueError("masses must be positive")
        if np.any(masses < 1.0 - 1e-12):
            raise ValueError("masses must be >= 1; rescale() the raw system first")
        chain = springs[:-1]
        if np.any(chain <= 0) or np.any(chain > 1.0 + 1e-12):
            raise ValueError("chain springs must lie in (0, 1]; rescale() first")
        closing = springs[-1]
        if self.boundary == OPEN_CHAIN and closing != 0.0:
            raise ValueError("open chain requires a zero closing spring")
        if self.boundary == CLOSED_CHAIN and not 0.0 < closing <= 1.0 + 1e-12:
            raise ValueError("closed chain requires a closing spring in (0, 1]")
        if self.boundary not in (OPEN_CHAIN, CLOSED_CHAIN):
            raise ValueError("boundary must be 0 (open) or 1 (closed)")

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def n_tilde(self) -> int:
        """Index-register qubit count of the zero-padded system."""
        return max(1, int(np.ceil(np.log2(self.n))))

    @property
    def n_padded(self) -> int:
        return 2**self.n_tilde

    def is_uniform(self) -> bool:
        return bool(
            np.all(self.masses == 1.0)
            and np.all(self.springs[:-1] == 1.0)
            and (self.boundary == OPEN_CHAIN or self.springs[-1] == 1.0)
        )


@dataclass(frozen=True)
class ClassicalState:
    x: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.v))):
            raise ValueError("state entries must be finite")


@dataclass(frozen=True)
class SystemMatrices:
    """Natural-size (N x N) matrices; ``padded`` embeds into 2^ceil(log2 N)."""

    M: np.ndarray
    F: np.ndarray
    W: np.ndarray
    Phi: np.ndarray
    A: np.ndarray
    B: np.ndarray
    n_padded: int

    def padded(self, name: str) -> np.ndarray:
        mat = getattr(self, name)
        out = np.zeros((self.n_padded, self.n_padded))
        out[: mat.shape[0], : mat.shape[1]] = mat
        if name in ("M",):  # padded masses act as unit masses
            np.fill_diagonal(out[mat.shape[0] :, mat.shape[1] :], 1.0)
        return out

    def hamiltonian(self) -> np.ndarray:
        """Dense padded H = -(|0><1| (x) B + |1><0| (x) B^dag)."""
        b = self.padded("B")
        dim = b.shape[0]
        h = np.zeros((2 * dim, 2 * dim), dtype=complex)
        h[:dim, dim:] = -b
        h[dim:, :dim] = -b.conj().T
        return h


def build_matrices(sys: OscillatorSystem) -> SystemMatrices:
    n = sys.n
    m = sys.masses
    k = sys.springs
    closing = k[-1]

    f = np.zeros((n, n))
    for j in range(n - 1):
        f[j, j] += k[j]
        f[j + 1, j + 1] += k[j]
        f[j, j + 1] -= k[j]
        f[j + 1, j] -= k[j]
    f[0, 0] += closing
    f[n - 1, n - 1] += closing
    f[0, n - 1] -= closing
    f[n - 1, 0] -= closing

    # Signed incidence: column e is the edge (e, e+1); the closing edge column
    # carries the boundary flag so Phi equals the uniform pattern of B-bar.
    phi = np.zeros((n, n))
    for e in range(n - 1):
        phi[e, e] = 1.0
        phi[e + 1, e] = -1.0
    c_flag = 1.0 if sys.boundary == CLOSED_CHAIN else 0.0
    phi[0, n - 1] = -c_flag
    phi[n - 1, n - 1] = c_flag

    w = np.diag(k)
    sqrt_m_inv = np.diag(1.0 / np.sqrt(m))
    a = sqrt_m_inv @ f @ sqrt_m_inv
    b = sqrt_m_inv @ phi @ np.sqrt(w)
    return SystemMatrices(np.diag(m), f, w, phi, a, b, sys.n_padded)


@dataclass(frozen=True)
class RescaleFactors:
    spring_factor: float
    mass_factor: float

    @property
    def time_factor(self) -> float:
        """Rescaled time per unit physical time: t' = t * sqrt(k_max / m_min)."""
        return float(np.sqrt(self.spring_factor / self.mass_factor))


def rescale(raw_masses, raw_springs, boundary: int) -> tuple[OscillatorSystem, RescaleFactors]:
    """Divide springs by k_max and masses by m_min so k in (0,1], m >= 1.

    Already-valid systems pass through unchanged (factors are clamped at 1).
    """
    masses = np.asarray(raw_masses, dtype=float)
    springs = np.asarray(raw_springs, dtype=float)
    if np.any(masses <= 0) or np.any(springs[:-1] <= 0):
        raise ValueError("masses and chain springs must be positive")
    f_k = max(float(springs.max()), 1.0)
    f_m = min(float(masses.min()), 1.0)
    sys = OscillatorSystem(masses / f_m, springs / f_k, boundary)
    return sys, RescaleFactors(spring_factor=f_k, mass_factor=f_m)


@dataclass(frozen=True)
class EncodedState:
    """Amplitudes of (y' ; i B^dag y), zero-padded, with the pre-normalization norm."""

    amplitudes: np.ndarray
    norm: float
    n_physical: int

    @property
    def width(self) -> int:
        return int(np.log2(len(self.amplitudes)))


def encode_initial(sys: OscillatorSystem, cs: ClassicalState) -> EncodedState:
    mats = build_matrices(sys)
    np_dim = sys.n_padded
    if len(cs.x) != sys.n or len(cs.v) != sys.n:
        raise ValueError("state dimension does not match the system")
    y_dot = np.sqrt(sys.masses) * cs.v
    b_dag_y = mats.B.conj().T @ (np.sqrt(sys.masses) * cs.x)
    psi = np.zeros(2 * np_dim, dtype=complex)
    psi[: sys.n] = y_dot
    psi[np_dim : np_dim + sys.n] = 1j * b_dag_y
    norm = float(np.linalg.norm(psi))
    if norm == 0.0:
        raise ValueError("cannot encode the zero state (x = v = 0)")
    return EncodedState(psi / norm, norm, sys.n)


def read_velocities(sys: OscillatorSystem, enc: EncodedState) -> np.ndarray:
    """Physical velocities from the top block: x' = Re(top) * norm / sqrt(m)."""
    top = enc.amplitudes[: sys.n]
    return top.real * enc.norm / np.sqrt(sys.masses)


def rk4_solve(
    sys: OscillatorSystem,
    cs0: ClassicalState,
    times: np.ndarray,
    dt_internal: float = 1e-4,
) -> tuple[np.ndarray, np.ndarray]:
    """Classic RK4 on M x'' = -F x; returns (x, v) sampled at ``times``.

    The internal step is fixed (independent of the sampling step) so the
    integrator serves as a trustworthy reference, not a co-equal
    approximation.
    """
    if dt_internal <= 0:
        raise ValueError("dt_internal must be positive")
    mats = build_matrices(sys)
    minv_f = np.diag(1.0 / sys.masses) @ mats.F

    def deriv(x, v):
        return v, -(minv_f @ x)

    times = np.asarray(times, dtype=float)
    xs = np.empty((len(times), sys.n))
    vs = np.empty((len(times), sys.n))
    x, v = cs0.x.copy(), cs0.v.copy()
    t = cs0.t
    for i, target in enumerate(times):
        span = target - t
        if span < -1e-12:
            raise ValueError("sample times must be nondecreasing from the initial time")
        n_steps = max(0, int(np.ceil(span / dt_internal - 1e-12)))
        for step in range(n_steps):
            h = min(dt_internal, target - t)
            k1x, k1v = deriv(x, v)
            k2x, k2v = deriv(x + 0.5 * h * k1x, v + 0.5 * h * k1v)
            k3x, k3v = deriv(x + 0.5 * h * k2x, v + 0.5 * h * k2v)
            k4x, k4v = deriv(x + h * k3x, v + h * k3v)
            x = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
            v = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
            t += h
        xs[i], vs[i] = x, v
        t = target
    return xs, vs


def recover_displacement(v_samples: np.ndarray, x0: np.ndarray, dt: float) -> np.ndarray:
    """Trapezoidal integration of sampled velocities; O(dt^2) per step."""
    v_samples = np.asarray(v_samples, dtype=float)
    if v_samples.ndim != 2 or v_samples.shape[0] < 2:
        raise ValueError("need at least two uniformly spaced velocity samples")
    xs = np.empty_like(v_samples)
    xs[0] = x0
    increments = 0.5 * dt * (v_samples[1:] + v_samples[:-1])
    xs[1:] = x0 + np.cumsum(increments, axis=0)
    return xs


ERROR_FLOOR = 1e-12


def relative_error(series_a: np.ndarray, series_b: np.ndarray) -> np.ndarray:
    """Per-instant log10 of ||a_t - b_t|| / max(||b_t||, floor), ratio-clamped."""
    a = np.asarray(series_a, dtype=float)
    b = np.asarray(series_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("series must have equal shapes")
    num = np.linalg.norm(a - b, axis=-1)
    den = np.maximum(np.linalg.norm(b, axis=-1), ERROR_FLOOR)
    return np.log10(np.maximum(num / den, ERROR_FLOOR))


@dataclass
class Trajectory:
    times: np.ndarray
    v_quantum: np.ndarray
    v_classical: np.ndarray
    x_quantum: np.ndarray
    x_classical: np.ndarray
    rel_err_v: np.ndarray = field(init=False)
    rel_err_x: np.ndarray = field(init=False)

    def __post_init__(self):
        lengths = {len(self.times), len(self.v_quantum), len(self.v_classical),
                   len(self.x_quantum), len(self.x_classical)}
        if len(lengths) != 1:
            raise ValueError("all trajectory series must share length")
        self.rel_err_v = relative_error(self.v_quantum, self.v_classical)
        self.rel_err_x = relative_error(self.x_quantum, self.x_classical)

    def to_csv(self, path: str) -> None:
        n = self.v_quantum.shape[1]
        cols = ["t"]
        for name in ("x_q", "v_q", "x_c", "v_c"):
            cols += [f"{name}[{i}]" for i in range(n)]
        cols += ["rel_err_x", "rel_err_v"]
        with open(path, "w") as f:
            f.write(",".join(cols) + "\n")
            for i, t in enumerate(self.times):
                row = [repr(float(t))]
                for series in (self.x_quantum, self.v_quantum, self.x_classical, self.v_classical):
                    row += [repr(float(val)) for val in series[i]]
                row += [repr(float(self.rel_err_x[i])), repr(float(self.rel_err_v[i]))]
                f.write(",".join(row) + "\n")
