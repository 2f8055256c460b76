"""Phase-angle synthesis and the projector-controlled QSVT sequence.

Phases are solved in-house (no external phase-factor package): a
least-squares objective over the real part of the QSP polynomial at
positive Chebyshev nodes, reduced to symmetric phase vectors and minimized
with L-BFGS from the (pi/4, 0, ..., 0, pi/4) seed.  Ground truth for the
assembled circuits is always the dense block-level comparison.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .blockenc import BlockEncoding
from .circuit import OPEN, Circuit, Gate, dagger, embed
from .engine import extract_block

GRID_POINTS = 401


@dataclass(frozen=True)
class DegreePlan:
    """Effective time tau = 2 alpha_H t and the polynomial degrees it needs.

    ``d_sin``/``d_cos`` carry the published parity bookkeeping (d_sin even,
    d_cos odd, d_sin + d_cos = 2k - 1).  Because the cosine series is even
    and the sine series odd, the circuit assembly pairs the cosine target
    with the even member and the sine target with the odd member; the total
    number of block-encoding applications stays 2k - 1 either way.
    """

    tau: float
    k: int
    d_sin: int
    d_cos: int

    @property
    def cos_degree(self) -> int:  # even
        return self.d_sin

    @property
    def sin_degree(self) -> int:  # odd
        return self.d_cos


def plan_degree(t: float, epsilon: float, alpha_h: float) -> DegreePlan:
    """k = ceil(1.4 tau + ln(1/eps)); degrees split to even/odd totalling 2k-1."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 0.5)")
    tau = 2.0 * alpha_h * t
    k = int(np.ceil(1.4 * tau + np.log(1.0 / epsilon) - 1e-12))
    d_sin = k if k % 2 == 0 else k - 1
    d_cos = k if k % 2 == 1 else k - 1
    return DegreePlan(tau=tau, k=k, d_sin=d_sin, d_cos=d_cos)


def bessel_j(n_max: int, x: float) -> np.ndarray:
    """J_0(x) .. J_nmax(x) by downward recurrence (Miller's algorithm)."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    start = n_max + int(np.ceil(10 + 2 * np.sqrt(max(n_max, x) * 40)))
    start += start % 2
    jp, jc = 0.0, 1e-300
    out = np.zeros(n_max + 1)
    norm = 0.0
    for n in range(start, 0, -1):
        jm = (2.0 * n / x) * jc - jp
        jp, jc = jc, jm
        if abs(jc) > 1e250:  # rescale to avoid overflow
            jc *= 1e-250
            jp *= 1e-250
            out *= 1e-250
            norm *= 1e-250
        if n - 1 <= n_max:
            out[n - 1] = jc
        if (n - 1) % 2 == 0 and n - 1 > 0:
            norm += 2.0 * jc
    norm += out[0]
    return out / norm


def chebyshev_targets(plan: DegreePlan) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi-Anger Chebyshev coefficients of cos(tau x)/2 and sin(tau x)/2.

    Returned as coefficient arrays indexed by degree, truncated at the
    plan's even (cosine) and odd (sine) degrees.
    """
    tau = plan.tau
    js = bessel_j(max(plan.cos_degree, plan.sin_degree) + 1, tau)
    cos_coef = np.zeros(plan.cos_degree + 1)
    cos_coef[0] = 0.5 * js[0]
    for k in range(1, plan.cos_degree // 2 + 1):
        cos_coef[2 * k] = (-1) ** k * js[2 * k]
    sin_coef = np.zeros(plan.sin_degree + 1)
    for k in range(0, (plan.sin_degree - 1) // 2 + 1):
        sin_coef[2 * k + 1] = (-1) ** k * js[2 * k + 1]
    return cos_coef, sin_coef


def jacobi_anger_tail(tau: float, degree: int) -> float:
    """Bound on the dropped Jacobi-Anger weight beyond ``degree``."""
    js = bessel_j(degree + 60, tau)
    return float(2.0 * np.abs(js[degree + 1 :]).sum())


class PhaseSolverError(RuntimeError):
    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class PhaseSequence:
    """QSP phases phi_0..phi_d plus the circuit-shifted varphi variants."""

    phis: tuple[float, ...]
    varphis: tuple[float, ...]
    parity: str  # "even" | "odd"
    degree: int
    target: str  # "cos_half" | "sin_half"
    tau: float
    achieved_error: float


def varphi_from_phi(phis: np.ndarray) -> np.ndarray:
    """End phases shift by pi/4, interior ones by pi/2."""
    out = np.asarray(phis, dtype=float) + np.pi / 2
    out[0] = phis[0] + np.pi / 4
    out[-1] = phis[-1] + np.pi / 4
    return out


def phi_from_varphi(varphis: np.ndarray) -> np.ndarray:
    out = np.asarray(varphis, dtype=float) - np.pi / 2
    out[0] = varphis[0] - np.pi / 4
    out[-1] = varphis[-1] - np.pi / 4
    return out


def qsp_real_polynomial(phis: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Re P(x) of the QSP product e^{i phi_0 Z} prod_j W(x) e^{i phi_j Z}."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    u = _qsp_products(phis, xs)[0]
    return u[:, 0, 0].real


def _qsp_products(phis: np.ndarray, xs: np.ndarray):
    """Final 2x2 products and cached left/right partials for the gradient."""
    d = len(phis) - 1
    m = len(xs)
    w = np.empty((m, 2, 2), dtype=complex)
    s = np.sqrt(np.clip(1.0 - xs * xs, 0.0, None))
    w[:, 0, 0] = xs
    w[:, 0, 1] = 1j * s
    w[:, 1, 0] = 1j * s
    w[:, 1, 1] = xs
    e = np.exp(1j * np.asarray(phis))
    lefts = np.empty((d + 1, m, 2, 2), dtype=complex)
    cur = np.zeros((m, 2, 2), dtype=complex)
    cur[:, 0, 0] = e[0]
    cur[:, 1, 1] = e[0].conjugate()
    lefts[0] = cur
    for j in range(1, d + 1):
        cur = cur @ w
        cur = cur * np.array([[e[j], e[j].conjugate()]])  # right-multiply diag
        lefts[j] = cur
    rights = np.empty((d + 2, m, 2, 2), dtype=complex)
    rights[d + 1] = np.eye(2, dtype=complex)[None, :, :]
    for j in range(d, 0, -1):
        block = w.copy()
        block = block * np.array([[e[j], e[j].conjugate()]])
        rights[j] = block @ rights[j + 1]
    return lefts[d], lefts, rights


def _loss_and_grad(reduced: np.ndarray, d: int, xs: np.ndarray, fs: np.ndarray):
    phis = _expand_symmetric(reduced, d)
    u, lefts, rights = _qsp_products(phis, xs)
    resid = u[:, 0, 0].real - fs
    loss = float(np.mean(resid**2))
    # dP/dphi_j = i (L_j Z R_{j+1})[0,0]; the real part picks -Im of the bracket.
    grad_full = np.empty(d + 1)
    for j in range(d + 1):
        bracket = (
            lefts[j][:, 0, 0] * rights[j + 1][:, 0, 0]
            - lefts[j][:, 0, 1] * rights[j + 1][:, 1, 0]
        )
        grad_full[j] = 2.0 * np.mean(resid * -bracket.imag)
    n_free = (d + 2) // 2
    grad = np.empty(n_free)
    for r in range(n_free):
        mirror = d - r
        grad[r] = grad_full[r] + (grad_full[mirror] if mirror != r else 0.0)
    return loss, grad


def _expand_symmetric(reduced: np.ndarray, d: int) -> np.ndarray:
    """Full phase vector from the symmetric half: phi_j = phi_{d-j}."""
    phis = np.empty(d + 1)
    n_free = (d + 2) // 2
    phis[:n_free] = reduced
    for r in range(n_free):
        phis[d - r] = reduced[r]
    return phis


def solve_phases(
    target,
    degree: int,
    parity: str,
    tol: float,
    *,
    target_name: str = "target",
    tau: float = 0.0,
    max_iter: int = 10000,
) -> PhaseSequence:
    """Solve for phases reproducing Re P(x) = target(x) on [-1, 1].

    ``target`` is a callable bounded by 1/2 in magnitude; fitting happens at
    the positive Chebyshev nodes x_m = cos((2m-1) pi / (4 d~)), and the
    reported error is the max deviation on a uniform 401-point grid.
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    if degree % 2 != (0 if parity == "even" else 1):
        raise ValueError(f"degree {degree} does not have {parity} parity")
    n_free = (degree + 2) // 2
    nodes = np.cos((2 * np.arange(1, n_free + 1) - 1) * np.pi / (4 * n_free))
    fs = np.asarray([target(x) for x in nodes], dtype=float)
    x0 = np.zeros(n_free)
    x0[0] = np.pi / 4
    result = minimize(
        _loss_and_grad,
        x0,
        args=(degree, nodes, fs),
        method="L-BFGS-B",
        jac=True,
        options={"maxiter": max_iter, "ftol": 1e-18, "gtol": 1e-12},
    )
    phis = _expand_symmetric(result.x, degree)
    grid = np.linspace(-1.0, 1.0, GRID_POINTS)
    achieved = float(
        np.max(np.abs(qsp_real_polynomial(phis, grid) - np.asarray([target(x) for x in grid])))
    )
    if achieved > tol:
        raise PhaseSolverError(
            f"phase solver reached {achieved:.3e} > tol {tol:.3e} "
            f"(degree {degree}, {target_name})",
            achieved,
        )
    varphis = varphi_from_phi(phis)
    return PhaseSequence(
        phis=tuple(float(p) for p in phis),
        varphis=tuple(float(p) for p in varphis),
        parity=parity,
        degree=degree,
        target=target_name,
        tau=tau,
        achieved_error=achieved,
    )


def projector_phase(a: int, phi: float) -> Circuit:
    """exp(i phi (2 Pi - I)) with Pi = |0^a><0^a|, via the CNOT/Rz sandwich.

    Wire 0 is the scratch (flip target); wires 1..a hold the projected
    ancillas.  On the scratch-|1> sector the circuit applies the conjugate
    phase, which is exactly what the QSVT wrap qubit requires.
    """
    if a < 1:
        raise ValueError("need at least one projected ancilla")
    c = Circuit(1 + a, label=f"Pi({phi:.6g})")
    controls = tuple((q, OPEN) for q in range(1, a + 1))
    c.add(Gate("X", (0,), controls))
    c.rz(2.0 * phi, 0)
    c.add(Gate("X", (0,), controls))
    return c


def _f_even(d: int) -> int:
    return 0 if d % 4 == 0 else 1


def _f_odd(d: int) -> int:
    return 0 if d % 4 == 1 else 1


def qsvt_sequence(
    be: BlockEncoding, ps: PhaseSequence, *, check_hermitian: bool = True
) -> BlockEncoding:
    """(1, a+1, achieved_error)-encoding of Re P(block) for a Hermitian block.

    Assembles the alternating U / U-dagger ladder interleaved with
    projector-controlled phases (varphi angles), wrapped in Hadamards on the
    top wire, with the d mod 4 dependent Rz(2pi) sign factor.  Odd-parity
    sequences shift the final phase gate by -pi/2 (the sine accommodation):
    it trades the realized component -Im P back for Re P, so one solver
    convention serves both parities.
    """
    if check_hermitian:
        blk = extract_block(be.circuit, be.a)
        if np.max(np.abs(blk - blk.conj().T)) > 1e-8:
            raise ValueError("QSVT requires a Hermitian encoded block")
    d = ps.degree
    odd = ps.parity == "odd"
    sign = -1.0 if odd else 1.0
    varphis = list(ps.varphis)
    if odd:
        varphis[0] = varphis[0] - np.pi / 2
    width = 1 + be.circuit.width
    body = list(range(1, width))
    u = embed(be.circuit, width, body)
    u_dg = embed(dagger(be.circuit), width, body)
    phase_wires = list(range(0, be.a + 1))  # scratch + the encoding ancillas

    c = Circuit(width, label=f"qsvt_{ps.target}_d{d}")
    c.h(0)
    c.extend(embed(projector_phase(be.a, sign * varphis[d]), width, phase_wires))
    for j in range(d - 1, -1, -1):
        c.extend(u if (d - 1 - j) % 2 == 0 else u_dg)
        c.extend(embed(projector_phase(be.a, sign * varphis[j]), width, phase_wires))
    f = _f_even(d) if ps.parity == "even" else _f_odd(d)
    if f:
        c.rz(2 * np.pi, 0)
    c.h(0)
    return BlockEncoding(c, alpha=1.0, a=be.a + 1, epsilon=ps.achieved_error)


class PhaseCache:
    """File-backed cache of solved phase sequences, numeric text format."""

    def __init__(self, directory: str | None):
        self.directory = directory
        if directory:
            os.makedirs(directory, exist_ok=True)

    def _path(self, target: str, tau: float, degree: int, tol: float) -> str:
        return os.path.join(
            self.directory, f"{target}_tau{tau:.12e}_d{degree}_tol{tol:.3e}.txt"
        )

    def load(self, target: str, tau: float, degree: int, tol: float) -> PhaseSequence | None:
        if not self.directory:
            return None
        path = self._path(target, tau, degree, tol)
        if not os.path.exists(path):
            return None
        with open(path) as f:
            header = f.readline().split()
            achieved = float(header[0])
            parity = header[1]
            phis = np.array([float(line) for line in f])
        return PhaseSequence(
            phis=tuple(phis),
            varphis=tuple(varphi_from_phi(phis)),
            parity=parity,
            degree=degree,
            target=target,
            tau=tau,
            achieved_error=achieved,
        )

    def store(self, ps: PhaseSequence, tol: float) -> None:
        if not self.directory:
            return
        path = self._path(ps.target, ps.tau, ps.degree, tol)
        tmp = path + ".tmp"
        with open(tmp, "w") as f:
            f.write(f"{ps.achieved_error!r} {ps.parity}\n")
            for p in ps.phis:
                f.write(f"{p!r}\n")
        os.replace(tmp, path)
