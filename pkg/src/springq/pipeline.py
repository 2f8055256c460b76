"""End-to-end experiment runner: config, per-step evolution + ROAA, artifacts.

Each sample time evolves fresh from t = 0 (errors do not compound across
steps); velocities are read directly from the evolved state, displacements
are recovered by trapezoidal integration, and a classical RK4 trajectory
provides the reference.  Identical configs produce bit-identical CSVs.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .amplify import RoaaSchedule, amplify_and_measure, schedule
from .blockenc import encoded_state_prep, verify
from .circuit import count_gates, elementary_count
from .engine import apply, from_amplitudes
from .evolution import ALPHA_HS, be_exp
from .hamiltonian import HamiltonianEncoding, be_hamiltonian, be_shifted
from .incidence import (
    PaddedShape,
    be_diagonal,
    be_general_B,
    be_padded,
    be_phi,
    be_system_B,
    be_uniform_closed,
    be_uniform_open,
    l_shift_circuit,
    l_shift_matrix,
    padded_target,
)
from .oscillator import (
    ClassicalState,
    EncodedState,
    OscillatorSystem,
    Trajectory,
    build_matrices,
    encode_initial,
    read_velocities,
    recover_displacement,
    rescale,
    rk4_solve,
)
from .qsvt import PhaseCache, plan_degree

PAD_TOL = 1e-8


@dataclass
class SimulationConfig:
    masses: list
    springs: list
    boundary: int
    x0: list
    v0: list
    t_f: float
    dt: float
    t_i: float = 0.0
    epsilon: float = 0.01
    roaa: "str | int" = "auto"  # "auto" or a fixed Q_W iteration count
    rk4_dt: float = 1e-4
    workers: int = 1
    out_dir: "str | None" = None
    cache_dir: "str | None" = None
    seedless: bool = True  # the pipeline is deterministic; flag kept for echo

    def __post_init__(self):
        if self.t_f < self.t_i:
            raise ValueError("t_f must be >= t_i")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not 0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 0.5)")
        if isinstance(self.roaa, str) and self.roaa != "auto":
            raise ValueError("roaa must be 'auto' or a fixed iteration count")

    @property
    def sample_times(self) -> np.ndarray:
        n_steps = int(round((self.t_f - self.t_i) / self.dt))
        return self.t_i + self.dt * np.arange(n_steps + 1)

    @classmethod
    def from_json(cls, path: str) -> "SimulationConfig":
        with open(path) as f:
            data = json.load(f)
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class StepResources:
    t: float
    tau: float
    k: int
    d_sin: int
    d_cos: int
    cu_h_calls: int
    q_w: int
    q_aa: int
    success_probability: float
    pre_amplification_probability: float
    predicted_success: float
    gate_histogram: dict
    elementary_gates: int
    wall_clock_s: float

    @property
    def published_call_pattern(self) -> dict:
        """Evolution-circuit call counts in the published tabulation."""
        k = self.k
        return {
            "Rz": 1,
            "H": 2 + 2 * (2 * k - 1),
            "CRz": 1,
            "CZ": 1,
            "CU_H": 2 * k - 1,
            "CPi": 2 * k - 1,
        }


@dataclass
class ResourceReport:
    qubit_total: int
    alpha_h: float
    alpha_hs: float
    formula_q_aa: int
    g_h_elementary: int
    steps: list = field(default_factory=list)

    def formula_gate_count(self, k: int) -> int:
        """Theorem-level product: Q_AA * (2k - 1) * G_H."""
        return self.formula_q_aa * (2 * k - 1) * self.g_h_elementary

    def to_dict(self) -> dict:
        return {
            "qubit_total": self.qubit_total,
            "alpha_h": self.alpha_h,
            "alpha_hs": self.alpha_hs,
            "formula_q_aa": self.formula_q_aa,
            "g_h_elementary": self.g_h_elementary,
            "steps": [
                {**asdict(s), "published_call_pattern": s.published_call_pattern}
                for s in self.steps
            ],
        }


@dataclass
class PreparedSystem:
    """Everything t-independent: system, encodings, initial state, prep circuit."""

    system: OscillatorSystem
    time_factor: float
    h_enc: HamiltonianEncoding
    psi0: EncodedState
    prep: "object"
    cache: PhaseCache


def prepare_system(config: SimulationConfig) -> PreparedSystem:
    sys, factors = rescale(config.masses, config.springs, config.boundary)
    tf = factors.time_factor
    beB = be_system_B(sys)
    h_enc = be_hamiltonian(beB)
    mats = build_matrices(sys)
    dev = verify(h_enc.be, mats.hamiltonian())
    if dev > 1e-9:
        raise RuntimeError(f"Hamiltonian encoding off by {dev:.3e}")
    # Initial conditions transform to the rescaled frame: x unchanged,
    # velocities divide by the time factor.
    cs0 = ClassicalState(np.asarray(config.x0, float), np.asarray(config.v0, float) / tf)
    psi0 = encode_initial(sys, cs0)
    prep = encoded_state_prep(psi0.amplitudes)
    check = apply(prep, _zero_like(psi0))
    if np.max(np.abs(check.amplitudes - psi0.amplitudes)) > 1e-10:
        raise RuntimeError("state-preparation circuit does not reproduce psi0")
    cache_dir = config.cache_dir
    if cache_dir is None and config.out_dir:
        cache_dir = os.path.join(config.out_dir, ".phase_cache")
    return PreparedSystem(sys, tf, h_enc, psi0, prep, PhaseCache(cache_dir))


def _zero_like(psi0: EncodedState):
    amps = np.zeros_like(psi0.amplitudes)
    amps[0] = 1.0
    return from_amplitudes(amps)


@dataclass
class StepOutcome:
    t: float
    velocities: np.ndarray
    resources: StepResources


def run_step(prepared: PreparedSystem, t_phys: float, config: SimulationConfig) -> StepOutcome:
    start = time.perf_counter()
    sys = prepared.system
    t_scaled = t_phys * prepared.time_factor
    ev = be_exp(prepared.h_enc, t_scaled, config.epsilon, prepared.cache)
    if config.roaa == "auto":
        sched = schedule(ALPHA_HS, 1.0)
    else:
        q = int(config.roaa)
        theta = np.arcsin(1.0 / ALPHA_HS)
        sched = RoaaSchedule(1.0 / ALPHA_HS, q, float(np.sin((2 * q + 1) * theta) ** 2))
    result = amplify_and_measure(ev, prepared.prep, sched, prepared.psi0)
    post = result.post_state
    pad = np.abs(post.amplitudes[: sys.n_padded][sys.n :])
    if pad.size and pad.max() > PAD_TOL:
        raise RuntimeError(f"padded amplitudes leaked {pad.max():.2e} at t={t_phys}")
    # Velocities read in the rescaled frame map back via the time factor.
    v = read_velocities(sys, post) * prepared.time_factor
    plan = ev.plan
    res = StepResources(
        t=t_phys,
        tau=ev.tau,
        k=plan.k,
        d_sin=plan.d_sin,
        d_cos=plan.d_cos,
        cu_h_calls=ev.cu_h_calls,
        q_w=result.q_w,
        q_aa=2 * result.q_w + 1,
        success_probability=result.probability,
        pre_amplification_probability=result.pre_probability,
        predicted_success=result.predicted,
        gate_histogram={f"{k_}x{c}": n for (k_, c), n in sorted(count_gates(ev.be.circuit).items())},
        elementary_gates=elementary_count(ev.be.circuit),
        wall_clock_s=time.perf_counter() - start,
    )
    return StepOutcome(t=t_phys, velocities=v, resources=res)


def _step_worker(payload: tuple) -> StepOutcome:
    config_dict, t_phys = payload
    config = SimulationConfig(**config_dict)
    prepared = prepare_system(config)
    return run_step(prepared, t_phys, config)


@dataclass
class RunResult:
    trajectory: Trajectory
    resources: ResourceReport
    out_dir: "str | None"


def run(config: SimulationConfig) -> RunResult:
    prepared = prepare_system(config)
    sys = prepared.system
    times = config.sample_times

    if config.workers > 1:
        payloads = [(config.to_dict(), float(t)) for t in times]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_step_worker, payloads))
    else:
        outcomes = []
        for t in times:
            try:
                outcomes.append(run_step(prepared, float(t), config))
            except Exception as exc:
                raise RuntimeError(f"stage failure at t={t}: {exc}") from exc

    v_quantum = np.vstack([o.velocities for o in outcomes])
    if len(times) >= 2:
        x_quantum = recover_displacement(v_quantum, np.asarray(config.x0, float), config.dt)
    else:
        x_quantum = np.asarray([config.x0], dtype=float)

    scaled_times = times * prepared.time_factor
    cs0 = ClassicalState(np.asarray(config.x0, float), np.asarray(config.v0, float) / prepared.time_factor)
    x_c, v_c = rk4_solve(sys, cs0, scaled_times, config.rk4_dt)
    v_c = v_c * prepared.time_factor

    trajectory = Trajectory(
        times=times,
        v_quantum=v_quantum,
        v_classical=v_c,
        x_quantum=x_quantum,
        x_classical=x_c,
    )
    report = _assemble_report(prepared, [o.resources for o in outcomes])
    out_dir = config.out_dir
    if out_dir:
        write_artifacts(out_dir, config, trajectory, report)
    return RunResult(trajectory, report, out_dir)


def _assemble_report(prepared: PreparedSystem, steps: list) -> ResourceReport:
    h_circ = prepared.h_enc.be.circuit
    # Evolution width = (a_H + 3) ancillas + (n_tilde + 1) signal wires.
    width = prepared.h_enc.a_h + 3 + (prepared.system.n_tilde + 1)
    return ResourceReport(
        qubit_total=width,
        alpha_h=prepared.h_enc.alpha_h,
        alpha_hs=ALPHA_HS,
        formula_q_aa=2 * int(np.ceil(ALPHA_HS / 1.0)) + 1,
        g_h_elementary=elementary_count(h_circ),
        steps=list(steps),
    )


def report_resources(config: SimulationConfig) -> ResourceReport:
    """Resource accounting without simulation.

    Builds the per-step evolution circuits with placeholder (zero) phases:
    gate structure and counts do not depend on the phase values, so no
    solver run is needed.
    """
    from .evolution import assemble_evolution, structural_phases

    prepared_sys, factors = rescale(config.masses, config.springs, config.boundary)
    beB = be_system_B(prepared_sys)
    h_enc = be_hamiltonian(beB)
    shifted = be_shifted(h_enc)
    steps = []
    for t in config.sample_times:
        t_scaled = float(t) * factors.time_factor
        plan = plan_degree(t_scaled, config.epsilon, h_enc.alpha_h)
        cos_ps, sin_ps = structural_phases(plan)
        be = assemble_evolution(shifted.be, cos_ps, sin_ps, plan.tau)
        sched = schedule(ALPHA_HS, 1.0) if config.roaa == "auto" else None
        q_w = sched.q_w if sched else int(config.roaa)
        cu_h = plan.cos_degree + plan.sin_degree
        assert cu_h == 2 * plan.k - 1
        steps.append(
            StepResources(
                t=float(t),
                tau=plan.tau,
                k=plan.k,
                d_sin=plan.d_sin,
                d_cos=plan.d_cos,
                cu_h_calls=cu_h,
                q_w=q_w,
                q_aa=2 * q_w + 1,
                success_probability=float("nan"),
                pre_amplification_probability=float("nan"),
                predicted_success=float(np.sin((2 * q_w + 1) * np.arcsin(0.25)) ** 2),
                gate_histogram={
                    f"{k_}x{cc}": n for (k_, cc), n in sorted(count_gates(be.circuit).items())
                },
                elementary_gates=elementary_count(be.circuit),
                wall_clock_s=0.0,
            )
        )
    width_total = h_enc.a_h + 3 + (prepared_sys.n_tilde + 1)
    return ResourceReport(
        qubit_total=width_total,
        alpha_h=h_enc.alpha_h,
        alpha_hs=ALPHA_HS,
        formula_q_aa=2 * int(np.ceil(ALPHA_HS / 1.0)) + 1,
        g_h_elementary=elementary_count(h_enc.be.circuit),
        steps=steps,
    )


def write_artifacts(out_dir: str, config: SimulationConfig, trajectory: Trajectory, report: ResourceReport) -> None:
    os.makedirs(out_dir, exist_ok=True)
    trajectory.to_csv(os.path.join(out_dir, "trajectory.csv"))
    with open(os.path.join(out_dir, "errors.csv"), "w") as f:
        f.write("t,rel_err_x,rel_err_v\n")
        for i, t in enumerate(trajectory.times):
            f.write(f"{float(t)!r},{float(trajectory.rel_err_x[i])!r},{float(trajectory.rel_err_v[i])!r}\n")
    with open(os.path.join(out_dir, "resources.json"), "w") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
    with open(os.path.join(out_dir, "config-echo.json"), "w") as f:
        json.dump(config.to_dict(), f, indent=2, sort_keys=True)


def verify_encodings(ns=(2, 3, 4, 5, 6, 7, 8, 12), tol: float = 1e-9) -> list:
    """Exactness sweep of every constructed encoding; returns (name, dev, ok) rows."""
    from .engine import unitary_matrix

    rows = []

    def check(name, dev):
        rows.append((name, float(dev), bool(dev <= tol)))

    for n_bits in (1, 2, 3):
        c = l_shift_circuit(n_bits)
        dev = np.max(np.abs(unitary_matrix(c) - l_shift_matrix(2**n_bits)))
        check(f"L-shift n={n_bits}", dev)

    for n in ns:
        masses = 1.0 + 0.5 * (np.arange(n) % 3)
        springs = 0.35 + 0.08 * (np.arange(n) % 5)
        for boundary in (0, 1):
            k = springs.copy()
            if boundary == 0:
                k[-1] = 0.0
            sys = OscillatorSystem(masses, k, boundary)
            mats = build_matrices(sys)
            check(f"general B N={n} c={boundary}", verify(be_general_B(sys), mats.padded("B")))
            if n & (n - 1) == 0:
                uni = OscillatorSystem(
                    np.ones(n),
                    np.concatenate([np.ones(n - 1), [1.0 if boundary else 0.0]]),
                    boundary,
                )
                u_mats = build_matrices(uni)
                be = be_uniform_closed(n) if boundary else be_uniform_open(n)
                check(f"uniform B N={n} c={boundary}", verify(be, u_mats.B))
            shape = PaddedShape(n, 1)
            for kind in ("I", "Iprime", "L", "Lprime"):
                check(
                    f"padded {kind} N={n}",
                    verify(be_padded(kind, shape), padded_target(kind, shape)),
                )
            check(f"Phi N={n} c={boundary}", verify(be_phi(n, boundary), mats.padded("Phi")))
            h_enc = be_hamiltonian(be_general_B(sys))
            check(f"U_H N={n} c={boundary}", verify(h_enc.be, mats.hamiltonian()))
            shifted = be_shifted(h_enc)
            target = (mats.hamiltonian() / h_enc.alpha_h + np.eye(2 * sys.n_padded)) / 2
            check(f"H-hat N={n} c={boundary}", verify(shifted.be, target))
        diag_vals = np.linspace(-1.0, 1.0, 2 ** int(np.ceil(np.log2(max(n, 2)))))
        check(f"diagonal 2^ceil(log2 {n})", verify(be_diagonal(diag_vals), np.diag(diag_vals)))
    return rows
