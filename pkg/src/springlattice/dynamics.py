"""Leap-frog time integration, load protocols, and quasi-static relaxation.

State is staggered: a SystemState holds positions at time t together
with velocities at t + dt/2.  A step drifts positions with the stored
half-step velocities, evaluates forces at the new positions, then kicks
the velocities forward.  Prescribed degrees of freedom are overwritten
from the protocol (positions at the step's end time, velocities from
the centered difference of the prescription) and take no force update.

Damping is velocity-proportional (-c_v v, -c_omega omega) and enters
the kick explicitly with the trailing half-step velocity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .assembly import assemble_forces_and_energy, assemble_generalized_forces
from .features import edge_feature_jacobian_arrays
from .geometry import Lattice
from .models.base import EdgeEnergyModel, hessian_at_origin

COMPONENTS = {"x1": 0, "x2": 1, "theta": 2}


class SimulationDivergedError(RuntimeError):
    """The integrator produced non-finite state."""


@dataclass(frozen=True)
class Prescription:
    """Time-dependent displacement (relative to reference) of one DOF set."""

    nodes: np.ndarray
    component: str  # "x1" | "x2" | "theta"
    displacement: Callable[[float], float]


@dataclass(frozen=True)
class NodeLoad:
    """External force and/or torque applied to a node set."""

    nodes: np.ndarray
    force: Callable[[float], tuple[float, float]] | None = None
    torque: Callable[[float], float] | None = None


def _node_array(nodes) -> np.ndarray:
    return np.unique(np.asarray(nodes, dtype=np.int64))


class LoadProtocol:
    """Prescribed displacements plus external loads for a lattice.

    Every degree of freedom is either free, prescribed, or force-loaded;
    a node with a prescribed position component cannot also carry a
    force, and a node with prescribed orientation cannot carry a torque.
    """

    def __init__(self, n_nodes: int, prescriptions: Sequence[Prescription] = (), loads: Sequence[NodeLoad] = ()):
        self.n_nodes = n_nodes
        self.prescriptions = tuple(
            replace(p, nodes=_node_array(p.nodes)) for p in prescriptions
        )
        self.loads = tuple(replace(l, nodes=_node_array(l.nodes)) for l in loads)

        self.position_mask = np.zeros((n_nodes, 2), dtype=bool)
        self.theta_mask = np.zeros(n_nodes, dtype=bool)
        for p in self.prescriptions:
            if p.component not in COMPONENTS:
                raise ValueError(f"unknown component {p.component!r}")
            if p.nodes.size and (p.nodes.min() < 0 or p.nodes.max() >= n_nodes):
                raise ValueError(f"prescription nodes out of range for {n_nodes} nodes")
            if p.component == "theta":
                if self.theta_mask[p.nodes].any():
                    raise ValueError("orientation prescribed twice for some node")
                self.theta_mask[p.nodes] = True
            else:
                c = COMPONENTS[p.component]
                if self.position_mask[p.nodes, c].any():
                    raise ValueError(f"component {p.component} prescribed twice for some node")
                self.position_mask[p.nodes, c] = True
        for l in self.loads:
            if l.nodes.size and (l.nodes.min() < 0 or l.nodes.max() >= n_nodes):
                raise ValueError(f"load nodes out of range for {n_nodes} nodes")
            # partially pinned nodes may carry loads along their free
            # components (rollers); prescriptions win on the pinned ones
            if l.force is not None and self.position_mask[l.nodes].all(axis=1).any():
                raise ValueError("force applied to a node with both position components prescribed")
            if l.torque is not None and self.theta_mask[l.nodes].any():
                raise ValueError("torque applied to a node with prescribed orientation")

    def position_values(self, reference: np.ndarray, t: float) -> np.ndarray:
        """Prescribed absolute positions at time t (meaningful where masked)."""
        out = np.zeros((self.n_nodes, 2))
        for p in self.prescriptions:
            if p.component != "theta":
                c = COMPONENTS[p.component]
                out[p.nodes, c] = reference[p.nodes, c] + p.displacement(t)
        return out

    def theta_values(self, reference: np.ndarray, t: float) -> np.ndarray:
        out = np.zeros(self.n_nodes)
        for p in self.prescriptions:
            if p.component == "theta":
                out[p.nodes] = reference[p.nodes] + p.displacement(t)
        return out

    def external_loads(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        forces = np.zeros((self.n_nodes, 2))
        torques = np.zeros(self.n_nodes)
        for l in self.loads:
            if l.force is not None:
                fx, fy = l.force(t)
                forces[l.nodes, 0] += fx
                forces[l.nodes, 1] += fy
            if l.torque is not None:
                torques[l.nodes] += l.torque(t)
        return forces, torques

    def ramped(self, ramp_time: float) -> "LoadProtocol":
        """Copy whose displacements and loads fade in linearly over ramp_time."""

        def fade(t: float) -> float:
            return min(t / ramp_time, 1.0) if ramp_time > 0 else 1.0

        def ramp_disp(fn):
            return lambda t: fade(t) * fn(t)

        def ramp_force(fn):
            if fn is None:
                return None

            def wrapped(t):
                fx, fy = fn(t)
                s = fade(t)
                return s * fx, s * fy

            return wrapped

        def ramp_torque(fn):
            return None if fn is None else (lambda t: fade(t) * fn(t))

        prescriptions = [replace(p, displacement=ramp_disp(p.displacement)) for p in self.prescriptions]
        loads = [
            NodeLoad(l.nodes, force=ramp_force(l.force), torque=ramp_torque(l.torque))
            for l in self.loads
        ]
        return LoadProtocol(self.n_nodes, prescriptions, loads)


def free_protocol(lattice: Lattice) -> LoadProtocol:
    """No constraints and no loads."""
    return LoadProtocol(lattice.n_nodes)


def make_protocol(kind: str, lattice: Lattice, **params) -> LoadProtocol:
    """Named loading protocols.

    uniaxial: strain applied along ``axis`` (0 horizontal, 1 vertical) by
        displacing the far side; both sides are gripped (both position
        components prescribed), orientations stay free.
    impulse:  the top row is driven down at ``rate`` cell-lengths per
        second until ``t_stop``, then held, approximating an impulse.
    shear:    the top row oscillates horizontally with amplitude
        ``amplitude_fraction`` of the structure height over one
        ``period``; the bottom row rides on vertical rollers.
    custom:   pass ``prescriptions`` and ``loads`` through unchanged.
    """
    n = lattice.n_nodes
    l0 = lattice.l0

    if kind == "custom":
        return LoadProtocol(n, params.get("prescriptions", ()), params.get("loads", ()))

    if kind == "uniaxial":
        strain = params["strain"]
        axis = int(params.get("axis", 1))
        if axis not in (0, 1):
            raise ValueError(f"axis must be 0 or 1, got {axis}")
        if axis == 1:
            fixed, moving = lattice.row_nodes(0), lattice.row_nodes(lattice.rows - 1)
            span = (lattice.rows - 1) * l0
        else:
            fixed = np.arange(0, n, lattice.cols)
            moving = np.arange(lattice.cols - 1, n, lattice.cols)
            span = (lattice.cols - 1) * l0
        if span == 0.0:
            raise ValueError("uniaxial protocol needs at least two nodes along the loading axis")
        target = strain * span
        zero = lambda t: 0.0
        return LoadProtocol(
            n,
            [
                Prescription(fixed, "x1", zero),
                Prescription(fixed, "x2", zero),
                Prescription(moving, "x1" if axis == 0 else "x2", lambda t: target),
                Prescription(moving, "x2" if axis == 0 else "x1", zero),
            ],
        )

    if kind == "impulse":
        rate = float(params.get("rate", 80.0))  # cell lengths per second
        t_stop = float(params.get("t_stop", 0.01))
        top = lattice.row_nodes(lattice.rows - 1)
        return LoadProtocol(
            n, [Prescription(top, "x2", lambda t: -rate * l0 * min(t, t_stop))]
        )

    if kind == "shear":
        period = float(params.get("period", 0.4))
        height = lattice.rows * l0
        amplitude = float(params.get("amplitude", params.get("amplitude_fraction", 0.05) * height))
        top = lattice.row_nodes(lattice.rows - 1)
        bottom = lattice.row_nodes(0)
        return LoadProtocol(
            n,
            [
                Prescription(top, "x1", lambda t: amplitude * math.sin(-2.0 * math.pi * t / period)),
                Prescription(bottom, "x2", lambda t: 0.0),
            ],
        )

    raise ValueError(f"unknown protocol kind {kind!r}")


@dataclass(frozen=True)
class Damping:
    """Velocity-proportional damping coefficients."""

    c_v: float = 0.0
    c_omega: float = 0.0


@dataclass(frozen=True)
class SystemState:
    """Staggered dynamic state: velocities lead positions by half a step."""

    positions: np.ndarray  # (n, 2) at time t
    orientations: np.ndarray  # (n,)
    velocities: np.ndarray  # (n, 2) at t + dt/2
    angular_velocities: np.ndarray  # (n,)
    time: float = 0.0
    step: int = 0


@dataclass(frozen=True)
class _EdgeStiffness:
    """Reference-state stiffness scales extracted from a model Hessian."""

    translational: float  # energy / length^2
    rotational: float  # energy / rad^2


def _edge_stiffness(lattice: Lattice, model: EdgeEnergyModel) -> _EdgeStiffness:
    hess = hessian_at_origin(model, step=np.array([1e-5, 1e-5, 1e-5 * lattice.l0]))
    xa = np.zeros((1, 2))
    xb = np.array([[lattice.l0, 0.0]])
    jac = edge_feature_jacobian_arrays(xa, xb)[0]  # (3, 6)
    k_dof = jac.T @ hess @ jac
    k_trans = max(
        np.abs(np.linalg.eigvalsh(0.5 * (k_dof[0:2, 0:2] + k_dof[0:2, 0:2].T))).max(),
        np.abs(np.linalg.eigvalsh(0.5 * (k_dof[3:5, 3:5] + k_dof[3:5, 3:5].T))).max(),
    )
    k_rot = max(abs(k_dof[2, 2]), abs(k_dof[5, 5]))
    return _EdgeStiffness(float(k_trans), float(k_rot))


def estimate_stable_dt(lattice: Lattice, model: EdgeEnergyModel, fraction: float = 0.05) -> float:
    """Timestep as a fraction of the stiffest linearized edge's period.

    The stiffness comes from the numerical Hessian of the model at the
    reference triple pulled back to the DOFs of one edge; a factor of
    four accounts for the maximum node degree.
    """
    k = _edge_stiffness(lattice, model)
    omega_sq = 4.0 * max(
        k.translational / lattice.masses.min(),
        k.rotational / lattice.inertias.min() if lattice.inertias.min() > 0 else 0.0,
    )
    if not omega_sq > 0.0:
        raise ValueError("model has no stiffness at the reference triple; cannot pick a timestep")
    return fraction / math.sqrt(omega_sq)


def critical_damping(lattice: Lattice, model: EdgeEnergyModel) -> Damping:
    """Near-critical damping 2*sqrt(k m) from the same stiffness estimate."""
    k = _edge_stiffness(lattice, model)
    c_v = 2.0 * math.sqrt(k.translational * lattice.masses.mean())
    c_omega = 2.0 * math.sqrt(k.rotational * lattice.inertias.mean()) if k.rotational > 0 else 0.0
    return Damping(c_v=c_v, c_omega=c_omega)


def _overwrite_prescribed(protocol, lattice, x, theta, t):
    pm, tm = protocol.position_mask, protocol.theta_mask
    if pm.any():
        x[pm] = protocol.position_values(lattice.positions, t)[pm]
    if tm.any():
        theta[tm] = protocol.theta_values(lattice.orientations, t)[tm]


def _prescribed_velocity(protocol, lattice, t0, t1, out_v, out_w):
    """Centered-difference velocities of the prescriptions over [t0, t1]."""
    pm, tm = protocol.position_mask, protocol.theta_mask
    dt = t1 - t0
    if pm.any():
        dv = (protocol.position_values(lattice.positions, t1) - protocol.position_values(lattice.positions, t0)) / dt
        out_v[pm] = dv[pm]
    if tm.any():
        dw = (protocol.theta_values(lattice.orientations, t1) - protocol.theta_values(lattice.orientations, t0)) / dt
        out_w[tm] = dw[tm]


@dataclass(frozen=True)
class StepInfo:
    state: SystemState
    potential: float | None
    kinetic: float | None
    tracked_kinetic: float | None
    residual_force: float | None
    residual_torque: float | None


def leapfrog_init(
    lattice: Lattice,
    model: EdgeEnergyModel,
    protocol: LoadProtocol,
    dt: float,
    damping: Damping = Damping(),
    positions=None,
    orientations=None,
    velocities=None,
    angular_velocities=None,
    threads: int = 1,
) -> SystemState:
    """Staggered initial state from full-step initial conditions.

    The half-step velocities come from a half kick with the force at the
    initial positions; prescribed DOFs instead take the centered
    difference of their prescription over the first half interval.
    """
    state, _ = _init_full(
        lattice, model, protocol, dt, damping, positions, orientations, velocities,
        angular_velocities, threads, want_energy=False,
    )
    return state


def _init_full(
    lattice, model, protocol, dt, damping, positions, orientations, velocities,
    angular_velocities, threads, want_energy,
):
    n = lattice.n_nodes
    x = np.array(positions if positions is not None else lattice.positions, dtype=float)
    theta = np.array(orientations if orientations is not None else lattice.orientations, dtype=float)
    v0 = np.array(velocities, dtype=float) if velocities is not None else np.zeros((n, 2))
    w0 = np.array(angular_velocities, dtype=float) if angular_velocities is not None else np.zeros(n)
    _overwrite_prescribed(protocol, lattice, x, theta, 0.0)

    if want_energy:
        gf, potential = assemble_forces_and_energy(lattice, x, theta, model, threads=threads)
    else:
        gf = assemble_generalized_forces(lattice, x, theta, model, threads=threads)
        potential = None
    fext, text = protocol.external_loads(0.0)

    acc = (gf.forces + fext - damping.c_v * v0) / lattice.masses[:, None]
    aacc = (gf.torques + text - damping.c_omega * w0) / lattice.inertias
    v = v0 + 0.5 * dt * acc
    w = w0 + 0.5 * dt * aacc
    _prescribed_velocity(protocol, lattice, 0.0, dt, v, w)
    return SystemState(x, theta, v, w, time=0.0, step=0), potential


def _step_full(
    state: SystemState,
    lattice: Lattice,
    model: EdgeEnergyModel,
    protocol: LoadProtocol,
    dt: float,
    damping: Damping,
    threads: int = 1,
    want_energy: bool = False,
    tracked: np.ndarray | None = None,
    want_residual: bool = False,
) -> StepInfo:
    t_new = (state.step + 1) * dt
    # overflow in a diverging run is reported by the check just below
    with np.errstate(over="ignore"):
        x = state.positions + dt * state.velocities
        theta = state.orientations + dt * state.angular_velocities
    _overwrite_prescribed(protocol, lattice, x, theta, t_new)
    if not np.isfinite(x).all():
        vmax = float(np.abs(state.velocities).max())
        raise SimulationDivergedError(
            f"non-finite positions at step {state.step + 1} (max |v| = {vmax})"
        )

    if want_energy:
        gf, potential = assemble_forces_and_energy(lattice, x, theta, model, threads=threads)
    else:
        gf = assemble_generalized_forces(lattice, x, theta, model, threads=threads)
        potential = None
    fext, text = protocol.external_loads(t_new)
    total_f = gf.forces + fext
    total_t = gf.torques + text

    residual_force = residual_torque = None
    if want_residual:
        free_pos = ~protocol.position_mask
        free_theta = ~protocol.theta_mask
        residual_force = float(np.abs(total_f[free_pos]).max()) if free_pos.any() else 0.0
        residual_torque = float(np.abs(total_t[free_theta]).max()) if free_theta.any() else 0.0

    # the kick may overflow in the step being diagnosed; the check below
    # turns that into an exception rather than a warning
    with np.errstate(over="ignore", invalid="ignore"):
        v = state.velocities + dt * (total_f - damping.c_v * state.velocities) / lattice.masses[:, None]
        w = state.angular_velocities + dt * (total_t - damping.c_omega * state.angular_velocities) / lattice.inertias
    _prescribed_velocity(protocol, lattice, t_new, (state.step + 2) * dt, v, w)

    vmax = float(np.abs(v).max()) if len(v) else 0.0
    if not np.isfinite(vmax):
        raise SimulationDivergedError(
            f"non-finite velocities at step {state.step + 1} (max |v| = {vmax})"
        )

    kinetic = tracked_kinetic = None
    if want_energy:
        # synchronize: average the trailing and leading half-step velocities
        v_sync = 0.5 * (state.velocities + v)
        w_sync = 0.5 * (state.angular_velocities + w)
        kinetic = float(
            0.5 * np.sum(lattice.masses[:, None] * v_sync**2)
            + 0.5 * np.sum(lattice.inertias * w_sync**2)
        )
        if tracked is not None:
            kinetic_nodes = (
                0.5 * lattice.masses[tracked] * (v_sync[tracked] ** 2).sum(axis=1)
                + 0.5 * lattice.inertias[tracked] * w_sync[tracked] ** 2
            )
            tracked_kinetic = float(kinetic_nodes.sum())

    new_state = SystemState(x, theta, v, w, time=t_new, step=state.step + 1)
    return StepInfo(new_state, potential, kinetic, tracked_kinetic, residual_force, residual_torque)


def leapfrog_step(
    state: SystemState,
    lattice: Lattice,
    model: EdgeEnergyModel,
    protocol: LoadProtocol,
    dt: float,
    damping: Damping = Damping(),
    threads: int = 1,
) -> SystemState:
    """Advance the staggered state by one drift-kick cycle."""
    return _step_full(state, lattice, model, protocol, dt, damping, threads=threads).state


def time_reversed(
    state: SystemState,
    lattice: Lattice,
    model: EdgeEnergyModel,
    protocol: LoadProtocol,
    dt: float,
    threads: int = 1,
) -> SystemState:
    """State that retraces an undamped, load-free trajectory backwards.

    Negating a leading half-step velocity yields the reversed
    trajectory's velocity half a step in its past, so one force
    evaluation realigns the staggering before the sign flip.
    """
    gf = assemble_generalized_forces(lattice, state.positions, state.orientations, model, threads=threads)
    fext, text = protocol.external_loads(state.time)
    v_trailing = state.velocities - dt * (gf.forces + fext) / lattice.masses[:, None]
    w_trailing = state.angular_velocities - dt * (gf.torques + text) / lattice.inertias
    return SystemState(
        state.positions.copy(),
        state.orientations.copy(),
        -v_trailing,
        -w_trailing,
        time=0.0,
        step=0,
    )


def kinetic_energy(state: SystemState, lattice: Lattice, nodes=None) -> float:
    """Kinetic energy over a node set, with velocities at the nearest half step."""
    idx = np.arange(lattice.n_nodes) if nodes is None else _node_array(nodes)
    v = state.velocities[idx]
    w = state.angular_velocities[idx]
    return float(
        0.5 * np.sum(lattice.masses[idx] * (v**2).sum(axis=1))
        + 0.5 * np.sum(lattice.inertias[idx] * w**2)
    )


@dataclass
class SimConfig:
    """Everything one dynamic run needs."""

    lattice: Lattice
    model: EdgeEnergyModel
    protocol: LoadProtocol
    duration: float
    dt: float | None = None  # None: estimate_stable_dt
    damping: Damping = field(default_factory=Damping)
    snapshot_stride: int = 100
    seed: int = 0
    tracked_nodes: np.ndarray | None = None
    threads: int = 1
    initial_positions: np.ndarray | None = None
    initial_orientations: np.ndarray | None = None
    initial_velocities: np.ndarray | None = None
    initial_angular_velocities: np.ndarray | None = None


@dataclass
class Trajectory:
    """Strided snapshots plus per-step scalar energy logs."""

    snapshots: list[SystemState]
    snapshot_steps: list[int]
    times: np.ndarray
    kinetic: np.ndarray
    potential: np.ndarray
    tracked_kinetic: np.ndarray | None
    tracked_nodes: np.ndarray | None
    dt: float

    @property
    def final(self) -> SystemState:
        return self.snapshots[-1]


def simulate(config: SimConfig) -> Trajectory:
    """Integrate for ceil(duration/dt) steps, logging energies every step.

    Snapshots are stored every ``snapshot_stride`` steps and always
    include the initial and final states.  The model must be calibrated.
    """
    lattice, model, protocol = config.lattice, config.model, config.protocol
    dt = config.dt if config.dt is not None else estimate_stable_dt(lattice, model)
    if not dt > 0:
        raise ValueError(f"timestep must be positive, got {dt}")
    if config.duration < 0:
        raise ValueError(f"duration must be nonnegative, got {config.duration}")
    n_steps = math.ceil(config.duration / dt) if config.duration > 0 else 0
    tracked = _node_array(config.tracked_nodes) if config.tracked_nodes is not None else None

    v0 = config.initial_velocities
    w0 = config.initial_angular_velocities
    state, potential0 = _init_full(
        lattice, model, protocol, dt, config.damping,
        config.initial_positions, config.initial_orientations, v0, w0,
        config.threads, want_energy=True,
    )

    times = np.empty(n_steps + 1)
    kinetic = np.empty(n_steps + 1)
    potential = np.empty(n_steps + 1)
    tracked_kin = np.empty(n_steps + 1) if tracked is not None else None

    # full-step velocities are exact at t = 0, before any kick
    v0_arr = np.asarray(v0, dtype=float) if v0 is not None else np.zeros((lattice.n_nodes, 2))
    w0_arr = np.asarray(w0, dtype=float) if w0 is not None else np.zeros(lattice.n_nodes)
    times[0] = 0.0
    kinetic[0] = float(
        0.5 * np.sum(lattice.masses[:, None] * v0_arr**2) + 0.5 * np.sum(lattice.inertias * w0_arr**2)
    )
    potential[0] = potential0
    if tracked is not None:
        tracked_kin[0] = float(
            0.5 * np.sum(lattice.masses[tracked, None] * v0_arr[tracked] ** 2)
            + 0.5 * np.sum(lattice.inertias[tracked] * w0_arr[tracked] ** 2)
        )

    snapshots = [state]
    snapshot_steps = [0]
    for i in range(1, n_steps + 1):
        info = _step_full(
            state, lattice, model, protocol, dt, config.damping,
            threads=config.threads, want_energy=True, tracked=tracked,
        )
        state = info.state
        times[i] = state.time
        kinetic[i] = info.kinetic
        potential[i] = info.potential
        if tracked is not None:
            tracked_kin[i] = info.tracked_kinetic
        if i % config.snapshot_stride == 0 or i == n_steps:
            snapshots.append(state)
            snapshot_steps.append(i)

    return Trajectory(
        snapshots=snapshots,
        snapshot_steps=snapshot_steps,
        times=times,
        kinetic=kinetic,
        potential=potential,
        tracked_kinetic=tracked_kin,
        tracked_nodes=tracked,
        dt=dt,
    )


@dataclass
class RelaxResult:
    """Outcome of a damped quasi-static relaxation."""

    state: SystemState
    residual_force: float
    residual_torque: float
    converged: bool
    steps: int
    dt: float


def quasi_static_relax(
    lattice: Lattice,
    model: EdgeEnergyModel,
    protocol: LoadProtocol,
    damping: Damping | None = None,
    dt: float | None = None,
    ramp_time: float | None = None,
    tol_velocity: float | None = None,
    tol_omega: float | None = None,
    tol_force: float | None = None,
    tol_torque: float | None = None,
    max_steps: int = 1_000_000,
    check_every: int = 25,
    perturb_orientations: float = 0.0,
    seed: int = 0,
    threads: int = 1,
) -> RelaxResult:
    """Drive the protocol's end state with heavy damping until motion stops.

    The prescription (and loads) ramp in linearly over ``ramp_time``
    (default 100 steps' worth); integration then continues until the
    free-DOF residual forces and all velocities drop below tolerance.
    ``perturb_orientations`` seeds small random initial rotations, which
    breaks the symmetry of bifurcation problems.

    Non-convergence within ``max_steps`` is reported on the result, not
    raised.
    """
    dt = dt if dt is not None else estimate_stable_dt(lattice, model)
    damping = damping if damping is not None else critical_damping(lattice, model)
    ramp_time = ramp_time if ramp_time is not None else 100.0 * dt
    stiffness = _edge_stiffness(lattice, model)
    if tol_force is None:
        tol_force = 1e-8 * stiffness.translational * lattice.l0
    if tol_torque is None:
        tol_torque = 1e-8 * stiffness.rotational if stiffness.rotational > 0 else np.inf
    if tol_velocity is None:
        tol_velocity = tol_force / damping.c_v if damping.c_v > 0 else np.inf
    if tol_omega is None:
        tol_omega = tol_torque / damping.c_omega if damping.c_omega > 0 else np.inf
    if not (damping.c_v > 0 or damping.c_omega > 0):
        raise ValueError("quasi-static relaxation needs positive damping")

    ramped = protocol.ramped(ramp_time)
    theta0 = np.array(lattice.orientations, dtype=float)
    if perturb_orientations:
        rng = np.random.default_rng(seed)
        theta0 += rng.uniform(-perturb_orientations, perturb_orientations, size=lattice.n_nodes)

    state = leapfrog_init(lattice, model, ramped, dt, damping, orientations=theta0, threads=threads)
    residual_force = residual_torque = np.inf
    for i in range(1, max_steps + 1):
        check = i % check_every == 0
        info = _step_full(
            state, lattice, model, ramped, dt, damping, threads=threads, want_residual=check
        )
        state = info.state
        if not check or state.time <= ramp_time:
            continue
        residual_force, residual_torque = info.residual_force, info.residual_torque
        vmax = float(np.abs(state.velocities).max())
        wmax = float(np.abs(state.angular_velocities).max())
        if (
            vmax < tol_velocity
            and wmax < tol_omega
            and residual_force < tol_force
            and residual_torque < tol_torque
        ):
            return RelaxResult(state, residual_force, residual_torque, True, i, dt)
    return RelaxResult(state, residual_force, residual_torque, False, max_steps, dt)


@dataclass
class WaveSpeedResult:
    """Arrival-time wave-speed estimate between two lattice rows."""

    speed: float | None
    arrival_time: float | None
    distance: float
    threshold: float
    peak_kinetic: float
    arrived: bool


def measure_wave_speed(
    trajectory: Trajectory,
    lattice: Lattice,
    source_row: int,
    target_row: int,
    threshold_fraction: float = 0.01,
    excitation_start: float = 0.0,
) -> WaveSpeedResult:
    """Wave speed from the onset of motion in the target row.

    The trajectory must have tracked the target row's kinetic energy
    (SimConfig.tracked_nodes = lattice.row_nodes(target_row)).  Arrival
    is the first time that energy exceeds ``threshold_fraction`` of its
    maximum over the run; no arrival is reported, not raised.
    """
    if trajectory.tracked_kinetic is None or trajectory.tracked_nodes is None:
        raise ValueError("trajectory has no tracked kinetic energy log")
    expected = lattice.row_nodes(target_row)
    if not np.array_equal(np.sort(trajectory.tracked_nodes), expected):
        raise ValueError("trajectory tracked a different node set than the target row")

    distance = abs(target_row - source_row) * lattice.l0
    ke = trajectory.tracked_kinetic
    peak = float(ke.max())
    threshold = threshold_fraction * peak
    if peak <= 0.0:
        return WaveSpeedResult(None, None, distance, threshold, peak, False)
    hits = np.nonzero(ke > threshold)[0]
    if len(hits) == 0:
        return WaveSpeedResult(None, None, distance, threshold, peak, False)
    arrival = float(trajectory.times[hits[0]])
    if arrival <= excitation_start:
        return WaveSpeedResult(None, arrival, distance, threshold, peak, False)
    speed = distance / (arrival - excitation_start)
    return WaveSpeedResult(speed, arrival, distance, threshold, peak, True)
