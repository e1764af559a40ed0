import numpy as np
import pytest

from springlattice import (
    AnalyticOracle,
    Damping,
    LatticeSpec,
    LoadProtocol,
    NodeLoad,
    Prescription,
    SimConfig,
    SimulationDivergedError,
    critical_damping,
    estimate_stable_dt,
    free_protocol,
    kinetic_energy,
    leapfrog_init,
    leapfrog_step,
    make_protocol,
    measure_wave_speed,
    quasi_static_relax,
    simulate,
    time_reversed,
    build_lattice,
)

SPRING = AnalyticOracle(k_d=1.0, k_s=0.0, k_t=0.0)  # pure axial spring


def chain_lattice(n, unit_shape, density=2.0):
    """Vertical 1-wide column of n nodes."""
    return build_lattice(LatticeSpec(rows=n, cols=1, shape=unit_shape, density=density))


def pinned_pair(unit_shape):
    """Two-node horizontal edge with node 0 fully pinned."""
    lattice = build_lattice(LatticeSpec(1, 2, unit_shape))
    zero = lambda t: 0.0
    protocol = LoadProtocol(
        2,
        [
            Prescription(np.array([0]), "x1", zero),
            Prescription(np.array([0]), "x2", zero),
            Prescription(np.array([0]), "theta", zero),
            Prescription(np.array([1]), "x2", zero),
            Prescription(np.array([1]), "theta", zero),
        ],
    )
    return lattice, protocol


class TestProtocols:
    def test_impulse_formula(self, unit_shape):
        lattice = build_lattice(LatticeSpec(8, 2, unit_shape))
        protocol = make_protocol("impulse", lattice)
        top = lattice.row_nodes(7)
        for t, expected in ((0.005, -0.4), (0.01, -0.8), (5.0, -0.8), (0.0, 0.0)):
            vals = protocol.position_values(lattice.positions, t)
            disp = vals[top, 1] - lattice.positions[top, 1]
            assert np.allclose(disp, expected * lattice.l0, atol=1e-15), t
        # only the top row's vertical component is constrained
        assert protocol.position_mask[top, 1].all()
        assert protocol.position_mask.sum() == len(top)

    def test_shear_formula(self, unit_shape):
        lattice = build_lattice(LatticeSpec(64, 2, unit_shape))
        protocol = make_protocol("shear", lattice)
        top = lattice.row_nodes(63)
        # amplitude is 5% of the 64-cell height = 3.2 l0
        vals = protocol.position_values(lattice.positions, 0.1)  # t = T/4
        disp = vals[top, 0] - lattice.positions[top, 0]
        assert np.allclose(disp, -3.2 * lattice.l0, rtol=1e-12)
        # bottom rollers: vertical pinned, horizontal free
        bottom = lattice.row_nodes(0)
        assert protocol.position_mask[bottom, 1].all()
        assert not protocol.position_mask[bottom, 0].any()

    def test_uniaxial(self, unit_shape):
        lattice = build_lattice(LatticeSpec(5, 3, unit_shape))
        protocol = make_protocol("uniaxial", lattice, strain=-0.1, axis=1)
        top = lattice.row_nodes(4)
        vals = protocol.position_values(lattice.positions, 2.0)
        assert np.allclose(vals[top, 1] - lattice.positions[top, 1], -0.1 * 4 * lattice.l0)
        assert protocol.position_mask[lattice.row_nodes(0)].all()

    def test_unknown_kind(self, unit_shape):
        lattice = build_lattice(LatticeSpec(2, 2, unit_shape))
        with pytest.raises(ValueError, match="unknown protocol kind"):
            make_protocol("twist", lattice)

    def test_prescribed_and_loaded_dof_rejected(self, unit_shape):
        lattice = build_lattice(LatticeSpec(2, 2, unit_shape))
        with pytest.raises(ValueError, match="force applied"):
            LoadProtocol(
                4,
                [
                    Prescription(np.array([0]), "x1", lambda t: 0.0),
                    Prescription(np.array([0]), "x2", lambda t: 0.0),
                ],
                [NodeLoad(np.array([0]), force=lambda t: (1.0, 0.0))],
            )
        with pytest.raises(ValueError, match="torque applied"):
            LoadProtocol(
                4,
                [Prescription(np.array([0]), "theta", lambda t: 0.0)],
                [NodeLoad(np.array([0]), torque=lambda t: 1.0)],
            )
        # a roller carrying a load along its free component is legal
        LoadProtocol(
            4,
            [Prescription(np.array([0]), "x2", lambda t: 0.0)],
            [NodeLoad(np.array([0]), force=lambda t: (1.0, 0.0))],
        )

    def test_duplicate_prescription_rejected(self, unit_shape):
        with pytest.raises(ValueError, match="prescribed twice"):
            LoadProtocol(
                4,
                [
                    Prescription(np.array([0, 1]), "x1", lambda t: 0.0),
                    Prescription(np.array([1]), "x1", lambda t: 1.0),
                ],
            )

    def test_ramped_protocol(self, unit_shape):
        lattice = build_lattice(LatticeSpec(2, 2, unit_shape))
        protocol = LoadProtocol(
            4, [Prescription(np.array([2, 3]), "x2", lambda t: 1.0)],
            [NodeLoad(np.array([0]), force=lambda t: (4.0, 0.0), torque=lambda t: 2.0)],
        )
        ramped = protocol.ramped(10.0)
        vals = ramped.position_values(lattice.positions, 5.0)
        assert np.allclose(vals[2:, 1] - lattice.positions[2:, 1], 0.5)
        f, tau = ramped.external_loads(5.0)
        assert f[0, 0] == 2.0 and tau[0] == 1.0
        f, tau = ramped.external_loads(50.0)
        assert f[0, 0] == 4.0 and tau[0] == 2.0


class TestLeapfrogInit:
    def test_zero_forces_zero_velocity(self, small_lattice):
        state = leapfrog_init(small_lattice, SPRING, free_protocol(small_lattice), dt=0.01)
        assert np.all(state.velocities == 0.0)
        assert np.all(state.positions == small_lattice.positions)

    def test_constant_force_half_kick(self, unit_shape):
        lattice = build_lattice(LatticeSpec(1, 2, unit_shape))
        f = 0.3
        protocol = LoadProtocol(2, [], [NodeLoad(np.array([1]), force=lambda t: (f, 0.0))])
        dt = 0.01
        state = leapfrog_init(lattice, SPRING, protocol, dt)
        m = lattice.masses[1]
        assert state.velocities[1, 0] == pytest.approx(f * dt / (2 * m), rel=1e-12)

    def test_prescribed_dof_uses_protocol_difference(self, unit_shape):
        lattice = build_lattice(LatticeSpec(1, 2, unit_shape))
        rate = 2.5
        protocol = LoadProtocol(2, [Prescription(np.array([0]), "x1", lambda t: rate * t)])
        dt = 0.01
        state = leapfrog_init(lattice, SPRING, protocol, dt)
        assert state.velocities[0, 0] == pytest.approx(rate, rel=1e-12)


class TestLeapfrogStep:
    def test_free_flight(self, small_lattice):
        protocol = free_protocol(small_lattice)
        v = np.full((small_lattice.n_nodes, 2), 0.37)
        dt = 0.01
        state = leapfrog_init(small_lattice, SPRING, protocol, dt, velocities=v)
        new = leapfrog_step(state, small_lattice, SPRING, protocol, dt)
        # reference state: no internal forces, so positions drift uniformly
        assert np.allclose(new.positions, small_lattice.positions + dt * 0.37, atol=1e-15)
        assert new.step == 1 and new.time == pytest.approx(dt)

    def test_harmonic_period_within_one_percent(self, unit_shape):
        lattice, protocol = pinned_pair(unit_shape)
        k, m = 1.0, lattice.masses[1]
        dt = 0.01 * np.sqrt(m / k)
        x0 = lattice.positions.copy()
        x0[1, 0] += 0.05
        state = leapfrog_init(lattice, SPRING, protocol, dt, positions=x0)
        period = 2 * np.pi * np.sqrt(m / k)
        crossings = []
        prev = x0[1, 0] - lattice.positions[1, 0]
        for _ in range(int(6 * period / dt)):
            state = leapfrog_step(state, lattice, SPRING, protocol, dt)
            u = state.positions[1, 0] - lattice.positions[1, 0]
            if prev > 0 >= u or prev < 0 <= u:
                # linear interpolation of the crossing time
                crossings.append(state.time - dt * u / (u - prev))
            prev = u
        measured = 2 * np.mean(np.diff(crossings))
        assert abs(measured - period) / period < 0.01

    def test_damping_dissipates(self, small_lattice):
        protocol = free_protocol(small_lattice)
        rng = np.random.default_rng(0)
        v0 = rng.normal(0, 0.1, (small_lattice.n_nodes, 2))
        dt = estimate_stable_dt(small_lattice, SPRING)
        damping = Damping(c_v=1.0, c_omega=0.1)
        state = leapfrog_init(small_lattice, SPRING, protocol, dt, velocities=v0, damping=damping)
        ke0 = kinetic_energy(state, small_lattice)
        for _ in range(2000):
            state = leapfrog_step(state, small_lattice, SPRING, protocol, dt, damping=damping)
        assert kinetic_energy(state, small_lattice) < 1e-6 * ke0

    def test_divergence_raises_with_diagnostics(self, unit_shape):
        lattice, protocol = pinned_pair(unit_shape)
        x0 = lattice.positions.copy()
        x0[1, 0] += 0.1
        dt = 100.0  # far beyond the stability limit
        state = leapfrog_init(lattice, SPRING, protocol, dt, positions=x0)
        with pytest.raises(SimulationDivergedError, match="step"):
            for _ in range(1000):
                state = leapfrog_step(state, lattice, SPRING, protocol, dt)


class TestSimulate:
    def test_zero_duration_single_snapshot(self, small_lattice):
        config = SimConfig(small_lattice, SPRING, free_protocol(small_lattice), duration=0.0, dt=0.01)
        traj = simulate(config)
        assert len(traj.snapshots) == 1
        assert traj.times.shape == (1,)

    def test_conservative_energy_bound(self, small_lattice):
        model = AnalyticOracle.bistable()
        omega_max = 0.05 / estimate_stable_dt(small_lattice, model, fraction=0.05)
        dt = 0.02 / omega_max
        rng = np.random.default_rng(1)
        x0 = small_lattice.positions + rng.uniform(-0.02, 0.02, (small_lattice.n_nodes, 2))
        theta0 = rng.uniform(-0.05, 0.05, small_lattice.n_nodes)
        config = SimConfig(
            small_lattice, model, free_protocol(small_lattice), duration=10_000 * dt, dt=dt,
            initial_positions=x0, initial_orientations=theta0, snapshot_stride=10_000,
        )
        traj = simulate(config)
        total = traj.kinetic + traj.potential
        assert abs(total[-1] - total[0]) < 1e-3 * abs(total[0])
        assert np.abs(total - total[0]).max() < 1e-3 * abs(total[0])

    def test_momentum_conservation_free_lattice(self, small_lattice):
        model = AnalyticOracle.bistable()
        dt = estimate_stable_dt(small_lattice, model)
        rng = np.random.default_rng(2)
        v0 = np.array([0.3, -0.2]) + rng.normal(0, 0.05, (small_lattice.n_nodes, 2))
        config = SimConfig(
            small_lattice, model, free_protocol(small_lattice), duration=2000 * dt, dt=dt,
            initial_velocities=v0, snapshot_stride=10**9,
        )
        traj = simulate(config)
        final = traj.final
        p0 = (small_lattice.masses[:, None] * v0).sum(axis=0)
        p1 = (small_lattice.masses[:, None] * final.velocities).sum(axis=0)
        assert np.abs(p1 - p0).max() <= 1e-10 * np.abs(p0).max()

    def test_center_of_mass_drifts_uniformly(self, small_lattice):
        model = AnalyticOracle.bistable()
        dt = 0.01
        v = np.full((small_lattice.n_nodes, 2), 0.25)
        config = SimConfig(
            small_lattice, model, free_protocol(small_lattice), duration=500 * dt, dt=dt,
            initial_velocities=v, snapshot_stride=10**9,
        )
        final = simulate(config).final
        com0 = np.average(small_lattice.positions, weights=small_lattice.masses, axis=0)
        com1 = np.average(final.positions, weights=small_lattice.masses, axis=0)
        assert np.allclose(com1 - com0, 0.25 * final.time, rtol=1e-12)

    def test_galilean_boost(self, small_lattice):
        model = AnalyticOracle.bistable()
        dt = estimate_stable_dt(small_lattice, model)
        rng = np.random.default_rng(3)
        x0 = small_lattice.positions + rng.uniform(-0.02, 0.02, (small_lattice.n_nodes, 2))
        boost = np.array([0.4, -0.1])
        kw = dict(duration=500 * dt, dt=dt, initial_positions=x0, snapshot_stride=10**9)
        rest = simulate(SimConfig(small_lattice, model, free_protocol(small_lattice), **kw))
        moving = simulate(
            SimConfig(
                small_lattice, model, free_protocol(small_lattice),
                initial_velocities=np.tile(boost, (small_lattice.n_nodes, 1)), **kw,
            )
        )
        drift = boost * moving.final.time
        delta = moving.final.positions - (rest.final.positions + drift)
        assert np.abs(delta).max() < 1e-10 * small_lattice.l0

    def test_time_reversal_returns_positions(self, small_lattice):
        model = AnalyticOracle.bistable()
        protocol = free_protocol(small_lattice)
        dt = estimate_stable_dt(small_lattice, model)
        rng = np.random.default_rng(4)
        x0 = small_lattice.positions + rng.uniform(-0.01, 0.01, (small_lattice.n_nodes, 2))
        theta0 = rng.uniform(-0.02, 0.02, small_lattice.n_nodes)
        state = leapfrog_init(small_lattice, model, protocol, dt, positions=x0, orientations=theta0)
        n = 1000
        for _ in range(n):
            state = leapfrog_step(state, small_lattice, model, protocol, dt)
        state = time_reversed(state, small_lattice, model, protocol, dt)
        for _ in range(n):
            state = leapfrog_step(state, small_lattice, model, protocol, dt)
        assert np.abs(state.positions - x0).max() < 1e-8 * small_lattice.l0
        assert np.abs(state.orientations - theta0).max() < 1e-8

    def test_thread_count_bitwise_identical(self, unit_shape):
        lattice = build_lattice(LatticeSpec(6, 6, unit_shape))
        model = AnalyticOracle.bistable()
        dt = estimate_stable_dt(lattice, model)
        rng = np.random.default_rng(5)
        x0 = lattice.positions + rng.uniform(-0.02, 0.02, (lattice.n_nodes, 2))
        kw = dict(duration=200 * dt, dt=dt, initial_positions=x0, snapshot_stride=50)
        t1 = simulate(SimConfig(lattice, model, free_protocol(lattice), threads=1, **kw))
        t2 = simulate(SimConfig(lattice, model, free_protocol(lattice), threads=2, **kw))
        for s1, s2 in zip(t1.snapshots, t2.snapshots):
            assert np.array_equal(s1.positions, s2.positions)
            assert np.array_equal(s1.velocities, s2.velocities)
        assert np.array_equal(t1.potential, t2.potential)

    def test_tracked_kinetic_matches_total_when_all_tracked(self, small_lattice):
        model = AnalyticOracle.bistable()
        dt = 0.01
        rng = np.random.default_rng(6)
        v0 = rng.normal(0, 0.1, (small_lattice.n_nodes, 2))
        config = SimConfig(
            small_lattice, model, free_protocol(small_lattice), duration=20 * dt, dt=dt,
            initial_velocities=v0, tracked_nodes=np.arange(small_lattice.n_nodes),
        )
        traj = simulate(config)
        assert np.allclose(traj.tracked_kinetic, traj.kinetic, rtol=1e-12)


class TestKineticEnergy:
    def test_at_rest(self, small_lattice):
        state = leapfrog_init(small_lattice, SPRING, free_protocol(small_lattice), 0.01)
        assert kinetic_energy(state, small_lattice) == 0.0

    def test_single_node_value(self, unit_shape):
        # density 4, phi0 0.5, l0 1 gives m = 2 per node
        lattice = build_lattice(LatticeSpec(1, 2, unit_shape, density=4.0))
        v = np.zeros((2, 2))
        v[1] = [3.0, 0.0]
        state = leapfrog_init(lattice, SPRING, free_protocol(lattice), 0.01, velocities=v)
        assert kinetic_energy(state, lattice, nodes=[1]) == pytest.approx(9.0, rel=1e-12)


class TestQuasiStaticRelax:
    def test_zero_load_stays_at_reference(self, small_lattice):
        result = quasi_static_relax(
            small_lattice, AnalyticOracle.bistable(), free_protocol(small_lattice), max_steps=20_000
        )
        assert result.converged
        assert np.abs(result.state.positions - small_lattice.positions).max() < 1e-9

    def test_single_edge_force_equilibrium(self, unit_shape):
        # constant axial pull f against a k_d spring: elongation f / k_d
        lattice, protocol_pins = pinned_pair(unit_shape)
        k_d, f = 2.0, 0.1
        model = AnalyticOracle(k_d=k_d, k_s=0.4, k_t=0.3)
        protocol = LoadProtocol(
            2,
            protocol_pins.prescriptions,
            [NodeLoad(np.array([1]), force=lambda t: (f, 0.0))],
        )
        result = quasi_static_relax(lattice, model, protocol, max_steps=200_000)
        assert result.converged
        d = result.state.positions[1, 0] - lattice.positions[1, 0]
        assert abs(d - f / k_d) <= 1e-6 * (f / k_d)

    def test_nonconvergence_reported_not_raised(self, small_lattice):
        result = quasi_static_relax(
            small_lattice, AnalyticOracle.bistable(), free_protocol(small_lattice), max_steps=10
        )
        assert not result.converged
        assert result.steps == 10


class TestWaveSpeed:
    def test_chain_arrival(self, unit_shape):
        # short vertical chain, axial step excitation at the top
        lattice = chain_lattice(17, unit_shape, density=2.0)
        m, k = lattice.masses[0], 1.0
        c = lattice.l0 * np.sqrt(k / m)
        top, bottom = 16, 0
        t_ramp = 2.0 * np.sqrt(m / k)
        protocol = LoadProtocol(
            lattice.n_nodes,
            [Prescription(np.array([lattice.node_index(top, 0)]), "x2",
                          lambda t: -0.05 * min(t / t_ramp, 1.0))],
        )
        dt = 0.02 * np.sqrt(m / k)
        config = SimConfig(
            lattice, SPRING, protocol, duration=30.0 / c, dt=dt,
            tracked_nodes=lattice.row_nodes(bottom), snapshot_stride=10**9,
        )
        traj = simulate(config)
        result = measure_wave_speed(traj, lattice, source_row=top, target_row=bottom)
        assert result.arrived
        assert abs(result.speed - c) / c < 0.10

    def test_no_arrival_reported(self, unit_shape):
        lattice = chain_lattice(4, unit_shape)
        config = SimConfig(
            lattice, SPRING, free_protocol(lattice), duration=0.1, dt=0.01,
            tracked_nodes=lattice.row_nodes(0),
        )
        traj = simulate(config)
        result = measure_wave_speed(traj, lattice, source_row=3, target_row=0)
        assert not result.arrived and result.speed is None

    def test_wrong_tracked_set_rejected(self, unit_shape):
        lattice = chain_lattice(4, unit_shape)
        config = SimConfig(
            lattice, SPRING, free_protocol(lattice), duration=0.05, dt=0.01,
            tracked_nodes=lattice.row_nodes(1),
        )
        traj = simulate(config)
        with pytest.raises(ValueError, match="tracked"):
            measure_wave_speed(traj, lattice, source_row=3, target_row=0)


class TestStableDt:
    def test_scales_with_mass(self, unit_shape):
        heavy = build_lattice(LatticeSpec(2, 2, unit_shape, density=100.0))
        light = build_lattice(LatticeSpec(2, 2, unit_shape, density=1.0))
        assert estimate_stable_dt(heavy, SPRING) == pytest.approx(
            10 * estimate_stable_dt(light, SPRING), rel=1e-6
        )

    def test_rejects_zero_stiffness(self, small_lattice):
        with pytest.raises(ValueError, match="stiffness"):
            estimate_stable_dt(small_lattice, AnalyticOracle(k_d=0.0, k_s=0.0, k_t=0.0))

    def test_critical_damping_positive(self, small_lattice):
        damping = critical_damping(small_lattice, AnalyticOracle.bistable())
        assert damping.c_v > 0 and damping.c_omega > 0
