import math

import numpy as np
import pytest

from cdwlab.errors import DomainError
from cdwlab.evolver import (
    ComplexField,
    SchemeKind,
    Trajectory,
    detect_blowup,
    detect_resonance,
    evolve,
    field_norm,
    gaussian_packet,
    mean_phase,
    step_crank_nicolson_printed,
    step_crank_nicolson_standard,
    step_dufort_frankel_printed,
    step_dufort_frankel_standard,
    trajectory_table,
)
from cdwlab.model import FieldDriveParams, PhysicalParams


FREE = PhysicalParams(D=2.0, omega_p_sq=0.0, mu_E=0.0, theta=0.0)
WELL = PhysicalParams(D=1.0, omega_p_sq=1.0, mu_E=0.012, theta=2.0)


def potential_on_grid(f, p):
    # independent washboard evaluation for the oracles below
    x = f.x0 + f.dx * np.arange(f.values.size)
    return (0.5 * p.mu_E * (x - p.theta) ** 2
            + 0.5 * p.D * p.omega_p_sq * (1.0 - np.cos(x)))


def lap_matrix(n, boundary):
    L = np.zeros((n, n))
    for i in range(1, n - 1):
        L[i, i - 1] = 1.0
        L[i, i] = -2.0
        L[i, i + 1] = 1.0
    if boundary == "periodic":
        L[0, 0] = L[-1, -1] = -2.0
        L[0, 1] = L[0, -1] = 1.0
        L[-1, -2] = L[-1, 0] = 1.0
    return L


def random_pair(rng, n=12, dx=0.2, x0=-1.0):
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    return ComplexField(a, dx, x0), ComplexField(b, dx, x0)


def cn_printed_oracle(prev, curr, p, dt, sweeps, boundary):
    # matrix-form evaluation of the printed two-level update
    n = curr.values.size
    L = lap_matrix(n, boundary)
    V = potential_on_grid(curr, p)
    kappa = p.hbar / (p.D * curr.dx ** 2)
    drift = (2.0 / p.hbar) * V * curr.values
    g = prev.values
    for _ in range(sweeps):
        new = prev.values + 1j * dt * (
            kappa * (L @ curr.values + L @ g) - drift)
        if boundary == "dirichlet":
            new[0] = curr.values[0]
            new[-1] = curr.values[-1]
        g = new
    return new


def df_oracle(prev, curr, p, dt, as_printed):
    # term-by-term interior evaluation with Dirichlet ends
    V = potential_on_grid(curr, p)
    r2 = -1j * dt * p.hbar / (p.D * curr.dx ** 2)
    cv = curr.values
    new = cv.copy()
    for j in range(1, cv.size - 1):
        pair = cv[j - 1] - cv[j + 1] if as_printed else cv[j - 1] + cv[j + 1]
        new[j] = (r2 / (1 + r2) * pair
                  + (1 - r2) / (1 + r2) * prev.values[j]
                  - 1j * dt * (V[j] / p.hbar) * cv[j])
    return new


def cn_standard_oracle(curr, p, dt, boundary):
    # dense Cayley-form solve
    n = curr.values.size
    L = lap_matrix(n, boundary)
    V = potential_on_grid(curr, p)
    M = 1j * (p.hbar / (p.D * curr.dx ** 2)) * L \
        - 1j * np.diag(V) / p.hbar
    if boundary == "dirichlet":
        M[0, :] = 0.0
        M[-1, :] = 0.0
    eye = np.eye(n)
    A = eye - 0.5 * dt * M
    B = eye + 0.5 * dt * M
    return np.linalg.solve(A, B @ curr.values)


def test_complex_field_validation():
    with pytest.raises(DomainError):
        ComplexField([1.0, 2.0], 0.1)
    with pytest.raises(DomainError):
        ComplexField([1.0, math.inf, 0.0], 0.1)
    with pytest.raises(DomainError):
        ComplexField([1.0, 0.0, 0.0], 0.0)
    src = np.ones(4, dtype=complex)
    f = ComplexField(src, 0.1)
    src[0] = 5.0
    assert f.values[0] == 1.0
    np.testing.assert_allclose(f.grid(), [0.0, 0.1, 0.2, 0.3], atol=1e-15)


def test_trajectory_validation():
    with pytest.raises(DomainError):
        Trajectory([0.0, 1.0], [0.0], [1.0, 1.0])
    with pytest.raises(DomainError):
        Trajectory([0.0, 0.0], [0.0, 0.0], [1.0, 1.0])
    t = Trajectory([0.0, 1.0, 2.0], [0.0, 0.1, 0.2], [1.0, 1.0, 1.0])
    assert len(t) == 3


def test_cn_printed_constant_and_zero():
    c = ComplexField(np.full(9, 0.7 + 0.2j), 0.1)
    out = step_crank_nicolson_printed(c, c, FREE, 1e-3)
    np.testing.assert_allclose(out.values, c.values, rtol=0, atol=1e-15)
    z = ComplexField(np.zeros(9, dtype=complex), 0.1)
    out = step_crank_nicolson_printed(z, z, FREE, 1e-3)
    assert np.all(out.values == 0.0)


def test_cn_printed_impulse_spread():
    # one step from a fresh impulse puts i*dt*hbar/(D*dx^2) on the
    # neighbors to first order
    n, dx, dt = 11, 0.1, 1e-4
    zero = ComplexField(np.zeros(n, dtype=complex), dx)
    vals = np.zeros(n, dtype=complex)
    vals[5] = 1.0
    curr = ComplexField(vals, dx)
    out = step_crank_nicolson_printed(zero, curr, FREE, dt)
    coeff = 1j * dt * FREE.hbar / (FREE.D * dx * dx)
    assert out.values[4] == pytest.approx(coeff, rel=1e-12)
    assert out.values[6] == pytest.approx(coeff, rel=1e-12)
    # nothing beyond the immediate neighbors after a single sweep
    assert out.values[3] == 0.0
    assert out.values[7] == 0.0


def test_cn_printed_matches_matrix_oracle():
    rng = np.random.default_rng(31)
    for boundary in ["dirichlet", "periodic"]:
        for sweeps in [1, 3]:
            prev, curr = random_pair(rng)
            out = step_crank_nicolson_printed(prev, curr, WELL, 2e-3,
                                              sweeps=sweeps,
                                              boundary=boundary)
            ref = cn_printed_oracle(prev, curr, WELL, 2e-3, sweeps, boundary)
            np.testing.assert_allclose(out.values, ref, rtol=1e-13, atol=1e-15)


def test_cn_printed_grid_mismatch():
    a = ComplexField(np.zeros(8, dtype=complex), 0.1)
    b = ComplexField(np.zeros(9, dtype=complex), 0.1)
    with pytest.raises(DomainError):
        step_crank_nicolson_printed(a, b, FREE, 1e-3)
    with pytest.raises(DomainError):
        step_crank_nicolson_printed(a, a, FREE, 1e-3, sweeps=0)


def test_df_printed_constant_not_preserved():
    # the printed neighbor difference kills the constant mode:
    # new = (1-2R)/(1+2R) * c on the interior
    c0 = 0.8 - 0.3j
    c = ComplexField(np.full(9, c0), 0.1)
    dt = 1e-3
    out = step_dufort_frankel_printed(c, c, FREE, dt)
    r2 = -1j * dt * FREE.hbar / (FREE.D * 0.1 ** 2)
    expect = (1 - r2) / (1 + r2) * c0
    np.testing.assert_allclose(out.values[1:-1], np.full(7, expect),
                               rtol=1e-13)
    assert expect != pytest.approx(c0, rel=1e-6)


def test_df_printed_matches_term_oracle():
    rng = np.random.default_rng(32)
    prev, curr = random_pair(rng)
    out = step_dufort_frankel_printed(prev, curr, WELL, 2e-3)
    ref = df_oracle(prev, curr, WELL, 2e-3, as_printed=True)
    np.testing.assert_allclose(out.values, ref, rtol=1e-13, atol=1e-15)


def test_df_standard_matches_term_oracle():
    rng = np.random.default_rng(33)
    prev, curr = random_pair(rng)
    out = step_dufort_frankel_standard(prev, curr, WELL, 2e-3)
    ref = df_oracle(prev, curr, WELL, 2e-3, as_printed=False)
    np.testing.assert_allclose(out.values, ref, rtol=1e-13, atol=1e-15)


def test_df_standard_preserves_constant():
    c0 = 0.8 - 0.3j
    c = ComplexField(np.full(9, c0), 0.1)
    out = step_dufort_frankel_standard(c, c, FREE, 1e-3)
    np.testing.assert_allclose(out.values, np.full(9, c0), rtol=1e-14)


def test_df_standard_free_run_stays_bounded():
    # |g| = 1 for every mode of the free equation: marginal stability
    f = gaussian_packet(101, 0.1)
    drive = FieldDriveParams(a_D=0.0)
    t = evolve("df-standard", f, FREE, drive, 1e-3, 1000)
    assert not t.truncated
    assert np.max(t.norm) <= 3.0 * t.norm[0]
    assert detect_blowup(t, 10.0) is None


def test_cn_standard_matches_dense_oracle():
    rng = np.random.default_rng(34)
    for boundary in ["dirichlet", "periodic"]:
        prev, curr = random_pair(rng)
        out = step_crank_nicolson_standard(prev, curr, WELL, 2e-3,
                                           boundary=boundary)
        ref = cn_standard_oracle(curr, WELL, 2e-3, boundary)
        np.testing.assert_allclose(out.values, ref, rtol=1e-11, atol=1e-14)


def test_cn_standard_norm_conserved():
    # unitary Cayley update: norm drift below 1e-10 over 1000 steps
    f = gaussian_packet(301, 0.05)
    drive = FieldDriveParams(a_D=0.0)
    for p in [FREE, WELL]:
        t = evolve("cn-standard", f, p, drive, 5e-3, 1000)
        assert not t.truncated
        drift = abs(t.norm[-1] - t.norm[0]) / t.norm[0]
        assert drift < 1e-10


def test_all_schemes_identity_as_dt_vanishes():
    # cold start (prev = curr): one step must approach the input
    # linearly in dt
    rng = np.random.default_rng(35)
    vals = rng.normal(size=21) + 1j * rng.normal(size=21)
    f = ComplexField(vals, 0.2)
    steppers = [step_crank_nicolson_printed, step_dufort_frankel_printed,
                step_crank_nicolson_standard, step_dufort_frankel_standard]
    for stepper in steppers:
        devs = []
        for dt in [1e-6, 1e-7]:
            out = stepper(f, f, WELL, dt)
            devs.append(np.linalg.norm(out.values - f.values))
        assert devs[1] < 1e-3
        ratio = devs[0] / devs[1]
        assert 8.0 < ratio < 12.0


def test_all_schemes_hold_dirichlet_boundaries():
    rng = np.random.default_rng(36)
    prev, curr = random_pair(rng)
    steppers = [step_crank_nicolson_printed, step_dufort_frankel_printed,
                step_crank_nicolson_standard, step_dufort_frankel_standard]
    for stepper in steppers:
        out = stepper(prev, curr, WELL, 2e-3)
        assert out.values[0] == curr.values[0]
        assert out.values[-1] == curr.values[-1]


def test_mean_phase_anchors():
    # impulse sitting exactly on x = 2*pi
    n = 9
    vals = np.zeros(n, dtype=complex)
    vals[4] = 1.0
    f = ComplexField(vals, math.pi / 2, x0=0.0)
    assert mean_phase(f) == pytest.approx(2 * math.pi, rel=1e-15)
    # symmetric packet about zero
    g = gaussian_packet(51, 0.1)
    assert mean_phase(g) == pytest.approx(0.0, abs=1e-12)
    # equal impulses at 0 and 2*pi average to pi
    vals = np.zeros(n, dtype=complex)
    vals[0] = 1.0
    vals[8] = 1.0
    f = ComplexField(vals, math.pi / 4, x0=0.0)
    assert mean_phase(f) == pytest.approx(math.pi, rel=1e-15)
    with pytest.raises(DomainError):
        mean_phase(ComplexField(np.zeros(5, dtype=complex), 0.1))


def test_field_norm_hand_value():
    f = ComplexField([1.0, 2.0j, 0.0], 0.5)
    assert field_norm(f) == pytest.approx(math.sqrt(2.5), rel=1e-15)


def test_gaussian_packet_layout():
    f = gaussian_packet(101, 0.1)
    x = f.grid()
    assert x[0] == pytest.approx(-5.0)
    assert x[-1] == pytest.approx(5.0)
    assert np.argmax(np.abs(f.values)) == 50
    g = gaussian_packet(101, 0.1, x_c=1.0)
    assert g.grid()[np.argmax(np.abs(g.values))] == pytest.approx(1.0)
    h = gaussian_packet(5, 0.1, x0=2.0)
    assert h.grid()[0] == 2.0
    with pytest.raises(DomainError):
        gaussian_packet(2, 0.1)
    with pytest.raises(DomainError):
        gaussian_packet(5, 0.1, alpha0=0.0)


def test_evolve_zero_field_single_step():
    z = ComplexField(np.zeros(9, dtype=complex), 0.1)
    drive = FieldDriveParams(a_D=0.0)
    t = evolve("cn-standard", z, FREE, drive, 1e-3, 1)
    assert len(t) == 2
    assert np.all(t.norm == 0.0)
    assert np.all(t.mean_phase == 0.0)
    assert not t.truncated


def test_evolve_rejects_bad_arguments():
    f = gaussian_packet(11, 0.1)
    drive = FieldDriveParams(a_D=0.0)
    with pytest.raises(DomainError):
        evolve("no-such-scheme", f, FREE, drive, 1e-3, 10)
    with pytest.raises(DomainError):
        evolve("cn-standard", f, FREE, drive, 1e-3, 0)
    with pytest.raises(DomainError):
        evolve("cn-standard", f, FREE, drive, 0.0, 10)


def test_evolve_accepts_enum_and_string():
    f = gaussian_packet(11, 0.1)
    drive = FieldDriveParams(a_D=0.0)
    t1 = evolve(SchemeKind.DUFORT_FRANKEL_STANDARD, f, FREE, drive, 1e-3, 5)
    t2 = evolve("df-standard", f, FREE, drive, 1e-3, 5)
    np.testing.assert_array_equal(t1.norm, t2.norm)


def test_evolve_drive_advances_theta():
    # the recorded run must equal stepping by hand with
    # theta_n = theta0 + a_D*(n*dt)
    from dataclasses import replace

    f = gaussian_packet(41, 0.1, x_c=0.5)
    p = PhysicalParams(D=1.0, omega_p_sq=1.0, mu_E=0.012, theta=0.7)
    drive = FieldDriveParams(a_D=0.3)
    dt, steps = 2e-3, 6
    t = evolve("cn-standard", f, p, drive, dt, steps)

    prev = curr = f
    for n in range(steps):
        pn = replace(p, theta=p.theta + drive.a_D * (n * dt))
        new = step_crank_nicolson_standard(prev, curr, pn, dt)
        prev, curr = curr, new
    assert t.norm[-1] == pytest.approx(field_norm(curr), rel=1e-13)
    assert t.mean_phase[-1] == pytest.approx(mean_phase(curr), rel=1e-12)


def test_evolve_static_theta_below_pi_is_bounded():
    # no tunneling for theta < pi: the packet sloshes but the mean
    # phase never reaches the next well; the detection window must
    # cover at least two sloshing periods (about 9.2 time units each)
    f = gaussian_packet(501, 0.05, x_c=1.0)
    drive = FieldDriveParams(a_D=0.0)
    t = evolve("cn-standard", f, WELL, drive, 5e-3, 4000)
    assert not t.truncated
    assert np.max(np.abs(t.mean_phase)) < 2 * math.pi
    assert detect_resonance(t, 4000)


def test_evolve_df_standard_resonance():
    # same phenomenology out of the stable leapfrog at its own dt
    f = gaussian_packet(501, 0.05, x_c=1.0)
    drive = FieldDriveParams(a_D=0.0)
    t = evolve("df-standard", f, WELL, drive, 2e-3, 10000)
    assert not t.truncated
    assert np.max(np.abs(t.mean_phase)) < 2 * math.pi
    assert detect_resonance(t, 10000)


def test_evolve_cn_printed_blows_up():
    # calibrated run: the printed scheme leaves the finite range and
    # the norm passes 10x its initial value near 100 steps
    f = gaussian_packet(501, 0.05)
    p = PhysicalParams(D=1.0, omega_p_sq=1.0, mu_E=0.012, theta=2.0)
    drive = FieldDriveParams(a_D=0.0)
    t = evolve("cn-printed", f, p, drive, 8e-4, 2000)
    assert t.truncated
    assert len(t) < 2001
    idx = detect_blowup(t, 10.0)
    assert idx is not None
    assert 50 <= idx <= 150


def test_detect_blowup_basics():
    t = Trajectory([0.0, 1.0, 2.0], [0.0, 0.0, 0.0], [1.0, 2.0, 20.0])
    assert detect_blowup(t, 10.0) == 2
    flat = Trajectory([0.0, 1.0, 2.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0])
    assert detect_blowup(flat, 10.0) is None
    with pytest.raises(DomainError):
        detect_blowup(flat, 1.0)


def test_detect_resonance_basics():
    n = 64
    times = np.arange(n, dtype=float)
    # monotone drift through 2*pi: no resonance
    drifting = Trajectory(times, np.linspace(0, 8.0, n), np.ones(n))
    assert not detect_resonance(drifting, 32)
    # bounded oscillation of amplitude pi: resonance
    osc = Trajectory(times, math.pi * np.sin(times / 3.0), np.ones(n))
    assert detect_resonance(osc, 32)
    # oscillation that exceeds 2*pi does not count
    big = Trajectory(times, 7.0 * np.sin(times / 3.0), np.ones(n))
    assert not detect_resonance(big, 32)
    # flat phase has no extrema
    flat = Trajectory(times, np.zeros(n), np.ones(n))
    assert not detect_resonance(flat, 32)
    with pytest.raises(DomainError):
        detect_resonance(osc, 3)
    with pytest.raises(DomainError):
        detect_resonance(Trajectory([0.0, 1.0], [0.0, 0.0], [1.0, 1.0]), 4)


def test_trajectory_table_layout():
    t = Trajectory([0.0, 0.5], [0.1, 0.2], [1.0, 0.9])
    table = trajectory_table(t)
    assert table.columns == ("t", "mean_phase", "norm")
    assert len(table) == 2
    assert table.column("norm") == [1.0, 0.9]
