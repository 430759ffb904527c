"""Acceptance gate: one check per shipped claim, each printing a single
pass/fail line (run with -s to see them on success)."""

import math
import time

import numpy as np
import scipy.linalg

from diracwalk import (
    LatticeSpec,
    MetricField,
    PacketSpec,
    RecorderConfig,
    ScalarField,
    GemPotentials,
    StepOptions,
    Walk,
    build_step_unitary,
    dispersion_omega,
    evolve_fourier,
    flat_step_symbol,
    frame_at,
    gem_gauge_transform,
    init_packet,
    lattice_vs_fourier,
    probability_density,
    zweibein_residual,
)
from diracwalk.cli import main as cli_main


def _verdict(num: int, name: str, ok: bool, detail: str):
    line = f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def _full_dense(op, n):
    um = op.u_minus.to_dense()
    up = op.u_plus.to_dense()
    c = np.cos(np.broadcast_to(op.coin_angles, n))
    s = np.sin(np.broadcast_to(op.coin_angles, n))
    coin = np.block([[np.diag(c), -1j * np.diag(s)],
                     [-1j * np.diag(s), np.diag(c)]])
    return coin @ scipy.linalg.block_diag(um, up)


def test_criterion_1_unitarity_random_fields():
    rng = np.random.default_rng(101)
    lattice = LatticeSpec(n_sites=64, eps=1.0)
    t0 = time.time()
    worst = 0.0
    for _ in range(100):
        op = build_step_unitary(rng.uniform(0.05, 2.5, 64),
                                -rng.uniform(0.05, 2.5, 64),
                                rng.uniform(-1.2, 1.2, 64), lattice)
        full = _full_dense(op, 64)
        gram = full.conj().T @ full - np.eye(128)
        worst = max(worst, float(np.max(np.sum(np.abs(gram), axis=1))))
    elapsed = time.time() - t0
    _verdict(1, "unitarity of random advection fields",
             worst < 1e-12 and elapsed < 10.0,
             f"max Gram defect {worst:.3e} (bound 1e-12), {elapsed:.1f}s of 10s")


def test_criterion_2_norm_conservation_long_run():
    lattice = LatticeSpec(n_sites=4096, eps=1.0)
    state = init_packet(PacketSpec(p0=2048.0, sigma2=300.0), lattice)
    walk = Walk(MetricField.gem(-0.2), 0.0, lattice,
                StepOptions(strategy="exponential"))
    worst = 0.0
    for _ in range(10_000):
        state = walk.step(state)
        worst = max(worst, abs(state.norm() - 1.0))
    _verdict(2, "norm conservation over 1e4 boosted steps",
             worst < 1e-10, f"max |norm-1| = {worst:.3e} (bound 1e-10)")


def test_criterion_3_flat_exact_transport():
    lattice = LatticeSpec(n_sites=128, eps=1.0)
    state = init_packet(PacketSpec(p0=64.0, sigma2=0.0,
                                   mix=(1.0, 1.0)), lattice)
    walk = Walk(MetricField.flat(), 0.0, lattice, StepOptions(strategy="affine"))
    exact = True
    for _ in range(1000):
        prev_m, prev_p = state.phi_minus, state.phi_plus
        state = walk.step(state)
        exact = exact and np.array_equal(state.phi_minus, np.roll(prev_m, -1))
        exact = exact and np.array_equal(state.phi_plus, np.roll(prev_p, 1))
        if not exact:
            break
    _verdict(3, "flat massless delta transport",
             exact, "1000 steps bit-exact one-site permutation per component"
             if exact else f"deviation at step {state.j}")


def test_criterion_4_dispersion_convergence():
    kappa, mass = 3.0, 1.0
    continuum = math.sqrt(kappa**2 + mass**2)
    errors = []
    for eps in (0.05, 0.025, 0.0125):
        symbol = flat_step_symbol(kappa * eps, eps, mass)
        omega = float(np.max(np.angle(np.linalg.eigvals(symbol)))) / eps
        errors.append(abs(omega - continuum))
    rel = errors[0] / continuum
    r1, r2 = errors[0] / errors[1], errors[1] / errors[2]
    ok = rel < 0.01 and 3.0 <= r1 <= 5.0 and 3.0 <= r2 <= 5.0
    _verdict(4, "second-order dispersion convergence", ok,
             f"rel err {rel:.2%} at eps=0.05 (bound 1%), "
             f"halving ratios {r1:.2f}, {r2:.2f} (bounds [3,5])")


def test_criterion_5_dense_walk_matches_fourier_oracle():
    t0 = time.time()
    lattice = LatticeSpec(n_sites=256, eps=1.0)
    state = init_packet(PacketSpec(p0=128.0, sigma2=30.0, k0=0.3,
                                   mix=(0.6, 0.8)), lattice)
    walk = Walk(MetricField.gem(-0.2), 0.5, lattice,
                StepOptions(coin_variant="reflection", strategy="exponential",
                            force_dense=True, time_sampling="start"))
    record = walk.evolve(state, 50, RecorderConfig(keep_states=True,
                                                   track_centroids=False))
    reference = evolve_fourier(state, 50, -0.2, 0.5,
                               coin_variant="reflection", time_sampling="start")
    deviation = lattice_vs_fourier(record.states, reference)
    elapsed = time.time() - t0
    _verdict(5, "dense eigendecomposition walk vs per-mode reference",
             deviation < 1e-10 and elapsed < 60.0,
             f"max amplitude deviation {deviation:.3e} (bound 1e-10), "
             f"{elapsed:.1f}s of 60s")


def test_criterion_6_geodesic_tracking(tmp_path, capsys):
    worst = 0.0
    for mix, centroid_col, ray_col in ((("1", "0"), 2, 2), (("0", "1"), 3, 1)):
        out = tmp_path / f"run{ray_col}"
        cfg = tmp_path / f"run{ray_col}.cfg"
        cfg.write_text(
            "scenario=gem\nnSites=4096\nsteps=50\nsigma2=300\n"
            f"mix={mix[0]},{mix[1]}\noutputDir={out}\n")
        assert cli_main(["run", str(cfg)]) == 0
        capsys.readouterr()  # drop the run summary; the verdict line suffices
        record = np.genfromtxt(out / "record.csv", delimiter=",", skip_header=1)
        oracle = np.genfromtxt(out / "oracle.csv", delimiter=",", skip_header=1)
        deviation = np.max(np.abs(record[:, centroid_col] - oracle[:, ray_col]))
        worst = max(worst, float(deviation))
    with capsys.disabled():  # keep the verdict visible alongside the others
        _verdict(6, "packet centroids track the null rays",
                 worst < 3.0, f"max |centroid - ray| = {worst:.3f} lattice "
                 "units (bound 3), both chiralities, all 51 recorded steps")


def test_criterion_7_zweibein_residuals():
    rng = np.random.default_rng(107)
    worst = 0.0
    for _ in range(1000):
        s0 = rng.uniform(0.2, 3.0)
        d0 = rng.uniform(0.2, 3.0)
        s1 = rng.uniform(0.05, 3.0) * s0
        d1 = -rng.uniform(0.05, 3.0) * d0
        con = np.array([[s0 * d0, 0.5 * (s0 * d1 + s1 * d0)],
                        [0.5 * (s0 * d1 + s1 * d0), s1 * d1]])
        cov = np.linalg.inv(con)
        metric = MetricField.custom(
            lambda x0, x1, v=cov[0, 0]: v + 0.0 * x1,
            lambda x0, x1, v=cov[0, 1]: v + 0.0 * x1,
            lambda x0, x1, v=cov[1, 1]: v + 0.0 * x1)
        frame = frame_at(metric, 0.0, np.array([0.0]))
        worst = max(worst, zweibein_residual(frame))
    _verdict(7, "frame decomposition residuals",
             worst < 1e-12,
             f"max residual {worst:.3e} over 1000 random metrics (bound 1e-12)")


def test_criterion_8_gauge_transform_identity():
    g = -0.2
    pots = GemPotentials.of(lambda x0, x1: -g * np.asarray(x1),
                            lambda x0, x1: 0.0 * np.asarray(x1))
    gen = ScalarField(
        value=lambda x0, x1: -g * np.asarray(x0) * np.asarray(x1),
        d_dx0=lambda x0, x1: -g * np.asarray(x1) + 0.0 * np.asarray(x0),
        d_dx1=lambda x0, x1: -g * np.asarray(x0) + 0.0 * np.asarray(x1))
    moved = gem_gauge_transform(pots, gen)
    x0, x1 = np.meshgrid(np.linspace(0.0, 10.0, 100),
                         np.linspace(-10.0, 10.0, 100), indexing="ij")
    dv = float(np.max(np.abs(moved.V.value(x0, x1))))
    da = float(np.max(np.abs(moved.A.value(x0, x1) + g * x0)))
    _verdict(8, "potential gauge shift lands exactly",
             max(dv, da) < 1e-15,
             f"max |V'| = {dv:.1e}, max |A' + g x0| = {da:.1e} "
             "on a 100x100 grid (machine precision)")


def test_criterion_9_coin_variant_documentation():
    gapless = all(
        np.allclose(np.sort(np.abs(dispersion_omega(0.0, tm, "reflection"))),
                    [0.0, math.pi], atol=1e-14)
        for tm in np.linspace(0.0, 1.5, 31))

    lattice = LatticeSpec(n_sites=256, eps=1.0)
    packet = PacketSpec(p0=128.0, sigma2=30.0, k0=0.3, mix=(0.6, 0.8j))
    worst = 0.0
    states = {}
    for variant in ("rotation", "reflection"):
        states[variant] = init_packet(packet, lattice)
    walks = {v: Walk(MetricField.gem(-0.2), 0.0, lattice,
                     StepOptions(coin_variant=v, strategy="exponential"))
             for v in states}
    for _ in range(100):
        for v in states:
            states[v] = walks[v].step(states[v])
        diff = np.max(np.abs(probability_density(states["rotation"])
                             - probability_density(states["reflection"])))
        worst = max(worst, float(diff))
    _verdict(9, "coin variants agree at zero mass", gapless and worst < 1e-12,
             f"flip coin gapless at k=0; massless density gap {worst:.3e} "
             "over 100 steps (bound 1e-12)")
