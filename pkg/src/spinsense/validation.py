"""Cross-validation suite: exact propagators vs integrator vs oracles.

Each check compares two independently computed quantities and records the
measured discrepancy against its bound.  The CLI ``validate`` command runs
the whole battery and reports pass/fail per check; the test suite calls the
same functions.  All randomness is seeded, so a fixed (level, seed) pair
produces an identical report.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import (
    CollectiveState,
    DickeBasis,
    SplitBasis,
    build_operator,
    coherent_state_after_first_pulse,
    collective_operator,
    embed,
)
from .dynamics import (
    NoiseModel,
    conjugate_dephasing_propagate,
    dephasing_propagate,
    evolve,
    split_dephasing_propagate,
)
from . import moments
from .oracles import (
    TrajectoryConfig,
    bootstrap_stderr,
    full_space_propagate,
    scalar_sde_check,
    stochastic_trajectory_projectors,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    discrepancy: float
    bound: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  [{self.detail}]" if self.detail else ""
        return f"{status}  {self.name}: discrepancy {self.discrepancy:.3e} vs bound {self.bound:.3e}{extra}"


def _result(name, discrepancy, bound, detail="") -> CheckResult:
    return CheckResult(name, float(discrepancy) <= float(bound), float(discrepancy), float(bound), detail)


def check_exact_vs_integrator(rk_tol: float = 1e-10, bound: float = 1e-9) -> list[CheckResult]:
    """Exact dephasing propagators against RK Lindblad integration."""
    out = []
    n = 10
    basis = DickeBasis(n)
    sz = collective_operator("Sz", basis)
    state0 = coherent_state_after_first_pulse(basis)
    omega, gamma_d = 0.7, 1.0
    for x in (0.5, 1.0, 2.0):
        tau = x / gamma_d
        exact = dephasing_propagate(state0, omega, gamma_d, tau)
        numeric = evolve(state0, omega * sz, [(gamma_d / 2, sz)], tau, rk_tol)
        diff = np.max(np.abs(exact.matrix - numeric.matrix))
        out.append(_result(f"exact-vs-rk standard N={n} gdt={x}", diff, bound))

    nsplit = 4
    sbasis = SplitBasis(nsplit)
    sz_sub = build_operator("Sz", sbasis.sub_basis())
    sz1, sz2 = embed(sz_sub, 1, sbasis), embed(sz_sub, 2, sbasis)
    sstate0 = coherent_state_after_first_pulse(sbasis)
    tau = 1.0
    exact = split_dephasing_propagate(sstate0, omega, -omega, gamma_d, tau)
    numeric = evolve(sstate0, omega * (sz1 - sz2), [(gamma_d / 2, sz1 + sz2)], tau, rk_tol)
    out.append(
        _result("exact-vs-rk twin N=4 gdt=1", np.max(np.abs(exact.matrix - numeric.matrix)), bound)
    )
    exact = conjugate_dephasing_propagate(sstate0, omega, gamma_d, 0.5)
    numeric = evolve(sstate0, omega * (sz1 + sz2), [(gamma_d / 2, sz1 - sz2)], 0.5, rk_tol)
    out.append(
        _result("exact-vs-rk conjugate N=4 gdt=0.5", np.max(np.abs(exact.matrix - numeric.matrix)), bound)
    )
    return out


def check_full_space(bound: float = 1e-8) -> list[CheckResult]:
    """Full 2^N product-space propagation against Dicke-basis evolution."""
    out = []
    cases = [
        ("free", dict(detuning=0.9, eta=0.0, noise=NoiseModel()), "coherent"),
        ("dephasing", dict(detuning=0.6, eta=0.0, noise=NoiseModel(gamma_d=1.0)), "coherent"),
        ("amplitude", dict(detuning=0.0, eta=0.0, noise=NoiseModel(gamma_a=0.5)), "coherent"),
        ("driven", dict(detuning=1.0, eta=1.0, noise=NoiseModel(gamma_d=1.0)), "ground"),
    ]
    tau = 1.0
    for n in (3, 4):
        basis = DickeBasis(n)
        sz = collective_operator("Sz", basis)
        sx = collective_operator("Sx", basis)
        for label, params, initial in cases:
            full = full_space_propagate(n, **params, tau=tau, initial=initial)
            if initial == "coherent":
                state0 = coherent_state_after_first_pulse(basis)
            else:
                mat = np.zeros((basis.dim, basis.dim), dtype=complex)
                mat[0, 0] = 1.0
                state0 = CollectiveState(basis, mat, check=False)
            noise = params["noise"]
            jumps = []
            if noise.gamma_d > 0:
                jumps.append((noise.gamma_d / 2, sz))
            if noise.gamma_a > 0:
                jumps.append((2 * noise.gamma_a, sx))
            h = params["detuning"] * sz + 2 * params["eta"] * sx
            dicke = evolve(state0, h, jumps, tau, 1e-11)
            diff = np.max(np.abs(full.state.matrix - dicke.matrix))
            out.append(_result(f"full-space-vs-dicke N={n} {label}", diff, bound))
            out.append(_result(f"full-space leakage N={n} {label}", full.leakage, 1e-12))
    return out


def check_trajectories(n_trajectories: int, seed: int) -> list[CheckResult]:
    """Stochastic trajectory averages against the master equation, 3-sigma."""
    out = []
    n, tau = 4, 1.0
    basis = DickeBasis(n)
    sz = collective_operator("Sz", basis)
    sx = collective_operator("Sx", basis)
    state0 = coherent_state_after_first_pulse(basis)

    # Pass when every element sits within 3 bootstrap standard errors; the
    # absolute floor absorbs elements whose Monte-Carlo variance vanishes,
    # where the reference integrator's own ~1e-11 error would dominate.
    cfg = TrajectoryConfig(n_trajectories, dt=0.01, seed=seed, noise_kind="phase")
    outers = stochastic_trajectory_projectors(n, 0.8, 0.0, "phase", 1.0, tau, cfg)
    avg = np.add.reduce(outers, axis=0) / outers.shape[0]
    stderr = bootstrap_stderr(outers, seed=seed + 1)
    target = dephasing_propagate(state0, 0.8, 1.0, tau).matrix
    excess = float(np.max(np.abs(avg - target) - 3 * stderr))
    out.append(_result("trajectories-vs-master phase N=4", excess, 1e-10, f"{n_trajectories} trajectories"))

    cfg = TrajectoryConfig(n_trajectories, dt=0.005, seed=seed, noise_kind="amplitude")
    outers = stochastic_trajectory_projectors(n, 0.0, 0.0, "amplitude", 0.5, tau, cfg)
    avg = np.add.reduce(outers, axis=0) / outers.shape[0]
    stderr = bootstrap_stderr(outers, seed=seed + 2)
    target = evolve(state0, np.zeros_like(sz), [(2 * 0.5, sx)], tau, 1e-11).matrix
    excess = float(np.max(np.abs(avg - target) - 3 * stderr))
    out.append(_result("trajectories-vs-master amplitude N=4", excess, 1e-10, f"{n_trajectories} trajectories"))
    return out


def check_scalar_sde(n_trajectories: int, seed: int) -> list[CheckResult]:
    out = []
    for a0, b0, t in ((0.0, 1.0, 1.0), (-1.0, 1.0, 2.0), (0.5, 0.7, 1.0)):
        res = scalar_sde_check(a0, b0, t, n_trajectories, seed)
        excess = abs(res.empirical_mean - res.predicted_mean) - 3 * res.standard_error
        out.append(
            _result(
                f"scalar-sde a0={a0} b0={b0} T={t}",
                excess,
                0.0,
                f"mean {res.empirical_mean:.5f} vs {res.predicted_mean:.5f}",
            )
        )
    return out


def check_moment_closure(bound: float = 1e-8) -> list[CheckResult]:
    """Closed moment dynamics against full density-matrix integration."""
    out = []
    n, eta, gamma_d = 4, 1.0, 1.0
    tau = np.pi / (2 * eta)
    basis = DickeBasis(n)
    sz = collective_operator("Sz", basis)
    sx = collective_operator("Sx", basis)
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    mat[0, 0] = 1.0
    ground = CollectiveState(basis, mat, check=False)
    worst = 0.0
    for omega in (0.0, 0.8, 2.0):
        state = evolve(ground, omega * sz + 2 * eta * sx, [(gamma_d / 2, sz)], tau, 1e-11)
        sig, sec = moments.rabi_moment_expectations(n, omega, eta, gamma_d, tau, "standard")
        worst = max(worst, abs(sig - state.expectation(sz)), abs(sec - state.expectation(sz @ sz)))
    out.append(_result("moments-vs-rk rabi standard N=4", worst, bound))

    state0 = coherent_state_after_first_pulse(basis)
    worst = 0.0
    for omega in (0.0, 0.9):
        state = evolve(state0, omega * sz, [(2 * 0.4, sx)], 1.2, 1e-11)
        sig, sec = moments.ramsey_moment_expectations(n, omega, 0.0, 0.4, 1.2)
        worst = max(worst, abs(sig - state.expectation(sx)), abs(sec - state.expectation(sx @ sx)))
    out.append(_result("moments-vs-rk ramsey amplitude N=4", worst, bound))
    return out


def run_validation(level: str = "fast", seed: int = 20240801, rk_tol: float = 1e-10) -> list[CheckResult]:
    """Full battery; ``level`` sets the Monte-Carlo effort."""
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    n_traj = 2000 if level == "fast" else 10000
    results = []
    results += check_exact_vs_integrator(rk_tol=rk_tol)
    results += check_full_space()
    results += check_moment_closure()
    results += check_trajectories(n_traj, seed)
    results += check_scalar_sde(20000 if level == "fast" else 100000, seed)
    return results


def report_lines(results: list[CheckResult], header: dict | None = None) -> list[str]:
    lines = []
    if header:
        for key in sorted(header):
            lines.append(f"# {key} = {header[key]}")
    lines += [r.line() for r in results]
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return lines
