"""Runtime invariant checks behind ``biphoton check`` and ``--check``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from . import bell, mc, mzi, optics, rto
from .qcore import A_BASIS, B_BASIS, density_from_pure, partial_trace, unitarity_error


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}: {self.detail}"


def _elements_unitary():
    ops = [
        optics.beam_splitter(A_BASIS),
        optics.beam_splitter(B_BASIS),
        optics.phase_shifter(1.234, "A2"),
        optics.mirror(B_BASIS),
        rto.pipeline(rto.RtoPhases(0.3, 2.1)),
        mzi.interferometer(0.4, 5.0),
    ]
    worst = max(unitarity_error(op.matrix) for op in ops)
    return worst < 1e-12, f"max |U^dag U - I| = {worst:.3g}"


def _mz_closed_form():
    d = mzi.phase_grid(100)
    err = np.max(np.abs(mzi.sweep(d)[:, 0] - mzi.closed_form_p_d1(d)))
    return err < 1e-12, f"max deviation {err:.3g} on 100 points"


def _mz_blocking():
    d = mzi.phase_grid()
    spread = 0.0
    for path in ("path1", "path2"):
        rows = mzi.sweep(d, blocked=path)
        cond = rows[:, 0] / (rows[:, 0] + rows[:, 1])
        spread = max(spread, np.ptp(cond), np.max(np.abs(cond - 0.5)))
    vis = mzi.visibility(mzi.sweep(d)[:, 0])
    ok = spread < 1e-12 and abs(vis - 1.0) < 1e-9
    return ok, f"blocked conditional spread {spread:.3g}, open visibility {vis:.12f}"


def _no_signaling():
    grid = mzi.phase_grid()
    rng = np.random.default_rng(2024)
    layouts = [rto.RtoPhases()] + [rto.random_layout(rng) for _ in range(10)]
    worst = 0.0
    for lay in layouts:
        p = rto.coincidence_grid(grid, grid, lay.fixed, lay.mirror_phase)
        pa1 = p[..., 0] + p[..., 1]
        pb1 = p[..., 0] + p[..., 2]
        worst = max(worst, np.max(np.abs(pa1 - 0.5)), np.max(np.abs(pb1 - 0.5)))
    return worst < 1e-12, f"max |marginal - 0.5| = {worst:.3g}"


def _fixed_phase_relation():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        u, v = rto.derive_fixed(rto.random_layout(rng))
        worst = max(worst, optics.phase_distance(v - u, np.pi))
    return worst < 1e-9, f"max |phi_v - phi_u - pi| (mod 2pi) = {worst:.3g}"


def _improper_mixture():
    rho = density_from_pure(rto.prepare_entangled())
    worst = 0.0
    for keep in ("A", "B"):
        red = partial_trace(rho, keep)
        worst = max(worst, np.max(np.abs(red.matrix - 0.5 * np.eye(2))), abs(red.purity - 0.5))
    return worst < 1e-12, f"max deviation from diag(1/2, 1/2) / purity 1/2: {worst:.3g}"


def _chsh():
    s = bell.chsh_S(bell.OPTIMAL)
    local = bell.max_local_S()
    ok = abs(s - bell.TSIRELSON_BOUND) < 1e-6 and local == 2
    return ok, f"S = {s:.9f}, max local S = {local}"


def _mc_determinism():
    spec = mc.RunSpec(10_001, 12345, "rto", rto.RtoPhases(0.0, 1.0))
    a = mc.sample_run(spec)
    b = mc.sample_run(spec, chunk_size=997)
    return a == b, f"tally {a.counts}"


CHECKS: List[tuple] = [
    ("optical elements unitary", _elements_unitary),
    ("Mach-Zehnder closed form vs operator chain", _mz_closed_form),
    ("path blocking removes fringes", _mz_blocking),
    ("entangled marginals phase independent", _no_signaling),
    ("fixed offsets differ by pi", _fixed_phase_relation),
    ("reduced states are 50-50 mixtures", _improper_mixture),
    ("CHSH analytic value and local bound", _chsh),
    ("seeded sampling is chunk independent", _mc_determinism),
]


def run_checks(checks=None) -> List[CheckResult]:
    results = []
    for name, fn in (checks or CHECKS):
        try:
            ok, detail = fn()
        except Exception as exc:  # report, do not abort the suite
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail))
    return results
