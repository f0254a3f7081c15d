#!/usr/bin/env python3
"""Smoke test for the pinchsim_py extension module.

Builds nothing itself: it locates the cdylib produced by
`cargo build --release -p pinchsim-py`, stages it under the import name,
and exercises the main types and operations.

Run from the repository root:

    cargo build --release -p pinchsim-py
    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def stage_module() -> None:
    candidates = [
        REPO / "target" / "release" / "libpinchsim_py.so",
        REPO / "target" / "debug" / "libpinchsim_py.so",
        REPO / "target" / "release" / "libpinchsim_py.dylib",
        REPO / "target" / "debug" / "libpinchsim_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("extension not built; run: cargo build --release -p pinchsim-py")
    stage = Path(tempfile.mkdtemp(prefix="pinchsim_py_"))
    shutil.copy2(built, stage / "pinchsim_py.so")
    sys.path.insert(0, str(stage))


def approx(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main() -> None:
    stage_module()
    import pinchsim_py as ps

    checks = 0

    # wavelengths at 28 GHz
    params = ps.SystemParams(d=20.0, n=3, p_max_dbm=10.0)
    lam, lam_g, eta = params.wavelengths()
    assert approx(lam, 299792458.0 / 28e9)
    assert approx(lam_g, lam / 1.4)
    assert approx(eta, lam * lam / (16 * math.pi**2))
    checks += 1

    # channel magnitude law
    u = ps.Position3(10.0, 2.0)
    a = ps.Position3(10.0, 0.0, 3.0)
    h = ps.free_space_channel(u, a, lam)
    assert approx(abs(h) * u.distance(a), math.sqrt(eta), 1e-12)
    checks += 1

    # coupling: kappa at zero spacing and the equal-power profile
    cp = ps.CouplingParams()
    assert approx(ps.coupling_coefficient(0.0, cp), 330.0)
    spacings = ps.equal_power_spacings(3, cp)
    betas, residual = ps.radiation_profile(ps.CouplingParams(spacings))
    for b in betas:
        assert abs(b - 1 / math.sqrt(3)) < 1e-8
    assert abs(residual) < 1e-8
    checks += 1

    # logistic reference value and rate ceiling
    sem = ps.SemanticParams()
    assert abs(ps.semantic_similarity(0.0, sem) - 0.5605) < 1e-4
    assert approx(sem.rate_ceiling, 0.196)
    checks += 1

    # closed-form power split: high SNR caps at 1/2, zero channel infeasible
    p = ps.optimal_power_split(1.0 + 0.0j, 1.0 + 0.0j, 1.0, 1e-12, 0.5)
    assert approx(p, 0.5)
    assert ps.optimal_power_split(0.0j, 0.0j, 1.0, 1e-12, 0.5) is None
    checks += 1

    # paired sampling is deterministic
    s1, b1 = ps.sample_users(7, 3, 20.0)
    s2, b2 = ps.sample_users(7, 3, 20.0)
    assert (s1.x, s1.y, b1.x, b1.y) == (s2.x, s2.y, b2.x, b2.y)
    checks += 1

    # one scenario, all three schemes: pinching arrays beat the fixed array
    us, ub = ps.sample_users(11, 0, 20.0)
    opts = ps.SolverOptions(r_b_min=0.5)
    sols = {
        name: ps.solve(name, us, ub, params, opts)
        for name in ("proportional_pass", "equal_pass", "cas")
    }
    for name, sol in sols.items():
        assert sol.feasible or name == "cas", f"{name} infeasible"
        assert 0.0 <= sol.semantic_rate <= sem.rate_ceiling + 1e-12
        assert len(sol.antenna_xs) == 3 and len(sol.betas) == 3
    assert sols["proportional_pass"].semantic_rate >= sols["cas"].semantic_rate - 1e-12
    checks += 1

    # effective gain consistency with the returned solution
    sol = sols["proportional_pass"]
    g = ps.effective_gain(us, sol.antenna_xs, sol.betas, params)
    r = ps.semantic_rate(sol.power_split, params.max_power, g, params.noise_power, sem)
    assert approx(r, sol.semantic_rate, 1e-9)
    checks += 1

    # a tiny sweep returns well-formed CSV
    csv = ps.sweep_power_csv([0.0, 10.0], trials=20, seed=3, d=20.0, n=3, schemes=["cas"])
    lines = csv.strip().split("\n")
    assert lines[0].startswith("scheme,sweep_var,sweep_value")
    assert len(lines) == 3
    checks += 1

    print(f"smoke test: all {checks} check groups passed")


if __name__ == "__main__":
    main()
