"""Smoke test for the dabkit Python extension.

Build and install the module first, e.g.

    pip install maturin
    maturin develop --release -m crates/py/Cargo.toml

then run `python python/smoke_test.py`.
"""

import math
import sys

import dabkit


def check(name, ok):
    print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return ok


def main():
    results = []

    params = dabkit.default_params()
    results.append(check("default params", params["v1"] == 100.0 and params["fs"] == 25e3))

    op = dabkit.solve_operating_point(500.0)
    results.append(check("forward point saturates d1", abs(op["control"]["d1"] - math.pi) < 1e-3 and op["delta"] > 0))

    sweep = dabkit.sweep(-1000.0, 1000.0, 11)
    results.append(check("sweep has one delta sign change", len(sweep["summary"]["delta_sign_changes"]) == 1))

    eigs, stable = dabkit.eigenvalues(300.0, "cv")
    results.append(check("cv spectrum stable", stable and len(eigs) == 7 and all(e.real < 0 for e in eigs)))
    _, stable_cpl = dabkit.eigenvalues(1000.0, "cpl")
    results.append(check("cpl at 1 kW unstable", not stable_cpl))

    zd = dabkit.zero_dynamics()
    results.append(check("zero dynamics stable", zd["real"]["stable"] and zd["complex"]["stable"]))

    geo = dabkit.geometry(500.0)
    results.append(check("geometry ranks", geo["controllability_rank"] == 5 and geo["observability_rank"] == 3))

    wf = dabkit.simulate(500.0, cycles=20, steps_per_cycle=400, record_cycles=1)
    results.append(check("simulation returns one period", 400 <= len(wf["t"]) <= 402))

    custom = dict(params, fs=50e3)
    fwd, _ = dabkit.power_limits(custom)
    results.append(check("custom params honoured", fwd < dabkit.power_limits()[0]))

    try:
        dabkit.solve_operating_point(1e5)
        results.append(check("infeasible power raises", False))
    except dabkit.DabkitError:
        results.append(check("infeasible power raises", True))

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
