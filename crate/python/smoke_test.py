#!/usr/bin/env python3
"""Smoke test for the armplan_py extension module.

Builds the cdylib if it is missing, imports it, and exercises scenario
generation, exact solving, trace validation, file round-trips, and a
benchmark run. Exits non-zero on the first broken expectation.
"""

import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def extension_path() -> Path:
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libarmplan_py.so"
        if lib.exists():
            return lib
    subprocess.run(["cargo", "build", "-p", "armplan-py"], cwd=ROOT, check=True)
    return ROOT / "target" / "debug" / "libarmplan_py.so"


def main() -> None:
    staging = Path(tempfile.mkdtemp(prefix="armplan-py-"))
    shutil.copy(extension_path(), staging / "armplan_py.so")
    sys.path.insert(0, str(staging))
    import armplan_py as ap

    assert "switch" in ap.families()
    assert ap.strategies() == ["smart", "sequential", "greedy"]

    sc = ap.Scenario.generate("switch", 2, 2, seed=0)
    assert sc.id == "switch-r2-k2-s0"
    assert (sc.family, sc.arms, sc.objects, sc.seed) == ("switch", 2, 2, 0)

    plan = sc.solve()
    assert plan is not None
    assert plan.n_steps == 6
    assert max(plan.per_object_actions) == 3
    assert len(plan.paths) == 2
    assert all(len(p) == plan.n_steps + 1 for p in plan.paths)

    assert sc.validate_trace(plan.trace()) == (6, 3)
    try:
        sc.validate_trace(plan.trace().replace("a0", "zz", 1))
    except ValueError:
        pass
    else:
        raise AssertionError("corrupt trace should be rejected")

    path = staging / "switch.json"
    sc.save(path)
    again = ap.Scenario.load(path)
    assert again.id == sc.id
    assert again.solve().trace() == plan.trace()

    report = sc.run("smart", trials=2, seed=0, pure_guidance=True)
    assert report.successes == 2 and report.violations == 0
    assert report.mapf_steps == 6
    assert report.csv.splitlines()[0] == (
        "scenario,strategy,trial,success,initial_ms,makespan,actions,mapf_steps"
    )
    rerun = sc.run("smart", trials=2, seed=0, pure_guidance=True)
    assert rerun.csv == report.csv, "identical runs should report identical csv"

    stuck = sc.run("greedy", trials=1, pure_guidance=True)
    assert stuck.successes == 0 and stuck.violations == 0

    print("smoke test passed")


if __name__ == "__main__":
    main()
