#!/usr/bin/env python3
"""Smoke test for the mixou_py extension module.

Build the extension first:

    cargo build -p mixou-py --release

Then run this script; it locates the cdylib under target/, imports it and
exercises the main entry points.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def locate_cdylib() -> Path:
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libmixou_py.so", "libmixou_py.dylib", "mixou_py.dll")
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("cdylib not found; run `cargo build -p mixou-py` first")


def main() -> None:
    lib = locate_cdylib()
    with tempfile.TemporaryDirectory() as tmp:
        shutil.copy(lib, Path(tmp) / "mixou_py.so")
        sys.path.insert(0, tmp)
        import mixou_py as mx

        checks = 0

        def check(label, ok):
            nonlocal checks
            checks += 1
            print(f"[{'PASS' if ok else 'FAIL'}] {label}")
            if not ok:
                sys.exit(1)

        # covariances against closed forms
        check("fbm_cov(1,1,0.75) == 1", abs(mx.fbm_cov(1.0, 1.0, 0.75) - 1.0) < 1e-12)
        check(
            "mfbm_cov(1,2,0.75) == 1+sqrt(2)",
            abs(mx.mfbm_cov(1.0, 2.0, 0.75) - (1.0 + math.sqrt(2.0))) < 1e-12,
        )

        # simulation shape, start value, determinism
        t1, v1 = mx.simulate_mou(0.55, 0.5, 10.0, 1000, 42)
        t2, v2 = mx.simulate_mou(0.55, 0.5, 10.0, 1000, 42)
        check("simulate_mou length", len(t1) == 1001 and len(v1) == 1001)
        check("simulate_mou starts at 0", v1[0] == 0.0)
        check("simulate_mou deterministic", v1 == v2)
        _, v3 = mx.simulate_mou(0.55, 0.5, 10.0, 1000, 43)
        check("seed changes the path", v1 != v3)

        # p / p_inverse round trip
        val = mx.p(0.5, 0.55)
        check("p round trip", abs(mx.p_inverse(val, 0.55) - 0.5) < 1e-8)
        check(
            "p(1, 0.75) closed form",
            abs(mx.p(1.0, 0.75) - (3.0 * math.sqrt(math.pi) / 8.0 + 0.5)) < 1e-12,
        )

        # estimation on a longer path
        _, values = mx.simulate_mou(0.55, 0.5, 100.0, 10000, 7)
        est = mx.ergodic_estimate(values[1:], 0.01, 0.55)
        check("ergodic estimate near truth", abs(est.value - 0.5) < 0.4)
        check("estimate repr", "ERGODIC" in repr(est))

        # CIR simulation and nonnegativity
        _, xv, tau = mx.simulate_cir(1.0, 1.0, 0.65, 5.0, 1000, 5)
        check("cir values nonnegative", min(xv) >= 0.0)
        check("cir tau is None or time", tau is None or 0.0 < tau <= 5.0)

        # kernel diagnostics
        kc = mx.kernel_check(0.6, 1.0, 16)
        check("kernel residual tiny", kc["residual"] <= 1e-8)
        check("kernel property-G deviation finite", 0.0 < kc["property_g_deviation"] < 1.0)

        # pathwise identity block
        idc = mx.identity_check(0.75, 0.5, 2.0, 2048, 9)
        check("cross identity exact", idc["cross_identity_residual"] < 1e-9)
        check("ito identity small", idc["ito_identity_residual"] < 0.2)

        # drift correction closed-form check at theta = 0
        check("drift_correction(0, H, 1) == 1/2", abs(mx.drift_correction(0.0, 0.65, 1.0) - 0.5) < 1e-12)

        # phi statistics on a small run
        stats = mx.phi_stats(0.618, 0.5, 10.0, 0.1, 16, 3)
        check("phi stats populated", stats["sdev"] > 0.0)

        print(f"all {checks} smoke checks passed")


if __name__ == "__main__":
    main()
