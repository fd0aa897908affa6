"""Time the compiled and pure-Python slot kernels on the same runs.

    python benchmarks/bench_kernel.py [--seeds 5] [--duration 10]

Both kernels must produce identical RunMetrics; the script checks that
before reporting the speed-up.
"""

from __future__ import annotations

import argparse
import time
from dataclasses import replace

from coexlab.config import ArrivalModel, ScenarioConfig
from coexlab.sim import _kernel_py, engine

SCENARIOS = {
    "1bf+1ax periodic": dict(n_bf_aps=1, n_ax_aps=1),
    "9bf+1ax periodic": dict(n_bf_aps=9, n_ax_aps=1),
    "1bf+9ax periodic": dict(n_bf_aps=1, n_ax_aps=9),
    "5bf+5ax continuous": dict(n_bf_aps=5, n_ax_aps=5),
}


def _key(m):
    d = dict(vars(m))
    d.pop("backend")
    d["records"] = [tuple(vars(r).values()) for r in d["records"]]
    return repr(d)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--duration", type=float, default=10.0)
    args = ap.parse_args()
    try:
        from coexlab.sim import _kernel
    except ImportError:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`") from None

    print(f"{'scenario':<22}{'python s':>10}{'cython s':>10}{'speed-up':>10}  identical")
    for name, pop in SCENARIOS.items():
        mode = "continuous" if "continuous" in name else "periodic"
        cfg = replace(ScenarioConfig(), duration_s=args.duration, arrival=ArrivalModel(mode=mode)).with_population(**pop)
        times = {}
        outs = {}
        for label, cls in (("python", _kernel_py.SlotKernel), ("cython", _kernel.SlotKernel)):
            t0 = time.perf_counter()
            outs[label] = [engine.run(cfg, s, kernel_cls=cls) for s in range(args.seeds)]
            times[label] = time.perf_counter() - t0
        same = all(_key(a) == _key(b) for a, b in zip(outs["python"], outs["cython"]))
        print(f"{name:<22}{times['python']:>10.3f}{times['cython']:>10.3f}{times['python'] / times['cython']:>9.1f}x  {same}")


if __name__ == "__main__":
    main()
