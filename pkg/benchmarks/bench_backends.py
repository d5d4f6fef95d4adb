"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two kernel-heavy stages of a run, field construction
(distance sampling over the grid) and per-radius ball extraction
(cell classification, contour segments, quadrature), for each backend:

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --surface enneper --grid 256
    python3 benchmarks/bench_backends.py --json out.json

The active backend can also be fixed process-wide with the
EXTBALLS_BACKEND environment variable (auto | numba | numpy); this
script overrides it per measurement via extballs.use_backend.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from extballs import use_backend
from extballs.catalog import make
from extballs.domains import GridSpec, build_field, extract_ball
from extballs.domains.quadrature import ensure_cell_cache


def _time_stage(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_backend(name: str, surface_name: str, grid: int, radii: int,
                  t_max: float, repeat: int) -> dict:
    use_backend(name)
    try:
        # Warm-up pass compiles the jit kernels and touches every code
        # path once so compile time never lands in a measurement.
        warm = build_field(make(surface_name, t_max=t_max), t_max,
                           spec=GridSpec(n_u=64, n_v=64))
        ensure_cell_cache(warm)
        extract_ball(warm, 0.5 * t_max)

        surface = make(surface_name, t_max=t_max)
        spec = GridSpec(n_u=grid, n_v=grid)
        field_sec = _time_stage(
            lambda: build_field(surface, t_max, spec=spec), repeat)

        field = build_field(surface, t_max, spec=spec)
        ensure_cell_cache(field)
        schedule = np.geomspace(0.25 * t_max, 0.95 * t_max, radii)

        def extract_all():
            for t in schedule:
                extract_ball(field, float(t))

        extract_sec = _time_stage(extract_all, repeat)
    finally:
        use_backend(None)
    return {"backend": name, "field_s": field_sec,
            "extract_s": extract_sec,
            "total_s": field_sec + extract_sec}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--surface", default="catenoid")
    parser.add_argument("--grid", type=int, default=512)
    parser.add_argument("--radii", type=int, default=8)
    parser.add_argument("--t-max", type=float, default=8.0)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", default=None,
                        help="also write results to this JSON file")
    args = parser.parse_args(argv)

    results = []
    for backend in ("numpy", "numba"):
        try:
            row = bench_backend(backend, args.surface, args.grid,
                                args.radii, args.t_max, args.repeat)
        except Exception as exc:  # e.g. numba missing
            print(f"{backend:6s}  unavailable: {exc}")
            continue
        results.append(row)
        print(f"{backend:6s}  field {row['field_s']:8.3f}s   "
              f"extract {row['extract_s']:8.3f}s   "
              f"total {row['total_s']:8.3f}s")

    if len(results) == 2:
        speedup = results[0]["total_s"] / results[1]["total_s"]
        print(f"numba speedup over numpy: {speedup:.2f}x")

    if args.json:
        doc = {"surface": args.surface, "grid": args.grid,
               "radii": args.radii, "t_max": args.t_max,
               "repeat": args.repeat, "results": results}
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
        print(f"wrote {args.json}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
