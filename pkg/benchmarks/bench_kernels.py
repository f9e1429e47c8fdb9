"""Compare the numba and pure-numpy kernel backends.

Runs the tree-growing and SVM SGD kernels on synthetic data in two child
processes (one per IDSFX_BACKEND value) so each process gets a clean import,
then prints wall times and the speedup.

Usage: python benchmarks/bench_kernels.py [--rows 20000] [--features 30]
"""

import argparse
import json
import subprocess
import sys
import tempfile
from pathlib import Path

_WORKER = """
import json, sys, time
import numpy as np
from idsfx import kernels

params = json.loads(sys.argv[1])
rng = np.random.default_rng(0)
n, m = params["rows"], params["features"]
X = rng.random((n, m))
y = rng.integers(0, 5, n).astype(np.int64)

# warm up so JIT compilation is not billed to the timing
kernels.grow_tree(X[:50], y[:50], 5, m, 2, 0)
t0 = time.perf_counter()
arrays = kernels.grow_tree(X, y, 5, max(1, int(m ** 0.5)), 2, 7)
tree_s = time.perf_counter() - t0

perms = np.vstack([rng.permutation(n) for _ in range(params["epochs"])]).astype(np.int64)
kernels.svm_sgd(X[:50], y[:50], 5, 1, 1e-4,
                rng.permutation(50).reshape(1, 50).astype(np.int64))
t0 = time.perf_counter()
kernels.svm_sgd(X, y, 5, params["epochs"], 1e-4, perms)
svm_s = time.perf_counter() - t0

print(json.dumps({"backend": kernels.backend_name(),
                  "tree_s": tree_s, "svm_s": svm_s,
                  "nodes": int(arrays[5])}))
"""


def run_backend(backend: str, params: dict) -> dict:
    script = Path(tempfile.mkdtemp()) / "bench_worker.py"
    script.write_text(_WORKER)
    out = subprocess.run(
        [sys.executable, str(script), json.dumps(params)],
        env={"IDSFX_BACKEND": backend, "PATH": "/usr/bin:/bin"},
        capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--features", type=int, default=30)
    ap.add_argument("--epochs", type=int, default=5)
    args = ap.parse_args()
    params = {"rows": args.rows, "features": args.features, "epochs": args.epochs}

    results = {}
    for backend in ("numpy", "numba"):
        try:
            results[backend] = run_backend(backend, params)
        except subprocess.CalledProcessError as exc:
            print(f"{backend}: failed ({exc.stderr.strip().splitlines()[-1]})")
    if len(results) < 2:
        return 1

    print(f"\n{args.rows} rows x {args.features} features, {args.epochs} SVM epochs")
    print(f"{'kernel':<12} {'numpy (s)':>10} {'numba (s)':>10} {'speedup':>8}")
    for key, label in (("tree_s", "grow_tree"), ("svm_s", "svm_sgd")):
        a, b = results["numpy"][key], results["numba"][key]
        print(f"{label:<12} {a:>10.3f} {b:>10.3f} {a / b:>7.1f}x")
    assert results["numpy"]["nodes"] == results["numba"]["nodes"], \
        "backends grew different trees"
    return 0


if __name__ == "__main__":
    sys.exit(main())
