"""
Reproducible artifacts from the command line
============================================

Every capability is also reachable without writing Python: the
`mobiusdisc` entry point (equivalently `python -m mobiusdisc`) emits
CSV and JSON whose bytes depend only on the model file and flags.
This script drives it as a subprocess, the way a Makefile or shell
pipeline would, and verifies the determinism contract with SHA-256.
"""

import hashlib
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

MODEL = Path(__file__).resolve().parent.parent / "models" / "anderson.json"


def cli(*args, threads=None):
    env = dict(os.environ)
    if threads is not None:
        env["THREADS"] = str(threads)
    proc = subprocess.run(
        [sys.executable, "-m", "mobiusdisc", *map(str, args)],
        capture_output=True, text=True, env=env,
    )
    if proc.returncode != 0:
        raise RuntimeError(proc.stderr)
    return proc.stdout


# constants: closed-form model summary, fast enough for shell loops
doc = json.loads(cli("constants", MODEL))
print(f"C = {doc['C']:.12g}, D = {doc['D']:.12g}, "
      f"classification = {doc['d_classification']}")

# lyap: point estimate vs prediction
doc = json.loads(cli("lyap", MODEL, "--steps", "100000", "--replicas", "4"))
print(f"gamma_hat = {doc['gamma_hat']:.4e} +- {doc['stderr']:.0e}, "
      f"prediction = {doc['prediction']:.4e}, lambda = {doc['lambda']:.4f}")

# hist: CSV rows plus a trailing '# {...}' sidecar with lambda and KS
out = cli("hist", MODEL, "--steps", "200000", "--bins", "20")
*rows, sidecar = out.strip().splitlines()
print(f"hist: {len(rows) - 1} bins, sidecar = {sidecar}")

# scan: one CSV row per (epsilon, delta) grid point; the burn-in must
# cover the O(1/gamma) equilibration or gamma_hat picks up the transient
out = cli("scan", MODEL, "--epsilon-grid", "0.02,0.05",
          "--delta-grid", "0,0.00012", "--steps", "300000",
          "--burnin", "50000", "--replicas", "4")
print("scan:")
for line in out.strip().splitlines():
    print("   ", line)

# determinism: same flags, different THREADS -> identical bytes
with tempfile.TemporaryDirectory() as tmp:
    digests = []
    for threads in (1, 4):
        path = Path(tmp) / f"t{threads}.csv"
        cli("hist", MODEL, "--steps", "100000", "--replicas", "4",
            "--out", path, threads=threads)
        digests.append(hashlib.sha256(path.read_bytes()).hexdigest())
print("\nSHA-256 with THREADS=1:", digests[0][:16], "...")
print("SHA-256 with THREADS=4:", digests[1][:16], "...")
print("byte-identical:", digests[0] == digests[1])

# the invariant suites guard refactors; exit code 1 on any violation
report = json.loads(cli("check", "--suite", "density", "--suite", "expansions"))
print("\ncheck:", "ok" if report["passed"] else "FAILED",
      "-", {k: v["passed"] for k, v in report["suites"].items()})
