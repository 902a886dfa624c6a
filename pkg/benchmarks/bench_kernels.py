"""Compare the compiled kernels against the pure-numpy fallback.

Times the three hot kernels on net-construction-shaped workloads and one
end-to-end greedy build per backend, checking that both backends accept the
same points.  Run:

    python benchmarks/bench_kernels.py
"""
import time

import numpy as np

from tailcert import _kernels as kernels
from tailcert._kernels import _pyfallback as fallback


def _sphere(rng, m, d):
    x = rng.standard_normal((m, d))
    return np.ascontiguousarray(x / np.linalg.norm(x, axis=1, keepdims=True))


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_kernels():
    rng = np.random.default_rng(0)
    d = 8
    net = _sphere(rng, 20000, d)
    queries = _sphere(rng, 4096, d)
    eps2 = 0.25 ** 2
    rows = np.arange(len(net), dtype=np.int64)

    native = kernels._impl if kernels.backend_name() == "native" else None
    print(f"selected backend: {kernels.backend_name()}")
    print(f"workload: net {net.shape}, queries {queries.shape}, eps 0.25\n")
    print(f"{'kernel':28s} {'native':>10s} {'fallback':>10s} {'speedup':>8s}  agree")
    for name, args in [
        ("min_sqdist", (net, queries)),
        ("greedy_filter", (queries, net, eps2)),
        ("covered_mask_indexed", (queries, net, rows, eps2)),
    ]:
        fb_out, fb_t = timed(getattr(fallback, name), *args)
        if native is not None:
            nat_out, nat_t = timed(getattr(native, name), *args)
            if name == "min_sqdist":
                agree = np.allclose(nat_out, fb_out, rtol=1e-9, atol=1e-12)
            else:
                agree = np.array_equal(nat_out, fb_out)
            print(f"{name:28s} {nat_t*1e3:8.1f}ms {fb_t*1e3:8.1f}ms "
                  f"{fb_t/nat_t:7.1f}x  {agree}")
        else:
            print(f"{name:28s} {'-':>10s} {fb_t*1e3:8.1f}ms")
    print()


def bench_build():
    import os
    import subprocess
    import sys

    code = (
        "import time, numpy as np\n"
        "from tailcert import build_net, SphereSpec, StopRule\n"
        "t0 = time.time()\n"
        "net = build_net(SphereSpec(6), 0.45, seed=5,\n"
        "                stop=StopRule(coverage_probes=16384))\n"
        "print(f'{net.cardinality} {time.time()-t0:.2f}')\n"
    )
    out = {}
    for label, env_val in [("native", "0"), ("fallback", "1")]:
        env = dict(os.environ, TAILCERT_FORCE_FALLBACK=env_val)
        res = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        card, secs = res.stdout.split()
        out[label] = (int(card), float(secs))
        print(f"greedy build S^5 eps=0.45 [{label:8s}]: |net|={card} "
              f"in {float(secs):.2f}s")
    if out["native"][0] == out["fallback"][0]:
        print("backends accepted identical point counts")
    print()


if __name__ == "__main__":
    bench_kernels()
    bench_build()
