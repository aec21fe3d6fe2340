"""Time the phase-1 simplex kernel: numba-compiled loops vs numpy rows.

Tableaus come from joint-observable LPs on classical and gbit models, so
the pivots are the ones the library really takes. Both kernels run on
copies of the same tableau and must agree on status, iteration count and
final basis.

    python3 benchmarks/bench_simplex.py [--repeat N] [--sizes 2,3,4,6]
"""
import argparse
import time

import numpy as np

from effectalg import Observable, _kernels, gbit, orthant
from effectalg.feasibility import phase1_tableau, standard_form
from effectalg.observables import joint_lp
from effectalg.states import random_effect


def _observable(model, rng, k):
    vecs = [random_effect(model, rng).vector / (k - 1) for _ in range(k - 1)]
    vecs.append(model.unit - sum(vecs))
    return Observable(model, vecs)


def _case(model, k, rng):
    prob = joint_lp(_observable(model, rng, k), _observable(model, rng, k))
    return phase1_tableau(standard_form(prob), prob.b)[:2]


def _time(kernel, T, basis, repeat):
    best = np.inf
    for _ in range(repeat):
        T1, b1 = T.copy(), basis.copy()
        t0 = time.perf_counter()
        status, iters = kernel(T1, b1, 1e-10, 100000)
        best = min(best, time.perf_counter() - t0)
    return best, status, iters, b1


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--sizes", default="2,3,4,6,8")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy kernel is available")
        return 1
    rng = np.random.default_rng(args.seed)
    cases = [(f"orthant{n} {k}x{k}", orthant(n), k)
             for n in (3, 6) for k in map(int, args.sizes.split(","))]
    cases += [(f"gbit {k}x{k}", gbit(), k) for k in (2, 4, 6)]

    T, basis = _case(orthant(2), 2, rng)
    t0 = time.perf_counter()
    _kernels.phase1_numba(T.copy(), basis.copy(), 1e-10, 100000)
    print(f"numba first call (compile or cache load): "
          f"{time.perf_counter() - t0:.3f} s")
    print(f"{'case':<18}{'tableau':>12}{'pivots':>8}{'numpy ms':>11}"
          f"{'numba ms':>11}{'speedup':>9}")
    for name, model, k in cases:
        T, basis = _case(model, k, rng)
        tn, s1, i1, b1 = _time(_kernels.phase1_numpy, T, basis, args.repeat)
        tj, s2, i2, b2 = _time(_kernels.phase1_numba, T, basis, args.repeat)
        if (s1, i1) != (s2, i2) or not np.array_equal(b1, b2):
            raise SystemExit(f"{name}: kernels disagree")
        shape = f"{T.shape[0]}x{T.shape[1]}"
        print(f"{name:<18}{shape:>12}{i1:>8}{tn * 1e3:>11.3f}"
              f"{tj * 1e3:>11.3f}{tn / tj:>9.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
