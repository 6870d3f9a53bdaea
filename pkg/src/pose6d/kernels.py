"""Kernel backend selection: compiled extension when built, numpy fallback.

`BACKEND` reports which one is active ("compiled" or "python"). Both expose
the same two functions with identical arithmetic:

  solve_assignment(cost)       -> row->column permutation minimizing the sum
  mean_closest_distance(a, b)  -> mean over a of the closest distance into b
"""

from . import _pykernels

try:
    from . import _ckernels as _impl
    BACKEND = "compiled"
except ImportError:  # extension not built; pure-python semantics are identical
    _impl = _pykernels
    BACKEND = "python"

solve_assignment = _impl.solve_assignment
mean_closest_distance = _impl.mean_closest_distance

# Always-available references for benchmarking both backends side by side.
python_impl = _pykernels
compiled_impl = _impl if BACKEND == "compiled" else None
