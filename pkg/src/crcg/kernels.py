"""Backend selection for the hot kernels.

The compiled extension is preferred; the numpy fallback is used when it was
not built, or when ``CRCG_KERNELS=python`` is set. :func:`use_backend`
switches at runtime (tests and benchmarks exercise both).
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_NAMES = ("row_norm_reciprocals", "cross_cosine", "mark_above", "mark_batch", "normalized_adjacency", "similarity_edges")
BACKEND = ""


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


def use_backend(name: str) -> None:
    global BACKEND
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        mod = _ckernels
    elif name == "python":
        mod = _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}")
    for fn in _NAMES:
        globals()[fn] = getattr(mod, fn)
    BACKEND = name


def row_norm_reciprocals(S): ...
def cross_cosine(P, Q): ...
def mark_above(P, Q, tau): ...
def mark_batch(R, row_true, row_pred, tau): ...
def normalized_adjacency(n, edges): ...
def similarity_edges(X, threshold): ...


use_backend("cython" if _ckernels is not None and os.environ.get("CRCG_KERNELS") != "python" else "python")
