"""Pointwise hot kernels of the right-hand sides, with backend dispatch.

Each kernel exists twice: a compiled extension (magnetoelastic._kernels,
built from Cython) and the pure-numpy implementations below.  The backend is
selected once at import: the extension when it is importable, numpy
otherwise, with MAGNETOELASTIC_BACKEND=python forcing the fallback.  All
kernels operate on real grid arrays whose last two axes are the evaluation
grid; component layouts follow the conventions in domain.py (tensors
row-major F11, F12, F21, F22; gradients grad[c, a] = d_a f_c).
"""

from __future__ import annotations

import os

import numpy as np

# -- pure numpy implementations ----------------------------------------------


def _np_cross3(a, b):
    return np.cross(a, b, axis=0)


def _np_advect(v, grad):
    """(v . grad) X from grad[c, a] = d_a X_c:  sum_a v_a * grad[c, a]."""
    return np.einsum("axy,caxy->cxy", v, grad)


def _np_odot(gradM):
    """(grad M (.) grad M)_{ij} = sum_k d_i M_k d_j M_k, returned row-major (4, ...)."""
    s = np.einsum("kixy,kjxy->ijxy", gradM, gradM)
    return s.reshape((4,) + s.shape[2:])


def _np_ff_t(F, c):
    """c * F F^T pointwise for row-major F: out_{ij} = c sum_k F_{ik} F_{jk}."""
    Fm = F.reshape((2, 2) + F.shape[1:])
    out = c * np.einsum("ikxy,jkxy->ijxy", Fm, Fm)
    return out.reshape((4,) + F.shape[1:])


def _np_gradv_f(gradv, F):
    """(grad v F)_{ij} = sum_k (d_k v_i) F_{kj} with gradv[i, k] = d_k v_i."""
    Fm = F.reshape((2, 2) + F.shape[1:])
    out = np.einsum("ikxy,kjxy->ijxy", gradv, Fm)
    return out.reshape((4,) + F.shape[1:])


def _np_transport_f(v, gradF, gradv, F):
    """-(v . grad) F + grad v F."""
    return -_np_advect(v, gradF) + _np_gradv_f(gradv, F)


def _np_llg_cross_rhs(v, gradM, M, H, gamma, lam):
    """-(v . grad) M - gamma M x H - lam M x (M x H)."""
    MxH = np.cross(M, H, axis=0)
    return -_np_advect(v, gradM) - gamma * MxH - lam * np.cross(M, MxH, axis=0)


def _np_llg_expanded_nonstiff(v, gradM, M, lapM, H):
    """Expanded-form right-hand side without its stiff Laplacian summand:

    -(v . grad) M - M x (lapM + H) + |grad M|^2 M - M (M . H) + H
    """
    g2 = np.einsum("kaxy,kaxy->xy", gradM, gradM)
    MdotH = np.einsum("kxy,kxy->xy", M, H)
    return (-_np_advect(v, gradM)
            - np.cross(M, lapM + H, axis=0)
            + g2 * M - MdotH * M + H)


_NUMPY_IMPLS = {
    "cross3": _np_cross3,
    "advect": _np_advect,
    "odot": _np_odot,
    "ff_t": _np_ff_t,
    "gradv_f": _np_gradv_f,
    "transport_f": _np_transport_f,
    "llg_cross_rhs": _np_llg_cross_rhs,
    "llg_expanded_nonstiff": _np_llg_expanded_nonstiff,
}

# -- backend selection ---------------------------------------------------------

_cy = None
if os.environ.get("MAGNETOELASTIC_BACKEND", "").lower() not in ("python", "numpy"):
    try:
        from . import _kernels as _cy  # type: ignore[attr-defined]
    except ImportError:
        _cy = None

BACKEND = "cython" if _cy is not None else "numpy"


def _select(name):
    if _cy is not None and hasattr(_cy, name):
        return getattr(_cy, name)
    return _NUMPY_IMPLS[name]


cross3 = _select("cross3")
advect = _select("advect")
odot = _select("odot")
ff_t = _select("ff_t")
gradv_f = _select("gradv_f")
transport_f = _select("transport_f")
llg_cross_rhs = _select("llg_cross_rhs")
llg_expanded_nonstiff = _select("llg_expanded_nonstiff")


def numpy_impl(name: str):
    """The reference numpy implementation (used for parity tests/benchmarks)."""
    return _NUMPY_IMPLS[name]


def compiled_impl(name: str):
    """The compiled implementation or None when the extension is unavailable."""
    return getattr(_cy, name, None) if _cy is not None else None
