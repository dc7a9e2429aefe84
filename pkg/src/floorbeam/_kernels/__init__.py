"""Kernel backend selection.

The compiled Cython backend is used when available; the numpy reference
backend is the fallback. Override with FLOORBEAM_KERNELS=py|cy|auto
(default auto). BACKEND reports which one is active.
"""

import os

_choice = os.environ.get("FLOORBEAM_KERNELS", "auto").lower()
if _choice not in ("auto", "py", "cy"):
    raise ImportError(f"FLOORBEAM_KERNELS must be auto, py, or cy, got {_choice!r}")

if _choice == "py":
    from . import _ref as _impl

    BACKEND = "py"
else:
    try:
        from . import _accel as _impl  # type: ignore[no-redef]

        BACKEND = "cy"
    except ImportError:
        if _choice == "cy":
            raise ImportError(
                "FLOORBEAM_KERNELS=cy but the compiled extension is not built; "
                "reinstall the package or use FLOORBEAM_KERNELS=py"
            )
        from . import _ref as _impl

        BACKEND = "py"

overlap_any = _impl.overlap_any
legal_mask = _impl.legal_mask
corner_candidates = _impl.corner_candidates
score_deltas = _impl.score_deltas
rudy_fill = _impl.rudy_fill
hpwl_total = _impl.hpwl_total
seqpair_positions = _impl.seqpair_positions
sa_eval = _impl.sa_eval

__all__ = [
    "BACKEND",
    "overlap_any",
    "legal_mask",
    "corner_candidates",
    "score_deltas",
    "rudy_fill",
    "hpwl_total",
    "seqpair_positions",
    "sa_eval",
]
