import numpy as np


def smooth_curve(raw, w: float = 0.96) -> np.ndarray:
    """Exponentially weighted average ``s[n] = w x[n] + (1 - w) s[n-1]``, ``s[0] = x[0]``."""
    if not 0 < w <= 1:
        raise ValueError("smoothing factor must lie in (0, 1]")
    x = np.asarray(raw, dtype=float)
    out = np.empty_like(x)
    for n, value in enumerate(x):
        out[n] = value if n == 0 else w * value + (1.0 - w) * out[n - 1]
    return out
