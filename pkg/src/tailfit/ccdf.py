"""
Empirical complementary CDF, P(X > x).
"""

from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd


def ccdf(samples: Sequence[int]) -> List[Tuple[int, float]]:
    """
    (x, P(X > x)) at each distinct sample value, ascending in x.

    Raises:
        ValueError: empty input
    """
    x = np.asarray(samples)
    if x.size == 0:
        raise ValueError("ccdf needs at least one sample")
    values, counts = np.unique(x, return_counts=True)
    above = (x.size - np.cumsum(counts)) / x.size
    return [(v.item(), float(p)) for v, p in zip(values, above)]


def ccdf_frame(samples: Sequence[int], group: str = "", metric: str = "") -> pd.DataFrame:
    """Tidy CCDF points for plotting."""
    points = ccdf(samples)
    return pd.DataFrame({
        "group": group,
        "metric": metric,
        "x": [p[0] for p in points],
        "ccdf": [p[1] for p in points],
    })
