"""
Concurrent power-law fits over a (group, metric) grid and their table layouts.
"""

import asyncio
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from .powerlaw import PowerLawFit, fit_power_law

FIT_COLUMNS = ["group", "metric", "x_min", "alpha", "n_tail", "ks"]


@dataclass(frozen=True)
class GridFit:
    """One cell of the fit grid; ``fit`` is None when the sample was unusable."""
    group: str
    metric: str
    fit: Optional[PowerLawFit]
    note: str = ""


def _fit_cell(group: str, metric: str, samples: Sequence[int]) -> GridFit:
    positive = [int(v) for v in samples if v > 0]
    dropped = len(samples) - len(positive)
    if dropped:
        logger.debug("{}/{}: dropped {} zero counts before fitting", group, metric, dropped)
    try:
        return GridFit(group, metric, fit_power_law(positive))
    except ValueError as e:
        logger.warning("Skipping power-law fit for {}/{}: {}", group, metric, e)
        return GridFit(group, metric, None, note=str(e))


async def fit_grid(samples: Mapping[Tuple[str, str], Sequence[int]]) -> List[GridFit]:
    """
    Fit every (group, metric) sample concurrently.

    Zero counts are dropped; samples that cannot be fitted yield a GridFit
    with ``fit=None`` and a note instead of failing the whole grid.
    Results keep the mapping's order.
    """
    tasks = [
        asyncio.to_thread(_fit_cell, group, metric, list(values))
        for (group, metric), values in samples.items()
    ]
    return list(await asyncio.gather(*tasks))


def fits_to_frame(fits: Sequence[GridFit]) -> pd.DataFrame:
    """Long layout: group,metric,x_min,alpha,n_tail,ks[,note]."""
    rows = []
    for cell in fits:
        if cell.fit is None:
            rows.append({"group": cell.group, "metric": cell.metric, "x_min": np.nan,
                         "alpha": np.nan, "n_tail": 0, "ks": np.nan, "note": cell.note})
        else:
            rows.append({"group": cell.group, "metric": cell.metric, "x_min": cell.fit.x_min,
                         "alpha": round(cell.fit.alpha, 6), "n_tail": cell.fit.n_tail,
                         "ks": round(cell.fit.ks_statistic, 6), "note": ""})
    return pd.DataFrame(rows, columns=FIT_COLUMNS + ["note"])


def fits_to_wide(frame: pd.DataFrame, metrics: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """
    Table layout: one row per group, (metric, x_min) and (metric, alpha)
    column pairs in metric order.
    """
    metrics = list(metrics) if metrics is not None else list(dict.fromkeys(frame["metric"]))
    groups = list(dict.fromkeys(frame["group"]))
    out: Dict[str, List] = {"group": groups}
    indexed = frame.set_index(["group", "metric"])
    for metric in metrics:
        for field in ("x_min", "alpha"):
            out[f"{metric}_{field}"] = [
                indexed.loc[(g, metric), field] if (g, metric) in indexed.index else np.nan
                for g in groups
            ]
    return pd.DataFrame(out)
