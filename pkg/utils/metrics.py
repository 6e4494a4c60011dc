"""
Metric series and CSV output
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from core.models import MetricsRecord


def running_average(series: Sequence[float], window: int) -> List[float]:
    """Trailing mean over min(window, available) points"""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if len(series) == 0:
        return []
    averaged = pd.Series(list(series), dtype="float64").rolling(window, min_periods=1).mean()
    return averaged.tolist()


class MetricsLog:
    """Append-only scalar series; indices must increase within each series"""

    def __init__(self):
        self.records: List[MetricsRecord] = []
        self._last: Dict[str, int] = {}

    def append(self, name: str, index: int, value: float):
        last = self._last.get(name)
        if last is not None and index <= last:
            raise ValueError(f"Series {name!r}: index {index} does not follow {last}")
        self._last[name] = index
        self.records.append(MetricsRecord(index=index, name=name, value=float(value)))

    def series(self, name: str) -> List[MetricsRecord]:
        return [r for r in self.records if r.name == name]

    def curve(self, name: str, window: int, index_name: str = "index") -> pd.DataFrame:
        """Raw series plus its running average"""
        rows = self.series(name)
        values = [r.value for r in rows]
        return pd.DataFrame(
            {
                index_name: [r.index for r in rows],
                name: values,
                f"{name}_avg": running_average(values, window),
            },
            columns=[index_name, name, f"{name}_avg"],
        )

    def __len__(self):
        return len(self.records)


def dominance_fraction(
    leader: pd.DataFrame,
    baseline: pd.DataFrame,
    column: str = "success_rate_avg",
    index: str = "env_steps",
    burn_in: float = 0.25,
) -> float:
    """
    Share of shared checkpoints, after the first `burn_in` fraction of them, at which
    `leader` is strictly above `baseline`. Checkpoints are matched on `index`.
    """
    if not 0.0 <= burn_in < 1.0:
        raise ValueError(f"burn_in must lie in [0, 1), got {burn_in}")
    merged = leader[[index, column]].merge(baseline[[index, column]], on=index, suffixes=("_leader", "_baseline"))
    merged = merged.sort_values(index)
    kept = merged.iloc[int(math.ceil(len(merged) * burn_in)):]
    if kept.empty:
        return 0.0
    return float((kept[f"{column}_leader"] > kept[f"{column}_baseline"]).mean())


def write_csv(rows: List[Dict[str, Any]], path: Path, columns: Optional[List[str]] = None) -> Path:
    """Header row plus one row per dict, in a fixed column order"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(rows, columns=columns) if columns else pd.DataFrame(rows)
    frame.to_csv(path, index=False)
    return path


def write_frame(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return path
