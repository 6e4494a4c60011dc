"""
Trajectory Log
Frame listener that collects every vehicle state per frame for external rendering
"""

from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from core.models import Lane, TrajectoryFrame


class TrajectoryRecorder:
    """Attach to MergeEnvironment.add_frame_listener; a frame index of 0 starts a new episode"""

    def __init__(self, max_episodes: Optional[int] = None):
        self.max_episodes = max_episodes
        self.episodes: List[List[TrajectoryFrame]] = []
        self._recording = False

    def __call__(self, frame: TrajectoryFrame):
        if frame.frame == 0:
            if self.max_episodes is not None and len(self.episodes) >= self.max_episodes:
                self._recording = False
                return
            self.episodes.append([])
            self._recording = True
        elif not self._recording:
            return
        self.episodes[-1].append(frame)

    def lane_change_x(self, episode: int) -> Optional[float]:
        """Ego coordinate on the frame it entered the highway"""
        for frame in self.episodes[episode]:
            if frame.lane_changed and frame.vehicles[0].lane == Lane.HIGHWAY:
                return frame.vehicles[0].x
        return None

    def to_dataframe(self) -> pd.DataFrame:
        rows: List[Dict] = []
        for i, frames in enumerate(self.episodes):
            merge_x = self.lane_change_x(i)
            for frame in frames:
                row = {"episode": i}
                row.update(frame.to_row())
                row["lane_change_x"] = merge_x
                rows.append(row)
        return pd.DataFrame(rows)

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_dataframe().to_csv(path, index=False)
        return path

    def __len__(self):
        return sum(len(frames) for frames in self.episodes)

    def __repr__(self):
        return f"<TrajectoryRecorder episodes={len(self.episodes)} frames={len(self)}>"
