import os
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, Iterable, List, Optional, Tuple, Union

import pandas as pd

from ..core.constants import APP_VERSION, INDEX_COLUMNS, PLOT_SCHEMAS
from ..core.exceptions import KiloswarmError, SchemaError
from ..core.types import Trajectory
from ..utils.logger import get_logger

if TYPE_CHECKING:
    from ..core.config import Config

PathLike = Union[str, Path]

MANIFEST_NAME = "manifest.ini"


class DataManager:
    """
    File I/O for one output directory: the run manifest, result CSVs,
    summaries and images, plus reading trajectory logs and index files.

    CSVs are UTF-8 with LF endings and shortest round-trip float rendering,
    so a re-run from the same manifest writes byte-identical files.
    """

    def __init__(self, out_dir: PathLike):
        self.out_dir = Path(out_dir)
        self.logger = get_logger()

    def ensure_out_dir(self) -> Path:
        """Create the output directory if it doesn't exist"""
        try:
            if not self.out_dir.exists():
                self.out_dir.mkdir(parents=True)
                self.logger.info(f"Created output directory: {self.out_dir}")
            if not os.access(self.out_dir, os.W_OK):
                raise PermissionError(f"output directory {self.out_dir} is not writable")
        except OSError as e:
            self.logger.error(f"Cannot prepare output directory {self.out_dir}: {e}")
            raise
        return self.out_dir

    def path(self, *parts: str) -> Path:
        return self.out_dir.joinpath(*parts)

    def write_manifest(self, config: "Config", command: str, master_seed: int,
                       config_path: Optional[PathLike] = None) -> Path:
        """Write the resolved config plus run metadata; always the first file of a run"""
        self.ensure_out_dir()
        target = self.path(MANIFEST_NAME)
        config.save(target, manifest={
            "command": command,
            "config_path": "" if config_path is None else str(config_path),
            "master_seed": master_seed,
            "out_dir": str(self.out_dir),
            "version": APP_VERSION,
        })
        self.logger.info(f"Wrote manifest {target}")
        return target

    def write_csv(self, frame: pd.DataFrame, *parts: str) -> Path:
        target = self.path(*parts)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(target, index=False, encoding="utf-8", lineterminator="\n")
        except OSError as e:
            self.logger.error(f"Failed to write {target}: {e}", exc_info=True)
            raise
        self.logger.debug(f"Wrote {len(frame)} rows to {target}")
        return target

    def write_summary(self, values: Dict[str, Any], *parts: str) -> Path:
        """Single-row CSV of named scalars"""
        return self.write_csv(pd.DataFrame([values]), *parts)

    def write_image(self, image, *parts: str) -> Path:
        """Save a Pillow image; '.pgm' targets are written as binary PGM"""
        target = self.path(*parts)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            image.save(target, format="PPM" if target.suffix == ".pgm" else None)
        except OSError as e:
            self.logger.error(f"Failed to write {target}: {e}", exc_info=True)
            raise
        return target

    def read_csv(self, path: PathLike, required: Iterable[str] = ()) -> pd.DataFrame:
        """Read a CSV and check it carries the required columns"""
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            self.logger.error(f"Error reading {path}: {e}")
            raise KiloswarmError(f"cannot read {path}: {e}") from e
        for column in required:
            if column not in frame.columns:
                raise SchemaError(column, source=path)
        return frame

    def read_plot_input(self, path: PathLike, kind: str) -> pd.DataFrame:
        if kind not in PLOT_SCHEMAS:
            raise KiloswarmError(f"unknown plot kind '{kind}'")
        return self.read_csv(path, PLOT_SCHEMAS[kind])

    def read_trajectory(self, path: PathLike) -> Trajectory:
        frame = self.read_csv(path, ("t", "x", "y"))
        return Trajectory.from_frame(frame)

    def read_index(self, path: PathLike) -> List[Tuple[int, int, Path]]:
        """(robot_id, trial_id, trajectory path) rows; relative paths resolve against the index"""
        index = self.read_csv(path, INDEX_COLUMNS)
        base = Path(path).parent
        entries = []
        for row in index.itertuples(index=False):
            trajectory_path = Path(str(row.path))
            if not trajectory_path.is_absolute():
                trajectory_path = base / trajectory_path
            entries.append((int(row.robot_id), int(row.trial_id), trajectory_path))
        return entries
