from .config_loader import (
    ConfigError,
    DEFAULT_CONFIG_PATH,
    OUTPUT_ROOT_ENV,
    default_output_root,
    load_config,
    manifest_lines,
    resolve_output_dir,
    write_manifest,
)
from .metrics import MetricsLog, dominance_fraction, running_average, write_csv, write_frame
from .trajectory import TrajectoryRecorder
from .excel_exporter import ExcelExporter

__all__ = [
    "ConfigError",
    "DEFAULT_CONFIG_PATH",
    "OUTPUT_ROOT_ENV",
    "default_output_root",
    "load_config",
    "manifest_lines",
    "resolve_output_dir",
    "write_manifest",
    "MetricsLog",
    "dominance_fraction",
    "running_average",
    "write_csv",
    "write_frame",
    "TrajectoryRecorder",
    "ExcelExporter",
]
