from .container import decode_tensors, encode_tensors, load_model, save_model
from .file_system import RunDirectory, default_run_dir
from .metrics_file import matrix_frame, metrics_frame, read_metrics_csv, write_matrix_csv, write_metrics_csv
from .pgm import encode_pgm, normalize_channel, write_feature_maps
from .template_renderer import Series, TemplateRenderer

__all__ = [
    "decode_tensors",
    "encode_tensors",
    "load_model",
    "save_model",
    "RunDirectory",
    "default_run_dir",
    "matrix_frame",
    "metrics_frame",
    "read_metrics_csv",
    "write_matrix_csv",
    "write_metrics_csv",
    "encode_pgm",
    "normalize_channel",
    "write_feature_maps",
    "Series",
    "TemplateRenderer",
]
