"""Per-epoch metrics CSV: fixed header, six decimals, a trailing "final" row."""
from pathlib import Path
from typing import Sequence

import pandas as pd

from ..core.error_codes import ErrorCode, get_error_message
from ..core.exceptions import ValidationError
from ..train.config import EpochMetrics
from ..train.matrix import MatrixRow

METRICS_COLUMNS = ["epoch", "train_acc", "train_loss", "test_acc", "test_loss", "wall_time_s"]
VALUE_COLUMNS = METRICS_COLUMNS[1:]
TABLE_COLUMNS = [
    "conv_activation",
    "dense_activation",
    "train_acc",
    "train_loss",
    "test_acc",
    "test_loss",
    "epochs",
    "status",
]
FINAL_TAG = "final"


def metrics_frame(metrics: Sequence[EpochMetrics], *, final: bool = True) -> pd.DataFrame:
    """One row per epoch; the final row repeats the last epoch with the total wall time."""
    rows = [
        [m.epoch, m.train_accuracy, m.train_loss, m.test_accuracy, m.test_loss, m.wall_time_seconds] for m in metrics
    ]
    if final and metrics:
        last = metrics[-1]
        total = sum(m.wall_time_seconds for m in metrics)
        rows.append([FINAL_TAG, last.train_accuracy, last.train_loss, last.test_accuracy, last.test_loss, total])
    return pd.DataFrame(rows, columns=METRICS_COLUMNS)


def write_metrics_csv(path: Path | str, metrics: Sequence[EpochMetrics], *, final: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metrics_frame(metrics, final=final).to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    return path


def _malformed(path: Path, line: int, reason: str) -> ValidationError:
    return ValidationError(
        get_error_message(ErrorCode.MALFORMED_METRICS_FILE, path=path, line=line, reason=reason),
        error_code=ErrorCode.MALFORMED_METRICS_FILE,
        params="metrics",
        metadata={"path": str(path), "line": line},
    )


def read_metrics_csv(path: Path | str, *, include_final: bool = False) -> pd.DataFrame:
    """Parse and validate a metrics file; errors name the 1-based line number."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(
            get_error_message(ErrorCode.MISSING_INPUT_FILE, path=path), error_code=ErrorCode.MISSING_INPUT_FILE
        )
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise _malformed(path, 1, str(e).strip()) from None
    if list(raw.columns) != METRICS_COLUMNS:
        raise _malformed(path, 1, f"header must be {','.join(METRICS_COLUMNS)}")

    parsed = []
    for offset, row in enumerate(raw.itertuples(index=False)):
        line = offset + 2
        epoch_text = row[0].strip()
        if epoch_text == FINAL_TAG:
            if not include_final:
                continue
            epoch: int | str = FINAL_TAG
        else:
            try:
                epoch = int(epoch_text)
            except ValueError:
                raise _malformed(path, line, f"epoch '{epoch_text}' is not an integer") from None
        try:
            values = [float(v) for v in row[1:]]
        except ValueError:
            raise _malformed(path, line, "metric values must be numeric") from None
        parsed.append([epoch, *values])
    if not parsed:
        raise _malformed(path, 2, "no epoch rows")
    return pd.DataFrame(parsed, columns=METRICS_COLUMNS)


def matrix_frame(rows: Sequence[MatrixRow]) -> pd.DataFrame:
    """Final metrics per activation row, in comparison-table column order."""
    records = []
    for row in rows:
        final = row.final
        records.append(
            [
                row.conv_activation.display_name,
                row.dense_activation.display_name,
                final.train_accuracy if final else float("nan"),
                final.train_loss if final else float("nan"),
                final.test_accuracy if final else float("nan"),
                final.test_loss if final else float("nan"),
                row.epochs_run,
                "diverged" if row.diverged else (f"stopped@{row.stopped_early_at}" if row.stopped_early_at else "ok"),
            ]
        )
    return pd.DataFrame(records, columns=TABLE_COLUMNS)


def write_matrix_csv(path: Path | str, rows: Sequence[MatrixRow]) -> Path:
    path = Path(path)
    matrix_frame(rows).to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    return path
