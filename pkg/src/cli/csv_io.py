import csv
import io
import math
import os
import tempfile

from pathlib import Path
from typing import Iterable, Sequence

from src.spectral_core.errors import ConfigError


Cell = str | int | float


def format_cell(value: Cell) -> str:
    """Decimal with 17 significant digits; independent of the locale."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        writer.writerow([format_cell(cell) for cell in row])
    return buffer.getvalue()


def prepare_output_dir(directory: Path) -> Path:
    """Create `directory` and make sure a file can be written into it."""
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with tempfile.TemporaryFile(dir=directory):
            pass
    except OSError as e:
        raise ConfigError(f"output directory {directory} is not writable: {e}") from e
    return directory


def write_csv_atomic(path: Path, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> Path:
    text = render_csv(header, rows)
    prepare_output_dir(path.parent)
    try:
        fd, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    except OSError as e:
        raise ConfigError(f"output directory {path.parent} is not writable: {e}") from e

    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(temp_name, path)
    except OSError as e:
        Path(temp_name).unlink(missing_ok=True)
        raise ConfigError(f"cannot write {path}: {e}") from e
    return path
