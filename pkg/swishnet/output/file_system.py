from datetime import datetime
from pathlib import Path
from typing import Any, Dict
import json

from pydantic import BaseModel

from ..core.settings import settings
from ..logger import logger


def default_run_dir(seed: int, runs_dir: Path | None = None) -> Path:
    """./runs/<timestamp>-<seed>"""
    stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
    return Path(runs_dir or settings.runs_dir) / f"{stamp}-{seed}"


class RunDirectory:
    """All files a command emits live under one output directory."""

    def __init__(self, output_dir: str | Path):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def path(self, file_path: str | Path) -> Path:
        return self.output_dir / file_path

    def create_dir(self, dir_path: str | Path) -> Path:
        dir_path = Path(self.output_dir / dir_path)
        dir_path.mkdir(parents=True, exist_ok=True)
        return dir_path

    def write_file(self, file_path: Path | str, content: str) -> Path:
        """Write text with '\\n' line endings on every platform"""
        file_path = self.path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(content)
        logger.debug(f"wrote {file_path}")
        return file_path

    def write_json_file(self, file_path: Path | str, data: Dict[str, Any] | BaseModel) -> Path:
        """Write a dict or pydantic model as indented JSON"""
        if isinstance(data, BaseModel):
            data = data.model_dump(mode="json")
        return self.write_file(file_path, json.dumps(data, indent=2) + "\n")

    def write_bytes(self, file_path: Path | str, content: bytes) -> Path:
        file_path = self.path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        file_path.write_bytes(content)
        logger.debug(f"wrote {file_path} ({len(content)} bytes)")
        return file_path
