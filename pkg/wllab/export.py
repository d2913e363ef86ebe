# wllab/export.py
"""
wllab - Export Service
Deterministic JSON documents written atomically (temp file, then rename)
"""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import BaseModel

from .exceptions import ParseError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def dumps(payload: Union[BaseModel, Dict[str, Any], list]) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline"""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json", by_alias=True)
    return json.dumps(payload, sort_keys=True, indent=1, separators=(",", ": "), ensure_ascii=False) + "\n"


class ExportService:
    """Writes documents under a base directory without leaving partial files"""

    def __init__(self, export_dir: PathLike = "."):
        """
        Initialize export service

        Args:
            export_dir: Directory relative paths are resolved against
        """
        self.export_dir = Path(export_dir)

    def resolve(self, path: PathLike) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.export_dir / path

    def write_json(self, path: PathLike, payload: Union[BaseModel, Dict[str, Any], list]) -> Dict[str, Any]:
        """
        Write one JSON document atomically

        Returns:
            Dict with the final path and size in bytes
        """
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        text = dumps(payload)
        fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=str(target.parent))
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(text)
            os.replace(tmp, target)
        except Exception as e:
            logger.error(f"Error writing {target}: {str(e)}")
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        size = target.stat().st_size
        logger.info(f"Wrote {target} ({size} bytes)")
        return {"file_path": str(target), "size_bytes": size}

    def read_json(self, path: PathLike) -> Any:
        """Load a JSON document, reporting failures as ParseError"""
        source = self.resolve(path)
        try:
            with open(source, "r", encoding="utf-8") as f:
                return json.load(f)
        except FileNotFoundError as e:
            raise ParseError("file not found", filename=str(source), reason=str(e)) from e
        except json.JSONDecodeError as e:
            raise ParseError("invalid JSON", filename=str(source), reason=str(e)) from e


# Default instance resolving paths against the working directory
export_service = ExportService()


__all__ = ['ExportService', 'export_service', 'dumps']
