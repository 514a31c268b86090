"""Deterministic local storage for JSON, CSV and IQ artifacts"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Type, TypeVar, Union

import pandas as pd
from pydantic import BaseModel, ValidationError

from app.config.settings import Settings
from app.errors import ArtifactNotFoundError, InvalidInputError
from app.iqcore.iq_file import write_iq_file
from app.iqcore.signal import IqSegment

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)


def dumps(payload: Any) -> str:
    """Canonical JSON: sorted keys, no NaN/Inf, shortest round-trip floats"""
    return json.dumps(payload, sort_keys=True, allow_nan=False, indent=1) + "\n"


def load_artifact(path: Union[str, Path], model: Type[ModelT], what: str = "artifact") -> ModelT:
    """
    Load and validate a JSON artifact

    Args:
        path: Artifact path
        model: Pydantic model to validate against
        what: Human-readable artifact name for error messages

    Returns:
        Validated model instance
    """
    path = Path(path)
    if not path.exists():
        raise ArtifactNotFoundError(f"{what} not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return model.model_validate(json.load(f))
    except (json.JSONDecodeError, ValidationError) as e:
        raise InvalidInputError(f"invalid {what} {path}: {e}")


class ArtifactStore:
    """Write artifacts of one run into an output directory"""

    def __init__(self, out_dir: Union[str, Path], run_settings: Settings):
        """
        Initialize store

        Args:
            out_dir: Output directory (created if missing)
            run_settings: Resolved settings echoed into every artifact
        """
        self.out_dir = Path(out_dir)
        self.settings = run_settings
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise InvalidInputError(f"cannot create output directory {self.out_dir}: {e}")
        if not os.access(self.out_dir, os.W_OK):
            raise InvalidInputError(f"output directory is not writable: {self.out_dir}")

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def write_json(self, name: str, artifact: Union[BaseModel, Any]) -> str:
        """
        Write a JSON artifact; pydantic models get the provenance block attached

        Args:
            name: File name inside the output directory
            artifact: Pydantic model or plain JSON-serialisable value

        Returns:
            Path to the written file
        """
        if isinstance(artifact, BaseModel):
            if "provenance" in type(artifact).model_fields:
                artifact = artifact.model_copy(update={"provenance": self.settings.provenance()})
            payload = artifact.model_dump(mode="json", by_alias=True)
        else:
            payload = artifact

        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            f.write(dumps(payload))
        logger.debug(f"Wrote {target}")
        return str(target)

    def write_csv(self, name: str, frame: pd.DataFrame) -> str:
        """Write a CSV table with fixed float formatting and Unix line endings"""
        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(target, index=False, float_format="%.12g", lineterminator="\n")
        logger.debug(f"Wrote {target} ({len(frame)} rows)")
        return str(target)

    def write_iq(self, name: str, seg: IqSegment) -> str:
        """Write a cf32le IQ file and its sidecar"""
        return write_iq_file(self.path(name), seg)

    def write_run_config(self) -> str:
        """Provenance for array-shaped artifacts that cannot embed it"""
        return self.write_json("run_config.json", self.settings.provenance())
