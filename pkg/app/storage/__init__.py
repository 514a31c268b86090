"""Local artifact storage"""

from app.storage.artifacts import ArtifactStore, load_artifact

__all__ = ["ArtifactStore", "load_artifact"]
