"""Detection-gated classification pipeline"""

from app.pipeline.triage import TriageResult, triage

__all__ = ["TriageResult", "triage"]
