"""Versioned model-bundle persistence with checksum validation.

A bundle is a JSON document holding the fitted preprocessor, the five
standalone models, the stacked model, and provenance. Floats serialize at
full round-trip precision, so a loaded bundle predicts bit-identically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BundleError
from .learners import FittedModel, model_from_dict
from .preprocess import FittedPreprocessor
from .stacking import StackedModel

FORMAT_VERSION = "1"


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


def payload_checksum(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def state_hash(*objects) -> str:
    """Fingerprint of fitted state; equality certifies nothing was refit."""
    parts = []
    for obj in objects:
        if obj is None:
            parts.append(None)
        elif hasattr(obj, "to_dict"):
            parts.append(obj.to_dict())
        else:
            parts.append(obj)
    return payload_checksum(parts)


@dataclass
class ModelBundle:
    preprocessor: FittedPreprocessor
    models: dict[str, FittedModel]
    stack: StackedModel | None
    seed: int
    config_hash: str
    created: str
    format_version: str = FORMAT_VERSION
    extra: dict = field(default_factory=dict)

    def payload(self) -> dict:
        return {
            "format_version": self.format_version,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "created": self.created,
            "preprocessor": self.preprocessor.to_dict(),
            "models": {name: m.to_dict() for name, m in self.models.items()},
            "stack": self.stack.to_dict() if self.stack is not None else None,
            "extra": self.extra,
        }


def save_bundle(bundle: ModelBundle, path) -> Path:
    path = Path(path)
    payload = bundle.payload()
    doc = {"checksum": payload_checksum(payload), "payload": payload}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True, indent=1, allow_nan=False),
                    encoding="utf-8")
    return path


def load_bundle(path) -> ModelBundle:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise BundleError(f"bundle not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise BundleError(f"bundle corrupt (checksum cannot be verified): {path}: {exc}") from exc
    if not isinstance(doc, dict) or "payload" not in doc or "checksum" not in doc:
        raise BundleError(f"bundle corrupt: {path}: missing checksum/payload sections")
    payload = doc["payload"]
    actual = payload_checksum(payload)
    if actual != doc["checksum"]:
        raise BundleError(
            f"bundle checksum mismatch: stored {doc['checksum'][:12]}.., computed {actual[:12]}.."
        )
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise BundleError(
            f"bundle format version {version!r} unsupported; this build reads {FORMAT_VERSION!r}"
        )
    return ModelBundle(
        preprocessor=FittedPreprocessor.from_dict(payload["preprocessor"]),
        models={name: model_from_dict(m) for name, m in payload["models"].items()},
        stack=StackedModel.from_dict(payload["stack"]) if payload["stack"] is not None else None,
        seed=int(payload["seed"]),
        config_hash=str(payload["config_hash"]),
        created=str(payload["created"]),
        format_version=str(version),
        extra=dict(payload.get("extra", {})),
    )
