import datetime as dt
import hashlib
import json
import logging
import os
from typing import Any, Dict, Optional

from jsonschema import Draft7Validator

# ================================
# CONFIG
# ================================
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA_DIR = os.path.join(BASE_DIR, "data")
PAIRS_DIR = os.path.join(DATA_DIR, "pairs")
REPORTS_DIR = os.path.join(DATA_DIR, "reports")

MANIFEST_VERSION = 1


class InputError(ValueError):
    """Unreadable, malformed or schema-violating input; the CLI maps it to exit code 2."""


# ================================
# LOGGING
# ================================
def setup_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s | %(levelname)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        force=True,
    )


# ================================
# SCHEMAS
# ================================
RATIONAL = {"type": "string", "pattern": r"^\s*[-−]?\d+(\s*/\s*[1-9]\d*)?\s*$"}
RATIONAL_MATRIX = {"type": "array", "items": {"type": "array", "items": RATIONAL}}

PAIR_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["splitting", "n", "theta"],
    "properties": {
        "splitting": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "n": {"type": "integer", "minimum": 1},
        "theta": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "minItems": 1, "items": {"type": "array", "items": RATIONAL}},
        },
        "sigma0": {"type": "array", "items": RATIONAL},
    },
}

CURVE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["n", "r", "F0"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "r": {"type": "integer", "minimum": 1},
        "F0": {
            "type": "array",
            "items": {
                "type": "array",
                "items": [{"type": "integer"}, {"type": "integer"}, RATIONAL],
                "minItems": 3,
                "maxItems": 3,
            },
        },
    },
}

THEOREM_REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["input", "dims", "hitchin_poisson", "sheaf_poisson", "difference", "passed"],
    "properties": {
        "input": PAIR_SCHEMA,
        "dims": {"type": "object"},
        "hitchin_poisson": RATIONAL_MATRIX,
        "sheaf_poisson": RATIONAL_MATRIX,
        "phi_tangent": RATIONAL_MATRIX,
        "phi_cotangent": RATIONAL_MATRIX,
        "difference": RATIONAL_MATRIX,
        "passed": {"type": "boolean"},
    },
}


def validate_json(obj: Any, schema: dict, what: str = "document") -> None:
    errors = sorted(Draft7Validator(schema).iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        raise InputError(f"{what} violates schema at {first.json_path}: {first.message}")


# ================================
# FILE I/O
# ================================
def md5_of_bytes(b: bytes) -> str:
    return hashlib.md5(b).hexdigest()


def ensure_parent_dir(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def load_json_file(path: str) -> Any:
    if not os.path.exists(path):
        raise InputError(f"❌ File not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"❌ {path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e


def dumps_json(obj: Any) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def write_json(path: str, obj: Any) -> bytes:
    """Deterministic JSON (insertion-ordered keys, trailing newline); returns the bytes written."""
    data = dumps_json(obj)
    ensure_parent_dir(path)
    with open(path, "wb") as f:
        f.write(data)
    logging.info("Wrote %s (%d bytes)", path, len(data))
    return data


def manifest_path_for(out_path: str) -> str:
    return os.path.splitext(out_path)[0] + ".manifest.json"


def write_manifest(out_path: str, config: Dict[str, Any], payload: bytes, extra: Optional[Dict[str, Any]] = None) -> str:
    """Sidecar with everything non-deterministic (wall clock, timings) kept out of the report itself."""
    manifest = {
        "created_at_utc": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z"),
        "report_path": os.path.abspath(out_path),
        "config": config,
        "report_md5": md5_of_bytes(payload),
        "version": MANIFEST_VERSION,
    }
    if extra:
        manifest.update(extra)
    path = manifest_path_for(out_path)
    ensure_parent_dir(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
    logging.info("Wrote manifest: %s", path)
    return path
