"""
Bundled presets and TMD design documents.

Purpose: Load the YAML documents shipped under the data directory.

- presets/<name>.yaml: partial experiment documents (building, bounds, fixed floors)
- designs/<name>.yaml: published TMD designs, usable wherever a design file is accepted
"""
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Union
import logging

import yaml
from pydantic import ValidationError

from tmdreef.core.config import get_settings
from tmdreef.core.exceptions import ConfigError, ExportError, InvalidDesignError
from tmdreef.core.schemas import DesignDocument
from tmdreef.core.tmd import TmdDesign

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _data_dir() -> Path:
    return Path(get_settings().DATA_DIR)


def read_yaml(path: PathLike) -> Dict:
    """Parse a YAML mapping; anything else is a config error."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"File not found: {path}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}") from None

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")
    return data


def list_presets() -> List[str]:
    return sorted(p.stem for p in (_data_dir() / "presets").glob("*.yaml"))


def list_designs() -> List[str]:
    return sorted(p.stem for p in (_data_dir() / "designs").glob("*.yaml"))


@lru_cache(maxsize=None)
def _load_preset_cached(path: str) -> Dict:
    return read_yaml(path)


def load_preset(name: str) -> Dict:
    """
    Raw preset document by name.

    Returns a fresh copy each call so callers may merge into it.
    """
    path = _data_dir() / "presets" / f"{name}.yaml"
    if not path.exists():
        available = ", ".join(list_presets()) or "none"
        raise ConfigError(f"Unknown preset '{name}' (available: {available})")
    logger.debug(f"📄 Loading preset {name} from {path}")
    return _deep_copy(_load_preset_cached(str(path)))


def _deep_copy(data):
    if isinstance(data, dict):
        return {k: _deep_copy(v) for k, v in data.items()}
    if isinstance(data, list):
        return [_deep_copy(v) for v in data]
    return data


def resolve_design_path(name_or_path: PathLike) -> Path:
    """A path to an existing file, or the name of a bundled design."""
    path = Path(name_or_path)
    if path.exists():
        return path
    bundled = _data_dir() / "designs" / f"{name_or_path}.yaml"
    if bundled.exists():
        return bundled
    available = ", ".join(list_designs()) or "none"
    raise ConfigError(f"Design '{name_or_path}' is neither a file nor a bundled design (bundled: {available})")


def load_design(name_or_path: PathLike) -> DesignDocument:
    path = resolve_design_path(name_or_path)
    data = read_yaml(path)
    data.setdefault("name", path.stem)
    try:
        return DesignDocument(**data)
    except ValidationError as e:
        raise ConfigError(f"Invalid design document {path}: {e}") from None


def design_from_document(doc: DesignDocument, mass_override: Optional[float] = None) -> TmdDesign:
    """TmdDesign from a document, optionally replacing every TMD mass."""
    masses = [mass_override] * len(doc.mass) if mass_override is not None else doc.mass
    return TmdDesign.from_vectors(doc.omega, doc.xi, masses, doc.floors)


def document_from_design(design: TmdDesign, name: Optional[str] = None,
                         fitness: Optional[float] = None, notes: Optional[str] = None) -> DesignDocument:
    return DesignDocument(
        name=name,
        omega=[float(v) for v in design.omegas],
        xi=[float(v) for v in design.xis],
        mass=[float(v) for v in design.masses],
        floors=[int(v) for v in design.floors],
        published_fitness=fitness,
        notes=notes,
    )


def write_design(path: PathLike, doc: DesignDocument) -> Path:
    """
    Write a design document as YAML.

    Floats are dumped with full repr precision so evaluating the file
    reproduces the run's fitness exactly.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(doc.model_dump(exclude_none=True), f, sort_keys=False)
    except OSError as e:
        raise ExportError(path, str(e)) from e
    logger.debug(f"💾 Design written to {path}")
    return path


def check_design_fits(design: TmdDesign, n_floors: int, n_tmds: Optional[int] = None) -> None:
    """Dimension checks shared by the evaluate paths."""
    if n_tmds is not None and design.n_tmds != n_tmds:
        raise InvalidDesignError(f"Design has {design.n_tmds} TMDs, config expects {n_tmds}")
    bad = [f for f in design.floors if f > n_floors]
    if bad:
        raise InvalidDesignError(f"Design places TMDs on floors {bad} of a {n_floors}-floor building")
