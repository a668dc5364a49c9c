"""Pipeline configuration: defaults < key=value file < command-line flags."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, fields
from functools import lru_cache
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    dataset_path: str | None = None
    asset_dir: str | None = None
    output_dir: str = "reviewsum-out"
    k_min: int = 5
    k_max: int = 40
    k_step: int = 5
    k_summary: int = 5
    alpha: float | None = None  # None means 50/K
    beta: float = 0.01
    iterations: int = 500
    infer_iterations: int = 50
    holdout_fraction: float = 0.1
    seed: int = 0
    min_reviews: int | None = None
    summary_reweight: bool = False
    rouge_variants: str = "rouge1,rouge2,rougeL"
    rouge_stem: bool = True
    rouge_drop_stopwords: bool = False
    figures: bool = True
    jobs: int = 1

    # fields that never change results
    NON_SEMANTIC = ("output_dir", "jobs", "figures")

    @property
    def k_range(self):
        return list(range(self.k_min, self.k_max + 1, self.k_step))

    @property
    def variants(self):
        return tuple(v.strip() for v in self.rouge_variants.split(",") if v.strip())

    def validate(self, need_dataset=True):
        if self.k_summary < 1:
            raise ConfigError("k_summary must be >= 1")
        if self.k_step < 1 or not self.k_range:
            raise ConfigError(f"empty K range {self.k_min}..{self.k_max} step {self.k_step}")
        if self.k_min < 1:
            raise ConfigError("k_min must be >= 1")
        if not 0 <= self.holdout_fraction < 1:
            raise ConfigError("holdout_fraction must be in [0, 1)")
        if (self.alpha is not None and self.alpha <= 0) or self.beta <= 0:
            raise ConfigError("alpha and beta must be positive")
        if self.iterations < 1 or self.infer_iterations < 1:
            raise ConfigError("iteration counts must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        bad = [v for v in self.variants if v not in ("rouge1", "rouge2", "rougeL")]
        if bad or not self.variants:
            raise ConfigError(f"unknown ROUGE variants: {bad or self.rouge_variants!r}")
        if need_dataset:
            if not self.dataset_path:
                raise ConfigError("dataset_path is required")
            if not Path(self.dataset_path).is_file():
                raise ConfigError(f"dataset not found: {self.dataset_path}")
        if self.asset_dir is not None and not Path(self.asset_dir).is_dir():
            raise ConfigError(f"asset directory not found: {self.asset_dir}")
        return self

    def semantic_dict(self):
        d = dataclasses.asdict(self)
        for k in self.NON_SEMANTIC:
            d.pop(k, None)
        d.pop("dataset_path", None)
        d.pop("asset_dir", None)
        return d

    def dataset_digest(self):
        if not self.dataset_path or not Path(self.dataset_path).is_file():
            return None
        st = Path(self.dataset_path).stat()
        return _file_digest(str(Path(self.dataset_path).resolve()), st.st_mtime_ns, st.st_size)

    def config_hash(self, dataset_digest=None):
        """Hash of every result-affecting setting plus the dataset and asset contents.

        Stages that run without a dataset pass the digest recorded by ``preprocess``.
        """
        h = hashlib.sha256(json.dumps(self.semantic_dict(), sort_keys=True).encode())
        digest = dataset_digest or self.dataset_digest()
        if digest:
            h.update(digest.encode())
        if self.asset_dir:
            for p in sorted(Path(self.asset_dir).iterdir()):
                if p.is_file():
                    h.update(p.name.encode())
                    h.update(p.read_bytes())
        return h.hexdigest()[:16]


@lru_cache(maxsize=8)
def _file_digest(path, mtime_ns, size):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _convert(name, raw):
    kind = _FIELD_TYPES[name]
    if raw is None:
        return None
    text = str(raw).strip()
    if "None" in kind and text.lower() in ("", "none", "null"):
        return None
    try:
        if kind.startswith("bool"):
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return text


def read_config_file(path):
    """Parse a flat ``key = value`` file (``#`` starts a comment line)."""
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        values[key] = _convert(key, value)
    return values


def build_config(file_path=None, overrides=None):
    values = {}
    if file_path:
        values.update(read_config_file(file_path))
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = _convert(key, value) if isinstance(value, str) else value
    return PipelineConfig(**values)
