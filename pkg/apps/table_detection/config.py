"""
config.py - Configuração completa de execução do tablescout

RunConfig reúne as configurações de pré-processamento, projeção e detector,
os coeficientes alpha e o limiar de IoU da avaliação. É serializável em JSON
e seu hash identifica a configuração em cada relatório.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from django.conf import settings
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .detector import DetectorConfig, config_fingerprint
from .exceptions import ConfigException
from .preprocess import PreprocessConfig
from .profile import ProfileConfig
from .thresholds import DEFAULT_ALPHA_LH, DEFAULT_ALPHA_WS, validate_alphas

logger = logging.getLogger(__name__)

# Opção de linha de comando -> (seção, campo)
FLAG_FIELDS = {
    "bin_window": ("preprocess", "bin_window"),
    "bin_k": ("preprocess", "bin_k"),
    "bin_r": ("preprocess", "bin_R"),
    "border_margin_frac": ("preprocess", "border_margin_frac"),
    "dilate_w": ("preprocess", "dilate_w"),
    "dilate_h": ("preprocess", "dilate_h"),
    "row_noise_floor": ("profile", "row_noise_floor"),
    "min_blank_rows": ("profile", "min_blank_rows"),
    "min_gap_px": ("profile", "min_gap_px"),
    "min_table_lines": ("detector", "min_table_lines"),
    "max_interior_text_lines": ("detector", "max_interior_text_lines"),
    "header_footer_exclusion_frac": ("detector", "header_footer_exclusion_frac"),
    "alpha_ws": (None, "alpha_ws"),
    "alpha_lh": (None, "alpha_lh"),
    "iou_min": (None, "iou_min"),
}


class RunConfig(BaseModel):
    """Configuração completa de uma execução."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    preprocess: PreprocessConfig = Field(default_factory=PreprocessConfig)
    profile: ProfileConfig = Field(default_factory=ProfileConfig)
    detector: DetectorConfig = Field(default_factory=DetectorConfig)
    # Validados por thresholds.validate_alphas
    alpha_ws: float = DEFAULT_ALPHA_WS
    alpha_lh: float = DEFAULT_ALPHA_LH
    iou_min: float = Field(0.5, gt=0.0, le=1.0)

    @property
    def fingerprint(self) -> str:
        return config_fingerprint(self)

    def validate_alphas(self) -> "RunConfig":
        validate_alphas(self.alpha_ws, self.alpha_lh)
        return self

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def _merge(base: Dict[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Lê um arquivo JSON de configuração (saída de --dump-config)."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError as e:
        raise ConfigException(f"Arquivo de configuração não encontrado: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigException(f"JSON inválido em {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigException(f"Configuração em {path} deve ser um objeto JSON")
    return data


def build_run_config(
    options: Optional[Mapping[str, Any]] = None,
    config_path: Optional[Union[str, Path]] = None,
) -> RunConfig:
    """
    Monta a RunConfig efetiva.

    Precedência: padrões < TABLESCOUT_CONFIG < arquivo --config < opções explícitas.

    Args:
        options: Opções da linha de comando (valores None são ignorados)
        config_path: Arquivo JSON de configuração

    Returns:
        RunConfig: Configuração validada
    """
    data: Dict[str, Any] = {}
    env_path = getattr(settings, "TABLESCOUT_CONFIG", None)
    for path in (env_path, config_path):
        if path:
            data = _merge(data, load_config_file(path))

    overrides: Dict[str, Any] = {}
    for flag, (section, name) in FLAG_FIELDS.items():
        value = (options or {}).get(flag)
        if value is None:
            continue
        if section is None:
            overrides[name] = value
        else:
            overrides.setdefault(section, {})[name] = value
    data = _merge(data, overrides)

    try:
        run_config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigException(str(e)) from e
    logger.debug(f"Configuração efetiva {run_config.fingerprint[:12]}")
    return run_config
