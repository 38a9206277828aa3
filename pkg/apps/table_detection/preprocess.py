"""
preprocess.py - Pré-processamento de páginas digitalizadas para tablescout

Cadeia aplicada antes da detecção: binarização adaptativa, remoção de ruído
de borda e realce por dilatação.

Funcionalidades:
- Binarização por limiar local T = m * (1 + k * (s / R - 1)) em janela quadrada
- Remoção de componentes conexos (8-conectividade) presos à faixa de margem
- Dilatação com elemento estruturante retangular ancorado no canto superior esquerdo
"""

import logging

import cv2
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .raster import BinaryImage, GrayImage

logger = logging.getLogger(__name__)


class PreprocessConfig(BaseModel):
    """Parâmetros da cadeia de pré-processamento."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    bin_window: int = Field(25, ge=3, description="Lado da janela local (ímpar)")
    bin_k: float = Field(0.2, gt=0.0, lt=1.0, description="Sensibilidade")
    bin_R: float = Field(128.0, gt=0.0, description="Faixa dinâmica do desvio padrão")
    border_margin_frac: float = Field(0.05, gt=0.0, lt=0.5)
    dilate_w: int = Field(2, ge=1)
    dilate_h: int = Field(2, ge=1)

    @field_validator("bin_window")
    @classmethod
    def validar_janela_impar(cls, v):
        """A janela precisa ter um pixel central."""
        if v % 2 == 0:
            raise ValueError(f"bin_window deve ser ímpar, recebido {v}")
        return v


def _window_sums(integral: np.ndarray, y0, y1, x0, x1) -> np.ndarray:
    return (
        integral[np.ix_(y1, x1)]
        - integral[np.ix_(y0, x1)]
        - integral[np.ix_(y1, x0)]
        + integral[np.ix_(y0, x0)]
    )


def local_statistics(gray: GrayImage, window: int):
    """
    Calcula média e desvio padrão locais em janelas window x window.

    As janelas são truncadas nas bordas da imagem: só entram pixels existentes.

    Args:
        gray: Página em tons de cinza
        window: Lado da janela (ímpar)

    Returns:
        Tuple[np.ndarray, np.ndarray]: Média e desvio padrão por pixel (float64)
    """
    height, width = gray.height, gray.width
    radius = window // 2

    sums, squares = cv2.integral2(
        np.asarray(gray.data), sdepth=cv2.CV_64F, sqdepth=cv2.CV_64F
    )

    rows = np.arange(height)
    cols = np.arange(width)
    y0 = np.clip(rows - radius, 0, height)
    y1 = np.clip(rows + radius + 1, 0, height)
    x0 = np.clip(cols - radius, 0, width)
    x1 = np.clip(cols + radius + 1, 0, width)

    count = np.outer(y1 - y0, x1 - x0).astype(np.float64)
    total = _window_sums(sums, y0, y1, x0, x1)
    total_sq = _window_sums(squares, y0, y1, x0, x1)

    mean = total / count
    # Somas inteiras em float64 são exatas; n*S2 - S1^2 não perde precisão
    variance = np.maximum(count * total_sq - total * total, 0.0) / (count * count)
    return mean, np.sqrt(variance)


def binarize_adaptive(gray: GrayImage, cfg: PreprocessConfig) -> BinaryImage:
    """
    Binariza a página com limiar adaptativo local.

    Um pixel é tinta quando intensidade <= m * (1 + k * (s / R - 1)).

    Args:
        gray: Página em tons de cinza
        cfg: Configuração de pré-processamento

    Returns:
        BinaryImage: 1 = tinta
    """
    mean, std = local_statistics(gray, cfg.bin_window)
    threshold = mean * (1.0 + cfg.bin_k * (std / cfg.bin_R - 1.0))
    ink = np.asarray(gray.data, dtype=np.float64) <= threshold
    logger.debug(f"Binarização: {int(ink.sum())} pixels de tinta em {gray.width}x{gray.height}")
    return BinaryImage(ink)


def _inner_window(width: int, height: int, frac: float):
    """Limites (x0, x1, y0, y1) da área fora da faixa de margem."""
    mx = int(np.ceil(width * frac))
    my = int(np.ceil(height * frac))
    return mx, width - mx, my, height - my


def remove_border_noise(binary: BinaryImage, cfg: PreprocessConfig) -> BinaryImage:
    """
    Remove ruído preso às bordas da página.

    Apaga todo componente conexo (8-conectividade) que toca a borda externa da
    imagem e está inteiramente dentro da faixa de margem. Os demais pixels não
    são alterados.

    Args:
        binary: Página binarizada
        cfg: Configuração (usa border_margin_frac)

    Returns:
        BinaryImage: Página sem os componentes de borda
    """
    data = np.asarray(binary.data)
    count, labels = cv2.connectedComponents(data, connectivity=8)
    if count <= 1:
        return binary

    edge_labels = np.unique(
        np.concatenate((labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]))
    )
    x0, x1, y0, y1 = _inner_window(binary.width, binary.height, cfg.border_margin_frac)
    inner_labels = np.unique(labels[y0:y1, x0:x1]) if x0 < x1 and y0 < y1 else np.array([])

    removable = np.setdiff1d(edge_labels[edge_labels != 0], inner_labels)
    if removable.size == 0:
        return binary

    cleaned = np.where(np.isin(labels, removable), 0, data).astype(np.uint8)
    logger.debug(f"Remoção de borda: {removable.size} componentes apagados")
    return BinaryImage(cleaned)


def dilate(binary: BinaryImage, cfg: PreprocessConfig) -> BinaryImage:
    """
    Dilata a tinta com elemento estruturante dilate_w x dilate_h.

    O elemento é ancorado na célula superior esquerda: um pixel de tinta em
    (x, y) acende (x..x+w-1, y..y+h-1).
    """
    kernel = np.ones((cfg.dilate_h, cfg.dilate_w), dtype=np.uint8)
    dilated = cv2.dilate(
        np.asarray(binary.data),
        kernel,
        anchor=(cfg.dilate_w - 1, cfg.dilate_h - 1),
        iterations=1,
    )
    return BinaryImage(dilated)


def preprocess(gray: GrayImage, cfg: PreprocessConfig) -> BinaryImage:
    """Executa binarização, remoção de ruído de borda e dilatação."""
    binary = binarize_adaptive(gray, cfg)
    binary = remove_border_noise(binary, cfg)
    return dilate(binary, cfg)
