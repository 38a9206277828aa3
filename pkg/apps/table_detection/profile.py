"""
profile.py - Segmentação de linhas por perfil de projeção para tablescout

Converte uma BinaryImage na lista ordenada de linhas de texto (TextLine), cada
uma com sua altura (LH), suas lacunas e o maior espaço entre palavras (WS).
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .exceptions import EmptyBandException
from .raster import BinaryImage

logger = logging.getLogger(__name__)

Band = Tuple[int, int]


class ProfileConfig(BaseModel):
    """Parâmetros da segmentação por projeção."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # Linhas com menos pixels de tinta que isso contam como vazias; 0 e 1 equivalem
    row_noise_floor: int = Field(1, ge=0)
    min_blank_rows: int = Field(2, ge=1)
    min_gap_px: int = Field(2, ge=1)


@dataclass(frozen=True)
class Gap:
    """Trecho de colunas vazias dentro de uma linha."""

    x_start: int
    width: int

    @property
    def x_end(self) -> int:
        """Última coluna da lacuna (inclusiva)."""
        return self.x_start + self.width - 1


@dataclass(frozen=True)
class TextLine:
    """Faixa horizontal segmentada da página."""

    index: int
    y_top: int
    y_bottom: int
    x_left: int
    x_right: int
    gaps: Tuple[Gap, ...] = ()

    @property
    def height(self) -> int:
        """Altura da linha (LH) em pixels."""
        return self.y_bottom - self.y_top + 1

    @property
    def gap_count(self) -> int:
        return len(self.gaps)

    @property
    def max_word_space(self) -> int:
        """Maior lacuna da linha (WS); 0 quando não há lacunas."""
        return max((gap.width for gap in self.gaps), default=0)


def runs(mask: Sequence[bool]) -> List[Band]:
    """
    Encontra os trechos máximos de valores verdadeiros.

    Args:
        mask: Sequência booleana

    Returns:
        List[Tuple[int, int]]: Pares (início, fim) inclusivos, em ordem
    """
    flags = np.asarray(mask, dtype=np.int8)
    if flags.size == 0:
        return []
    edges = np.diff(np.concatenate(([0], flags, [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [(int(s), int(e)) for s, e in zip(starts, ends)]


def horizontal_projection(binary: BinaryImage) -> np.ndarray:
    """Quantidade de pixels de tinta por linha da imagem."""
    return np.asarray(binary.data, dtype=np.int64).sum(axis=1)


def vertical_projection(binary: BinaryImage, band: Optional[Band] = None) -> np.ndarray:
    """Quantidade de pixels de tinta por coluna, na imagem toda ou só na faixa."""
    data = np.asarray(binary.data, dtype=np.int64)
    if band is not None:
        data = data[band[0] : band[1] + 1]
    return data.sum(axis=0)


def segment_lines(profile: Sequence[int], cfg: ProfileConfig) -> List[Band]:
    """
    Segmenta o perfil horizontal em faixas de linha.

    Uma linha da imagem tem tinta quando sua contagem é positiva e não fica
    abaixo de row_noise_floor. Trechos separados por menos de min_blank_rows
    linhas vazias são fundidos numa só faixa.

    Args:
        profile: Contagem de tinta por linha
        cfg: Configuração de projeção

    Returns:
        List[Tuple[int, int]]: Faixas (y_top, y_bottom) de cima para baixo
    """
    counts = np.asarray(profile, dtype=np.int64)
    inked = (counts > 0) & (counts >= cfg.row_noise_floor)

    bands: List[Band] = []
    for start, end in runs(inked):
        if bands and start - bands[-1][1] - 1 < cfg.min_blank_rows:
            bands[-1] = (bands[-1][0], end)
        else:
            bands.append((start, end))
    return bands


def analyze_gaps(
    binary: BinaryImage, band: Band, cfg: ProfileConfig, index: int = 0
) -> TextLine:
    """
    Mede as lacunas de uma faixa de linha.

    Uma coluna está vazia na faixa quando não há tinta em nenhuma linha
    y_top..y_bottom. Lacunas são trechos máximos de colunas vazias com largura
    >= min_gap_px, estritamente entre a primeira e a última coluna com tinta.

    Args:
        binary: Página binarizada
        band: Faixa (y_top, y_bottom) inclusiva
        cfg: Configuração de projeção
        index: Ordinal da linha na página

    Returns:
        TextLine: Linha com altura, extensão de tinta e lacunas

    Raises:
        EmptyBandException: Se a faixa não tiver tinta
    """
    y_top, y_bottom = band
    column_ink = vertical_projection(binary, band) > 0
    inked_columns = np.flatnonzero(column_ink)
    if inked_columns.size == 0:
        raise EmptyBandException(f"Faixa {band} sem tinta")

    x_left, x_right = int(inked_columns[0]), int(inked_columns[-1])
    blank = ~column_ink[x_left : x_right + 1]
    gaps = tuple(
        Gap(x_start=x_left + start, width=end - start + 1)
        for start, end in runs(blank)
        if end - start + 1 >= cfg.min_gap_px
    )
    return TextLine(
        index=index,
        y_top=y_top,
        y_bottom=y_bottom,
        x_left=x_left,
        x_right=x_right,
        gaps=gaps,
    )


def build_page(binary: BinaryImage, cfg: ProfileConfig) -> List[TextLine]:
    """Segmenta a página e mede as lacunas de cada linha, de cima para baixo."""
    bands = segment_lines(horizontal_projection(binary), cfg)
    lines = [analyze_gaps(binary, band, cfg, index=i) for i, band in enumerate(bands)]
    logger.debug(f"{len(lines)} linhas segmentadas")
    return lines
