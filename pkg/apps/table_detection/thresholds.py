"""
thresholds.py - Limiares locais de espaço entre palavras e altura de linha

A linha padrão é a linha com mais lacunas da página. A partir dela:
    ws = alpha_ws * WS_std, com WS_std < ws < 2 * WS_std
    lh = alpha_lh * LH_std, com LH_std < lh < 1.5 * LH_std
"""

import logging
from dataclasses import asdict, dataclass
from typing import AbstractSet, Optional, Sequence

from .exceptions import AlphaOutOfRangeException, NoTextLineException
from .profile import TextLine

logger = logging.getLogger(__name__)

DEFAULT_ALPHA_WS = 1.5
DEFAULT_ALPHA_LH = 1.25

# Intervalos abertos permitidos para os coeficientes
ALPHA_WS_RANGE = (1.0, 2.0)
ALPHA_LH_RANGE = (1.0, 1.5)


@dataclass(frozen=True)
class PageThresholds:
    """Limiares locais calculados a partir da linha padrão."""

    standard_line_index: int
    ws_std: int
    lh_std: int
    ws: float
    lh: float
    alpha_ws: float
    alpha_lh: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PageThresholds":
        return cls(
            standard_line_index=int(data["standard_line_index"]),
            ws_std=int(data["ws_std"]),
            lh_std=int(data["lh_std"]),
            ws=float(data["ws"]),
            lh=float(data["lh"]),
            alpha_ws=float(data["alpha_ws"]),
            alpha_lh=float(data["alpha_lh"]),
        )


def validate_alphas(alpha_ws: float, alpha_lh: float) -> None:
    """
    Valida os coeficientes contra os intervalos abertos.

    Raises:
        AlphaOutOfRangeException: Se algum coeficiente estiver fora ou na fronteira
    """
    low, high = ALPHA_WS_RANGE
    if not low < alpha_ws < high:
        raise AlphaOutOfRangeException(
            f"alpha_ws={alpha_ws} fora do intervalo aberto ({low}, {high})"
        )
    low, high = ALPHA_LH_RANGE
    if not low < alpha_lh < high:
        raise AlphaOutOfRangeException(
            f"alpha_lh={alpha_lh} fora do intervalo aberto ({low}, {high})"
        )


def select_standard_line(
    lines: Sequence[TextLine], ignored: Optional[AbstractSet[int]] = None
) -> int:
    """
    Escolhe a linha padrão: a de maior número de lacunas.

    Empates ficam com a linha mais acima.

    Args:
        lines: Linhas da página
        ignored: Posições de linhas que não podem ser escolhidas

    Returns:
        int: Posição da linha padrão em ``lines``

    Raises:
        NoTextLineException: Se nenhuma linha elegível tiver lacunas
    """
    ignored = ignored or frozenset()
    best, best_count = -1, 0
    for position, line in enumerate(lines):
        if position in ignored:
            continue
        if line.gap_count > best_count:
            best, best_count = position, line.gap_count
    if best < 0:
        raise NoTextLineException(
            f"Nenhuma das {len(lines)} linhas possui lacunas; não há linha padrão"
        )
    return best


def compute_thresholds(
    lines: Sequence[TextLine],
    alpha_ws: float = DEFAULT_ALPHA_WS,
    alpha_lh: float = DEFAULT_ALPHA_LH,
    ignored: Optional[AbstractSet[int]] = None,
) -> PageThresholds:
    """
    Calcula os limiares ws e lh da página.

    Args:
        lines: Linhas da página
        alpha_ws: Coeficiente de ws, em (1, 2)
        alpha_lh: Coeficiente de lh, em (1, 1.5)
        ignored: Posições de linhas fora da escolha da linha padrão

    Returns:
        PageThresholds: Limiares em aritmética real, sem arredondamento
    """
    validate_alphas(alpha_ws, alpha_lh)
    position = select_standard_line(lines, ignored)
    standard = lines[position]

    thresholds = PageThresholds(
        standard_line_index=standard.index,
        ws_std=standard.max_word_space,
        lh_std=standard.height,
        ws=alpha_ws * standard.max_word_space,
        lh=alpha_lh * standard.height,
        alpha_ws=alpha_ws,
        alpha_lh=alpha_lh,
    )
    logger.debug(
        f"Linha padrão {standard.index}: WS={thresholds.ws_std} LH={thresholds.lh_std} "
        f"ws={thresholds.ws} lh={thresholds.lh}"
    )
    return thresholds
