"""
detector.py - Localização de tabelas por classificação de linhas para tablescout

Este módulo implementa o núcleo do algoritmo: cada linha da página é
classificada a partir de sua altura (LH), número de lacunas e maior espaço
(WS) contra os limiares locais ws e lh; as linhas marcadas são agrupadas em
regiões de tabela das categorias A, B e C.

Regras de classificação, na ordem em que são testadas:
1. LH >= 3*lh e nenhuma lacuna                -> bloco de tabela tipo A
2. WS > ws e LH <= lh                         -> candidata colunar (tipos B e C)
3. nenhuma lacuna, LH < lh e
   (WS(x-1) > ws ou WS(x+1) > ws)             -> linha de régua paralela
4. caso contrário                             -> texto
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .exceptions import NoTextLineException
from .preprocess import preprocess
from .profile import TextLine, build_page
from .raster import BinaryImage, GrayImage, Rect, TableCategory
from .thresholds import PageThresholds, compute_thresholds

if TYPE_CHECKING:
    from .config import RunConfig

logger = logging.getLogger(__name__)

REPORT_SCHEMA = 1


class LineClass(str, Enum):
    """Classe atribuída a cada linha da página."""

    TEXT = "text"
    TYPE_A_BLOCK = "type_a_block"
    COLUMNAR_CANDIDATE = "columnar_candidate"
    RULE_LINE = "rule_line"


class ReportStatus(str, Enum):
    OK = "ok"
    NO_TEXT_LINE = "no_text_line"


class DetectorConfig(BaseModel):
    """Parâmetros do agrupamento de linhas em regiões."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    min_table_lines: int = Field(3, ge=2)
    # Tolerância a cabeçalhos de várias linhas dentro de uma tabela
    max_interior_text_lines: int = Field(1, ge=0)
    # Fração da altura ignorada no topo e no rodapé; 0 desliga
    header_footer_exclusion_frac: float = Field(0.0, ge=0.0, lt=0.5)


@dataclass(frozen=True)
class TableRegion:
    """Região de tabela localizada na página."""

    rect: Rect
    category: TableCategory
    line_indices: Tuple[int, ...]
    rule_line_count: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            **self.rect.to_dict(),
            "category": self.category.value,
            "line_indices": list(self.line_indices),
            "rule_line_count": self.rule_line_count,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TableRegion":
        return cls(
            rect=Rect.from_dict(data),
            category=TableCategory(data["category"]),
            line_indices=tuple(int(i) for i in data["line_indices"]),
            rule_line_count=int(data.get("rule_line_count", 0)),
        )


@dataclass(frozen=True)
class LineRecord:
    """Resumo de uma linha classificada, como aparece no relatório."""

    index: int
    y_top: int
    y_bottom: int
    x_left: int
    x_right: int
    lh: int
    gap_count: int
    ws: int
    line_class: LineClass

    @classmethod
    def from_line(cls, line: TextLine, line_class: LineClass) -> "LineRecord":
        return cls(
            index=line.index,
            y_top=line.y_top,
            y_bottom=line.y_bottom,
            x_left=line.x_left,
            x_right=line.x_right,
            lh=line.height,
            gap_count=line.gap_count,
            ws=line.max_word_space,
            line_class=line_class,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "y_top": self.y_top,
            "y_bottom": self.y_bottom,
            "x_left": self.x_left,
            "x_right": self.x_right,
            "lh": self.lh,
            "gap_count": self.gap_count,
            "ws": self.ws,
            "class": self.line_class.value,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LineRecord":
        return cls(
            index=int(data["index"]),
            y_top=int(data["y_top"]),
            y_bottom=int(data["y_bottom"]),
            x_left=int(data["x_left"]),
            x_right=int(data["x_right"]),
            lh=int(data["lh"]),
            gap_count=int(data["gap_count"]),
            ws=int(data["ws"]),
            line_class=LineClass(data["class"]),
        )


@dataclass
class DetectionReport:
    """Resultado da detecção em uma página."""

    page_id: str
    page_size: Tuple[int, int]
    thresholds: Optional[PageThresholds]
    lines: List[LineRecord]
    regions: List[TableRegion]
    config_fingerprint: str
    status: ReportStatus = ReportStatus.OK
    diagnostics: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Converte o relatório para um dicionário serializável em JSON."""
        return {
            "schema": REPORT_SCHEMA,
            "page_id": self.page_id,
            "page_size": {"w": self.page_size[0], "h": self.page_size[1]},
            "status": self.status.value,
            "diagnostics": list(self.diagnostics),
            "config_fingerprint": self.config_fingerprint,
            "thresholds": self.thresholds.to_dict() if self.thresholds else None,
            "lines": [line.to_dict() for line in self.lines],
            "regions": [region.to_dict() for region in self.regions],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DetectionReport":
        """Cria um relatório a partir de um dicionário."""
        thresholds = data.get("thresholds")
        return cls(
            page_id=data["page_id"],
            page_size=(int(data["page_size"]["w"]), int(data["page_size"]["h"])),
            thresholds=PageThresholds.from_dict(thresholds) if thresholds else None,
            lines=[LineRecord.from_dict(item) for item in data.get("lines", [])],
            regions=[TableRegion.from_dict(item) for item in data.get("regions", [])],
            config_fingerprint=data.get("config_fingerprint", ""),
            status=ReportStatus(data.get("status", ReportStatus.OK.value)),
            diagnostics=list(data.get("diagnostics", [])),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"


@dataclass
class PipelineResult:
    """Relatório junto da página binarizada que o originou."""

    binary: BinaryImage
    lines: List[TextLine]
    report: DetectionReport


def classify_lines(
    lines: Sequence[TextLine], th: PageThresholds
) -> List[LineClass]:
    """
    Classifica cada linha da página.

    As comparações usam aritmética real. Vizinhos fora da página contam como
    falso na regra da linha de régua.

    Args:
        lines: Linhas da página, de cima para baixo
        th: Limiares da página

    Returns:
        List[LineClass]: Uma classe por linha
    """
    classes = []
    last = len(lines) - 1
    for x, line in enumerate(lines):
        lh_x = line.height
        gaps_x = line.gap_count
        ws_x = line.max_word_space

        if lh_x >= 3 * th.lh and gaps_x == 0:
            classes.append(LineClass.TYPE_A_BLOCK)
        elif ws_x > th.ws and lh_x <= th.lh:
            classes.append(LineClass.COLUMNAR_CANDIDATE)
        elif gaps_x == 0 and lh_x < th.lh and (
            (x > 0 and lines[x - 1].max_word_space > th.ws)
            or (x < last and lines[x + 1].max_word_space > th.ws)
        ):
            classes.append(LineClass.RULE_LINE)
        else:
            classes.append(LineClass.TEXT)
    return classes


def header_footer_excluded(
    lines: Sequence[TextLine], page_height: int, frac: float
) -> Set[int]:
    """
    Posições das linhas inteiramente dentro das faixas de topo e rodapé.

    Args:
        lines: Linhas da página
        page_height: Altura da página em pixels
        frac: Fração da altura ignorada em cada extremidade (0 desliga)

    Returns:
        Set[int]: Posições em ``lines`` a ignorar
    """
    if frac <= 0:
        return set()
    top_limit = frac * page_height
    bottom_limit = page_height - frac * page_height
    return {
        position
        for position, line in enumerate(lines)
        if line.y_bottom < top_limit or line.y_top >= bottom_limit
    }


def _region_from_members(
    lines: Sequence[TextLine], members: Sequence[int], category: TableCategory, rules: int
) -> TableRegion:
    first, last = lines[members[0]], lines[members[-1]]
    x_left = min(lines[m].x_left for m in members)
    x_right = max(lines[m].x_right for m in members)
    rect = Rect(
        x=x_left,
        y=first.y_top,
        w=x_right - x_left + 1,
        h=last.y_bottom - first.y_top + 1,
    )
    return TableRegion(
        rect=rect,
        category=category,
        line_indices=tuple(lines[m].index for m in members),
        rule_line_count=rules,
    )


def _close_run(
    run: List[int],
    classes: Sequence[LineClass],
    lines: Sequence[TextLine],
    cfg: DetectorConfig,
) -> Optional[TableRegion]:
    rules = [m for m in run if classes[m] is LineClass.RULE_LINE]
    members = list(run)
    if len(rules) == 1:
        # Uma régua isolada não caracteriza tabela de linhas paralelas
        members.remove(rules[0])
        rules = []
    if len(members) < cfg.min_table_lines:
        return None
    category = TableCategory.B if len(rules) >= 2 else TableCategory.C
    return _region_from_members(lines, members, category, len(rules))


def merge_regions(
    classes: Sequence[LineClass],
    lines: Sequence[TextLine],
    cfg: DetectorConfig,
) -> List[TableRegion]:
    """
    Agrupa as linhas classificadas em regiões de tabela.

    Cada bloco tipo A vira uma região A. Trechos máximos de candidatas
    colunares e réguas, admitindo até max_interior_text_lines linhas de texto
    consecutivas no meio, viram uma região B (duas ou mais réguas) ou C;
    trechos com menos de min_table_lines membros são descartados.

    Args:
        classes: Classe de cada linha
        lines: Linhas da página, alinhadas com ``classes``
        cfg: Configuração do detector

    Returns:
        List[TableRegion]: Regiões de cima para baixo
    """
    if len(classes) != len(lines):
        raise ValueError(f"{len(classes)} classes para {len(lines)} linhas")

    regions: List[TableRegion] = []
    run: List[int] = []
    pending_text = 0

    def flush():
        nonlocal run, pending_text
        if run:
            region = _close_run(run, classes, lines, cfg)
            if region is not None:
                regions.append(region)
        run, pending_text = [], 0

    for position, line_class in enumerate(classes):
        if line_class is LineClass.TYPE_A_BLOCK:
            flush()
            regions.append(
                _region_from_members(lines, [position], TableCategory.A, rules=0)
            )
        elif line_class in (LineClass.COLUMNAR_CANDIDATE, LineClass.RULE_LINE):
            run.append(position)
            pending_text = 0
        elif run:
            pending_text += 1
            if pending_text > cfg.max_interior_text_lines:
                flush()
    flush()
    return regions


def config_fingerprint(run_config: "RunConfig") -> str:
    """Hash SHA-256 do JSON canônico da configuração."""
    canonical = json.dumps(run_config.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def run_pipeline(
    gray: GrayImage, run_config: "RunConfig", page_id: str = "page"
) -> PipelineResult:
    """
    Executa a cadeia completa sobre uma página.

    pré-processamento -> linhas -> limiares -> classificação -> regiões.
    Uma página sem linha padrão gera relatório sem regiões com o diagnóstico
    NoTextLine, sem levantar exceção.

    Args:
        gray: Página em tons de cinza
        run_config: Configuração completa
        page_id: Identificador da página no relatório

    Returns:
        PipelineResult: Página binarizada, linhas e relatório
    """
    binary = preprocess(gray, run_config.preprocess)
    lines = build_page(binary, run_config.profile)
    detector_cfg = run_config.detector
    excluded = header_footer_excluded(
        lines, gray.height, detector_cfg.header_footer_exclusion_frac
    )
    fingerprint = config_fingerprint(run_config)

    try:
        thresholds = compute_thresholds(
            lines, run_config.alpha_ws, run_config.alpha_lh, ignored=excluded
        )
    except NoTextLineException as e:
        logger.info(f"Página {page_id}: {e}")
        report = DetectionReport(
            page_id=page_id,
            page_size=(gray.width, gray.height),
            thresholds=None,
            lines=[LineRecord.from_line(line, LineClass.TEXT) for line in lines],
            regions=[],
            config_fingerprint=fingerprint,
            status=ReportStatus.NO_TEXT_LINE,
            diagnostics=[NoTextLineException.code],
        )
        return PipelineResult(binary=binary, lines=lines, report=report)

    classes = classify_lines(lines, thresholds)
    for position in excluded:
        classes[position] = LineClass.TEXT
    regions = merge_regions(classes, lines, detector_cfg)

    diagnostics = []
    if excluded:
        diagnostics.append(f"header_footer_excluded:{len(excluded)}")

    report = DetectionReport(
        page_id=page_id,
        page_size=(gray.width, gray.height),
        thresholds=thresholds,
        lines=[LineRecord.from_line(line, cls) for line, cls in zip(lines, classes)],
        regions=regions,
        config_fingerprint=fingerprint,
        diagnostics=diagnostics,
    )
    logger.info(
        f"Página {page_id}: {len(lines)} linhas, {len(regions)} regiões "
        f"({', '.join(r.category.value for r in regions) or 'nenhuma'})"
    )
    return PipelineResult(binary=binary, lines=lines, report=report)


def detect(gray: GrayImage, run_config: "RunConfig", page_id: str = "page") -> DetectionReport:
    """Detecta as tabelas da página e devolve o relatório."""
    return run_pipeline(gray, run_config, page_id).report
