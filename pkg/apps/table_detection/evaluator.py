"""
evaluator.py - Avaliação das detecções contra a verdade de referência

Funcionalidades:
- Arquivos de verdade por página (<page_id>.truth.json, schema 1)
- IoU entre retângulos e pareamento guloso por IoU decrescente
- Avaliação por página: acertos por categoria, confusão de categorias e
  regiões falsas
- Agregação em tabela de acurácia por categoria e geral
- Fixture com as contagens publicadas do experimento com 298 documentos
"""

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .detector import DetectionReport, TableRegion
from .exceptions import (
    EmptyCorpusException,
    MalformedReportException,
    MissingReportException,
    MissingTruthException,
    OutOfBoundsException,
)
from .raster import Rect, TableCategory

logger = logging.getLogger(__name__)

TRUTH_SCHEMA = 1
TRUTH_SUFFIX = ".truth.json"
REPORT_SUFFIX = ".report.json"
MISSING_REPORT_CAUSE = "missing_report"
DEFAULT_IOU_MIN = 0.5

CATEGORY_LABELS = {
    TableCategory.A: "Tabelas com grade (tipo A)",
    TableCategory.B: "Tabelas com linhas paralelas (tipo B)",
    TableCategory.C: "Tabelas sem linhas (tipo C)",
}


@dataclass(frozen=True)
class TruthEntry:
    """Tabela anotada numa página."""

    rect: Rect
    category: TableCategory

    def to_dict(self) -> Dict[str, Any]:
        return {**self.rect.to_dict(), "category": self.category.value}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TruthEntry":
        return cls(rect=Rect.from_dict(data), category=TableCategory(data["category"]))


@dataclass
class GroundTruth:
    """Verdade de referência de uma página."""

    page_id: str
    entries: List[TruthEntry] = field(default_factory=list)

    def validate_bounds(self, width: int, height: int) -> None:
        """
        Confere se todas as entradas cabem na página.

        Raises:
            OutOfBoundsException: Se alguma entrada ultrapassar a página
        """
        for entry in self.entries:
            if not entry.rect.fits(width, height):
                raise OutOfBoundsException(
                    f"Verdade de {self.page_id}: {entry.rect} fora da página {width}x{height}"
                )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": TRUTH_SCHEMA,
            "page_id": self.page_id,
            "entries": [entry.to_dict() for entry in self.entries],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GroundTruth":
        return cls(
            page_id=data["page_id"],
            entries=[TruthEntry.from_dict(item) for item in data.get("entries", [])],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    def save(self, directory: Union[str, Path]) -> Path:
        path = truth_path(directory, self.page_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "GroundTruth":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_dict(json.load(handle))


def truth_path(directory: Union[str, Path], page_id: str) -> Path:
    """Caminho do arquivo de verdade de uma página."""
    return Path(directory) / f"{page_id}{TRUTH_SUFFIX}"


def iou(a: Rect, b: Rect) -> float:
    """Interseção sobre união de dois retângulos, em [0, 1]."""
    inter = a.intersection_area(b)
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)


@dataclass(frozen=True)
class MatchedPair:
    truth_index: int
    detected_index: int
    iou: float


@dataclass
class MatchResult:
    """Resultado do pareamento entre regiões detectadas e verdade."""

    pairs: List[MatchedPair]
    unmatched_detected: List[int]
    unmatched_truth: List[int]

    def pair_for_truth(self, truth_index: int) -> Optional[MatchedPair]:
        for pair in self.pairs:
            if pair.truth_index == truth_index:
                return pair
        return None


def match_regions(
    detected: Sequence[TableRegion],
    truth: GroundTruth,
    iou_min: float = DEFAULT_IOU_MIN,
) -> MatchResult:
    """
    Pareia regiões detectadas com entradas da verdade.

    Pares com IoU >= iou_min são aceitos em ordem decrescente de IoU (empates
    pela entrada de verdade e depois pela região de menor índice), cada região
    e cada entrada no máximo uma vez. A categoria não participa do pareamento.

    Args:
        detected: Regiões detectadas
        truth: Verdade da página
        iou_min: IoU mínimo, em (0, 1]

    Returns:
        MatchResult: Pares aceitos e índices não pareados de cada lado
    """
    if not 0.0 < iou_min <= 1.0:
        raise ValueError(f"iou_min={iou_min} fora do intervalo (0, 1]")

    candidates: List[Tuple[float, int, int]] = []
    for t, entry in enumerate(truth.entries):
        for d, region in enumerate(detected):
            score = iou(entry.rect, region.rect)
            if score >= iou_min:
                candidates.append((score, t, d))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))

    used_truth, used_detected = set(), set()
    pairs: List[MatchedPair] = []
    for score, t, d in candidates:
        if t in used_truth or d in used_detected:
            continue
        used_truth.add(t)
        used_detected.add(d)
        pairs.append(MatchedPair(truth_index=t, detected_index=d, iou=score))

    pairs.sort(key=lambda p: p.truth_index)
    return MatchResult(
        pairs=pairs,
        unmatched_detected=[d for d in range(len(detected)) if d not in used_detected],
        unmatched_truth=[t for t in range(len(truth.entries)) if t not in used_truth],
    )


@dataclass(frozen=True)
class TruthOutcome:
    """Resultado de uma entrada de verdade."""

    category: TableCategory
    correct: bool
    detected_category: Optional[TableCategory] = None
    iou: float = 0.0
    # Causa anotada da falha, quando conhecida
    cause: Optional[str] = None


@dataclass
class PageEvaluation:
    """Avaliação de uma página."""

    page_id: str
    outcomes: List[TruthOutcome] = field(default_factory=list)
    false_positives: int = 0
    error_code: Optional[str] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error_code is not None

    @classmethod
    def from_error(cls, page_id: str, exc: Exception) -> "PageEvaluation":
        return cls(
            page_id=page_id,
            error_code=getattr(exc, "code", type(exc).__name__),
            error=str(exc),
        )


def evaluate_page(
    report: DetectionReport, truth: GroundTruth, iou_min: float = DEFAULT_IOU_MIN
) -> PageEvaluation:
    """
    Compara o relatório de uma página com sua verdade.

    Uma verdade que não cabe na página do relatório vira avaliação com erro
    OutOfBounds.
    """
    try:
        truth.validate_bounds(*report.page_size)
    except OutOfBoundsException as e:
        logger.warning(str(e))
        return PageEvaluation.from_error(report.page_id, e)

    result = match_regions(report.regions, truth, iou_min)
    outcomes = []
    for t, entry in enumerate(truth.entries):
        pair = result.pair_for_truth(t)
        if pair is None:
            outcomes.append(TruthOutcome(category=entry.category, correct=False))
        else:
            outcomes.append(
                TruthOutcome(
                    category=entry.category,
                    correct=True,
                    detected_category=report.regions[pair.detected_index].category,
                    iou=pair.iou,
                )
            )
    return PageEvaluation(
        page_id=report.page_id,
        outcomes=outcomes,
        false_positives=len(result.unmatched_detected),
    )


def format_pct(correct: int, total: int) -> Optional[str]:
    """100 * correct / total arredondado a uma casa decimal (meio para cima)."""
    if total == 0:
        return None
    value = Decimal(100 * correct) / Decimal(total)
    return str(value.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class CategoryStats:
    total: int
    correct: int

    @property
    def accuracy_pct(self) -> Optional[str]:
        return format_pct(self.correct, self.total)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "total": self.total,
            "correct": self.correct,
            "accuracy_pct": self.accuracy_pct,
        }


@dataclass
class EvalSummary:
    """Acurácia por categoria e geral de um corpus."""

    categories: Dict[TableCategory, CategoryStats]
    overall: CategoryStats
    pages: int
    false_positives: int = 0
    # confusion[verdade][detectada] nos pares aceitos
    confusion: Dict[str, Dict[str, int]] = field(default_factory=dict)
    failure_causes: Dict[str, Dict[str, int]] = field(default_factory=dict)
    errors: List[Dict[str, str]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": TRUTH_SCHEMA,
            "pages": self.pages,
            "categories": {
                category.value: stats.to_dict() for category, stats in self.categories.items()
            },
            "overall": self.overall.to_dict(),
            "false_positives": self.false_positives,
            "confusion": self.confusion,
            "failure_causes": self.failure_causes,
            "errors": self.errors,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"


def aggregate(pages: Iterable[PageEvaluation]) -> EvalSummary:
    """
    Agrega as avaliações de página numa EvalSummary.

    Uma entrada de verdade conta como acerto quando foi pareada. Páginas com
    erro entram apenas na lista de erros. O resultado não depende da ordem
    das páginas.

    Args:
        pages: Avaliações de página em qualquer ordem

    Returns:
        EvalSummary: Acurácias por categoria e geral

    Raises:
        EmptyCorpusException: Se nenhuma página puder ser avaliada
    """
    pages = sorted(pages, key=lambda p: p.page_id)
    evaluated = [page for page in pages if not page.failed]
    errors = [
        {"page_id": page.page_id, "code": page.error_code, "message": page.error or ""}
        for page in pages
        if page.failed
    ]
    if not evaluated:
        raise EmptyCorpusException(
            f"Nenhuma página avaliável ({len(errors)} com erro)"
        )

    totals: Counter = Counter()
    correct: Counter = Counter()
    confusion: Dict[str, Counter] = {c.value: Counter() for c in TableCategory}
    causes: Dict[str, Counter] = {}
    false_positives = 0

    for page in evaluated:
        false_positives += page.false_positives
        for outcome in page.outcomes:
            totals[outcome.category] += 1
            if outcome.correct:
                correct[outcome.category] += 1
                if outcome.detected_category is not None:
                    confusion[outcome.category.value][outcome.detected_category.value] += 1
            elif outcome.cause:
                causes.setdefault(outcome.category.value, Counter())[outcome.cause] += 1

    categories = {
        category: CategoryStats(total=totals[category], correct=correct[category])
        for category in TableCategory
    }
    overall = CategoryStats(total=sum(totals.values()), correct=sum(correct.values()))

    summary = EvalSummary(
        categories=categories,
        overall=overall,
        pages=len(evaluated),
        false_positives=false_positives,
        confusion={
            truth: {detected.value: counts[detected.value] for detected in TableCategory}
            for truth, counts in confusion.items()
        },
        failure_causes={cat: dict(sorted(c.items())) for cat, c in sorted(causes.items())},
        errors=errors,
    )
    logger.info(
        f"Avaliação: {summary.pages} páginas, acurácia geral {overall.accuracy_pct}%, "
        f"{false_positives} regiões falsas, {len(errors)} erros"
    )
    return summary


def _load_json(path: Path, loader):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return loader(json.load(handle))
    except (ValueError, KeyError, TypeError) as e:
        raise MalformedReportException(f"{path.name}: {e}") from e


def _page_id_from(path: Path, suffix: str) -> str:
    return path.name[: -len(suffix)]


def _missing_report_evaluation(truth: GroundTruth) -> PageEvaluation:
    exc = MissingReportException(f"Sem relatório para {truth.page_id}")
    logger.warning(f"{exc}; {len(truth.entries)} entradas contadas como falhas")
    return PageEvaluation(
        page_id=truth.page_id,
        outcomes=[
            TruthOutcome(category=entry.category, correct=False, cause=MISSING_REPORT_CAUSE)
            for entry in truth.entries
        ],
    )


def evaluate_directory(
    reports_dir: Union[str, Path],
    truth_dir: Union[str, Path],
    iou_min: float = DEFAULT_IOU_MIN,
) -> List[PageEvaluation]:
    """
    Avalia todos os relatórios de um diretório.

    Cada <page>.report.json é pareado com <page_id>.truth.json em truth_dir.
    Relatórios sem verdade viram avaliações com erro MissingTruth, e arquivos
    ilegíveis viram erro MalformedReport. Verdades sem relatório (página que o
    lote não conseguiu ler, por exemplo) contam todas as suas entradas como
    falhas.
    """
    evaluations = []
    reported = set()
    for report_path in sorted(Path(reports_dir).glob(f"*{REPORT_SUFFIX}")):
        page_id = _page_id_from(report_path, REPORT_SUFFIX)
        reported.add(page_id)
        try:
            report = _load_json(report_path, DetectionReport.from_dict)
            reported.add(report.page_id)
            path = truth_path(truth_dir, report.page_id)
            if not path.is_file():
                raise MissingTruthException(f"Sem verdade para {report.page_id} ({path})")
            truth = _load_json(path, GroundTruth.from_dict)
        except (MalformedReportException, MissingTruthException) as e:
            logger.warning(str(e))
            evaluations.append(PageEvaluation.from_error(page_id, e))
            continue
        evaluations.append(evaluate_page(report, truth, iou_min))

    for path in sorted(Path(truth_dir).glob(f"*{TRUTH_SUFFIX}")):
        if _page_id_from(path, TRUTH_SUFFIX) in reported:
            continue
        try:
            truth = _load_json(path, GroundTruth.from_dict)
        except MalformedReportException as e:
            logger.warning(str(e))
            evaluations.append(PageEvaluation.from_error(_page_id_from(path, TRUTH_SUFFIX), e))
            continue
        if truth.page_id not in reported:
            evaluations.append(_missing_report_evaluation(truth))
    return evaluations


# Contagens publicadas: (categoria, total, detectadas, causas das falhas)
TABLE1_COUNTS = (
    (TableCategory.A, 110, 91, ()),
    (
        TableCategory.B,
        135,
        91,
        (("header_footer", 5), ("word_space_assumption", 39)),
    ),
    (
        TableCategory.C,
        53,
        40,
        (("font_or_layout_variation", 7), ("header_footer", 6)),
    ),
)


def table1_fixture() -> List[PageEvaluation]:
    """
    Avaliações sintéticas que reproduzem as contagens publicadas.

    Uma tabela por documento; as falhas carregam a causa registrada quando ela
    é conhecida.
    """
    pages = []
    for category, total, detected, causes in TABLE1_COUNTS:
        labels = [cause for cause, count in causes for _ in range(count)]
        for i in range(total):
            page_id = f"table1_{category.value.lower()}_{i:03d}"
            if i < detected:
                outcome = TruthOutcome(
                    category=category, correct=True, detected_category=category, iou=1.0
                )
            else:
                miss = i - detected
                cause = labels[miss] if miss < len(labels) else None
                outcome = TruthOutcome(category=category, correct=False, cause=cause)
            pages.append(PageEvaluation(page_id=page_id, outcomes=[outcome]))
    return pages


def format_summary_table(summary: EvalSummary) -> str:
    """Monta a tabela de resultados em texto, uma linha por categoria."""
    header = ("Categoria", "Total", "Detectadas", "Acurácia (%)")
    rows = [
        (
            CATEGORY_LABELS[category],
            str(stats.total),
            str(stats.correct),
            stats.accuracy_pct or "-",
        )
        for category, stats in summary.categories.items()
    ]
    rows.append(
        (
            "Geral",
            str(summary.overall.total),
            str(summary.overall.correct),
            summary.overall.accuracy_pct or "-",
        )
    )
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]

    def render(row):
        first = row[0].ljust(widths[0])
        rest = [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        return "  ".join([first, *rest])

    lines = [render(header), "  ".join("-" * width for width in widths)]
    lines.extend(render(row) for row in rows)
    if summary.false_positives:
        lines.append(f"Regiões falsas: {summary.false_positives}")
    if summary.errors:
        lines.append(f"Páginas com erro: {len(summary.errors)}")
        lines.extend(f"  {err['page_id']}: {err['code']}" for err in summary.errors)
    return "\n".join(lines) + "\n"
