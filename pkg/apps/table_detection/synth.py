"""
synth.py - Gerador determinístico de páginas digitalizadas sintéticas

Produz páginas em tons de cinza com verdade de referência exata para testes de
corpus. Palavras são retângulos de tinta (com pequenos cortes entre glifos);
tabelas são desenhadas nas três categorias:

- TableA: grade completa (ou parcial, sem as bordas verticais externas)
- TableB: réguas no topo, abaixo do cabeçalho e na base
- TableC: colunas alinhadas separadas por espaço largo, sem réguas
- RunningHeader: cabeçalho corrido "título ... número da página" (não é tabela)

O gerador pseudoaleatório é um xorshift64* com semente misturada pela constante
da razão áurea, definido abaixo bit a bit para que as páginas sejam idênticas
em qualquer plataforma.
"""

import logging
from dataclasses import dataclass, field
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from PIL import Image, ImageDraw
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .evaluator import GroundTruth, TruthEntry
from .exceptions import SpecOverflowException
from .raster import GrayImage, Rect, TableCategory

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

INK = 0
PAPER = 255

Band = Tuple[int, int]
Range = Tuple[int, int]


class XorShift64Star:
    """
    Gerador xorshift64* (Marsaglia/Vigna).

    estado_0 = (semente mod 2^64) XOR 0x9E3779B97F4A7C15 (ou a constante, se der 0)
    passo:   x ^= x >> 12; x ^= x << 25; x ^= x >> 27 (mod 2^64)
    saída:   x * 0x2545F4914F6CDD1D mod 2^64
    inteiro uniforme em [lo, hi]: lo + saída mod (hi - lo + 1)
    """

    MULTIPLIER = 0x2545F4914F6CDD1D

    def __init__(self, seed: int):
        state = (seed & MASK64) ^ GOLDEN_GAMMA
        self.state = state or GOLDEN_GAMMA

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * self.MULTIPLIER) & MASK64

    def uniform(self, lo: int, hi: int) -> int:
        """Inteiro em [lo, hi], extremos inclusivos."""
        if hi < lo:
            raise ValueError(f"Intervalo vazio [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def pick(self, bounds: Range) -> int:
        return self.uniform(bounds[0], bounds[1])


class Paragraph(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["paragraph"] = "paragraph"
    n_lines: int = Field(ge=1)


class TableA(BaseModel):
    """Tabela com grade; partial=True omite as bordas verticais externas."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["table_a"] = "table_a"
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    rule_px: int = Field(1, ge=1)
    partial: bool = False

    @model_validator(mode="after")
    def validar_grade_parcial(self):
        # Sem divisórias internas as faixas de preenchimento ficariam vazias
        if self.partial and self.cols < 2:
            raise ValueError("Grade parcial exige pelo menos 2 colunas")
        return self


class TableB(BaseModel):
    """Tabela com réguas paralelas; rows inclui a linha de cabeçalho."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["table_b"] = "table_b"
    rows: int = Field(ge=2)
    cols: int = Field(ge=2)
    rule_px: int = Field(1, ge=1)
    col_gap_px: Optional[int] = Field(None, ge=1)


class TableC(BaseModel):
    """Tabela sem réguas; col_gap_px padrão é 3 * maior espaço entre palavras."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["table_c"] = "table_c"
    rows: int = Field(ge=1)
    cols: int = Field(ge=2)
    col_gap_px: Optional[int] = Field(None, ge=1)


class RunningHeader(BaseModel):
    """Linhas "título ... número da página" com um espaço largo no meio."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["running_header"] = "running_header"
    n_lines: int = Field(1, ge=1)


Block = Annotated[
    Union[Paragraph, TableA, TableB, TableC, RunningHeader],
    Field(discriminator="kind"),
]


class NoiseSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    salt_pepper_rate: float = Field(0.0, ge=0.0, le=0.5)
    border_smear: bool = False


class PageSpec(BaseModel):
    """Descrição completa de uma página sintética."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = 0
    page: Tuple[int, int] = (850, 1100)
    margin: int = Field(60, ge=0)
    text_line_height: int = Field(12, ge=2)
    line_spacing: int = Field(12, ge=2)
    block_spacing: int = Field(24, ge=2)
    word_len_range: Range = (20, 60)
    word_gap_range: Range = (7, 9)
    char_gap_range: Range = (1, 2)
    glyph_width_range: Range = (5, 9)
    cell_padding: int = Field(6, ge=1)
    # Distância entre uma régua e a linha de texto vizinha
    rule_gap: int = Field(6, ge=2)
    blocks: List[Block] = Field(default_factory=list)
    noise: NoiseSpec = Field(default_factory=NoiseSpec)

    @model_validator(mode="after")
    def validar_geometria(self):
        width, height = self.page
        if width <= 2 * self.margin or height <= 2 * self.margin:
            raise ValueError(f"Margem {self.margin} não cabe na página {width}x{height}")
        for name in ("word_len_range", "word_gap_range", "char_gap_range", "glyph_width_range"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise ValueError(f"{name} inválido: ({lo}, {hi})")

        min_height = 3 * self.text_line_height
        for block in self.blocks:
            if isinstance(block, (TableA, TableB, TableC)):
                table_height = self.table_height(block)
                if table_height < min_height:
                    raise ValueError(
                        f"{block.kind} com altura {table_height} < {min_height} "
                        f"(3 alturas de linha)"
                    )
            if isinstance(block, (TableB, TableC)) and block.col_gap_px is not None:
                if block.col_gap_px < 2 * self.word_gap_max:
                    raise ValueError(
                        f"col_gap_px={block.col_gap_px} não supera o limiar de espaço "
                        f"esperado (mínimo {2 * self.word_gap_max})"
                    )
        return self

    @property
    def word_gap_max(self) -> int:
        return self.word_gap_range[1]

    def col_gap(self, block: Union[TableB, TableC]) -> int:
        return block.col_gap_px if block.col_gap_px is not None else 3 * self.word_gap_max

    def table_height(self, block: Union[TableA, TableB, TableC]) -> int:
        tlh = self.text_line_height
        if isinstance(block, TableA):
            return block.rows * (tlh + 2 * self.cell_padding) + (block.rows + 1) * block.rule_px
        if isinstance(block, TableB):
            data_rows = block.rows - 1
            return (
                3 * block.rule_px
                + 4 * self.rule_gap
                + block.rows * tlh
                + (data_rows - 1) * self.line_spacing
            )
        return block.rows * tlh + (block.rows - 1) * self.line_spacing


class PageCanvas:
    """
    Página em branco onde blocos são desenhados.

    Todo desenho precisa ficar dentro da área útil (página menos margens).
    """

    def __init__(self, spec: PageSpec):
        self.spec = spec
        self.width, self.height = spec.page
        self.left = spec.margin
        self.top = spec.margin
        self.right = self.width - spec.margin
        self.bottom = self.height - spec.margin
        self.image = Image.new("L", (self.width, self.height), PAPER)
        self.draw = ImageDraw.Draw(self.image)
        self.bands: List[Band] = []

    @property
    def usable_width(self) -> int:
        return self.right - self.left

    def _check(self, x0: int, y0: int, x1: int, y1: int) -> None:
        if x0 < self.left or y0 < self.top or x1 >= self.right or y1 >= self.bottom:
            raise SpecOverflowException(
                f"Desenho ({x0}, {y0})-({x1}, {y1}) fora da área útil "
                f"({self.left}, {self.top})-({self.right - 1}, {self.bottom - 1})"
            )

    def fill(self, x0: int, y0: int, x1: int, y1: int, level: int = INK) -> None:
        """Preenche o retângulo de cantos inclusivos (x0, y0)-(x1, y1)."""
        self._check(x0, y0, x1, y1)
        self.draw.rectangle([x0, y0, x1, y1], fill=level)

    def word(self, x: int, y: int, length: int, rng: XorShift64Star) -> None:
        """Desenha uma palavra de ``length`` pixels com cortes entre glifos."""
        tlh = self.spec.text_line_height
        self.fill(x, y, x + length - 1, y + tlh - 1)
        min_glyph = self.spec.glyph_width_range[0]
        cut = x + rng.pick(self.spec.glyph_width_range)
        while True:
            gap = rng.pick(self.spec.char_gap_range)
            if cut + gap + min_glyph > x + length:
                break
            self.fill(cut, y, cut + gap - 1, y + tlh - 1, level=PAPER)
            cut += gap + rng.pick(self.spec.glyph_width_range)

    def words(self, x: int, y: int, lengths: List[int], gaps: List[int], rng) -> int:
        """Desenha palavras em sequência e devolve a coluna após a última."""
        for i, length in enumerate(lengths):
            self.word(x, y, length, rng)
            x += length
            if i < len(gaps):
                x += gaps[i]
        return x

    def hrule(self, x0: int, x1: int, y: int, thickness: int) -> None:
        self.fill(x0, y, x1, y + thickness - 1)

    def vrule(self, x: int, y0: int, y1: int, thickness: int) -> None:
        self.fill(x, y0, x + thickness - 1, y1)

    def record_band(self, y_top: int, y_bottom: int) -> None:
        self.bands.append((y_top, y_bottom))

    def to_gray(self) -> GrayImage:
        return GrayImage(np.asarray(self.image, dtype=np.uint8))


@dataclass
class _Cells:
    """Conteúdo das células: comprimentos e espaços de cada palavra."""

    words: List[List[Tuple[List[int], List[int]]]]
    col_widths: List[int]

    def cell(self, r: int, c: int) -> Tuple[List[int], List[int]]:
        return self.words[r][c]


def _layout_cells(spec: PageSpec, rows: int, cols: int, rng: XorShift64Star) -> _Cells:
    words = []
    widths = [0] * cols
    for _ in range(rows):
        row = []
        for c in range(cols):
            count = rng.uniform(1, 2)
            lengths = [rng.pick(spec.word_len_range) for _ in range(count)]
            gaps = [rng.pick(spec.word_gap_range) for _ in range(count - 1)]
            widths[c] = max(widths[c], sum(lengths) + sum(gaps))
            row.append((lengths, gaps))
        words.append(row)
    return _Cells(words=words, col_widths=widths)


def _draw_paragraph(canvas: PageCanvas, block: Paragraph, y: int, rng) -> int:
    spec = canvas.spec
    tlh = spec.text_line_height
    for i in range(block.n_lines):
        if i:
            y += spec.line_spacing
        x = canvas.left
        lengths, gaps = [], []
        while True:
            length = rng.pick(spec.word_len_range)
            gap = rng.pick(spec.word_gap_range) if lengths else 0
            if x + gap + length > canvas.right:
                break
            if lengths:
                gaps.append(gap)
            lengths.append(length)
            x += gap + length
        if len(lengths) < 2:
            raise SpecOverflowException("Largura útil insuficiente para uma linha de texto")
        canvas.words(canvas.left, y, lengths, gaps, rng)
        canvas.record_band(y, y + tlh - 1)
        y += tlh
    return y


def _draw_running_header(canvas: PageCanvas, block: RunningHeader, y: int, rng) -> int:
    spec = canvas.spec
    tlh = spec.text_line_height
    for i in range(block.n_lines):
        if i:
            y += spec.line_spacing
        count = rng.uniform(2, 4)
        lengths = [rng.pick(spec.word_len_range) for _ in range(count)]
        gaps = [rng.pick(spec.word_gap_range) for _ in range(count - 1)]
        canvas.words(canvas.left, y, lengths, gaps, rng)
        number = rng.uniform(10, 24)
        canvas.word(canvas.right - number, y, number, rng)
        canvas.record_band(y, y + tlh - 1)
        y += tlh
    return y


def _draw_cell_row(canvas, cells: _Cells, r: int, xs: List[int], y: int, rng) -> None:
    for c, x in enumerate(xs):
        lengths, gaps = cells.cell(r, c)
        canvas.words(x, y, lengths, gaps, rng)


def _column_starts(x0: int, widths: List[int], gap: int) -> List[int]:
    starts, x = [], x0
    for width in widths:
        starts.append(x)
        x += width + gap
    return starts


def _check_width(canvas: PageCanvas, width: int, kind: str) -> None:
    if width > canvas.usable_width:
        raise SpecOverflowException(
            f"{kind} com largura {width} excede a largura útil {canvas.usable_width}"
        )


def _draw_table_c(canvas: PageCanvas, block: TableC, y: int, rng) -> Tuple[int, TruthEntry]:
    spec = canvas.spec
    tlh = spec.text_line_height
    cells = _layout_cells(spec, block.rows, block.cols, rng)
    gap = spec.col_gap(block)
    width = sum(cells.col_widths) + gap * (block.cols - 1)
    _check_width(canvas, width, "TableC")

    x0, y0 = canvas.left, y
    xs = _column_starts(x0, cells.col_widths, gap)
    for r in range(block.rows):
        if r:
            y += spec.line_spacing
        _draw_cell_row(canvas, cells, r, xs, y, rng)
        canvas.record_band(y, y + tlh - 1)
        y += tlh
    entry = TruthEntry(rect=Rect(x0, y0, width, y - y0), category=TableCategory.C)
    return y, entry


def _draw_table_b(canvas: PageCanvas, block: TableB, y: int, rng) -> Tuple[int, TruthEntry]:
    spec = canvas.spec
    tlh = spec.text_line_height
    cells = _layout_cells(spec, block.rows, block.cols, rng)
    gap = spec.col_gap(block)
    width = sum(cells.col_widths) + gap * (block.cols - 1)
    _check_width(canvas, width, "TableB")

    x0, y0 = canvas.left, y
    x1 = x0 + width - 1
    xs = _column_starts(x0, cells.col_widths, gap)

    def rule(y_rule):
        canvas.hrule(x0, x1, y_rule, block.rule_px)
        canvas.record_band(y_rule, y_rule + block.rule_px - 1)
        return y_rule + block.rule_px + spec.rule_gap

    y = rule(y)
    _draw_cell_row(canvas, cells, 0, xs, y, rng)
    canvas.record_band(y, y + tlh - 1)
    y = rule(y + tlh + spec.rule_gap)
    for r in range(1, block.rows):
        if r > 1:
            y += spec.line_spacing
        _draw_cell_row(canvas, cells, r, xs, y, rng)
        canvas.record_band(y, y + tlh - 1)
        y += tlh
    y += spec.rule_gap
    canvas.hrule(x0, x1, y, block.rule_px)
    canvas.record_band(y, y + block.rule_px - 1)
    y += block.rule_px
    entry = TruthEntry(rect=Rect(x0, y0, width, y - y0), category=TableCategory.B)
    return y, entry


def _draw_table_a(canvas: PageCanvas, block: TableA, y: int, rng) -> Tuple[int, TruthEntry]:
    spec = canvas.spec
    tlh = spec.text_line_height
    pad, rule_px = spec.cell_padding, block.rule_px
    cells = _layout_cells(spec, block.rows, block.cols, rng)
    width = sum(w + 2 * pad for w in cells.col_widths) + (block.cols + 1) * rule_px
    _check_width(canvas, width, "TableA")

    height = spec.table_height(block)
    x0, y0 = canvas.left, y
    x1, y1 = x0 + width - 1, y0 + height - 1

    # Réguas verticais: bordas externas (exceto em grade parcial) e divisórias
    x = x0
    xs = []
    for c in range(block.cols + 1):
        outer = c in (0, block.cols)
        if not (outer and block.partial):
            canvas.vrule(x, y0, y1, rule_px)
        if c < block.cols:
            xs.append(x + rule_px + pad)
            x += rule_px + 2 * pad + cells.col_widths[c]

    row_y = y0
    for r in range(block.rows + 1):
        canvas.hrule(x0, x1, row_y, rule_px)
        if r < block.rows:
            _draw_cell_row(canvas, cells, r, xs, row_y + rule_px + pad, rng)
            row_y += rule_px + 2 * pad + tlh

    canvas.record_band(y0, y1)
    entry = TruthEntry(rect=Rect(x0, y0, width, height), category=TableCategory.A)
    return y1 + 1, entry


def _apply_noise(canvas: PageCanvas, noise: NoiseSpec, rng: XorShift64Star) -> None:
    if noise.border_smear:
        # Faixa escura e irregular colada à borda esquerda
        max_width = max(1, min(canvas.left, canvas.width // 40))
        for y in range(canvas.height):
            extent = rng.uniform(1, max_width)
            canvas.draw.line([(0, y), (extent - 1, y)], fill=INK)
    if noise.salt_pepper_rate > 0:
        flips = int(round(noise.salt_pepper_rate * canvas.width * canvas.height))
        for _ in range(flips):
            x = rng.uniform(0, canvas.width - 1)
            y = rng.uniform(0, canvas.height - 1)
            canvas.image.putpixel((x, y), INK if rng.uniform(0, 1) else PAPER)


@dataclass
class SyntheticPage:
    """Página gerada com sua verdade e as faixas de linha desenhadas."""

    gray: GrayImage
    truth: GroundTruth
    bands: List[Band] = field(default_factory=list)


def render(spec: PageSpec, page_id: str = "synth") -> SyntheticPage:
    """
    Desenha a página descrita por ``spec``.

    Raises:
        SpecOverflowException: Se algum bloco ultrapassar a área útil
    """
    rng = XorShift64Star(spec.seed)
    canvas = PageCanvas(spec)
    entries: List[TruthEntry] = []

    y = canvas.top
    for i, block in enumerate(spec.blocks):
        if i:
            y += spec.block_spacing
        if isinstance(block, Paragraph):
            y = _draw_paragraph(canvas, block, y, rng)
        elif isinstance(block, RunningHeader):
            y = _draw_running_header(canvas, block, y, rng)
        else:
            draw = {
                "table_a": _draw_table_a,
                "table_b": _draw_table_b,
                "table_c": _draw_table_c,
            }[block.kind]
            y, entry = draw(canvas, block, y, rng)
            entries.append(entry)

    _apply_noise(canvas, spec.noise, rng)
    page = SyntheticPage(
        gray=canvas.to_gray(),
        truth=GroundTruth(page_id=page_id, entries=entries),
        bands=list(canvas.bands),
    )
    logger.debug(
        f"Página sintética {page_id}: {len(spec.blocks)} blocos, "
        f"{len(entries)} tabelas, {len(page.bands)} faixas"
    )
    return page


def generate(spec: PageSpec, page_id: str = "synth") -> Tuple[GrayImage, GroundTruth]:
    """Gera a página e sua verdade; mesma semente e spec geram os mesmos bytes."""
    page = render(spec, page_id)
    return page.gray, page.truth


DESK_CATEGORIES = (TableCategory.A, TableCategory.B, TableCategory.C)
DESK_PAGES_PER_CATEGORY = 30
CONTROL_PAGES = 10


def desk_page_spec(category: Union[TableCategory, str], seed: int) -> PageSpec:
    """Página de mesa: parágrafo, uma tabela da categoria e outro parágrafo."""
    category = TableCategory(category)
    rng = XorShift64Star(seed)
    before = rng.uniform(3, 6)
    rows = rng.uniform(3, 6)
    cols = rng.uniform(2, 4)
    after = rng.uniform(3, 6)
    if category is TableCategory.A:
        table = TableA(
            rows=rows, cols=cols, rule_px=rng.uniform(1, 2), partial=rng.uniform(0, 3) == 0
        )
    elif category is TableCategory.B:
        table = TableB(rows=rows, cols=cols, rule_px=rng.uniform(1, 2))
    else:
        table = TableC(rows=rows, cols=cols)
    return PageSpec(
        seed=seed,
        blocks=[Paragraph(n_lines=before), table, Paragraph(n_lines=after)],
    )


def control_page_spec(seed: int) -> PageSpec:
    """Página de controle, só com parágrafos."""
    rng = XorShift64Star(seed)
    blocks = [Paragraph(n_lines=rng.uniform(3, 6)) for _ in range(rng.uniform(2, 4))]
    return PageSpec(seed=seed, blocks=blocks)


def suite_specs(name: str) -> List[Tuple[str, PageSpec]]:
    """
    Páginas de uma suíte fixa.

    Args:
        name: "desk" (30 páginas por categoria A/B/C) ou "control"
            (10 páginas só de texto)

    Returns:
        List[Tuple[str, PageSpec]]: Pares (nome da página, spec) em ordem
    """
    if name == "desk":
        return [
            (
                f"desk_{category.value.lower()}_{i:02d}",
                desk_page_spec(category, 1000 * (k + 1) + i),
            )
            for k, category in enumerate(DESK_CATEGORIES)
            for i in range(DESK_PAGES_PER_CATEGORY)
        ]
    if name == "control":
        return [(f"control_{i:02d}", control_page_spec(9000 + i)) for i in range(CONTROL_PAGES)]
    raise ValueError(f"Suíte desconhecida: {name}")
