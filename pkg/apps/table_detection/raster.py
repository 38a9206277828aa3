"""
raster.py - Tipos de imagem, leitura/escrita, recorte e sobreposição para tablescout

Este módulo define as imagens matriciais usadas em todo o pipeline de detecção
de tabelas e a fronteira com os codecs de arquivo.

Funcionalidades:
- GrayImage (intensidades 0-255, 0 = tinta preta) e BinaryImage (1 = tinta)
- Leitura de PGM/PBM (P1/P2/P4/P5) e, pelo Pillow, PPM, PNG, TIFF e JPEG
- Escrita bit-exata em PGM/PBM binários (P5/P4)
- Recorte de regiões e desenho das regiões detectadas sobre a página
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import cv2
import numpy as np
from PIL import Image, UnidentifiedImageError

from .exceptions import (
    CorruptImageException,
    ImageNotFoundException,
    OutOfBoundsException,
    UnsupportedFormatException,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Assinaturas aceitas na fronteira de codecs
PNM_SIGNATURES = (b"P1", b"P2", b"P3", b"P4", b"P5", b"P6")
CODEC_SIGNATURES = (
    b"\x89PNG\r\n\x1a\n",
    b"II*\x00",
    b"MM\x00*",
    b"\xff\xd8\xff",
)

SUPPORTED_SUFFIXES = (
    ".pgm",
    ".pbm",
    ".pnm",
    ".ppm",
    ".png",
    ".tif",
    ".tiff",
    ".jpg",
    ".jpeg",
)


class TableCategory(str, Enum):
    """Categorias de tabela: A (grade), B (linhas paralelas), C (sem linhas)."""

    A = "A"
    B = "B"
    C = "C"


# Nível de cinza da borda desenhada por categoria
OVERLAY_LEVELS = {
    TableCategory.A: 0,
    TableCategory.B: 64,
    TableCategory.C: 128,
}


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Rect:
    """Retângulo em coordenadas de pixel (x, y inclusivos; w, h > 0)."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"Retângulo com dimensões inválidas: {self.w}x{self.h}")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"Retângulo com origem negativa: ({self.x}, {self.y})")

    @property
    def right(self) -> int:
        """Coluna seguinte à última coluna do retângulo."""
        return self.x + self.w

    @property
    def bottom(self) -> int:
        """Linha seguinte à última linha do retângulo."""
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def fits(self, width: int, height: int) -> bool:
        """Indica se o retângulo cabe numa imagem width x height."""
        return self.right <= width and self.bottom <= height

    def intersection_area(self, other: "Rect") -> int:
        dx = min(self.right, other.right) - max(self.x, other.x)
        dy = min(self.bottom, other.bottom) - max(self.y, other.y)
        return max(0, dx) * max(0, dy)

    def union(self, other: "Rect") -> "Rect":
        """Menor retângulo que contém os dois retângulos."""
        x = min(self.x, other.x)
        y = min(self.y, other.y)
        return Rect(x, y, max(self.right, other.right) - x, max(self.bottom, other.bottom) - y)

    def translate(self, dx: int = 0, dy: int = 0) -> "Rect":
        return Rect(self.x + dx, self.y + dy, self.w, self.h)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_dict(cls, data: dict) -> "Rect":
        return cls(x=int(data["x"]), y=int(data["y"]), w=int(data["w"]), h=int(data["h"]))


@dataclass(frozen=True, eq=False)
class GrayImage:
    """
    Página em tons de cinza, imutável.

    ``data`` é um array uint8 de forma (height, width), em ordem de linhas.
    """

    data: np.ndarray

    def __post_init__(self):
        array = np.asarray(self.data)
        if array.ndim != 2 or array.size == 0:
            raise ValueError(f"GrayImage exige array 2D não vazio, recebido {array.shape}")
        if array.dtype != np.uint8:
            if array.min() < 0 or array.max() > 255:
                raise ValueError("Intensidades fora do intervalo [0, 255]")
            array = array.astype(np.uint8)
        object.__setattr__(self, "data", _freeze(np.ascontiguousarray(array).copy()))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @classmethod
    def from_values(cls, width: int, height: int, values: Sequence[int]) -> "GrayImage":
        """Cria a imagem a partir de uma lista plana em ordem de linhas."""
        if len(values) != width * height:
            raise CorruptImageException(
                f"Esperados {width * height} pixels, recebidos {len(values)}"
            )
        return cls(np.asarray(values, dtype=np.int64).reshape(height, width))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "GrayImage":
        return cls(np.asarray([list(row) for row in rows], dtype=np.int64))

    @classmethod
    def blank(cls, width: int, height: int, level: int = 255) -> "GrayImage":
        return cls(np.full((height, width), level, dtype=np.uint8))

    def values(self) -> List[int]:
        """Intensidades como lista plana em ordem de linhas."""
        return self.data.ravel().tolist()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.data, other.data)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """
    Página binarizada, imutável.

    ``data`` é um array uint8 de forma (height, width) com 1 = tinta e 0 = fundo.
    """

    data: np.ndarray

    def __post_init__(self):
        array = np.asarray(self.data)
        if array.ndim != 2 or array.size == 0:
            raise ValueError(f"BinaryImage exige array 2D não vazio, recebido {array.shape}")
        if array.dtype == np.bool_:
            array = array.astype(np.uint8)
        elif not np.isin(array, (0, 1)).all():
            raise ValueError("BinaryImage aceita somente valores 0 e 1")
        object.__setattr__(
            self, "data", _freeze(np.ascontiguousarray(array, dtype=np.uint8).copy())
        )

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def ink_count(self) -> int:
        return int(np.count_nonzero(self.data))

    @classmethod
    def from_values(cls, width: int, height: int, values: Sequence[int]) -> "BinaryImage":
        if len(values) != width * height:
            raise CorruptImageException(
                f"Esperados {width * height} pixels, recebidos {len(values)}"
            )
        return cls(np.asarray(values, dtype=np.uint8).reshape(height, width))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "BinaryImage":
        return cls(np.asarray([list(row) for row in rows], dtype=np.uint8))

    @classmethod
    def blank(cls, width: int, height: int) -> "BinaryImage":
        return cls(np.zeros((height, width), dtype=np.uint8))

    def values(self) -> List[int]:
        return self.data.ravel().tolist()

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return np.array_equal(self.data, other.data)

    __hash__ = None


def _sniff(path: Path) -> bytes:
    if not path.is_file():
        raise ImageNotFoundException(f"Arquivo não encontrado: {path}")
    with open(path, "rb") as handle:
        head = handle.read(8)
    if head[:2] in PNM_SIGNATURES or any(head.startswith(sig) for sig in CODEC_SIGNATURES):
        return head
    raise UnsupportedFormatException(f"Formato de imagem não reconhecido: {path}")


def _open_decoded(path: Path) -> Image.Image:
    _sniff(path)
    try:
        with Image.open(path) as image:
            image.load()
            return image.copy()
    except UnidentifiedImageError as e:
        raise UnsupportedFormatException(f"Pillow não reconhece {path}: {e}") from e
    except (OSError, ValueError, SyntaxError, EOFError) as e:
        raise CorruptImageException(f"Imagem corrompida {path}: {e}") from e


def luminance(rgb: np.ndarray) -> np.ndarray:
    """
    Converte pixels RGB em luminância inteira arredondada.

    Args:
        rgb: Array (..., 3) com canais R, G, B

    Returns:
        np.ndarray: (299*R + 587*G + 114*B) / 1000, arredondado, em uint8
    """
    channels = rgb.astype(np.int64)
    weighted = 299 * channels[..., 0] + 587 * channels[..., 1] + 114 * channels[..., 2]
    return ((weighted + 500) // 1000).astype(np.uint8)


def load_gray(path: PathLike) -> GrayImage:
    """
    Carrega uma página como GrayImage.

    Args:
        path: Caminho do arquivo (PGM/PBM/PPM; PNG/TIFF/JPEG pelo Pillow)

    Returns:
        GrayImage: Intensidades exatamente como armazenadas; imagens coloridas
        passam pela fórmula de luminância
    """
    path = Path(path)
    image = _open_decoded(path)

    if image.mode == "1":
        data = np.where(np.asarray(image, dtype=bool), 255, 0).astype(np.uint8)
    elif image.mode == "L":
        data = np.asarray(image, dtype=np.uint8)
    elif image.mode in ("LA", "La"):
        data = np.asarray(image.getchannel("L"), dtype=np.uint8)
    elif image.mode in ("RGB", "RGBA", "P", "CMYK", "YCbCr"):
        data = luminance(np.asarray(image.convert("RGB"), dtype=np.uint8))
    else:
        raise UnsupportedFormatException(f"Modo de imagem não suportado: {image.mode}")

    if data.shape != (image.height, image.width):
        raise CorruptImageException(
            f"Dimensões inconsistentes em {path}: {data.shape} != {(image.height, image.width)}"
        )

    logger.debug(f"Imagem carregada {path} ({image.width}x{image.height}, modo {image.mode})")
    return GrayImage(data)


def load_binary(path: PathLike) -> BinaryImage:
    """Carrega um bitmap PBM (P1/P4) como BinaryImage, com 1 = tinta."""
    path = Path(path)
    image = _open_decoded(path)
    if image.mode != "1":
        raise UnsupportedFormatException(f"Esperado bitmap de 1 bit em {path}, modo {image.mode}")
    # No Pillow o modo "1" guarda branco como verdadeiro
    return BinaryImage(~np.asarray(image, dtype=bool))


def save_gray(image: GrayImage, path: PathLike) -> Path:
    """Grava a imagem como PGM binário (P5)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(image.data), mode="L").save(path, format="PPM")
    return path


def save_binary(image: BinaryImage, path: PathLike) -> Path:
    """Grava a imagem como PBM binário (P4), com tinta em preto."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    levels = np.where(image.data == 1, 0, 255).astype(np.uint8)
    bitmap = Image.fromarray(levels, mode="L").convert("1", dither=Image.Dither.NONE)
    bitmap.save(path, format="PPM")
    return path


def crop(image: BinaryImage, rect: Rect) -> BinaryImage:
    """
    Recorta a janela ``rect`` da imagem.

    Raises:
        OutOfBoundsException: Se o retângulo não couber na imagem
    """
    if not rect.fits(image.width, image.height):
        raise OutOfBoundsException(
            f"Retângulo {rect} fora da imagem {image.width}x{image.height}"
        )
    return BinaryImage(image.data[rect.y : rect.bottom, rect.x : rect.right])


def render_overlay(
    gray: GrayImage, regions: Sequence[Tuple[Rect, TableCategory]]
) -> GrayImage:
    """
    Desenha as bordas das regiões detectadas sobre uma cópia da página.

    Cada borda tem 2 pixels de espessura, por dentro do retângulo, no nível de
    cinza da categoria (A=0, B=64, C=128).

    Args:
        gray: Página original
        regions: Pares (retângulo, categoria)

    Returns:
        GrayImage: Cópia da página com as bordas gravadas
    """
    for rect, _ in regions:
        if not rect.fits(gray.width, gray.height):
            raise OutOfBoundsException(
                f"Retângulo {rect} fora da imagem {gray.width}x{gray.height}"
            )

    canvas = np.array(gray.data, copy=True)
    for rect, category in regions:
        level = OVERLAY_LEVELS[TableCategory(category)]
        for inset in (0, 1):
            x0, y0 = rect.x + inset, rect.y + inset
            x1, y1 = rect.right - 1 - inset, rect.bottom - 1 - inset
            if x0 > x1 or y0 > y1:
                continue
            cv2.rectangle(canvas, (x0, y0), (x1, y1), color=level, thickness=1)
    return GrayImage(canvas)
