"""
batch.py - Processamento em lote de páginas para tablescout

Processa todas as imagens suportadas de um diretório, grava um relatório por
página e um manifesto do corpus. Falhas de página ficam registradas no
manifesto e não interrompem o lote.

Modos de execução:
- sequencial (jobs=1)
- pool de processos (jobs > 1)
- tarefas Celery (use_celery=True), uma por página
"""

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from tqdm import tqdm

from .config import RunConfig
from .detector import REPORT_SCHEMA, detect
from .exceptions import TableScoutException
from .raster import SUPPORTED_SUFFIXES, load_gray

logger = logging.getLogger(__name__)

REPORT_SUFFIX = ".report.json"
MANIFEST_NAME = "manifest.json"


@dataclass
class PageOutcome:
    """Linha do manifesto referente a uma página."""

    page_id: str
    source: str
    status: str
    report: Optional[str] = None
    regions: int = 0
    error_code: Optional[str] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error_code is not None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PageOutcome":
        return cls(**data)

    @classmethod
    def failure(cls, source: Path, exc: BaseException) -> "PageOutcome":
        return cls(
            page_id=source.stem,
            source=source.name,
            status="failed",
            error_code=getattr(exc, "code", type(exc).__name__),
            error=str(exc),
        )


@dataclass
class BatchManifest:
    """Manifesto do corpus processado."""

    config_fingerprint: str
    pages: List[PageOutcome] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def failures(self) -> int:
        return sum(1 for page in self.pages if page.failed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": REPORT_SCHEMA,
            "config_fingerprint": self.config_fingerprint,
            "pages": [page.to_dict() for page in self.pages],
            "failures": self.failures,
            "wall_time_s": round(self.wall_time_s, 3),
        }

    def save(self, out_dir: Union[str, Path]) -> Path:
        path = Path(out_dir) / MANIFEST_NAME
        path.write_text(
            json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
        return path


def list_pages(directory: Union[str, Path]) -> List[Path]:
    """Imagens suportadas do diretório, em ordem lexicográfica de nome."""
    return sorted(
        (
            path
            for path in Path(directory).iterdir()
            if path.is_file() and path.suffix.lower() in SUPPORTED_SUFFIXES
        ),
        key=lambda path: path.name,
    )


def report_path(out_dir: Union[str, Path], page_id: str) -> Path:
    return Path(out_dir) / f"{page_id}{REPORT_SUFFIX}"


def process_page(source: str, out_dir: str, config_data: Dict[str, Any]) -> Dict[str, Any]:
    """
    Detecta as tabelas de uma página e grava seu relatório.

    Recebe e devolve apenas tipos serializáveis, para rodar em processos
    filhos e em workers Celery. Erros de leitura ou detecção viram uma linha
    de falha; erros ao gravar o relatório são propagados.

    Args:
        source: Caminho da imagem
        out_dir: Diretório dos relatórios
        config_data: RunConfig serializada (model_dump)

    Returns:
        Dict[str, Any]: PageOutcome serializado
    """
    path = Path(source)
    run_config = RunConfig.model_validate(config_data)
    try:
        report = detect(load_gray(path), run_config, page_id=path.stem)
    except TableScoutException as e:
        logger.warning(f"Falha na página {path.name}: {e}")
        return PageOutcome.failure(path, e).to_dict()
    except (ValueError, MemoryError) as e:
        logger.exception(f"Erro inesperado na página {path.name}")
        return PageOutcome.failure(path, e).to_dict()

    target = report_path(out_dir, report.page_id)
    target.write_text(report.to_json(), encoding="utf-8")
    return PageOutcome(
        page_id=report.page_id,
        source=path.name,
        status=report.status.value,
        report=target.name,
        regions=len(report.regions),
    ).to_dict()


def _run_sequential(pages, out_dir, config_data, bar) -> List[Dict[str, Any]]:
    results = []
    for path in pages:
        try:
            results.append(process_page(str(path), str(out_dir), config_data))
        except OSError as e:
            logger.error(f"Falha ao gravar o relatório de {path.name}: {e}")
            results.append(PageOutcome.failure(path, e).to_dict())
        bar.update(1)
    return results


def _run_pool(pages, out_dir, config_data, jobs, bar) -> List[Dict[str, Any]]:
    results = []
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        futures = {
            executor.submit(process_page, str(path), str(out_dir), config_data): path
            for path in pages
        }
        for future in as_completed(futures):
            path = futures[future]
            try:
                results.append(future.result())
            except Exception as e:
                logger.error(f"Falha no worker para {path.name}: {e}")
                results.append(PageOutcome.failure(path, e).to_dict())
            bar.update(1)
    return results


def _run_celery(pages, out_dir, config_data, bar) -> List[Dict[str, Any]]:
    from celery import group

    from .tasks import detect_page_task

    job = group(
        detect_page_task.s(str(path), str(out_dir), config_data) for path in pages
    )
    results = []
    for path, result in zip(pages, job.apply_async().results):
        try:
            results.append(result.get(propagate=True))
        except Exception as e:
            logger.error(f"Falha na tarefa para {path.name}: {e}")
            results.append(PageOutcome.failure(path, e).to_dict())
        bar.update(1)
    return results


def run_batch(
    directory: Union[str, Path],
    out_dir: Union[str, Path],
    run_config: RunConfig,
    jobs: int = 1,
    use_celery: bool = False,
    progress: bool = True,
) -> BatchManifest:
    """
    Processa um diretório de páginas.

    A ordem das páginas no manifesto é lexicográfica, qualquer que seja a
    ordem de processamento, e os relatórios são idênticos aos da execução
    sequencial.

    Args:
        directory: Diretório de entrada
        out_dir: Diretório dos relatórios e do manifesto
        run_config: Configuração da execução
        jobs: Número de processos (1 = sequencial)
        use_celery: Despacha uma tarefa Celery por página
        progress: Mostra barra de progresso

    Returns:
        BatchManifest: Manifesto já gravado em out_dir
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pages = list_pages(directory)
    config_data = run_config.model_dump(mode="json")
    logger.info(
        f"Lote {directory}: {len(pages)} páginas, jobs={jobs}, celery={use_celery}"
    )

    started = time.perf_counter()
    with tqdm(total=len(pages), desc="Páginas", unit="pág", disable=not progress) as bar:
        if use_celery and pages:
            results = _run_celery(pages, out_dir, config_data, bar)
        elif jobs > 1 and len(pages) > 1:
            results = _run_pool(pages, out_dir, config_data, jobs, bar)
        else:
            results = _run_sequential(pages, out_dir, config_data, bar)

    outcomes = sorted((PageOutcome.from_dict(r) for r in results), key=lambda p: p.source)
    manifest = BatchManifest(
        config_fingerprint=run_config.fingerprint,
        pages=outcomes,
        wall_time_s=time.perf_counter() - started,
    )
    manifest.save(out_dir)
    logger.info(
        f"Lote concluído: {len(outcomes)} páginas, {manifest.failures} falhas, "
        f"{manifest.wall_time_s:.2f}s"
    )
    return manifest
