"""
cli.py - Linha de comando do tablescout

Implementa os subcomandos expostos pelo manage.py:

- detect: detecta as tabelas de uma página e grava o relatório
- batch:  processa um diretório de páginas e grava o manifesto
- eval:   compara relatórios com a verdade e imprime a tabela de acurácia
- synth:  gera páginas sintéticas com verdade

Códigos de saída: 0 sucesso; 2 página sem linha padrão (relatório gravado);
1 erro de entrada, formato ou configuração.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping

from django.conf import settings
from django.core.management.base import CommandError
from pydantic import ValidationError
from tqdm import tqdm

from .batch import report_path, run_batch
from .config import RunConfig, build_run_config
from .detector import ReportStatus, run_pipeline
from .evaluator import aggregate, evaluate_directory, format_summary_table, table1_fixture
from .exceptions import ConfigException, NoTextLineException, TableScoutException
from .raster import crop, load_gray, render_overlay, save_binary, save_gray
from .synth import PageSpec, control_page_spec, desk_page_spec, generate, suite_specs

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_TEXT_LINE = 2

# (opção, tipo, ajuda); todos com padrão None para não sobrescrever a configuração
CONFIG_FLAGS = (
    ("--bin-window", int, "Lado da janela de binarização, ímpar (padrão 25)"),
    ("--bin-k", float, "Sensibilidade da binarização em (0, 1) (padrão 0.2)"),
    ("--bin-r", float, "Faixa dinâmica R da binarização (padrão 128)"),
    ("--border-margin-frac", float, "Fração de cada borda varrida por ruído (padrão 0.05)"),
    ("--dilate-w", int, "Largura do elemento de dilatação (padrão 2)"),
    ("--dilate-h", int, "Altura do elemento de dilatação (padrão 2)"),
    ("--row-noise-floor", int, "Mínimo de pixels para uma linha ter tinta (padrão 1)"),
    ("--min-blank-rows", int, "Linhas vazias que separam faixas (padrão 2)"),
    ("--min-gap-px", int, "Largura mínima de uma lacuna (padrão 2)"),
    ("--min-table-lines", int, "Mínimo de linhas de uma região B/C (padrão 3)"),
    ("--max-interior-text-lines", int, "Linhas de texto toleradas dentro da tabela (padrão 1)"),
    ("--header-footer-exclusion-frac", float, "Fração ignorada no topo e rodapé (padrão 0)"),
    ("--alpha-ws", float, "Coeficiente do espaço entre palavras em (1, 2) (padrão 1.5)"),
    ("--alpha-lh", float, "Coeficiente da altura de linha em (1, 1.5) (padrão 1.25)"),
    ("--iou-min", float, "IoU mínimo para acerto na avaliação (padrão 0.5)"),
)


def add_config_arguments(parser) -> None:
    """Adiciona as opções de configuração comuns a todos os subcomandos."""
    group = parser.add_argument_group("configuração")
    group.add_argument("--config", help="Arquivo JSON de configuração (saída de --dump-config)")
    group.add_argument(
        "--dump-config",
        action="store_true",
        help="Imprime a configuração efetiva em JSON e sai",
    )
    for flag, kind, help_text in CONFIG_FLAGS:
        group.add_argument(flag, type=kind, default=None, help=help_text)


def resolve_config(options: Mapping[str, Any]) -> RunConfig:
    """Monta e valida a RunConfig a partir das opções do comando."""
    try:
        return build_run_config(options, options.get("config")).validate_alphas()
    except TableScoutException as e:
        raise CommandError(str(e), returncode=EXIT_ERROR) from e


def _fail(exc: Exception) -> CommandError:
    logger.error(str(exc))
    return CommandError(str(exc), returncode=EXIT_ERROR)


def _maybe_dump(run_config: RunConfig, options: Mapping[str, Any], stdout) -> bool:
    if options.get("dump_config"):
        stdout.write(run_config.to_json(), ending="")
        return True
    return False


def cmd_detect(options: Mapping[str, Any], stdout) -> None:
    """
    Detecta as tabelas de uma página.

    Grava o relatório (padrão <dir da imagem>/<nome>.report.json) e, se
    pedido, a sobreposição e um recorte por região.

    Raises:
        CommandError: returncode 2 para página sem linha padrão, 1 para erros
    """
    run_config = resolve_config(options)
    if _maybe_dump(run_config, options, stdout):
        return

    image_path = Path(options["image"])
    page_id = options.get("page_id") or image_path.stem
    try:
        gray = load_gray(image_path)
        result = run_pipeline(gray, run_config, page_id=page_id)
        report = result.report

        out = Path(options.get("out") or report_path(image_path.parent, page_id))
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(report.to_json(), encoding="utf-8")

        if options.get("overlay"):
            overlay = render_overlay(gray, [(r.rect, r.category) for r in report.regions])
            save_gray(overlay, options["overlay"])

        if options.get("crops"):
            crops_dir = Path(options["crops"])
            for i, region in enumerate(report.regions):
                name = f"{page_id}_region_{i}_{region.category.value}.pbm"
                save_binary(crop(result.binary, region.rect), crops_dir / name)
    except TableScoutException as e:
        raise _fail(e) from e
    except OSError as e:
        raise _fail(e) from e

    stdout.write(
        f"{page_id}: {len(report.regions)} regiões "
        f"[{' '.join(r.category.value for r in report.regions)}] -> {out}"
    )
    if report.status is ReportStatus.NO_TEXT_LINE:
        raise CommandError(
            f"{NoTextLineException.code}: página {page_id} sem linha padrão; relatório em {out}",
            returncode=EXIT_NO_TEXT_LINE,
        )


def cmd_batch(options: Mapping[str, Any], stdout) -> None:
    """Processa um diretório de páginas e grava relatórios e manifesto."""
    run_config = resolve_config(options)
    if _maybe_dump(run_config, options, stdout):
        return

    directory = Path(options["directory"])
    if not directory.is_dir():
        raise _fail(NotADirectoryError(f"Diretório não encontrado: {directory}"))
    out_dir = Path(options.get("out_dir") or directory)
    jobs = options.get("jobs")
    if jobs is None:
        jobs = settings.TABLESCOUT_JOBS
    if jobs < 1:
        raise _fail(ConfigException(f"--jobs deve ser >= 1, recebido {jobs}"))

    try:
        manifest = run_batch(
            directory,
            out_dir,
            run_config,
            jobs=jobs,
            use_celery=bool(options.get("celery")),
            progress=not options.get("no_progress"),
        )
    except OSError as e:
        raise _fail(e) from e

    stdout.write(
        f"{len(manifest.pages)} páginas, {manifest.failures} falhas, "
        f"manifesto em {out_dir / 'manifest.json'}"
    )


def cmd_eval(options: Mapping[str, Any], stdout) -> None:
    """Avalia relatórios contra a verdade e imprime a tabela de acurácia."""
    run_config = resolve_config(options)
    if _maybe_dump(run_config, options, stdout):
        return

    fixture = options.get("fixture")
    try:
        if fixture == "table1":
            pages = table1_fixture()
        elif fixture:
            raise ConfigException(f"Fixture desconhecida: {fixture}")
        else:
            reports_dir = options.get("reports_dir")
            if not reports_dir:
                raise ConfigException("Informe o diretório de relatórios ou --fixture")
            truth_dir = options.get("truth_dir") or reports_dir
            pages = evaluate_directory(reports_dir, truth_dir, run_config.iou_min)
        summary = aggregate(pages)

        if options.get("out"):
            out = Path(options["out"])
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(summary.to_json(), encoding="utf-8")
    except TableScoutException as e:
        raise _fail(e) from e
    except (OSError, json.JSONDecodeError, KeyError) as e:
        raise _fail(e) from e

    stdout.write(format_summary_table(summary), ending="")


def _synth_jobs(options: Mapping[str, Any]):
    if options.get("suite"):
        return suite_specs(options["suite"])
    if options.get("spec"):
        spec_path = Path(options["spec"])
        spec = PageSpec.model_validate_json(spec_path.read_text(encoding="utf-8"))
        return [(options.get("name") or spec_path.stem, spec)]

    kind = options.get("type")
    if not kind:
        raise ConfigException("Informe --spec, --type ou --suite")
    seed = options.get("seed") or 0
    if kind == "control":
        spec = control_page_spec(seed)
    else:
        spec = desk_page_spec(kind, seed)
    return [(options.get("name") or f"synth_{kind.lower()}_{seed}", spec)]


def cmd_synth(options: Mapping[str, Any], stdout) -> None:
    """Gera páginas sintéticas (<nome>.pgm) e suas verdades (<nome>.truth.json)."""
    out_dir = Path(options.get("out_dir") or ".")
    try:
        jobs = _synth_jobs(options)
        written: Dict[str, Path] = {}
        for name, spec in tqdm(jobs, desc="Páginas", unit="pág", disable=len(jobs) < 2):
            gray, truth = generate(spec, page_id=name)
            written[name] = save_gray(gray, out_dir / f"{name}.pgm")
            truth.save(out_dir)
    except ValidationError as e:
        raise _fail(ConfigException(str(e))) from e
    except TableScoutException as e:
        raise _fail(e) from e
    except (OSError, ValueError) as e:
        raise _fail(e) from e

    stdout.write(f"{len(written)} páginas sintéticas em {out_dir}")
