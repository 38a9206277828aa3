"""
tasks.py - Tarefas Celery do tablescout
"""

from celery import shared_task
from celery.utils.log import get_task_logger

from .batch import process_page

celery_logger = get_task_logger(__name__)


@shared_task(bind=True, max_retries=3)
def detect_page_task(self, source, out_dir, config_data):
    """
    Tarefa Celery que processa uma página do lote.

    Args:
        source: Caminho da imagem
        out_dir: Diretório dos relatórios
        config_data: RunConfig serializada

    Returns:
        dict: PageOutcome serializado
    """
    celery_logger.info(f"Processando página {source}")
    try:
        return process_page(source, out_dir, config_data)
    except OSError as e:
        # Falha ao gravar o relatório; tenta de novo
        celery_logger.error(f"Erro de E/S na página {source}: {e}")
        raise self.retry(exc=e, countdown=5)
