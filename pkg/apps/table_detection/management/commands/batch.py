from django.core.management.base import BaseCommand

from apps.table_detection.cli import add_config_arguments, cmd_batch


class Command(BaseCommand):
    help = "Processa um diretório de páginas e grava relatórios e manifest.json"
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("directory", help="Diretório com as imagens")
        parser.add_argument("--out-dir", help="Diretório de saída (padrão: o de entrada)")
        parser.add_argument(
            "--jobs", type=int, default=None, help="Processos paralelos (padrão TABLESCOUT_JOBS)"
        )
        parser.add_argument(
            "--celery", action="store_true", help="Despacha uma tarefa Celery por página"
        )
        parser.add_argument(
            "--no-progress", action="store_true", help="Não mostra a barra de progresso"
        )
        add_config_arguments(parser)

    def handle(self, *args, **options):
        cmd_batch(options, self.stdout)
