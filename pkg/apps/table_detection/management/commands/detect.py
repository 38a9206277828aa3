from django.core.management.base import BaseCommand

from apps.table_detection.cli import add_config_arguments, cmd_detect


class Command(BaseCommand):
    help = "Detecta as tabelas de uma página digitalizada e grava o relatório JSON"
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("image", help="Imagem da página (PGM/PBM/PPM/PNG/TIFF/JPEG)")
        parser.add_argument("--out", help="Arquivo do relatório (padrão <imagem>.report.json)")
        parser.add_argument("--overlay", help="Grava a página com as regiões desenhadas (PGM)")
        parser.add_argument("--crops", help="Diretório para um recorte PBM por região")
        parser.add_argument("--page-id", help="Identificador da página (padrão: nome do arquivo)")
        add_config_arguments(parser)

    def handle(self, *args, **options):
        cmd_detect(options, self.stdout)
