from django.core.management.base import BaseCommand

from apps.table_detection.cli import add_config_arguments, cmd_eval


class Command(BaseCommand):
    help = "Compara relatórios com a verdade e imprime a acurácia por categoria"
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("reports_dir", nargs="?", help="Diretório dos *.report.json")
        parser.add_argument(
            "truth_dir", nargs="?", help="Diretório dos *.truth.json (padrão: o dos relatórios)"
        )
        parser.add_argument(
            "--fixture", choices=["table1"], help="Usa as contagens publicadas em vez de arquivos"
        )
        parser.add_argument("--out", help="Grava o resumo em JSON")
        add_config_arguments(parser)

    def handle(self, *args, **options):
        cmd_eval(options, self.stdout)
