from django.core.management.base import BaseCommand

from apps.table_detection.cli import cmd_synth


class Command(BaseCommand):
    help = "Gera páginas sintéticas (PGM) com verdade de referência (JSON)"
    requires_system_checks = []

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument("--spec", help="Arquivo JSON com a PageSpec")
        source.add_argument(
            "--type", choices=["A", "B", "C", "control"], help="Página de mesa da categoria"
        )
        source.add_argument(
            "--suite", choices=["desk", "control"], help="Suíte fixa de páginas"
        )
        parser.add_argument("--seed", type=int, default=0, help="Semente para --type")
        parser.add_argument("--name", help="Nome base dos arquivos gerados")
        parser.add_argument("--out-dir", default=".", help="Diretório de saída")

    def handle(self, *args, **options):
        cmd_synth(options, self.stdout)
