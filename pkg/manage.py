#!/usr/bin/env python
"""
Utilitário de linha de comando do tablescout.

Subcomandos: detect, batch, eval, synth (python manage.py <comando> --help).
"""
import os
import sys


def main():
    """Executa o comando de gerenciamento pedido."""
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "tablescout.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Não foi possível importar o Django. Verifique se ele está instalado "
            "e se o ambiente virtual está ativo."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
