"""
Base comum dos comandos do pipeline.
Traduz as exceções do domínio em códigos de saída: 2 para erros de uso ou
de formato de entrada, 1 para os demais erros do domínio.
"""

import logging

from django.core.management.base import BaseCommand, CommandError

from persistlab.exceptions import InputFormatError, PersistlabError

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
DOMAIN_ERROR = 1


def usage_error(message: str) -> CommandError:
    return CommandError(message, returncode=USAGE_ERROR)


class PersistlabCommand(BaseCommand):
    """Comando que executa ``run`` e converte PersistlabError em CommandError."""

    def run(self, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except InputFormatError as e:
            logger.error(f"Entrada inválida: {e}")
            raise CommandError(str(e), returncode=USAGE_ERROR) from e
        except PersistlabError as e:
            logger.error(f"{type(e).__name__}: {e}")
            raise CommandError(f"{type(e).__name__}: {e}", returncode=DOMAIN_ERROR) from e
