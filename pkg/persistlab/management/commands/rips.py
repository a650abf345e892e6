import logging

from django.conf import settings

from persistlab.filtration import rips_filtration
from persistlab.io_utils import read_points_csv, write_filtration_json
from persistlab.management.commands._base import PersistlabCommand, usage_error

logger = logging.getLogger(__name__)


class Command(PersistlabCommand):
    help = "Constrói a filtração de Rips de uma nuvem de pontos em CSV."

    def add_arguments(self, parser):
        parser.add_argument("--points", required=True, help="CSV com um ponto por linha")
        parser.add_argument(
            "--maxdim",
            type=int,
            default=settings.PERSISTLAB_RIPS_MAXDIM,
            help=f"Dimensão máxima dos simplexos (default: {settings.PERSISTLAB_RIPS_MAXDIM})",
        )
        parser.add_argument("--out", required=True, help="JSON de saída da filtração")

    def run(self, **options):
        if options["maxdim"] < 0:
            raise usage_error("--maxdim deve ser não negativo")
        cloud = read_points_csv(options["points"])
        filtration = rips_filtration(cloud, options["maxdim"])
        write_filtration_json(filtration, options["out"])
        self.stdout.write(
            self.style.SUCCESS(
                f"✅ Filtração de Rips com {len(filtration)} simplexos ({cloud.r} pontos) salva em {options['out']}"
            )
        )
