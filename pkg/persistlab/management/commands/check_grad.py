import logging

from django.conf import settings
from django.core.management.base import CommandError

from persistlab.constants import FD_STEP_SCALE
from persistlab.filtration import PointCloud
from persistlab.io_utils import read_points_csv, write_jacobian_csv, write_lifted_json
from persistlab.liftdiff import (
    chain_rule,
    fd_step,
    finite_difference_gradient,
    pers_jacobian,
    relative_error,
    rips_barcode,
    total_persistence,
    total_persistence_gradient,
)
from persistlab.management.commands._base import DOMAIN_ERROR, PersistlabCommand, usage_error

logger = logging.getLogger(__name__)


class Command(PersistlabCommand):
    help = "Compara o gradiente analítico da persistência total com diferenças finitas."

    def add_arguments(self, parser):
        parser.add_argument("--points", required=True, help="CSV com um ponto por linha")
        parser.add_argument("--degree", type=int, default=1, help="Grau da homologia (default: 1)")
        parser.add_argument(
            "--eps",
            type=float,
            default=FD_STEP_SCALE,
            help=f"Passo relativo ao diâmetro da nuvem (default: {FD_STEP_SCALE})",
        )
        parser.add_argument(
            "--tol",
            type=float,
            default=settings.PERSISTLAB_GRAD_TOLERANCE,
            help=f"Erro relativo máximo aceito (default: {settings.PERSISTLAB_GRAD_TOLERANCE})",
        )
        parser.add_argument("--lifted", default=None, help="Salva o barcode levantado em JSON (opcional)")
        parser.add_argument("--jacobian", default=None, help="Salva a jacobiana em CSV (opcional)")

    def run(self, **options):
        eps, tol, degree = options["eps"], options["tol"], options["degree"]
        if not eps > 0:
            raise usage_error("--eps deve ser positivo")
        if not tol > 0:
            raise usage_error("--tol deve ser positivo")
        if degree < 0:
            raise usage_error("--degree deve ser não negativo")

        cloud = read_points_csv(options["points"])
        lifted, jacobian = pers_jacobian(cloud, degree)
        analytic = chain_rule(total_persistence_gradient(lifted.k), jacobian)
        if options["lifted"]:
            write_lifted_json(lifted, options["lifted"])
        if options["jacobian"]:
            write_jacobian_csv(jacobian, options["jacobian"])

        def persistence(x):
            return total_persistence(rips_barcode(PointCloud.from_flat(x, cloud.d), degree))

        numeric = finite_difference_gradient(persistence, cloud.flat(), fd_step(cloud, eps))
        error = relative_error(analytic, numeric)
        logger.info(f"check_grad: {lifted.k} barras, erro relativo {error:.3e}")
        self.stdout.write(f"{error:.17g}")
        if error > tol:
            raise CommandError(
                f"erro relativo {error:.3e} acima da tolerância {tol:.1e}", returncode=DOMAIN_ERROR
            )
        self.stdout.write(self.style.SUCCESS(f"✅ Gradiente confere ({lifted.k} barras em grau {degree})"))
