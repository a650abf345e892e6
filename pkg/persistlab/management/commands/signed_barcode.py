import logging

from django.conf import settings

from persistlab.io_utils import read_module_json, write_barcode_json
from persistlab.management.commands._base import PersistlabCommand
from persistlab.multigrid import indecomposability, minimal_hook_resolution, signed_barcode_of_resolution
from persistlab.plotting import signed_barcode_svg

logger = logging.getLogger(__name__)


class Command(PersistlabCommand):
    help = "Barcode com sinal de um módulo em grade via resolução relativa mínima."

    def add_arguments(self, parser):
        parser.add_argument("--module", required=True, help="JSON do módulo em grade")
        parser.add_argument("--out", required=True, help="JSON de saída do barcode com sinal")
        parser.add_argument("--svg", default=None, help="Figura SVG (azul positivo, vermelho negativo)")
        parser.add_argument(
            "--family",
            choices=("hooks", "upsets"),
            default="hooks",
            help="Família de projetivos relativos (default: hooks)",
        )

    def run(self, **options):
        module = read_module_json(options["module"]).validate()
        resolution = minimal_hook_resolution(module, options["family"])
        signed = signed_barcode_of_resolution(resolution)
        write_barcode_json(signed, options["out"])
        if options["svg"]:
            signed_barcode_svg(signed, options["svg"])
        self.stdout.write(
            self.style.SUCCESS(
                f"✅ Resolução de comprimento {resolution.length}: "
                f"{len(signed.positive)} barras positivas, {len(signed.negative)} negativas"
            )
        )
        cap = settings.PERSISTLAB_INDECOMPOSABLE_CAP
        if 0 < module.total_dim() <= cap:
            result = indecomposability(module, cap)
            verdict = "indecomponível" if result.indecomposable else "decomponível"
            if result.sampled:
                verdict += f" (amostrado, End(M) de dimensão {result.endomorphism_dim})"
            self.stdout.write(f"Módulo de dimensão total {module.total_dim()}: {verdict}")
