import logging

from persistlab.exceptions import InvalidParametersError
from persistlab.io_utils import read_filtration_json, write_barcode_json
from persistlab.management.commands._base import PersistlabCommand, usage_error
from persistlab.persistence1 import barcode, reduce
from persistlab.plotting import barcode_svg

logger = logging.getLogger(__name__)


class Command(PersistlabCommand):
    help = "Calcula o barcode de uma filtração de um parâmetro."

    def add_arguments(self, parser):
        parser.add_argument("--filt", required=True, help="JSON da filtração")
        parser.add_argument("--degree", type=int, default=1, help="Grau da homologia (default: 1)")
        parser.add_argument("--out", required=True, help="JSON de saída do barcode")
        parser.add_argument("--svg", default=None, help="Diagrama de persistência em SVG (opcional)")

    def run(self, **options):
        degree = options["degree"]
        if degree < 0:
            raise usage_error("--degree deve ser não negativo")
        filtration = read_filtration_json(options["filt"])
        if filtration.n != 1:
            raise InvalidParametersError(
                f"a filtração tem {filtration.n} parâmetros; use o comando signed_barcode"
            )
        bars = barcode(reduce(filtration, max_degree=degree), degree)
        write_barcode_json(bars, options["out"])
        if options["svg"]:
            barcode_svg(bars, options["svg"], title=f"H{degree}")
        self.stdout.write(
            self.style.SUCCESS(
                f"✅ {len(bars)} barras em grau {degree} "
                f"({bars.infinite_count()} infinitas) salvas em {options['out']}"
            )
        )
