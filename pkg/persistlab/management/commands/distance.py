import json
import logging

from persistlab.exceptions import InvalidParametersError
from persistlab.io_utils import read_barcode_json
from persistlab.management.commands._base import PersistlabCommand
from persistlab.metrics import bottleneck, dist1, swap_union
from persistlab.multigrid import SignedBarcode

logger = logging.getLogger(__name__)

METRICS = ("bottleneck", "dist1", "signed")


class Command(PersistlabCommand):
    help = "Distância entre dois barcodes (bottleneck, dist1 ou bottleneck com sinal)."

    def add_arguments(self, parser):
        parser.add_argument("--a", required=True, help="JSON do primeiro barcode")
        parser.add_argument("--b", required=True, help="JSON do segundo barcode")
        parser.add_argument("--metric", choices=METRICS, default="bottleneck", help="Métrica (default: bottleneck)")
        parser.add_argument("--witness", action="store_true", help="Imprime também o emparelhamento ótimo")

    def run(self, **options):
        a = read_barcode_json(options["a"])
        b = read_barcode_json(options["b"])
        metric = options["metric"]
        signed = [isinstance(x, SignedBarcode) for x in (a, b)]
        if metric == "signed" and not all(signed):
            raise InvalidParametersError("a métrica signed exige dois barcodes com sinal")
        if metric != "signed" and any(signed):
            raise InvalidParametersError(f"a métrica {metric} exige barcodes sem sinal; use --metric signed")

        if metric == "signed":
            left, right = swap_union(a, b)
            value, matching = bottleneck(left, right)
        elif metric == "dist1":
            value, matching = dist1(a, b)
        else:
            value, matching = bottleneck(a, b)

        logger.info(f"{metric} entre {options['a']} e {options['b']}: {value!r}")
        self.stdout.write(f"{value:.17g}")
        if options["witness"]:
            self.stdout.write(json.dumps(matching.to_dict()))
