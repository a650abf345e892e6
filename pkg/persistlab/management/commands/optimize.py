import logging

from persistlab.io_utils import load_run_config
from persistlab.management.commands._base import PersistlabCommand
from persistlab.optim.experiment import experiment_holes

logger = logging.getLogger(__name__)


class Command(PersistlabCommand):
    help = "Otimização topológica: maximiza a persistência total em grau 1 de uma nuvem de pontos."

    def add_arguments(self, parser):
        parser.add_argument("--config", required=True, help="JSON de configuração da execução")
        parser.add_argument("--out-dir", required=True, help="Diretório dos artefatos")

    def run(self, **options):
        config = load_run_config(options["config"])
        self.stdout.write(
            f"🌱 r={config['r']}, seed={config['seed']}, lambda={config['lambda']}, steps={config['steps']}"
        )
        result = experiment_holes(
            r=config["r"],
            seed=config["seed"],
            lam=config["lambda"],
            steps=config["steps"],
            alpha0=config["alpha0"],
            gamma=config["gamma"],
            sigma=config["sigma"],
            degree=config["degree"],
            bound=config["bound"],
            progress=True,
        )
        paths = result.save(options["out_dir"])
        if result.state.bound_exceeded:
            self.stderr.write(
                self.style.WARNING(
                    f"⚠️ Iterados saíram da bola de raio {result.state.bound:.6g}: "
                    f"a otimização continua dispersando os pontos"
                )
            )
        self.stdout.write(
            self.style.SUCCESS(
                f"✅ Persistência total {result.initial_total_persistence:.6g} -> "
                f"{result.final_total_persistence:.6g}; {len(paths)} artefatos em {options['out_dir']}"
            )
        )
