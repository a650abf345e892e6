"""
Topological optimization of a planar point cloud.

Random points in ``[-1, 1]^2`` are moved to maximize the degree-1 total
persistence of their Rips filtration, optionally held in the unit box by a
penalty on ``|a|_inf``.
"""

from dataclasses import dataclass
import logging
import math
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np

from persistlab import io_utils, plotting
from persistlab.constants import (
    BOX_RADIUS,
    EXPERIMENT_ALPHA0_FACTOR,
    EXPERIMENT_BOUND_FACTOR,
    EXPERIMENT_DEGREE,
    EXPERIMENT_DIMENSION,
    EXPERIMENT_GAMMA,
    EXPERIMENT_MIN_POINTS,
    NOISE_SIGMA,
)
from persistlab.exceptions import InvalidParametersError
from persistlab.filtration import PointCloud
from persistlab.liftdiff import rips_barcode, total_persistence
from persistlab.optim.engine import DescentState, Schedule, run
from persistlab.optim.functionals import Functional, FunctionalFactory
from persistlab.persistence1 import Barcode

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HolesExperiment:
    state: DescentState
    functional: Functional
    schedule: Schedule
    initial_cloud: PointCloud
    final_cloud: PointCloud
    initial_barcode: Barcode
    final_barcode: Barcode

    @property
    def initial_total_persistence(self) -> float:
        return total_persistence(self.initial_barcode)

    @property
    def final_total_persistence(self) -> float:
        return total_persistence(self.final_barcode)

    def save(self, out_dir) -> Dict[str, Path]:
        """
        Write the trace and the initial cloud and barcode (JSON and SVG) under
        ``out_dir``, plus the final ones when at least one step ran.
        """
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stages = [("initial", self.initial_cloud, self.initial_barcode, "initial")]
        if self.state.step:
            stages.append(("final", self.final_cloud, self.final_barcode, f"after {self.state.step} steps"))

        paths = {"trace": io_utils.write_trace_csv(self.state, out / "trace.csv")}
        for stage, cloud, barcode, title in stages:
            paths[f"{stage}_points"] = io_utils.write_points_csv(cloud, out / f"{stage}_points.csv")
            paths[f"{stage}_barcode"] = io_utils.write_barcode_json(barcode, out / f"{stage}_barcode.json")
            paths[f"{stage}_svg"] = plotting.barcode_svg(barcode, out / f"{stage}_barcode.svg", title=title)
        logger.info(f"Wrote {len(paths)} experiment artifacts to {out}")
        return paths


def sample_square(r: int, seed: int, d: int = EXPERIMENT_DIMENSION) -> PointCloud:
    # sampling stream kept apart from the descent noise stream
    rng = np.random.default_rng([seed, 1])
    return PointCloud(rng.uniform(-BOX_RADIUS, BOX_RADIUS, size=(r, d)))


def experiment_holes(
    r: int,
    seed: int = 0,
    lam: float = 1.0,
    steps: int = 100,
    alpha0: Optional[float] = None,
    gamma: Optional[float] = None,
    sigma: float = NOISE_SIGMA,
    degree: int = EXPERIMENT_DEGREE,
    bound: Optional[float] = None,
    progress: bool = False,
    stop: Optional[Callable[[DescentState], bool]] = None,
) -> HolesExperiment:
    """
    Minimize ``-total_persistence + lam * box`` from ``r`` uniform points.

    ``alpha0`` defaults to 0.3 times the initial diameter, ``gamma`` to 0.6
    and ``bound`` to ``1.5 * sqrt(m)``, the norm of a cloud sitting half a
    box outside.
    """
    if r < EXPERIMENT_MIN_POINTS:
        raise InvalidParametersError(f"the experiment needs at least {EXPERIMENT_MIN_POINTS} points, got {r}")
    if lam < 0:
        raise InvalidParametersError(f"lambda must be non-negative, got {lam}")

    cloud = sample_square(r, seed)
    if alpha0 is None:
        alpha0 = EXPERIMENT_ALPHA0_FACTOR * cloud.diameter()
    if gamma is None:
        gamma = EXPERIMENT_GAMMA
    if bound is None:
        bound = EXPERIMENT_BOUND_FACTOR * BOX_RADIUS * math.sqrt(cloud.m)
    schedule = Schedule(alpha0, gamma)
    functional = FunctionalFactory().holes(cloud.d, lam, degree)

    logger.info(f"Holes experiment: r={r}, seed={seed}, lambda={lam:g}, steps={steps}, {functional}")
    state = run(
        functional,
        cloud.flat(),
        schedule,
        sigma=sigma,
        steps=steps,
        stop=stop,
        seed=seed,
        bound=bound,
        progress=progress,
    )
    final = PointCloud.from_flat(state.x, cloud.d)
    result = HolesExperiment(
        state=state,
        functional=functional,
        schedule=schedule,
        initial_cloud=cloud,
        final_cloud=final,
        initial_barcode=rips_barcode(cloud, degree),
        final_barcode=rips_barcode(final, degree),
    )
    logger.info(
        f"Total persistence in degree {degree}: "
        f"{result.initial_total_persistence:.6g} -> {result.final_total_persistence:.6g}"
    )
    return result
