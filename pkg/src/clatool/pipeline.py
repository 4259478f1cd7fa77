"""CLA generation pipeline: covering array, reduction runs, re-verification."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from clatool.array import TestArray
from clatool.cca import generate_cca
from clatool.config import ToolConfig
from clatool.errors import GenerationError, InputError
from clatool.model import SutModel
from clatool.reduce import reduce_runs
from clatool.reports import ReductionReport, VerificationReport
from clatool.verify import verify_cla

logger = logging.getLogger(__name__)


@dataclass
class GenerationResult:
    cca: TestArray
    cla: TestArray
    reduction: ReductionReport
    verification: VerificationReport


class ClaPipeline:
    """Builds a (1̄,t̄)-CLA from a freshly generated (t+1)-CCA."""

    def __init__(self, model: SutModel, t: int, config: ToolConfig | None = None, *, progress: bool = False):
        if not 1 <= t < model.k:
            raise InputError(f"strength {t} out of range 1..{model.k - 1}")
        self.model = model
        self.t = t
        self.config = config or ToolConfig()
        self.progress = progress

    def run(self) -> GenerationResult:
        # Stage 1: covering array of the next strength
        cca = self._stage_generate()

        # Stage 2: reduction runs, smallest kept
        cla, reduction = self._stage_reduce(cca)

        # Stage 3: re-verify before anything is written
        verification = self._stage_verify(cla)

        return GenerationResult(cca, cla, reduction, verification)

    def _stage_generate(self) -> TestArray:
        config = self.config
        cca = generate_cca(
            self.model,
            self.t + 1,
            config.seed,
            candidates=config.candidates,
            retries=config.retries,
            cap_tests=config.cap_tests,
        )
        logger.info("Generated %d-CCA with %d rows", self.t + 1, len(cca))
        return cca

    def _stage_reduce(self, cca: TestArray) -> tuple[TestArray, ReductionReport]:
        config = self.config
        return reduce_runs(
            self.model,
            cca,
            self.t,
            config.seed,
            runs=config.runs,
            workers=config.workers,
            progress=self.progress,
            spot_checks=config.spot_checks,
        )

    def _stage_verify(self, cla: TestArray) -> VerificationReport:
        config = self.config
        report = verify_cla(
            self.model,
            cla,
            1,
            self.t,
            bar_d=True,
            bar_t=True,
            cap_tests=config.cap_tests,
            cap_universe=config.cap_universe,
            witness_limit=config.witness_limit,
        )
        if not report.passed:
            raise GenerationError(
                "reduced array failed CLA re-verification: " + report.render_text().splitlines()[0]
            )
        logger.info("Verified %d-row array as a CLA for up to 1 set of strength <= %d", len(cla), self.t)
        return report
