"""Property corpus over seeded random models.

Checks, for every model in the corpus:

- generated (t+1)-CCAs verify as CLAs for one set of strength at most t;
- with up to one set, exact-strength and up-to-strength verification agree, and
  such arrays cover every valid t-way interaction;
- the stronger CLA variants imply the weaker ones;
- the array of all valid tests is a CLA for every parameter choice;
- without constraints, CLA and LA verification agree whenever an LA exists.
"""

from __future__ import annotations

import logging
from typing import Callable

from tqdm import tqdm

from clatool.array import TestArray
from clatool.cca import generate_cca
from clatool.config import ToolConfig
from clatool.corpus import exhaustive_array, random_model, random_subarray
from clatool.errors import CapExceededError
from clatool.model import SutModel
from clatool.reports import PropertyResult, SelftestReport
from clatool.utils import seeded_rng
from clatool.verify import verify_cca, verify_cla, verify_la

logger = logging.getLogger(__name__)

SUBARRAYS_PER_MODEL = 3
VARIANTS = ((False, False), (True, False), (False, True), (True, True))


class _Checker:
    def __init__(self, config: ToolConfig):
        self.config = config
        self.results = {
            name: PropertyResult(name)
            for name in (
                "cca-is-cla",
                "strength-bar-agreement",
                "subsumption",
                "exhaustive-is-cla",
                "la-cla-agreement",
            )
        }

    def cla(self, model: SutModel, array: TestArray, d: int, t: int, bar_d: bool, bar_t: bool) -> bool:
        return verify_cla(
            model, array, d, t, bar_d, bar_t,
            cap_tests=self.config.cap_tests, cap_universe=self.config.cap_universe,
        ).passed

    def record(self, name: str, ok: bool, describe: Callable[[], str]) -> None:
        result = self.results[name]
        result.checked += 1
        if not ok:
            result.failures.append(describe())

    def check_model(self, model: SutModel, seed: int) -> None:
        rng = seeded_rng(seed, 7)
        exhaustive = exhaustive_array(model, self.config.cap_tests)
        samples = [random_subarray(exhaustive, rng) for _ in range(SUBARRAYS_PER_MODEL)]
        strengths = [t for t in (1, 2) if t < model.k]

        for t in strengths:
            cca = generate_cca(model, t + 1, seed, candidates=10, cap_tests=self.config.cap_tests)
            ok = verify_cca(model, cca, t + 1).passed and self.cla(model, cca, 1, t, True, True)
            self.record("cca-is-cla", ok, lambda: f"{model.name}: {t + 1}-CCA is not a CLA")
            samples.append(cca)

        for array in samples:
            for t in (1, 2):
                if t > model.k:
                    continue
                exact = self.cla(model, array, 1, t, True, False)
                upto = self.cla(model, array, 1, t, True, True)
                covering = verify_cca(model, array, t).passed
                self.record(
                    "strength-bar-agreement",
                    exact == upto and (not exact or covering),
                    lambda: f"{model.name}: t={t} exact={exact} up-to={upto} covering={covering}",
                )
            self._check_subsumption(model, array)

        self._check_exhaustive(model, exhaustive)
        if not model.constraints:
            self._check_la_agreement(model, exhaustive, samples)

    def _check_subsumption(self, model: SutModel, array: TestArray) -> None:
        for d, t in ((2, 1), (1, 2)):
            if t > model.k:
                continue
            try:
                passed = {flags: self.cla(model, array, d, t, *flags) for flags in VARIANTS}
                lower_d = self.cla(model, array, d - 1, t, True, True) if d > 1 else True
                lower_t = self.cla(model, array, d, t - 1, False, True)
            except CapExceededError:
                continue
            implications = [
                (passed[(True, True)], passed[(True, False)] and passed[(False, True)]),
                (passed[(True, False)], passed[(False, False)]),
                (passed[(True, True)], lower_d),
                (passed[(False, True)], lower_t),
            ]
            ok = all(consequent for premise, consequent in implications if premise)
            self.record("subsumption", ok, lambda: f"{model.name}: d={d} t={t} {passed}")

    def _check_exhaustive(self, model: SutModel, exhaustive: TestArray) -> None:
        for d, t in ((1, 1), (2, 1), (1, 2)):
            if t > model.k:
                continue
            for flags in VARIANTS:
                try:
                    ok = self.cla(model, exhaustive, d, t, *flags)
                except CapExceededError:
                    continue
                self.record("exhaustive-is-cla", ok, lambda: f"{model.name}: d={d} t={t} {flags}")

    def _check_la_agreement(self, model: SutModel, exhaustive: TestArray, samples: list[TestArray]) -> None:
        for t in (1, 2):
            if t > model.k:
                continue
            for bar_d, bar_t in VARIANTS:
                if not verify_la(model, exhaustive, 1, t, bar_d, bar_t).passed:
                    continue
                for array in samples:
                    la = verify_la(model, array, 1, t, bar_d, bar_t).passed
                    cla = self.cla(model, array, 1, t, bar_d, bar_t)
                    self.record(
                        "la-cla-agreement",
                        la == cla,
                        lambda: f"{model.name}: t={t} bar_d={bar_d} bar_t={bar_t} la={la} cla={cla}",
                    )


def run_selftest(
    models: int = 200,
    seed: int = 0,
    *,
    config: ToolConfig | None = None,
    progress: bool = False,
) -> SelftestReport:
    """Run the property corpus; every fourth model has no constraints."""
    checker = _Checker(config or ToolConfig())
    for index in tqdm(range(models), desc="Selftest", unit="model", disable=not progress):
        model_seed = seed * 1_000_003 + index
        model = random_model(model_seed, constrained=index % 4 != 3)
        logger.debug("Model %s: k=%d, %d constraint lines", model.name, model.k, len(model.constraints))
        checker.check_model(model, model_seed)
    report = SelftestReport(models, seed, list(checker.results.values()))
    logger.info("Selftest over %d models: %s", models, "pass" if report.passed else "FAIL")
    return report
