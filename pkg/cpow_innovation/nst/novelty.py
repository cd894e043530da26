"""Classification against a dictionary of known operating conditions."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from cpow_innovation.innovation.ar_model import ArInnovationModel, encode
from cpow_innovation.nst.smooth_test import Hypothesis, NstConfig, NstResult, nst_test
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoveltyResult:
    """Outcome of :func:`detect_novelty`.

    Attributes:
        index: First dictionary entry whose test accepts, None for a novelty
        results: Test results for the entries evaluated, in order
    """

    index: Optional[int]
    results: List[NstResult] = field(default_factory=list)

    @property
    def novelty(self) -> bool:
        return self.index is None


def detect_novelty(
    models: Sequence[ArInnovationModel],
    x: WaveformSeries,
    config: NstConfig = NstConfig(),
) -> NoveltyResult:
    """Find the first known class under which ``x`` encodes to IID-uniform innovations.

    Raises:
        ValueError: If the dictionary is empty
        ModelError: If a dictionary model is invalid
    """
    if not models:
        raise ValueError("Novelty detection needs at least one model")
    for model in models:
        model.validate()
    results = []
    for index, model in enumerate(models):
        result = nst_test(encode(model, x).valid, config)
        results.append(result)
        if result.decision is Hypothesis.H0:
            return NoveltyResult(index, results)
    logger.debug("All %d known classes rejected; reporting novelty", len(models))
    return NoveltyResult(None, results)
