"""
Loading programs: the applied macroscopic strain as a function of time.
"""

from typing import List

import numpy as np

from ..core.config import LoadingConfig
from ..core.errorhandler import ConfigError, ErrorCode


class LoadProgram:
    """
    Applied strain ``lam(t)``.

    ``monotonic`` and ``nonproportional`` ramp at a constant rate; ``cyclic``
    is a triangle wave starting at zero, peaking at ``+amplitude`` after a
    quarter period and at ``-amplitude`` after three quarters.
    """

    def __init__(self, cfg: LoadingConfig):
        self.kind = cfg.kind
        self.rate = cfg.rate
        self.max_strain = cfg.max_strain
        self.amplitude = cfg.amplitude
        self.period = cfg.period
        self.cycles = cfg.cycles
        self.switch_strain = cfg.switch_strain

    def __call__(self, t: float) -> float:
        if self.kind != "cyclic":
            return self.rate * t
        phase = (t / self.period) % 1.0
        if phase <= 0.25:
            return 4.0 * self.amplitude * phase
        if phase <= 0.75:
            return self.amplitude * (2.0 - 4.0 * phase)
        return self.amplitude * (4.0 * phase - 4.0)

    def kinks(self, t_end: float) -> List[float]:
        """Times where the loading direction reverses."""
        if self.kind != "cyclic":
            return []
        out = []
        for c in range(int(np.ceil(t_end / self.period))):
            base = c * self.period
            out += [base + 0.25 * self.period, base + 0.75 * self.period, base + self.period]
        return [t for t in out if t <= t_end]

    @property
    def switch_time(self) -> float:
        """Time of the micro boundary switch of the non-proportional program."""
        return self.switch_strain / self.rate

    def time_of_load(self, value: float) -> float:
        """
        First time the program reaches ``value``.

        Raises:
            ConfigError: The value is never reached
        """
        if self.kind != "cyclic":
            if not 0.0 <= value <= self.max_strain * (1.0 + 1e-12):
                raise ConfigError(
                    ErrorCode.CFG_INVALID_VALUE,
                    f"Profile load {value} outside the program range [0, {self.max_strain}]"
                )
            return value / self.rate
        A, P = self.amplitude, self.period
        if abs(value) > A * (1.0 + 1e-12):
            raise ConfigError(
                ErrorCode.CFG_INVALID_VALUE,
                f"Profile load {value} exceeds the cyclic amplitude {A}"
            )
        if value >= 0.0:
            return 0.25 * P * value / A
        return 0.25 * P + 0.25 * P * (A - value) / A
