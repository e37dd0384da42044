"""Gaussian mechanism, budget splitting and basic-composition accounting."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PrivacyParams:
    epsilon: float
    delta: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")


@dataclass(frozen=True)
class Charge:
    epsilon: float
    delta: float
    label: str = ""


@dataclass
class PrivacyLedger:
    """Ordered record of every (epsilon, delta) spend."""

    charges: list[Charge] = field(default_factory=list)

    def charge(self, params: PrivacyParams, label: str = "") -> None:
        self.charges.append(Charge(params.epsilon, params.delta, label))

    def __len__(self) -> int:
        return len(self.charges)

    @property
    def total(self) -> tuple[float, float]:
        return compose(self)

    def to_dict(self) -> dict:
        eps, delta = self.total
        return {
            "charges": [
                {"epsilon": c.epsilon, "delta": c.delta, "label": c.label}
                for c in self.charges
            ],
            "total": {"epsilon": eps, "delta": delta},
            "num_charges": len(self.charges),
        }


def compose(ledger: PrivacyLedger) -> tuple[float, float]:
    """Sum of all charges (basic composition).

    ``math.fsum`` is correctly rounded, so the total does not depend on the
    order in which charges were recorded.
    """
    eps = math.fsum(c.epsilon for c in ledger.charges)
    delta = math.fsum(c.delta for c in ledger.charges)
    return eps, delta


def gaussian_sigma(params: PrivacyParams, sensitivity: float) -> float:
    """Noise standard deviation ``S * sqrt(2 ln(1.25/delta)) / epsilon``."""
    if not sensitivity > 0:
        raise ValueError("sensitivity must be positive")
    if params.epsilon > 1:
        warnings.warn(
            f"epsilon={params.epsilon:g} > 1: the classical Gaussian mechanism "
            "calibration is only proven for epsilon <= 1",
            stacklevel=2,
        )
    return sensitivity * math.sqrt(2.0 * math.log(1.25 / params.delta)) / params.epsilon


def _exact_parts(total: float, steps: int) -> list[float]:
    """``steps`` near-equal floats whose correctly rounded sum is ``total``."""
    part = total / steps
    parts = [part] * steps
    if steps == 1 or math.fsum(parts) == total:
        return parts
    head = parts[:-1]
    last = total - math.fsum(head)
    # fsum is monotone in the last term, so walk it one ulp at a time
    for _ in range(64):
        s = math.fsum(head + [last])
        if s == total:
            break
        last = math.nextafter(last, -math.inf if s > total else math.inf)
    else:  # pragma: no cover - unreachable for finite positive totals
        raise ArithmeticError("could not split budget exactly")
    parts[-1] = last
    return parts


def split_budget(total: PrivacyParams, steps: int) -> list[PrivacyParams]:
    """Split a budget uniformly into ``steps`` charges.

    The last charge absorbs floating-point remainder (at most a few ulps) so
    that composing the parts gives back ``total`` exactly.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if steps == 1:
        return [total]
    eps = _exact_parts(total.epsilon, steps)
    dels = _exact_parts(total.delta, steps)
    return [PrivacyParams(e, d) for e, d in zip(eps, dels)]


def add_gaussian_noise(values, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Return ``values`` plus i.i.d. N(0, sigma^2) noise of the same shape."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    values = np.asarray(values, dtype=np.float64)
    if sigma == 0:
        return values.copy()
    return values + rng.normal(0.0, sigma, size=values.shape)
