"""Seeded generation of perturbed datasets: bootstrap and subsample schemes.

Reproducibility contract: the random stream for replicate ``b`` is a pure
function of the pair ``(master, b)`` — each replicate owns its generator, so
replicates can be produced in any order, or concurrently, with identical
results.  Streams are numpy PCG64 generators seeded through
``SeedSequence((master, b))``; Gaussian variates use numpy's ziggurat
``standard_normal``.  Both choices are pinned for a release so that seeded
outputs stay stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import Dataset, GaussianLocationModel, NormalDist, posterior

__all__ = [
    "SchemeKind",
    "ResampleScheme",
    "Seed",
    "PointEstimate",
    "point_estimate",
    "map_point_estimate",
    "resample",
    "bootstrap_mean_law",
]


class SchemeKind(Enum):
    NONPARAMETRIC_BOOTSTRAP = "nonparametric"
    PARAMETRIC_BOOTSTRAP = "parametric"
    SUBSAMPLE = "subsample"


@dataclass(frozen=True)
class ResampleScheme:
    """Dataset perturbation policy.

    ``subsample_size`` applies to the subsample scheme only; ``None`` means
    the default ceil(n/2) resolved against the data when resampling.
    """

    kind: SchemeKind
    subsample_size: int | None = None

    def __post_init__(self):
        if self.subsample_size is not None:
            size = int(self.subsample_size)
            if size < 1:
                raise ValueError("subsample_size must be at least 1")
            object.__setattr__(self, "subsample_size", size)

    @classmethod
    def nonparametric(cls) -> "ResampleScheme":
        """Resample the observed data with replacement to the original size."""
        return cls(SchemeKind.NONPARAMETRIC_BOOTSTRAP)

    @classmethod
    def parametric(cls) -> "ResampleScheme":
        """Draw fresh i.i.d. normal data centered at a point estimate."""
        return cls(SchemeKind.PARAMETRIC_BOOTSTRAP)

    @classmethod
    def subsample(cls, size: int | None = None) -> "ResampleScheme":
        """Draw ``size`` observations without replacement (default ceil(n/2))."""
        return cls(SchemeKind.SUBSAMPLE, size)


@dataclass(frozen=True)
class Seed:
    """Master seed plus replicate index; identifies one random stream."""

    master: int
    replicate_index: int = 0

    def __post_init__(self):
        master = int(self.master)
        index = int(self.replicate_index)
        if not 0 <= master < 2**64:
            raise ValueError("master seed must be a 64-bit unsigned integer")
        if index < 0:
            raise ValueError("replicate_index must be non-negative")
        object.__setattr__(self, "master", master)
        object.__setattr__(self, "replicate_index", index)

    def for_replicate(self, b: int) -> "Seed":
        return Seed(self.master, b)

    def rng(self) -> np.random.Generator:
        """PCG64 generator derived purely from (master, replicate_index)."""
        return np.random.default_rng(
            np.random.SeedSequence((self.master, self.replicate_index))
        )


@dataclass(frozen=True)
class PointEstimate:
    """Scalar location estimate used to center the parametric bootstrap."""

    value: float

    def __post_init__(self):
        value = float(self.value)
        if not math.isfinite(value):
            raise ValueError("point estimate must be finite")
        object.__setattr__(self, "value", value)


def point_estimate(data: Dataset) -> PointEstimate:
    """Sample mean of the data."""
    return PointEstimate(data.mean)


def map_point_estimate(model: GaussianLocationModel, data: Dataset) -> PointEstimate:
    """Posterior mode, which coincides with the posterior mean here."""
    return PointEstimate(posterior(model, data).mean)


def _default_subsample_size(n: int) -> int:
    return (n + 1) // 2


def resample(
    scheme: ResampleScheme,
    model: GaussianLocationModel,
    data: Dataset,
    center: PointEstimate,
    seed: Seed,
) -> Dataset:
    """Generate one perturbed dataset.

    Nonparametric bootstrap: n draws with replacement from the observations.
    Parametric bootstrap: n i.i.d. normal draws with mean ``center.value``
    and variance ``model.sigma_sq``.  Subsample: m distinct observations
    drawn without replacement.  Deterministic given ``seed``.
    """
    rng = seed.rng()
    n = data.n
    if scheme.kind is SchemeKind.PARAMETRIC_BOOTSTRAP:
        draws = center.value + math.sqrt(model.sigma_sq) * rng.standard_normal(n)
    elif scheme.kind is SchemeKind.NONPARAMETRIC_BOOTSTRAP:
        values = np.asarray(data.observations)
        draws = values[rng.integers(0, n, size=n)]
    elif scheme.kind is SchemeKind.SUBSAMPLE:
        m = scheme.subsample_size
        if m is None:
            m = _default_subsample_size(n)
        if m > n:
            raise ValueError("subsample larger than data")
        values = np.asarray(data.observations)
        draws = values[rng.choice(n, size=m, replace=False)]
    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"unknown scheme kind: {scheme.kind}")
    return Dataset(tuple(float(v) for v in draws))


def bootstrap_mean_law(
    model: GaussianLocationModel, data: Dataset, center: PointEstimate
) -> NormalDist:
    """Law of the replicate-posterior mean under the parametric bootstrap.

    With replicate data drawn i.i.d. N(center, sigma_sq), the replicate
    sample mean is N(center, sigma_sq / n) and the posterior mean computed
    from it is normal with

        mean     = n * center / (n + sigma_sq / tau_sq)
        variance = n * sigma_sq / (n + sigma_sq / tau_sq)^2
    """
    shrink = data.n + model.sigma_sq / model.tau_sq
    mean = data.n * center.value / shrink
    variance = data.n * model.sigma_sq / (shrink * shrink)
    return NormalDist(mean, variance)
