from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import gmpy2
import numpy as np

Exact = Union[Fraction, "gmpy2.mpq"]

CONNECTED = "connected"
NO_CYCLES = "nocycles"
ALL_SMALL = "allsmall"
NO_CYCLES_SMALL = "nocycles-small"
MACRO_VOLUME = "macro"
EVENT_KINDS = (CONNECTED, NO_CYCLES, ALL_SMALL, NO_CYCLES_SMALL, MACRO_VOLUME)


class PrecisionLossError(ArithmeticError):
    """Floating-point cancellation exceeded the accepted relative error."""


def _to_exact(x) -> Optional[Fraction]:
    if isinstance(x, bool):
        raise TypeError("edge probability cannot be a bool")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, type(gmpy2.mpq())):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return Fraction(x)
    return None


@dataclass(frozen=True)
class EdgeProb:
    """Per-edge occupation probability, exact (Fraction) or float."""

    p: Union[Fraction, float]

    def __post_init__(self):
        exact = _to_exact(self.p)
        if exact is not None:
            object.__setattr__(self, "p", exact)
        else:
            object.__setattr__(self, "p", float(self.p))
        if not 0 <= self.p <= 1:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.p}")

    @classmethod
    def from_alpha(cls, n: int, alpha) -> "EdgeProb":
        """p = alpha / n, exact whenever alpha is an int, Fraction or str."""
        if n < 1:
            raise ValueError("n must be positive")
        exact = _to_exact(alpha)
        if exact is not None:
            return cls(exact / n)
        return cls(float(alpha) / n)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.p, Fraction)

    def __float__(self):
        return float(self.p)


def as_edge_prob(p) -> EdgeProb:
    return p if isinstance(p, EdgeProb) else EdgeProb(p)


@dataclass(frozen=True)
class LogValue:
    """A positive quantity carried as its natural log, optionally with its exact value."""

    log_value: float
    exact: Optional[Exact] = None

    @classmethod
    def from_exact(cls, q) -> "LogValue":
        q = gmpy2.mpq(q)
        if q < 0:
            raise ValueError("negative value")
        if q == 0:
            return cls(-math.inf, q)
        return cls(float(gmpy2.log(gmpy2.mpfr(q, 128))), q)

    @property
    def value(self) -> float:
        if self.exact is not None:
            return float(self.exact)
        return math.exp(self.log_value)

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class LogProb(LogValue):
    """log of a probability; -inf encodes probability zero."""

    def __post_init__(self):
        if self.log_value > 1e-9:
            raise ValueError(f"log-probability must be <= 0, got {self.log_value}")
        if self.log_value > 0:
            object.__setattr__(self, "log_value", 0.0)


@dataclass(frozen=True)
class EventSpec:
    """A graph event: connected, acyclic, small components, or macroscopic volume."""

    kind: str
    r: Optional[int] = None
    m: Optional[int] = None

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        needs_r = self.kind in (ALL_SMALL, NO_CYCLES_SMALL, MACRO_VOLUME)
        if needs_r and self.r is None:
            raise ValueError(f"event {self.kind} needs r")
        if self.kind == MACRO_VOLUME and self.m is None:
            raise ValueError("macro-volume event needs m")

    @classmethod
    def connected(cls):
        return cls(CONNECTED)

    @classmethod
    def no_cycles(cls):
        return cls(NO_CYCLES)

    @classmethod
    def all_small(cls, r: int):
        return cls(ALL_SMALL, r=r)

    @classmethod
    def no_cycles_and_small(cls, r: int):
        return cls(NO_CYCLES_SMALL, r=r)

    @classmethod
    def macro_volume(cls, r: int, m: int):
        return cls(MACRO_VOLUME, r=r, m=m)

    def validate(self, n: int) -> None:
        if self.r is not None and not 1 <= self.r <= n:
            raise ValueError(f"r={self.r} must satisfy 1 <= r <= n={n}")
        if self.m is not None and not 0 <= self.m <= n:
            raise ValueError(f"m={self.m} must satisfy 0 <= m <= n={n}")

    def label(self) -> str:
        if self.kind == MACRO_VOLUME:
            return f"{self.kind}(r={self.r},m={self.m})"
        if self.r is not None:
            return f"{self.kind}(r={self.r})"
        return self.kind

    def matches(self, n: int, sizes, n_edges: int) -> bool:
        """Classify one graph given its component sizes and edge count."""
        sizes = [s for s in sizes if s > 0]
        return bool(
            self.mask(
                n,
                np.array([n_edges]),
                np.array([len(sizes)]),
                np.array([max(sizes)]),
                np.array([sum(s for s in sizes if self.r is not None and s > self.r)]),
            )[0]
        )

    def mask(self, n, edges, ncomp, largest, v_r):
        """Vectorised classification; v_r counts vertices in components larger than r."""
        if self.kind == CONNECTED:
            return largest == n
        acyclic = edges == n - ncomp
        if self.kind == NO_CYCLES:
            return acyclic
        if self.kind == ALL_SMALL:
            return largest <= self.r
        if self.kind == NO_CYCLES_SMALL:
            return acyclic & (largest <= self.r)
        return v_r == self.m
