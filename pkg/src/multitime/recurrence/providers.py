"""
Multitime - Coefficient and Forcing Providers

This module provides the lattice functions t -> A(t) (n x n matrices) and
t -> b(t) (n-vectors) consumed by diagonal recurrences. Providers come in
three kinds sharing the LatticeProvider interface:

- ``constant``: the same value at every point
- ``periodic``: a componentwise-periodic table, A(t) = table[t^1 mod p1, ...]
- ``function``: any callable, e.g. the Samuelson-Hicks matrices

Providers are immutable after construction and answer concurrent queries.
"""

import logging
import math
from functools import reduce
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from multitime.core.errors import ConfigValidationError, DimensionMismatchError
from multitime.core.lattice import MultiIndex, as_index

logger = logging.getLogger(__name__)


class LatticeProvider:
    """Base class for values indexed by N^m."""

    kind = "abstract"

    def __init__(self, m: int, value_shape: Tuple[int, ...]):
        """
        Initialize the provider.

        Args:
            m: Lattice dimension
            value_shape: (n, n) for coefficient providers, (n,) for forcing
        """
        if m < 1:
            raise DimensionMismatchError(f"Lattice dimension must be >= 1, got {m}")
        self.m = m
        self.value_shape = tuple(value_shape)

    @property
    def n(self) -> int:
        return self.value_shape[0]

    @property
    def exact(self) -> bool:
        """Whether repeated queries return bit-identical stored values."""
        return False

    @property
    def natural_period(self) -> Optional[int]:
        """A diagonal period known from the construction, if any."""
        return None

    @property
    def is_zero(self) -> bool:
        return False

    def value(self, t: MultiIndex) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t: Sequence[int]) -> np.ndarray:
        index = as_index(t)
        if len(index) != self.m:
            raise DimensionMismatchError(
                f"{self.kind} provider expects {self.m} components, got {index.to_string()}"
            )
        value = self.value(index)
        if value.shape != self.value_shape:
            raise DimensionMismatchError(
                f"{self.kind} provider returned shape {value.shape}, expected {self.value_shape}"
            )
        return value

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "m": self.m, "shape": list(self.value_shape)}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(m={self.m}, shape={self.value_shape})"


class ConstantProvider(LatticeProvider):
    """The same matrix (or vector) at every lattice point."""

    kind = "constant"

    def __init__(self, m: int, value):
        array = np.array(value, dtype=complex if np.iscomplexobj(value) else float)
        super().__init__(m, array.shape)
        array.setflags(write=False)
        self._value = array

    @property
    def exact(self) -> bool:
        return True

    @property
    def natural_period(self) -> int:
        return 1

    @property
    def is_zero(self) -> bool:
        return not np.any(self._value)

    def value(self, t: MultiIndex) -> np.ndarray:
        return self._value

    def to_dict(self) -> Dict[str, Any]:
        result = super().to_dict()
        result["value"] = self._value.real.tolist()
        return result


class PeriodicTableProvider(LatticeProvider):
    """
    Componentwise-periodic table: value(t) = table[t^1 mod p1, ..., t^m mod pm].

    Such a provider is T-diagonal-periodic with T = lcm(p1, ..., pm).
    """

    kind = "periodic"

    def __init__(self, table, periods: Sequence[int]):
        array = np.array(table, dtype=complex if np.iscomplexobj(table) else float)
        periods = tuple(int(p) for p in periods)
        m = len(periods)
        if any(p < 1 for p in periods):
            raise DimensionMismatchError(f"Periods must be positive, got {periods}")
        if array.shape[:m] != periods:
            raise DimensionMismatchError(
                f"Table leading shape {array.shape[:m]} does not match periods {periods}"
            )
        super().__init__(m, array.shape[m:])
        array.setflags(write=False)
        self._table = array
        self.periods = periods

    @property
    def exact(self) -> bool:
        return True

    @property
    def natural_period(self) -> int:
        return reduce(lambda a, b: a * b // math.gcd(a, b), self.periods, 1)

    def value(self, t: MultiIndex) -> np.ndarray:
        return self._table[tuple(c % p for c, p in zip(t, self.periods))]

    def to_dict(self) -> Dict[str, Any]:
        result = super().to_dict()
        result["periods"] = list(self.periods)
        return result


class FunctionProvider(LatticeProvider):
    """Values computed by a callable; used for derived model matrices."""

    kind = "derived"

    def __init__(self, m: int, value_shape: Tuple[int, ...], function: Callable[[MultiIndex], Any],
                 period: Optional[int] = None, label: str = "derived"):
        super().__init__(m, value_shape)
        self._function = function
        self._period = period
        self.label = label

    @property
    def natural_period(self) -> Optional[int]:
        return self._period

    def value(self, t: MultiIndex) -> np.ndarray:
        return np.asarray(self._function(t))

    def to_dict(self) -> Dict[str, Any]:
        result = super().to_dict()
        result["label"] = self.label
        if self._period is not None:
            result["period"] = self._period
        return result


def zero_forcing(m: int, n: int) -> ConstantProvider:
    """The default forcing b == 0."""
    return ConstantProvider(m, np.zeros(n))


def _constant_from_config(m: int, spec: Dict[str, Any], field: str) -> LatticeProvider:
    if field not in spec:
        raise ConfigValidationError(f"constant provider requires '{field}'")
    return ConstantProvider(m, spec[field])


def _periodic_from_config(m: int, spec: Dict[str, Any], field: str) -> LatticeProvider:
    if "periods" not in spec or "table" not in spec:
        raise ConfigValidationError("periodic provider requires 'periods' and 'table'")
    if len(spec["periods"]) != m:
        raise ConfigValidationError(f"periodic provider needs {m} periods, got {len(spec['periods'])}")
    return PeriodicTableProvider(spec["table"], spec["periods"])


PROVIDER_KINDS: Dict[str, Callable[[int, Dict[str, Any], str], LatticeProvider]] = {
    "constant": _constant_from_config,
    "periodic": _periodic_from_config,
}


def provider_from_config(m: int, n: int, spec: Optional[Dict[str, Any]], vector: bool = False) -> LatticeProvider:
    """
    Build a provider from a config block such as ``{"kind": "constant", "matrix": [[2]]}``.

    Args:
        m: Lattice dimension
        n: Recurrence order
        spec: Config block, or None for the zero forcing
        vector: Build a forcing provider (field ``vector``) instead of a coefficient one

    Returns:
        Provider whose values have shape (n,) or (n, n)
    """
    if spec is None or spec.get("kind") == "zero":
        if not vector:
            raise ConfigValidationError("coefficients block is required")
        return zero_forcing(m, n)
    kind = spec.get("kind")
    if kind not in PROVIDER_KINDS:
        raise ConfigValidationError(f"Unknown provider kind: {kind!r}")
    field = "vector" if vector else "matrix"
    provider = PROVIDER_KINDS[kind](m, spec, field)
    expected = (n,) if vector else (n, n)
    if provider.value_shape != expected:
        raise ConfigValidationError(
            f"{'forcing' if vector else 'coefficient'} values have shape {provider.value_shape}, expected {expected}"
        )
    logger.debug(f"Built {kind} provider with shape {provider.value_shape}")
    return provider
