"""Valuation sampling for falsify-mode compatibility checks.

A valuation assigns naturals to order-0 variables and weakly monotone
functions to the size and cost components of order-1 variables. Samples are
produced in numpy batches, one lane per valuation: first a deterministic
mixed-radix sweep over a small grid and a fixed function family, then
seeded random draws until the budget is spent.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

import numpy as np

from src.config import SAMPLE_RANDOM_MAX
from src.logging_config import get_logger
from src.terms import SimpleType, arg_types, order, result_type

logger = get_logger(__name__)

# The all-ones point comes first.
GRID = (1, 0, 2, 3, 4, 5)
FAMILY_STEPS = (1, 0, 2, 3, 4)
UNCAPPED = 2 ** 61
BATCH_SIZE = 2048


@dataclass(frozen=True)
class MonotoneFn:
    """λz.min(a*z+b, cap), or λz.monus(b, a*z) when decreasing.

    Several arguments are summed first. Parameters are scalars for a single
    valuation or numpy arrays (one entry per lane) for a batch.
    """
    a: Any
    b: Any
    cap: Any = UNCAPPED
    decreasing: bool = False
    arity: int = 1
    pending: Any = 0

    def __call__(self, value: Any) -> Any:
        total = value + self.pending
        if self.arity > 1:
            return MonotoneFn(self.a, self.b, self.cap, self.decreasing, self.arity - 1, total)
        if self.decreasing:
            return np.maximum(self.b - self.a * total, 0) if _is_array(total, self.a) \
                else max(self.b - self.a * total, 0)
        if _is_array(total, self.a):
            return np.minimum(self.a * total + self.b, self.cap)
        return min(self.a * total + self.b, self.cap)

    def lane(self, index: int) -> 'MonotoneFn':
        return MonotoneFn(_pick(self.a, index), _pick(self.b, index), _pick(self.cap, index),
                          self.decreasing, self.arity)

    def exact(self) -> 'MonotoneFn':
        return MonotoneFn(_as_object(self.a), _as_object(self.b), _as_object(self.cap),
                          self.decreasing, self.arity)

    def __str__(self) -> str:
        binder = 'z' if self.arity == 1 else ' '.join(f"z{i}" for i in range(1, self.arity + 1))
        z = 'z' if self.arity == 1 else '(' + '+'.join(f"z{i}" for i in range(1, self.arity + 1)) + ')'
        a, b, cap = int(self.a), int(self.b), int(self.cap)
        if self.decreasing:
            return f"λ{binder}.monus({b},{a}*{z})"
        linear = f"{a}*{z}+{b}"
        return f"λ{binder}.{linear}" if cap >= UNCAPPED else f"λ{binder}.min({linear},{cap})"


def _is_array(*values: Any) -> bool:
    return any(isinstance(v, np.ndarray) for v in values)


def _pick(value: Any, index: int) -> Any:
    return int(value[index]) if isinstance(value, np.ndarray) else value


def _as_object(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.astype(object)
    return value


@dataclass
class Valuation:
    """One concrete valuation: naturals for order-0 variables, functions for order-1."""
    numbers: dict[str, int] = field(default_factory=dict)
    sizes: dict[str, MonotoneFn] = field(default_factory=dict)
    costs: dict[str, MonotoneFn] = field(default_factory=dict)

    def alpha(self) -> dict[str, Any]:
        return {**self.numbers, **self.sizes}

    def zeta(self) -> dict[str, Any]:
        return dict(self.costs)

    def __str__(self) -> str:
        parts = [f"{name}={value}" for name, value in sorted(self.numbers.items())]
        for name in sorted(self.sizes):
            parts.append(f"{name}.size={self.sizes[name]}")
            parts.append(f"{name}.cost={self.costs[name]}")
        return ' '.join(parts) if parts else '(no variables)'


@dataclass
class Batch:
    count: int
    numbers: dict[str, np.ndarray]
    sizes: dict[str, MonotoneFn]
    costs: dict[str, MonotoneFn]

    def alpha(self) -> dict[str, Any]:
        return {**self.numbers, **self.sizes}

    def zeta(self) -> dict[str, Any]:
        return dict(self.costs)

    def exact(self) -> 'Batch':
        return Batch(
            self.count,
            {name: values.astype(object) for name, values in self.numbers.items()},
            {name: fn.exact() for name, fn in self.sizes.items()},
            {name: fn.exact() for name, fn in self.costs.items()},
        )

    def lane(self, index: int) -> Valuation:
        return Valuation(
            {name: int(values[index]) for name, values in self.numbers.items()},
            {name: fn.lane(index) for name, fn in self.sizes.items()},
            {name: fn.lane(index) for name, fn in self.costs.items()},
        )


@dataclass(frozen=True)
class FunctionSlot:
    """One sampled function: the size or cost component of an order-1 variable."""
    variable: str
    component: str  # 'size' or 'cost'
    arity: int
    decreasing: bool


def _family(decreasing: bool) -> list[tuple[int, int, int]]:
    if decreasing:
        return [(a, b, UNCAPPED) for a in FAMILY_STEPS for b in FAMILY_STEPS]
    affine = [(a, b, UNCAPPED) for a in FAMILY_STEPS for b in FAMILY_STEPS]
    saturating = [(a, b, c) for a in FAMILY_STEPS for b in FAMILY_STEPS for c in FAMILY_STEPS]
    return affine + saturating


def function_slots(variables: dict[str, SimpleType],
                   ascending: set[str]) -> tuple[list[str], list[FunctionSlot]]:
    """Split rule variables into numeric names and function slots.

    `ascending` names the sorts ordered by <=; a slot is antitone when exactly
    one of its argument sort and result sort is ascending.
    """
    numeric: list[str] = []
    slots: list[FunctionSlot] = []
    for name, ty in variables.items():
        if order(ty) == 0:
            numeric.append(name)
            continue
        args = arg_types(ty)
        arg_asc = any(str(arg) in ascending for arg in args)
        result_asc = result_type(ty).name in ascending
        slots.append(FunctionSlot(name, 'size', len(args), arg_asc != result_asc))
        # costs are ordered by >= regardless of sort
        slots.append(FunctionSlot(name, 'cost', len(args), arg_asc))
    return numeric, slots


def sample_batches(variables: dict[str, SimpleType], ascending: set[str], budget: int,
                   seed: int, stream: int = 0,
                   batch_size: int = BATCH_SIZE) -> Iterator[Batch]:
    """Yield batches covering `budget` valuations: grid sweep, then random draws."""
    numeric, slots = function_slots(variables, ascending)
    families = [_family(slot.decreasing) for slot in slots]
    radices = [len(GRID)] * len(numeric) + [len(family) for family in families]
    sweep = min(budget, math.prod(radices)) if radices else min(budget, 1)
    rng = np.random.default_rng([seed, stream])
    logger.debug(f"Sampling {budget} valuations ({sweep} from the grid) for {len(variables)} variables")

    start = 0
    while start < budget:
        count = min(batch_size, budget - start)
        grid_count = max(0, min(count, sweep - start))
        digits = _grid_digits(np.arange(start, start + grid_count), radices)
        random_count = count - grid_count

        numbers = {}
        for column, name in enumerate(numeric):
            grid = np.asarray(GRID, dtype=np.int64)[digits[column]]
            drawn = rng.integers(0, SAMPLE_RANDOM_MAX, size=random_count, endpoint=True)
            numbers[name] = np.concatenate([grid, drawn]).astype(np.int64)

        sizes: dict[str, MonotoneFn] = {}
        costs: dict[str, MonotoneFn] = {}
        for offset, (slot, family) in enumerate(zip(slots, families)):
            table = np.asarray(family, dtype=np.int64)
            chosen = table[digits[len(numeric) + offset]]
            a = np.concatenate([chosen[:, 0], rng.integers(0, 4, size=random_count, endpoint=True)])
            b = np.concatenate([chosen[:, 1], rng.integers(0, 30 if slot.decreasing else 10,
                                                           size=random_count, endpoint=True)])
            drawn_cap = rng.integers(0, 30, size=random_count, endpoint=True)
            uncapped = rng.random(random_count) < 0.5
            cap = np.concatenate([chosen[:, 2], np.where(uncapped | slot.decreasing, UNCAPPED, drawn_cap)])
            fn = MonotoneFn(a, b, cap.astype(np.int64), slot.decreasing, slot.arity)
            (sizes if slot.component == 'size' else costs)[slot.variable] = fn

        yield Batch(count, numbers, sizes, costs)
        start += count


def _grid_digits(indices: np.ndarray, radices: list[int]) -> list[np.ndarray]:
    """Mixed-radix digits, first radix varying fastest."""
    digits = []
    rest = indices.copy()
    for radix in radices:
        digits.append(rest % radix)
        rest = rest // radix
    return digits


def single_valuation(numbers: Optional[dict[str, int]] = None,
                     functions: Optional[dict[str, tuple[MonotoneFn, MonotoneFn]]] = None) -> Valuation:
    """Build a valuation by hand; `functions` maps a name to (size, cost)."""
    functions = functions or {}
    return Valuation(
        dict(numbers or {}),
        {name: pair[0] for name, pair in functions.items()},
        {name: pair[1] for name, pair in functions.items()},
    )
