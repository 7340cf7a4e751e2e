from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy

from .errors import ConstraintViolated

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], numpy.ndarray]

EQUALITY_TOLERANCE = 1e-9
PEAKON_TOLERANCE = 1e-12


def _as_readonly(values: Any, name: str) -> numpy.ndarray:
    array = numpy.array(values, dtype=float).ravel()
    if not numpy.all(numpy.isfinite(array)):
        raise ValueError(f"`{name}` must contain only finite values.")
    array.flags.writeable = False
    return array


def _scalar_or_array(value: numpy.ndarray, like: Any) -> Union[float, numpy.ndarray]:
    if numpy.ndim(like) == 0:
        return float(value)
    return value


class PiecewiseLinearFn:
    """
    A continuous piecewise-linear function with constant tails.

    The function is described by strictly increasing breakpoints `x` and the
    values `y` it takes there. Outside of `[x[0], x[-1]]` it is constant, so
    its derivative is compactly supported and its energy `∫u_x²` is finite.
    Instances are immutable and may be shared freely.

    Segment lengths and rises are kept as given when the function is built
    with `PiecewiseLinearFn.from_increments`, so that quantities depending on
    them (slopes, masses, energy) do not suffer from cancellation when
    segments become very short compared to the magnitude of the abscissae,
    down to lengths below the floating-point spacing there.

    Attributes:
        x: The breakpoints (read-only).
        y: The values at the breakpoints (read-only).
    """

    def __init__(self, x: ArrayLike, y: ArrayLike):
        x = _as_readonly(x, "x")
        y = _as_readonly(y, "y")
        if len(x) == 0:
            raise ValueError("A piecewise-linear function needs at least one breakpoint.")
        if len(x) != len(y):
            raise ValueError(
                f"`x` and `y` must have the same length, not {len(x)} and {len(y)}."
            )
        lengths = numpy.diff(x)
        if numpy.any(lengths <= 0):
            raise ValueError("Breakpoints `x` must be strictly increasing.")
        self._set_arrays(x, y, lengths, numpy.diff(y))

    def _set_arrays(
        self, x: numpy.ndarray, y: numpy.ndarray, lengths: numpy.ndarray, rises: numpy.ndarray
    ) -> None:
        for array in (x, y, lengths, rises):
            array.flags.writeable = False
        self._x = x
        self._y = y
        self._lengths = lengths
        self._rises = rises

    @classmethod
    def from_increments(
        cls, x0: float, y0: float, lengths: ArrayLike, rises: ArrayLike
    ) -> PiecewiseLinearFn:
        """
        Build a function from its first breakpoint and per-segment increments.

        Only the increments are validated. A segment shorter than the spacing
        of floating-point numbers near its abscissa keeps its exact length
        and rise, but shares its breakpoints with its neighbour, so the
        breakpoints of the result are only guaranteed to be nondecreasing.

        Args:
            x0: The first breakpoint.
            y0: The value at the first breakpoint.
            lengths: The (positive) segment lengths.
            rises: The change of value across each segment.
        """
        lengths = _as_readonly(lengths, "lengths")
        rises = _as_readonly(rises, "rises")
        if len(lengths) != len(rises):
            raise ValueError("`lengths` and `rises` must have the same length.")
        if numpy.any(lengths <= 0):
            raise ValueError("Segment `lengths` must be strictly positive.")
        x = _as_readonly(numpy.concatenate([[x0], x0 + numpy.cumsum(lengths)]), "x")
        y = _as_readonly(numpy.concatenate([[y0], y0 + numpy.cumsum(rises)]), "y")
        f = cls.__new__(cls)
        f._set_arrays(x, y, lengths, rises)
        return f

    @classmethod
    def constant(cls, value: float = 0.0, at: float = 0.0) -> PiecewiseLinearFn:
        return cls([at], [value])

    # Geometry

    @property
    def x(self) -> numpy.ndarray:
        return self._x

    @property
    def y(self) -> numpy.ndarray:
        return self._y

    @property
    def n_segments(self) -> int:
        return len(self._lengths)

    @property
    def lengths(self) -> numpy.ndarray:
        return self._lengths

    @property
    def rises(self) -> numpy.ndarray:
        return self._rises

    @cached_property
    def slopes(self) -> numpy.ndarray:
        slopes = self._rises / self._lengths
        slopes.flags.writeable = False
        return slopes

    @cached_property
    def masses(self) -> numpy.ndarray:
        """
        The energy `s_k² ℓ_k` carried by each segment.
        """
        masses = self._rises**2 / self._lengths
        masses.flags.writeable = False
        return masses

    @cached_property
    def cumulative_masses(self) -> numpy.ndarray:
        cumulative = numpy.concatenate([[0.0], numpy.cumsum(self.masses)])
        cumulative.flags.writeable = False
        return cumulative

    @property
    def tail_values(self) -> Tuple[float, float]:
        return float(self._y[0]), float(self._y[-1])

    # Evaluation

    def __call__(self, x: ArrayLike) -> Union[float, numpy.ndarray]:
        return _scalar_or_array(numpy.interp(x, self._x, self._y), x)

    def evaluate(self, x: ArrayLike) -> Union[float, numpy.ndarray]:
        """
        Evaluate the function exactly, using the constant tail values outside
        of the breakpoint range.
        """
        return self(x)

    def segment_index(self, x: ArrayLike) -> Union[int, numpy.ndarray]:
        """
        The index of the segment containing each `x`, using the
        right-continuous convention at breakpoints. The left tail is reported
        as `-1` and the right tail as `n_segments`.
        """
        index = numpy.searchsorted(self._x, x, side="right") - 1
        index = numpy.where(index >= self.n_segments, self.n_segments, index)
        if numpy.ndim(x) == 0:
            return int(index)
        return index

    def slope_at(self, x: ArrayLike) -> Union[float, numpy.ndarray]:
        """
        The derivative at `x` (right-continuous at breakpoints; 0 on tails).
        """
        index = numpy.atleast_1d(self.segment_index(x))
        inside = (index >= 0) & (index < self.n_segments)
        slopes = numpy.zeros(index.shape, dtype=float)
        slopes[inside] = self.slopes[index[inside]]
        return _scalar_or_array(slopes.reshape(numpy.shape(x)), x)

    def energy(self) -> float:
        """
        The exact value of `∫u_x² dx`.
        """
        return float(numpy.sum(self.masses))

    def cumulative_energy(self, x: ArrayLike) -> Union[float, numpy.ndarray]:
        """
        The energy `∫_{-∞}^x u_x²` to the left of `x`, exact and linear
        within segments.
        """
        return _scalar_or_array(
            numpy.interp(x, self._x, self.cumulative_masses), x
        )

    def nonlocal_term(self, x: ArrayLike) -> Union[float, numpy.ndarray]:
        """
        The nonlocal forcing `F(x) = ¼(∫_{-∞}^x u_x² - ∫_x^∞ u_x²)` of the
        integrated equation.
        """
        total = self.cumulative_masses[-1]
        return _scalar_or_array(
            0.25 * (2.0 * numpy.interp(x, self._x, self.cumulative_masses) - total),
            x,
        )

    def sup_norm(self) -> float:
        return float(numpy.max(numpy.abs(self._y)))

    def sup_distance(self, other: PiecewiseLinearFn) -> float:
        """
        The exact sup-norm distance to `other`. The difference of two
        piecewise-linear functions is piecewise linear on the union of their
        breakpoints, so it is enough to look there.
        """
        points = numpy.union1d(self._x, other.x)
        return float(numpy.max(numpy.abs(self(points) - other(points))))

    def holder_bound_check(self, pairs: Iterable[Tuple[float, float]]) -> bool:
        """
        Check `|f(x) - f(y)| <= K sqrt(|x - y|)` with `K = ‖f_x‖_{L²}` for all
        supplied pairs.

        Args:
            pairs: An iterable of `(x, y)` abscissae, or an array of shape
                `(N, 2)`.
        """
        pairs = numpy.array(list(pairs), dtype=float).reshape(-1, 2)
        if len(pairs) == 0:
            return True
        K = numpy.sqrt(self.energy())
        lhs = numpy.abs(self(pairs[:, 0]) - self(pairs[:, 1]))
        rhs = K * numpy.sqrt(numpy.abs(pairs[:, 0] - pairs[:, 1]))
        return bool(numpy.all(lhs <= rhs * (1 + 1e-12) + 1e-14))

    # Transformations

    def translate(self, delta: float) -> PiecewiseLinearFn:
        return PiecewiseLinearFn.from_increments(
            self._x[0] + delta, self._y[0], self._lengths, self._rises
        )

    def normalize(self, tolerance: float = 1e-12) -> PiecewiseLinearFn:
        """
        Merge collinear neighbouring segments, including segments that are
        flat and adjacent to a (flat) tail. Constant functions normalize to a
        single breakpoint.
        """
        extended = numpy.concatenate([[0.0], self.slopes, [0.0]])
        kinks = numpy.flatnonzero(
            numpy.abs(numpy.diff(extended))
            > tolerance
            * numpy.maximum(
                1.0, numpy.maximum(numpy.abs(extended[:-1]), numpy.abs(extended[1:]))
            )
        )
        if len(kinks) < 2:
            return PiecewiseLinearFn.constant(self._y[0], at=self._x[0])
        # Merged segments are summed from the stored increments.
        first, last = kinks[0], kinks[-1]
        starts = kinks[:-1] - first
        return PiecewiseLinearFn.from_increments(
            self._x[first],
            self._y[first],
            numpy.add.reduceat(self._lengths[first:last], starts),
            numpy.add.reduceat(self._rises[first:last], starts),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PiecewiseLinearFn):
            return NotImplemented
        a, b = self.normalize(), other.normalize()
        if len(a.x) == 1 and len(b.x) == 1:
            return bool(abs(a.y[0] - b.y[0]) <= EQUALITY_TOLERANCE)
        return (
            len(a.x) == len(b.x)
            and numpy.allclose(a.x, b.x, rtol=0, atol=EQUALITY_TOLERANCE)
            and numpy.allclose(a.y, b.y, rtol=0, atol=EQUALITY_TOLERANCE)
        )

    __hash__ = None  # type: ignore

    def __repr__(self) -> str:
        return f"PiecewiseLinearFn(x={self._x.tolist()!r}, y={self._y.tolist()!r})"

    # Serialization

    def to_dict(self) -> Dict[str, List[float]]:
        return {"x": self._x.tolist(), "y": self._y.tolist()}

    @classmethod
    def from_dict(cls, spec: Mapping[str, Sequence[float]]) -> PiecewiseLinearFn:
        if set(spec) != {"x", "y"}:
            raise ValueError(
                f"A piecewise-linear function is specified by keys `x` and `y`, not {sorted(spec)}."
            )
        return cls(spec["x"], spec["y"])


@dataclass(frozen=True, eq=False)
class PeakonConfig:
    """
    A peakon-type datum `u(x) = Σ α_i |x - x_i|`.

    Positions are sorted (carrying their amplitudes along) on construction
    and must be distinct. The zero-sum constraint on the amplitudes is not
    enforced here, so that inadmissible configurations can be represented and
    reported; it is enforced by `from_peakons`.

    Attributes:
        alpha: The amplitudes `α_i`.
        pos: The positions `x_i`.
    """

    alpha: numpy.ndarray
    pos: numpy.ndarray

    def __post_init__(self) -> None:
        alpha = _as_readonly(self.alpha, "alpha")
        pos = _as_readonly(self.pos, "pos")
        if len(alpha) != len(pos):
            raise ValueError("`alpha` and `pos` must have the same length.")
        if len(pos) == 0:
            raise ValueError("At least one peakon is required.")
        order = numpy.argsort(pos, kind="stable")
        alpha, pos = alpha[order], pos[order]
        if numpy.any(numpy.diff(pos) <= 0):
            raise ValueError("Peakon positions `pos` must be distinct.")
        alpha.flags.writeable = False
        pos.flags.writeable = False
        self.__dict__["alpha"] = alpha
        self.__dict__["pos"] = pos

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PeakonConfig):
            return NotImplemented
        return numpy.array_equal(self.alpha, other.alpha) and numpy.array_equal(
            self.pos, other.pos
        )

    @property
    def residual(self) -> float:
        return float(numpy.sum(self.alpha))

    @property
    def is_admissible(self) -> bool:
        scale = max(1.0, float(numpy.max(numpy.abs(self.alpha))))
        return abs(self.residual) <= PEAKON_TOLERANCE * scale

    def __call__(self, x: ArrayLike) -> Union[float, numpy.ndarray]:
        values = numpy.abs(numpy.subtract.outer(numpy.atleast_1d(x), self.pos)) @ self.alpha
        return _scalar_or_array(values.reshape(numpy.shape(x)), x)

    def hamiltonian(self) -> float:
        """
        `H = ½ Σ_{i,j} α_i α_j |x_i - x_j|`.
        """
        distances = numpy.abs(numpy.subtract.outer(self.pos, self.pos))
        return float(0.5 * self.alpha @ distances @ self.alpha)

    def invariant(self) -> float:
        """
        The invariant `I = ½∫u_x²`; for admissible configurations `I = -2H`.
        """
        return 0.5 * from_peakons(self).energy()

    def asymptotic_value(self) -> float:
        """
        `Σ α_i x_i`, which is the limit of `u` at `-∞` (the limit at `+∞` is
        its negative).
        """
        return float(self.alpha @ self.pos)

    def to_dict(self) -> Dict[str, List[float]]:
        return {"alpha": self.alpha.tolist(), "pos": self.pos.tolist()}

    @classmethod
    def from_dict(cls, spec: Mapping[str, Sequence[float]]) -> PeakonConfig:
        if set(spec) != {"alpha", "pos"}:
            raise ValueError(
                f"A peakon configuration is specified by keys `alpha` and `pos`, not {sorted(spec)}."
            )
        return cls(alpha=spec["alpha"], pos=spec["pos"])


# Functional interface


def evaluate(f: PiecewiseLinearFn, x: ArrayLike) -> Union[float, numpy.ndarray]:
    return f(x)


def energy(f: PiecewiseLinearFn) -> float:
    return f.energy()


def holder_bound_check(
    f: PiecewiseLinearFn, pairs: Iterable[Tuple[float, float]]
) -> bool:
    return f.holder_bound_check(pairs)


def from_peakons(c: PeakonConfig) -> PiecewiseLinearFn:
    """
    The piecewise-linear function `Σ α_i |x - x_i|` with breakpoints at the
    peakon positions.

    Raises:
        ConstraintViolated: If `Σ α_i` is not zero (within tolerance), in which
            case the function has non-constant tails and infinite energy.
    """
    if not c.is_admissible:
        raise ConstraintViolated(
            f"Peakon amplitudes must sum to zero; got `sum(alpha) = {c.residual!r}`."
        )
    return PiecewiseLinearFn(c.pos, c(c.pos))


# Builders


def hat(
    center: float = 0.0, half_width: float = 1.0, height: float = 1.0
) -> PiecewiseLinearFn:
    """
    The hat `height * (1 - |x - center| / half_width)` on its support.
    """
    if half_width <= 0:
        raise ValueError("`half_width` must be positive.")
    return PiecewiseLinearFn(
        [center - half_width, center, center + half_width], [0.0, height, 0.0]
    )


def sawtooth(m: int) -> PiecewiseLinearFn:
    """
    The sawtooth on `[0, 1]` with `m` teeth of slopes `±1`, vanishing outside.
    """
    if m < 1:
        raise ValueError("`m` must be a positive integer.")
    x = numpy.arange(2 * m + 1) / (2 * m)
    y = numpy.where(numpy.arange(2 * m + 1) % 2 == 1, 1.0 / (2 * m), 0.0)
    return PiecewiseLinearFn(x, y)
