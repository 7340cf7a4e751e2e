from __future__ import annotations

import functools
import logging
from typing import Callable, Sequence, Tuple

import numpy

from hsflow.errors import QuadratureUnresolved

logger = logging.getLogger(__name__)

GAUSS_ORDER = 4


@functools.lru_cache(maxsize=None)
def gauss_legendre(order: int = GAUSS_ORDER) -> Tuple[numpy.ndarray, numpy.ndarray]:
    """
    Gauss-Legendre nodes and weights on `[-1, 1]`. An `order`-point rule is
    exact for polynomials of degree up to `2 * order - 1`.
    """
    nodes, weights = numpy.polynomial.legendre.leggauss(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def composite_gauss(
    func: Callable[[float], float],
    breaks: Sequence[float],
    panels: int,
    order: int = GAUSS_ORDER,
) -> float:
    """
    Integrate a scalar function with a composite Gauss-Legendre rule.

    Every interval between consecutive `breaks` is split into `panels` equal
    panels, so that kinks of the integrand located at breaks do not spoil the
    rule's accuracy.
    """
    nodes, weights = gauss_legendre(order)
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        edges = numpy.linspace(a, b, panels + 1)
        half = 0.5 * numpy.diff(edges)
        mids = 0.5 * (edges[1:] + edges[:-1])
        points = (mids[:, None] + half[:, None] * nodes[None, :]).ravel()
        values = numpy.array([func(p) for p in points]).reshape(panels, order)
        total += float(numpy.sum(half * (values @ weights)))
    return total


def integrate_refined(
    func: Callable[[float], float],
    breaks: Sequence[float],
    tolerance: float = 1e-4,
    initial_panels: int = 2,
    max_doublings: int = 9,
) -> float:
    """
    Integrate `func` over `[breaks[0], breaks[-1]]`, doubling the number of
    panels per interval until two successive estimates agree to within
    `tolerance * max(1, |estimate|)`.

    Raises:
        QuadratureUnresolved: If the estimates have not stabilised after
            `max_doublings` refinements.
    """
    breaks = sorted(set(float(b) for b in breaks))
    if len(breaks) < 2:
        return 0.0
    panels = initial_panels
    coarse = composite_gauss(func, breaks, panels)
    change = numpy.inf
    for _ in range(max_doublings):
        panels *= 2
        fine = composite_gauss(func, breaks, panels)
        change = abs(fine - coarse)
        if change <= tolerance * max(1.0, abs(fine)):
            logger.debug(
                "Quadrature on [%r, %r] stabilised with %d panels per interval.",
                breaks[0],
                breaks[-1],
                panels,
            )
            return fine
        coarse = fine
    raise QuadratureUnresolved(
        f"Quadrature on [{breaks[0]!r}, {breaks[-1]!r}] did not stabilise after {max_doublings} refinements (last change {change!r})."
    )
