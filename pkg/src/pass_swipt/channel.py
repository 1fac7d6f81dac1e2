"""Near-field channel between pinching antennas and ground receivers.

Every antenna sits on the waveguide at ``(x, 0, d)``. The channel from an
antenna to a receiver is the free-space spherical-wave term times the phase
the signal accumulates travelling inside the waveguide from the feed point::

    h = eta / r * exp(-j 2 pi r / wavelength) * exp(-j 2 pi |x_feed - x| / guided_wavelength)

with ``eta = c / (4 pi f_c)``. Phases are reduced with ``math.fmod`` before
scaling by 2 pi, which is exact in floating point and keeps the argument of
the complex exponential small even when ``r`` spans thousands of wavelengths.

These scalar functions are the reference path; batched versions used by the
optimizers live in :mod:`pass_swipt.kernels`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import DegenerateGeometryError

#: Receivers closer than this to an antenna are rejected, never clamped.
MIN_DISTANCE = 1e-6


class Point3(NamedTuple):
    x: float
    y: float
    z: float = 0.0


@dataclass(frozen=True)
class PhysicalConstants:
    carrier_frequency: float = 28e9
    propagation_speed: float = 3e8
    refractive_index: float = 1.4

    def __post_init__(self):
        if not self.carrier_frequency > 0:
            raise ValueError("carrier_frequency must be positive")
        if not self.propagation_speed > 0:
            raise ValueError("propagation_speed must be positive")
        if not self.refractive_index >= 1:
            raise ValueError("refractive_index must be >= 1")

    @property
    def wavelength(self) -> float:
        return self.propagation_speed / self.carrier_frequency

    @property
    def guided_wavelength(self) -> float:
        return self.wavelength / self.refractive_index

    @property
    def eta(self) -> float:
        return self.propagation_speed / (4 * math.pi * self.carrier_frequency)


def distance(a: Point3, b: Point3) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def _cycles(length: float, period: float) -> float:
    # fraction of a period in [0, 1); fmod is exact
    return math.fmod(length, period) / period


def waveguide_phase(pa_x: float, feed_x: float, consts: PhysicalConstants) -> complex:
    """Phase factor accumulated inside the waveguide from the feed to ``pa_x``."""
    return cmath.exp(-2j * math.pi * _cycles(abs(feed_x - pa_x), consts.guided_wavelength))


def channel_gain(pa_x: float, feed_x: float, receiver: Point3, height: float,
                 consts: PhysicalConstants) -> complex:
    """Complex channel from the antenna at ``pa_x`` to ``receiver``.

    Raises
    ------
    DegenerateGeometryError
        If the receiver is closer than :data:`MIN_DISTANCE` to the antenna.
    """
    r = distance(Point3(pa_x, 0.0, height), receiver)
    if r < MIN_DISTANCE:
        raise DegenerateGeometryError(
            f"receiver {tuple(receiver)} coincides with antenna at x={pa_x}")
    turns = _cycles(r, consts.wavelength) + _cycles(abs(feed_x - pa_x), consts.guided_wavelength)
    return consts.eta / r * cmath.exp(-2j * math.pi * turns)


def aggregate_gain(layout: Iterable[float], feed_x: float, receiver: Point3, height: float,
                   consts: PhysicalConstants) -> complex:
    """Coherent sum of :func:`channel_gain` over every antenna in ``layout``."""
    xs = list(layout)
    if not xs:
        raise ValueError("layout must contain at least one antenna")
    total = 0j
    for x in xs:
        total += channel_gain(x, feed_x, receiver, height, consts)
    return total
