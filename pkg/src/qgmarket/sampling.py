"""Seedable q-Gaussian deviates via the generalized Box-Muller transform.

For a target index q the transform uses the companion index
q' = (1 + q)/(3 - q):

    z = sqrt(-2 ln_q'(u1)) cos(2 pi u2),    u1, u2 ~ U(0, 1]

which yields a q-Gaussian with beta = 1/(3 - q). Dividing by
sqrt((3 - q) beta) rescales it to any other beta.

Uniforms come from numpy's Philox counter-based generator, so a given
``(seed, counter)`` pair reproduces the same stream on every platform.
"""

import math

import numpy as np

from . import _kernels
from .distribution import QGaussianParams
from .errors import DomainError


class SeededStream:
    """Single-owner uniform source keyed by ``seed``.

    ``counter`` picks an independent Philox block, so streams with the
    same seed and different counters never overlap. Use :meth:`split` to
    derive child streams for concurrent work.
    """

    def __init__(self, seed, counter=0):
        seed = int(seed)
        counter = int(counter)
        if not (0 <= seed < 2**64) or not (0 <= counter < 2**64):
            raise DomainError("seed and counter must fit in 64 unsigned bits")
        self.seed = seed
        self.counter = counter
        bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, counter])
        self._gen = np.random.Generator(bitgen)
        self.drawn = 0

    def __repr__(self):
        return f"SeededStream(seed={self.seed}, counter={self.counter}, drawn={self.drawn})"

    def split(self, index):
        """Child stream with its own counter block; independent of ``self``."""
        return SeededStream(self.seed, (self.counter + 1 + int(index)) % 2**64)

    def uniform(self, n):
        """``n`` uniforms on the half-open interval (0, 1]."""
        u = 1.0 - self._gen.random(n)
        self.drawn += n
        return u

    def generator(self):
        return self._gen


def companion_index(q):
    return (1.0 + q) / (3.0 - q)


def sample_q_gaussian(p, n, stream):
    """Draw ``n`` deviates from the q-Gaussian ``p``.

    Two uniforms are consumed per deviate, the first half of a block of
    ``2 n`` for the radius and the second half for the angle.
    """
    if not isinstance(p, QGaussianParams):
        raise TypeError("p must be QGaussianParams")
    if not (1.0 <= p.q < 3.0):
        raise DomainError("sampling needs 1 <= q < 3")
    n = int(n)
    if n <= 0:
        raise DomainError("n must be positive")
    u = stream.uniform(2 * n)
    z = _kernels.box_muller(u[:n], u[n:], companion_index(p.q))
    return z / math.sqrt((3.0 - p.q) * p.beta) + p.mean
