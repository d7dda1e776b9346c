"""Fisher information for the q-Gaussian in (alpha, kappa) coordinates.

With alpha = 1/(q-1) and kappa = beta/alpha the per-observation scores are

    d log P / d alpha = psi(alpha) - psi(alpha - 1/2) - log(1 + kappa x^2)
    d log P / d kappa = 1/(2 kappa) - alpha x^2 / (1 + kappa x^2)

and the expected information has the closed form

    I_aa = psi1(alpha - 1/2) - psi1(alpha)
    I_ak = 1 / (2 kappa alpha)
    I_kk = (2 alpha - 1) / (4 kappa^2 (alpha + 1))

Standard errors in (q, beta) come from I_qb = J I_ak J^T with
J = [[-alpha^2, kappa alpha], [0, 1/alpha]].
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import special

from . import _kernels
from .errors import DomainError, SingularMatrixError

DET_FLOOR = 1e-300

ALPHA_KAPPA = "alpha_kappa"
Q_BETA = "q_beta"


@dataclass(frozen=True)
class InfoMatrix2:
    """Symmetric 2x2 information matrix with its coordinate basis."""

    entries: np.ndarray
    basis: str = ALPHA_KAPPA

    def __post_init__(self):
        m = np.array(self.entries, dtype=float).reshape(2, 2)
        if self.basis not in (ALPHA_KAPPA, Q_BETA):
            raise ValueError(f"unknown basis {self.basis!r}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def __getitem__(self, idx):
        return self.entries[idx]

    @property
    def det(self):
        m = self.entries
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]

    def inverse(self):
        det = self.det
        if not abs(det) > DET_FLOOR or not math.isfinite(det):
            raise SingularMatrixError(f"information matrix is singular (det={det:g})")
        m = self.entries
        inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det
        return inv


def digamma_gap(alpha):
    """psi(alpha) - psi(alpha - 1/2)."""
    return special.digamma(alpha) - special.digamma(alpha - 0.5)


def jacobian(alpha, kappa):
    """Rows index (q, beta), columns index (alpha, kappa)."""
    return np.array([[-alpha * alpha, kappa * alpha], [0.0, 1.0 / alpha]])


def expected_fisher(p):
    alpha, kappa = p.alpha, p.kappa
    if not (alpha > 0.5 and math.isfinite(alpha)):
        raise DomainError(f"expected Fisher information needs 1/2 < alpha < inf, got {alpha}")
    i_aa = special.polygamma(1, alpha - 0.5) - special.polygamma(1, alpha)
    i_ak = 1.0 / (2.0 * kappa * alpha)
    i_kk = (2.0 * alpha - 1.0) / (4.0 * kappa * kappa * (alpha + 1.0))
    return InfoMatrix2(np.array([[i_aa, i_ak], [i_ak, i_kk]]))


def measured_fisher(values, p):
    """Mean outer product of the per-sample scores at ``p``."""
    alpha, kappa = p.alpha, p.kappa
    if not (alpha > 0.5 and math.isfinite(alpha)):
        raise DomainError("measured Fisher information needs 1/2 < alpha < inf")
    x = np.asarray(getattr(values, "values", values), dtype=float)
    x2 = (x - p.mean) ** 2
    aa, ak, kk = _kernels.score_products(x2, alpha, kappa, digamma_gap(alpha))
    return InfoMatrix2(np.array([[aa, ak], [ak, kk]]))


def to_q_beta(m, p):
    if m.basis == Q_BETA:
        return m
    j = jacobian(p.alpha, p.kappa)
    return InfoMatrix2(j @ m.entries @ j.T, basis=Q_BETA)


def standard_errors_alpha_kappa(n, m):
    inv = m.inverse()
    return math.sqrt(inv[0, 0] / n), math.sqrt(inv[1, 1] / n)


def standard_errors_q_beta(p, n, m):
    """(S_q, S_beta) from an (alpha, kappa) or (q, beta) information matrix."""
    if n <= 0:
        raise DomainError("sample count must be positive")
    inv = to_q_beta(m, p).inverse()
    if not (inv[0, 0] > 0 and inv[1, 1] > 0):
        raise SingularMatrixError("information matrix is not positive definite")
    return math.sqrt(inv[0, 0] / n), math.sqrt(inv[1, 1] / n)


def stderr_beta_fixed_q(p, n, i_kk=None):
    """Error in beta when q is held fixed: only the kappa-kappa block is used."""
    if p.is_gaussian:
        return p.beta * math.sqrt(2.0 / n)
    if i_kk is None:
        i_kk = expected_fisher(p)[1, 1]
    if not i_kk > 0:
        raise SingularMatrixError("kappa-kappa information is not positive")
    return p.alpha / math.sqrt(n * i_kk)
