"""Finite-atom complete market.

The market enters the equilibrium problem only through the terminal
state-price density Z, so it is represented as a finite atomic
distribution: K atoms with P-probabilities ``p`` and density values
``z``.  Every expectation becomes a finite sum, which makes all the
integrability requirements on Z exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss

PROB_SUM_TOL = 1e-14
DENSITY_MEAN_TOL = 1e-12
WEIGHT_FLOOR = 1e-300


@dataclass(frozen=True)
class Market:
    """Atomic distribution of the state-price density.

    Parameters
    ----------
    p : array of shape (K,)
        Strictly positive P-probabilities summing to 1.
    z : array of shape (K,)
        Strictly positive density values with E_P[z] = 1, so that
        z is the density of the pricing measure Q w.r.t. P.
    """

    p: np.ndarray
    z: np.ndarray
    log_z: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        z = np.atleast_1d(np.asarray(self.z, dtype=float))
        if p.ndim != 1 or z.shape != p.shape:
            raise ValueError("p and z must be 1-d arrays of equal length")
        if p.size == 0:
            raise ValueError("market needs at least one atom")
        if np.any(p <= 0.0):
            raise ValueError("atom probabilities must be strictly positive")
        if abs(p.sum() - 1.0) > PROB_SUM_TOL:
            raise ValueError("atom probabilities must sum to 1 (within %g)" % PROB_SUM_TOL)
        if np.any(z <= 0.0):
            raise ValueError("state-price density must be strictly positive")
        if abs(p @ z - 1.0) > DENSITY_MEAN_TOL:
            raise ValueError(
                "E_P[z] must equal 1 (within %g): z is the density of Q w.r.t. P"
                % DENSITY_MEAN_TOL
            )
        p.setflags(write=False)
        z.setflags(write=False)
        log_z = np.log(z)
        log_z.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "log_z", log_z)

    @property
    def atom_count(self) -> int:
        return self.p.size

    def expect_p(self, f):
        """P-expectation of ``f``; ``f`` has shape (K,) or (K, M)."""
        f = np.asarray(f, dtype=float)
        if f.shape[0] != self.atom_count:
            raise ValueError("f must have one entry per atom")
        return self.p @ f

    def expect_q(self, f):
        """Q-expectation of ``f``: sum_k p_k z_k f_k."""
        f = np.asarray(f, dtype=float)
        if f.shape[0] != self.atom_count:
            raise ValueError("f must have one entry per atom")
        return (self.p * self.z) @ f


def lognormal_market(theta: float, horizon: float = 1.0, nodes: int = 64) -> Market:
    """Gauss-Hermite discretization of a lognormal state-price density.

    Under P, ln Z is N(-theta^2 T / 2, theta^2 T), the terminal density
    produced by a constant market price of risk ``theta`` over horizon
    ``T``.  After discretization z is rescaled multiplicatively so that
    E_P[z] = 1 holds exactly, keeping budget constraints free of
    quadrature bias.
    """
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if nodes < 2:
        raise ValueError("need at least 2 quadrature nodes")
    x, w = hermgauss(nodes)
    p = w / np.sqrt(np.pi)
    sd = theta * np.sqrt(horizon)
    log_z = -0.5 * sd**2 + sd * np.sqrt(2.0) * x
    keep = p >= WEIGHT_FLOOR
    p = p[keep]
    log_z = log_z[keep]
    p = p / p.sum()
    z = np.exp(log_z)
    z = z / (p @ z)
    return Market(p=p, z=z)


def market_to_csv(m: Market, path) -> None:
    """Write the market as a two-column CSV with header ``p,z``."""
    data = np.column_stack([m.p, m.z])
    np.savetxt(path, data, delimiter=",", header="p,z", comments="", fmt="%.17g")


def market_from_csv(path) -> Market:
    """Read a market written by :func:`market_to_csv`."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError("market CSV must have exactly two columns (p, z)")
    return Market(p=data[:, 0], z=data[:, 1])
