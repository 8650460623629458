"""Nash equilibria of the N-player multiplicative relative-performance
utility game in a complete market.

The pipeline: a finite-atom :class:`~relperf.market.Market` carries the
state-price density; agent preferences enter through their log-marginal
maps; the coupled map G and the dual-to-wealth map h reduce the game to
an N-dimensional nonlinear solve; closed forms cover the CRRA and
no-competition limits; and a best-response oracle provides an
independent check.
"""

from .equilibrium import (
    EquilibriumProfile,
    classify_regime,
    crra_closed_form,
    no_competition_solve,
    solve,
    verify,
)
from .errors import (
    MaxIterationsExceeded,
    RelperfError,
    SingularJacobianError,
    VerificationFailed,
)
from .gmap import (
    Game,
    g_apply,
    g_invert,
    g_inverse_jacobian,
    g_jacobian,
    lipschitz_bound,
)
from .hmap import HInvertResult, WealthVector, h_apply, h_cal, h_invert, h_jacobian
from .market import Market, lognormal_market, market_from_csv, market_to_csv
from .oracle import best_response, fixed_point_iterate, single_agent_solve
from .preferences import (
    AgentSpec,
    CRRA,
    Preference,
    SinePerturbedCRRA,
    TanhBlendCRRA,
    bar_transform,
)
from .sweeps import SweepConfig, run_sweep, write_sweep_csv

__all__ = [
    "AgentSpec",
    "CRRA",
    "EquilibriumProfile",
    "Game",
    "HInvertResult",
    "Market",
    "MaxIterationsExceeded",
    "Preference",
    "RelperfError",
    "SingularJacobianError",
    "SinePerturbedCRRA",
    "SweepConfig",
    "TanhBlendCRRA",
    "VerificationFailed",
    "WealthVector",
    "bar_transform",
    "best_response",
    "classify_regime",
    "crra_closed_form",
    "fixed_point_iterate",
    "g_apply",
    "g_inverse_jacobian",
    "g_invert",
    "g_jacobian",
    "h_apply",
    "h_cal",
    "h_invert",
    "h_jacobian",
    "lipschitz_bound",
    "lognormal_market",
    "market_from_csv",
    "market_to_csv",
    "no_competition_solve",
    "run_sweep",
    "single_agent_solve",
    "solve",
    "verify",
    "write_sweep_csv",
]

__version__ = "0.1.0"
