"""Numerical delta calculus on discrete time scales: generalized monomials,
Kiguradze classification, the Philos inequality, oscillation criteria for
neutral delay dynamic equations, and a stepper to check them by simulation."""
from .calculus import GridFn, delta_derivative, delta_derivative_n, delta_integral, exp_fn, is_positively_regressive
from .classify import KiguradzeProfile, kiguradze_profile, verify_philos, verify_philos_lambda
from .errors import TimeScaleError
from .monomials import g_poly, h_poly, q_gamma, taylor_eval
from .oscillation import (
    CriterionBundle,
    NeutralEquationSpec,
    conclude,
    criterion_exponential,
    criterion_windows,
    divergence_check,
    threshold_closed_form,
)
from .scale import Explicit, Geometric, GridWindow, Uniform, grid, jump_data, snap_down
from .simulate import InitialData, asymptotic_trend, reproduce_example, sign_changes, step_ivp

__version__ = "0.1.0"
