"""Characteristic functions of the scalar neutral delay equation.

The equation under study is

    x'(t) + c x'(t-1) + a x(t) + b x(t-1) = 0,        c != 0,

whose exponential solutions e^{lambda t} correspond to zeros of the
transcendental characteristic function

    h(lambda) = lambda + c lambda e^{-lambda} + a + b e^{-lambda}.

This module evaluates h, its first two derivatives, the characteristic
function h0(lambda) = lambda (1 + c e^{-lambda}) of the reduced equation
x'(t) + c x'(t-1) = 0, the explicit eigenvalue ladder of the reduced
equation, and the parameter condition that separates the regime of
infinitely many spectral gaps from the degenerate one.

All functions are pure and accept complex scalars or numpy arrays for
``lam``.  ``NeutralParams`` is immutable, so everything here is safe for
unrestricted concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NeutralParams",
    "eval_h",
    "eval_h_prime",
    "eval_h_second",
    "eval_h0",
    "eval_h0_prime",
    "auxiliary_eigen",
    "dichotomy_condition",
]


@dataclass(frozen=True)
class NeutralParams:
    """Coefficient triple (a, b, c) with derived shift-normalised constants.

    Substituting lambda = z + ln|c| normalises the neutral coefficient to
    +/-1 (flag ``delta``) and turns the remaining coefficients into

        A = a + ln|c|,        B = ln|c| + b/|c|.

    The real parts of the eigenvalues accumulate at ln|c|, stored as
    ``accumulation``.  Derived values are fixed at construction; equality
    of two instances is equality of (a, b, c) since the derived fields are
    recomputed deterministically.
    """

    a: float
    b: float
    c: float
    A: float = field(init=False)
    B: float = field(init=False)
    delta: int = field(init=False)
    accumulation: float = field(init=False)

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("neutral coefficient c must be nonzero")
        ln_abs_c = math.log(abs(self.c))
        object.__setattr__(self, "A", self.a + ln_abs_c)
        object.__setattr__(self, "B", ln_abs_c + self.b / abs(self.c))
        object.__setattr__(self, "delta", 1 if self.c > 0 else -1)
        object.__setattr__(self, "accumulation", ln_abs_c)

    @property
    def arg_minus_c(self) -> float:
        # Hard-coded branch instead of a general argument function: -c is
        # real, so arg(-c) is pi for c > 0 and 0 for c < 0, with no
        # branch-cut ambiguity.
        return math.pi if self.c > 0 else 0.0


def eval_h(params: NeutralParams, lam):
    """Evaluate h(lambda) = lambda + c lambda e^{-lambda} + a + b e^{-lambda}.

    The exponential is computed once and shared across terms so that h,
    h' and h'' stay mutually consistent in rounding.
    """
    w = np.exp(-lam)
    return lam + params.c * lam * w + params.a + params.b * w


def eval_h_prime(params: NeutralParams, lam):
    """Evaluate h'(lambda) = 1 + c e^{-lambda} - c lambda e^{-lambda} - b e^{-lambda}."""
    w = np.exp(-lam)
    return 1.0 + params.c * w - params.c * lam * w - params.b * w


def eval_h_second(params: NeutralParams, lam):
    """Evaluate h''(lambda) = (c lambda + b - 2c) e^{-lambda}.

    The unique real zero of h'' sits at lambda = (2c - b)/c, which caps the
    number of real zeros of h at three.
    """
    w = np.exp(-lam)
    return (params.c * lam + params.b - 2.0 * params.c) * w


def eval_h0(params: NeutralParams, lam):
    """Evaluate h0(lambda) = lambda (1 + c e^{-lambda}) for the reduced equation."""
    return lam * (1.0 + params.c * np.exp(-lam))


def eval_h0_prime(params: NeutralParams, lam):
    """Evaluate h0'(lambda) = 1 + c e^{-lambda} - c lambda e^{-lambda}."""
    w = np.exp(-lam)
    return 1.0 + params.c * w - params.c * lam * w


def auxiliary_eigen(params: NeutralParams, n: int) -> complex:
    """n-th eigenvalue z_n = ln|c| + i (2 n pi + arg(-c)) of the reduced equation.

    Every z_n satisfies e^{-z_n} = -1/c, hence h0(z_n) = 0.
    """
    return complex(params.accumulation, 2.0 * n * math.pi + params.arg_minus_c)


def dichotomy_condition(params: NeutralParams) -> bool:
    """True iff a != b/|c| and ln|c| != -(a + b/|c|)/2.

    Equivalently |A| != |B|: A - B = a - b/|c| and A + B = a + b/|c|
    + 2 ln|c|, so the two clauses rule out A = B and A = -B respectively.
    When true, the eigenvalue real parts form infinitely many distinct
    values and the equation admits countably many spectral gaps.
    """
    q = params.b / abs(params.c)
    return params.a != q and params.accumulation != -0.5 * (params.a + q)
