"""Eigenvalue-distribution classification, spectral gaps, and counting laws.

After the shift z = lambda - ln|c| the eigenvalue picture is governed by
the sign pattern of the derived constants (A, B) relative to delta =
sign(c): four strict parameter regions (per sign of c) decide whether the
shifted roots sit left of, right of, or astride the imaginary axis, and
the boundary |A| = |B| collapses the picture to at most three spectral
gaps.  This module classifies the region, verifies the predicted pattern
against certified roots, assembles the dichotomous resolvent set's
connected components, enumerates spectral gaps with their exponents and
finite-rank sides, and computes the eigenvalue-counting function and its
jump sequence.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .characteristic import NeutralParams, dichotomy_condition, eval_h
from .errors import IncompleteEnumeration, InsufficientRoots
from .rootfinder import DEFAULT_TOLERANCES, Eigenvalue, Tolerances

__all__ = [
    "Table",
    "Row",
    "RegionTag",
    "OmegaCase",
    "OmegaConfiguration",
    "FiniteSide",
    "SpectralGap",
    "classify_region",
    "verify_region",
    "region_report",
    "omega_configuration",
    "enumerate_gaps",
    "theta",
    "k_sequence",
    "vertical_line_check",
    "vertical_line_report",
    "rho",
    "distinct_real_parts",
    "tail_bound",
]

_BOUNDARY_TOL = 1e-12


class Table(enum.Enum):
    TABLE1 = 1  # c > 0
    TABLE2 = -1  # c < 0


class Row(enum.Enum):
    A_GT_ABS_B = "A>|B|"
    ABS_A_LT_NEG_B = "|A|<-B"
    ABS_A_LT_B = "|A|<B"
    A_LT_NEG_ABS_B = "A<-|B|"
    BOUNDARY_A_EQ_ABS_B = "A=|B|>0"
    BOUNDARY_A_EQ_NEG_B = "A=-B"
    BOUNDARY_A_EQ_B = "A=B"


@dataclass(frozen=True)
class RegionTag:
    table: Table
    row: Row

    @property
    def is_boundary(self) -> bool:
        return self.row in (
            Row.BOUNDARY_A_EQ_ABS_B,
            Row.BOUNDARY_A_EQ_NEG_B,
            Row.BOUNDARY_A_EQ_B,
        )


class _Dist(enum.Enum):
    ALL_LEFT = "all shifted real parts negative"
    ALL_RIGHT = "all shifted real parts positive"
    ONE_LEFT_REST_RIGHT = "one real root left, all others right"
    ONE_RIGHT_REST_LEFT = "one real root right, all others left"
    ON_LINE = "shifted real parts on the imaginary axis, up to one real root"


def classify_region(params: NeutralParams) -> RegionTag:
    """Table row for the parameter triple.

    The table is picked by sign(c); the row compares A against +/-B on the
    derived values, with |A| = |B| within 1e-12 classified as a boundary
    row (tagged by the algebraic relation that holds).
    """
    table = Table.TABLE1 if params.c > 0 else Table.TABLE2
    big_a, big_b, delta = params.A, params.B, params.delta
    if abs(abs(big_a) - abs(big_b)) <= _BOUNDARY_TOL:
        if abs(big_a - big_b) <= _BOUNDARY_TOL and abs(big_a + big_b) <= _BOUNDARY_TOL:
            # A = B = 0: covered by the "A=-B" row for c>0, "A=B" for c<0
            row = Row.BOUNDARY_A_EQ_NEG_B if delta > 0 else Row.BOUNDARY_A_EQ_B
        elif abs(big_a - big_b) <= _BOUNDARY_TOL:
            row = Row.BOUNDARY_A_EQ_B
        elif big_a > 0:
            row = Row.BOUNDARY_A_EQ_ABS_B
        else:
            row = Row.BOUNDARY_A_EQ_NEG_B
        return RegionTag(table, row)
    if big_a > abs(big_b):
        row = Row.A_GT_ABS_B
    elif big_a < -abs(big_b):
        row = Row.A_LT_NEG_ABS_B
    elif abs(big_a) < -delta * big_b:
        # all shifted roots to the right
        row = Row.ABS_A_LT_NEG_B if delta > 0 else Row.ABS_A_LT_B
    else:
        # one exceptional real root left, the rest right
        row = Row.ABS_A_LT_B if delta > 0 else Row.ABS_A_LT_NEG_B
    return RegionTag(table, row)


def _expected_distribution(params: NeutralParams) -> _Dist:
    big_a, big_b, delta = params.A, params.B, params.delta
    if abs(abs(big_a) - abs(big_b)) <= _BOUNDARY_TOL:
        return _Dist.ON_LINE
    if big_a > abs(big_b):
        return _Dist.ALL_LEFT
    if big_a < -abs(big_b):
        return _Dist.ONE_RIGHT_REST_LEFT
    if abs(big_a) < -delta * big_b:
        return _Dist.ALL_RIGHT
    return _Dist.ONE_LEFT_REST_RIGHT


def region_report(
    params: NeutralParams, eigs: list[Eigenvalue], tol: float = 1e-9
) -> list[str]:
    """Violations of the classified row's eigenvalue-distribution predicate.

    Roots are shifted by ln|c| and matched against the row pattern with
    strict inequalities at tolerance ``tol``.  Empty result means the
    prediction is verified.
    """
    dist = _expected_distribution(params)
    acc = params.accumulation
    shifts = [(e, e.value.real - acc) for e in eigs if e.certified]
    bad: list[str] = []
    if dist is _Dist.ALL_LEFT:
        bad = [f"{e.value} not left of ln|c|" for e, s in shifts if s >= -tol]
    elif dist is _Dist.ALL_RIGHT:
        bad = [f"{e.value} not right of ln|c|" for e, s in shifts if s <= tol]
    elif dist in (_Dist.ONE_LEFT_REST_RIGHT, _Dist.ONE_RIGHT_REST_LEFT):
        sign = -1.0 if dist is _Dist.ONE_LEFT_REST_RIGHT else 1.0
        exceptional = [(e, s) for e, s in shifts if sign * s >= tol]
        rest = [(e, s) for e, s in shifts if sign * s < tol]
        if len(exceptional) != 1:
            bad.append(
                f"expected exactly one root with shifted real part of sign "
                f"{int(sign)}, found {len(exceptional)}"
            )
        for e, _ in exceptional:
            if not e.is_real:
                bad.append(f"exceptional root {e.value} is not real")
        for e, s in rest:
            if sign * s > -tol:
                bad.append(f"{e.value} sits on the accumulation line")
    else:  # ON_LINE
        offline = -params.A + acc  # the off-line real root, when present
        for e, s in shifts:
            if abs(s) <= tol:
                continue
            if e.is_real and abs(e.value.real - offline) <= 1e-6 * (1 + abs(offline)):
                continue
            bad.append(f"{e.value} neither on the line nor the off-line real root")
    return bad


def verify_region(params: NeutralParams, eigs: list[Eigenvalue]) -> bool:
    """True iff the certified roots match the classified row's prediction."""
    return not region_report(params, eigs)


# --------------------------------------------------------------------------
# resolvent-set configuration
# --------------------------------------------------------------------------


class OmegaCase(enum.Enum):
    I = "i"
    II = "ii"
    III = "iii"
    IV = "iv"
    V = "v"


@dataclass(frozen=True)
class OmegaConfiguration:
    """Connected-component picture of the dichotomous resolvent set."""

    case: OmegaCase
    gamma: tuple[float, ...]
    accumulation: float
    infinite: bool
    collisions: tuple[float, ...] = ()


def distinct_real_parts(
    eigs: list[Eigenvalue], tol: float = DEFAULT_TOLERANCES.cluster_real
) -> np.ndarray:
    """Certified real parts clustered at tolerance ``tol`` (ascending)."""
    vals = sorted(e.value.real for e in eigs if e.certified)
    out: list[float] = []
    group: list[float] = []
    for v in vals:
        if group and v - group[-1] > tol:
            out.append(float(np.mean(group)))
            group = []
        group.append(v)
    if group:
        out.append(float(np.mean(group)))
    return np.array(out)


def omega_configuration(
    params: NeutralParams,
    eigs: list[Eigenvalue],
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> OmegaConfiguration:
    """Case tag and the computed prefix of the gap-endpoint sequence."""
    dist = _expected_distribution(params)
    case = {
        _Dist.ALL_LEFT: OmegaCase.I,
        _Dist.ALL_RIGHT: OmegaCase.II,
        _Dist.ONE_LEFT_REST_RIGHT: OmegaCase.III,
        _Dist.ONE_RIGHT_REST_LEFT: OmegaCase.IV,
        _Dist.ON_LINE: OmegaCase.V,
    }[dist]
    acc = params.accumulation
    parts = distinct_real_parts(eigs, tol.cluster_real)
    left = [p for p in parts if p < acc - tol.cluster_real]
    right = [p for p in parts if p > acc + tol.cluster_real]
    collisions: tuple[float, ...] = ()
    if case is OmegaCase.I:
        gamma = tuple(sorted(left))
    elif case is OmegaCase.II:
        gamma = tuple(sorted(right, reverse=True))
    elif case is OmegaCase.III:
        # one exceptional endpoint left of the accumulation, rest above it
        gamma = tuple(left[:1]) + tuple(sorted(right, reverse=True))
        if len(left) > 1:
            collisions = tuple(left[1:])
    elif case is OmegaCase.IV:
        gamma = tuple(sorted(right, reverse=True)[:1]) + tuple(sorted(left))
        if len(right) > 1:
            collisions = tuple(sorted(right, reverse=True)[1:])
    else:
        gamma = tuple(sorted(parts))
    return OmegaConfiguration(
        case=case,
        gamma=gamma,
        accumulation=acc,
        infinite=dichotomy_condition(params),
        collisions=collisions,
    )


# --------------------------------------------------------------------------
# spectral gaps
# --------------------------------------------------------------------------


class FiniteSide(enum.Enum):
    STABLE_FINITE = "stable"
    UNSTABLE_FINITE = "unstable"


@dataclass(frozen=True)
class SpectralGap:
    """One connected component of the resolvent set, with its exponents.

    [beta, alpha] sits strictly inside the component (10% margins);
    ``finite_eigs`` are the finitely many certified roots on the finite
    side of the gap.  ``gamma_lo``/``gamma_hi`` are the component's
    endpoints (None for the unbounded side).
    """

    index: int
    beta: float
    alpha: float
    finite_side: FiniteSide
    finite_eigs: tuple[Eigenvalue, ...]
    gamma_lo: float | None
    gamma_hi: float | None

    def __post_init__(self):
        if not self.beta < self.alpha:
            raise ValueError("gap exponents must satisfy beta < alpha")


def tail_bound(eigs: list[Eigenvalue], accumulation: float) -> float:
    """Upper bound on |Re lambda - ln|c|| for every root beyond the
    enumerated indices, fitted from the observed 1/n^2 decay (factor-2
    safety margin)."""
    pairs = [
        (abs(e.index), abs(e.value.real - accumulation))
        for e in eigs
        if e.index is not None and abs(e.index) >= 1
    ]
    if not pairs:
        return 0.0
    n_top = max(n for n, _ in pairs)
    lo = max(5, n_top // 2)
    used = [d * n * n for n, d in pairs if n >= lo]
    if not used:
        used = [d * n * n for n, d in pairs]
    c_hat = max(used)
    return 2.0 * c_hat / (n_top + 1) ** 2


def enumerate_gaps(
    config: OmegaConfiguration,
    eigs: list[Eigenvalue],
    m_max: int,
    side: str = "stable",
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[SpectralGap]:
    """Gaps m = 0..m_max on one side, outermost first, inward to ln|c|.

    Gap m >= 1 spans adjacent distinct real parts (gamma, gamma') with
    [beta, alpha] = [gamma + margin, gamma' - margin], margin = 10% of the
    width; gap 0 is the unbounded outer component.  On the infinite side,
    endpoints closer to the accumulation abscissa than the asymptotic tail
    bound are rejected (unenumerated roots could hide inside).
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if config.case is OmegaCase.V and m_max > 3:
        raise InsufficientRoots(
            "at most three components exist when |A| = |B|; m_max > 3 refused"
        )
    acc = config.accumulation
    parts = distinct_real_parts(eigs, tol.cluster_real)
    stable = side == "stable"
    if stable:
        side_parts = sorted(p for p in parts if p < acc - tol.cluster_real)
        side_infinite = config.case in (OmegaCase.I, OmegaCase.IV)
    else:
        side_parts = sorted(
            (p for p in parts if p > acc + tol.cluster_real), reverse=True
        )
        side_infinite = config.case in (OmegaCase.II, OmegaCase.III)
    if side_infinite:
        tb = tail_bound(eigs, acc)
        boundaries = [p for p in side_parts if abs(p - acc) > tb]
    else:
        boundaries = side_parts + [acc]
    if len(boundaries) < m_max + 1:
        raise InsufficientRoots(
            f"need {m_max + 1} usable gap endpoints on the {side} side, "
            f"have {len(boundaries)}; enumerate more eigenvalues"
        )
    certified = [e for e in eigs if e.certified]
    sgn = 1.0 if stable else -1.0
    gaps: list[SpectralGap] = []
    for m in range(m_max + 1):
        if m == 0:
            g = boundaries[0]
            w = abs(boundaries[1] - boundaries[0]) if len(boundaries) > 1 else 1.0
            inner, outer = g - sgn * 0.1 * w, g - sgn * w
            beta, alpha = min(inner, outer), max(inner, outer)
            lo, hi = (None, g) if stable else (g, None)
        else:
            g0, g1 = boundaries[m - 1], boundaries[m]
            margin = 0.1 * abs(g1 - g0)
            beta, alpha = sorted((g0 + sgn * margin, g1 - sgn * margin))
            lo, hi = min(g0, g1), max(g0, g1)
        if stable:
            finite = tuple(e for e in certified if e.value.real < beta)
        else:
            finite = tuple(e for e in certified if e.value.real > alpha)
        inside = [e for e in certified if beta <= e.value.real <= alpha]
        if inside:
            raise RuntimeError(
                f"gap {m} on the {side} side is not empty: {inside[0].value}"
            )
        gaps.append(
            SpectralGap(
                index=m,
                beta=beta,
                alpha=alpha,
                finite_side=FiniteSide.STABLE_FINITE
                if stable
                else FiniteSide.UNSTABLE_FINITE,
                finite_eigs=finite,
                gamma_lo=lo,
                gamma_hi=hi,
            )
        )
    return gaps


# --------------------------------------------------------------------------
# counting function and jump sequence
# --------------------------------------------------------------------------


def theta(params: NeutralParams, eigs: list[Eigenvalue], delta: float) -> int:
    """Number of roots (with multiplicity) with |Re lambda - ln|c|| > delta.

    Requires the enumeration to be deep enough that the asymptotic tail
    cannot contribute at this delta.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    acc = params.accumulation
    tb = tail_bound(eigs, acc)
    if delta <= tb:
        raise IncompleteEnumeration(
            f"delta = {delta:.3e} is inside the unenumerated tail bound {tb:.3e}"
        )
    return sum(
        e.multiplicity
        for e in eigs
        if e.certified and abs(e.value.real - acc) > delta
    )


def k_sequence(
    params: NeutralParams, eigs: list[Eigenvalue], m_max: int
) -> list[int]:
    """Distinct values K_0 = 0 < K_1 < ... < K_m of the counting function.

    K_{m} accumulates the multiplicities of the m largest clustered
    distances |Re lambda - ln|c||; consecutive increments lie in [1, 7]
    because a single distance can carry at most the real roots plus one
    conjugate pair per side.
    """
    if not dichotomy_condition(params):
        raise ValueError("the K-sequence is infinite only when |A| != |B|")
    acc = params.accumulation
    ctol = DEFAULT_TOLERANCES.cluster_real
    dists: list[tuple[float, int]] = []
    for e in eigs:
        if not e.certified:
            continue
        d = abs(e.value.real - acc)
        if d <= ctol:
            continue
        dists.append((d, e.multiplicity))
    dists.sort(reverse=True)
    clustered: list[tuple[float, int]] = []
    for d, mult in dists:
        if clustered and clustered[-1][0] - d <= ctol:
            clustered[-1] = (clustered[-1][0], clustered[-1][1] + mult)
        else:
            clustered.append((d, mult))
    if len(clustered) < m_max:
        raise IncompleteEnumeration(
            f"only {len(clustered)} distinct distances available, need {m_max}"
        )
    tb = tail_bound(eigs, acc)
    if clustered[m_max - 1][0] <= tb:
        raise IncompleteEnumeration(
            "requested jump depth reaches inside the unenumerated tail"
        )
    ks = [0]
    for _, mult in clustered[:m_max]:
        ks.append(ks[-1] + mult)
    return ks


# --------------------------------------------------------------------------
# vertical-line uniqueness
# --------------------------------------------------------------------------


def rho(params: NeutralParams, x0: float) -> float:
    """Value of tan^2(y/2) forced on any root x0 + iy off the accumulation line.

    With P = ((a+2x)c+b)e^{-x}, Q = c(cx+b)e^{-2x}, R = a+x, every root on
    the line Re = x0 satisfies P cos y + Q + R = 0, hence
    tan^2(y/2) = (P+Q+R)/(P-Q-R).  Returns nan when the denominator
    vanishes (cos y = 1 there, y on the lattice of full turns).
    """
    a, b, c = params.a, params.b, params.c
    e1 = math.exp(-x0)
    p = ((a + 2.0 * x0) * c + b) * e1
    q = c * (c * x0 + b) * e1 * e1
    r = a + x0
    den = p - q - r
    if abs(den) < 1e-14 * (abs(p) + abs(q) + abs(r) + 1.0):
        return math.nan
    return (p + q + r) / den


def vertical_line_report(
    params: NeutralParams, eigs: list[Eigenvalue], tol: float = 1e-9
) -> list[str]:
    """Violations of the one-pair-per-vertical-line property.

    For every attained real part x != ln|c|, at most one root with
    positive imaginary part may sit on the line; additionally the found
    root's tan^2(y/2) must match rho(x) when rho(x) >= 0 (comparison in
    cotangent form near the tangent poles).
    """
    acc = params.accumulation
    ups = [
        e
        for e in eigs
        if e.certified and e.value.imag > 0 and abs(e.value.real - acc) > tol
    ]
    ups.sort(key=lambda e: e.value.real)
    bad: list[str] = []
    i = 0
    while i < len(ups):
        j = i + 1
        while j < len(ups) and ups[j].value.real - ups[i].value.real <= tol:
            j += 1
        group = ups[i:j]
        if len(group) > 1:
            bad.append(
                f"line Re = {group[0].value.real:.12g} carries "
                f"{len(group)} roots with Im > 0"
            )
        e = group[0]
        x0, y = e.value.real, e.value.imag
        r = rho(params, x0)
        if not math.isnan(r) and r >= 0.0:
            half = 0.5 * y
            if abs(math.cos(half)) >= 1e-3:
                t2 = math.tan(half) ** 2
                if abs(t2 - r) > 1e-6 * (1.0 + abs(t2) + abs(r)):
                    bad.append(
                        f"tan^2(y/2) = {t2:.9g} mismatches rho({x0:.6g}) = {r:.9g}"
                    )
            elif r > 1e-6:
                cot2 = math.tan(half) ** -2 if math.tan(half) != 0 else math.inf
                if abs(cot2 - 1.0 / r) > 1e-6 * (1.0 + abs(cot2) + 1.0 / r):
                    bad.append(
                        f"cot^2(y/2) mismatches 1/rho({x0:.6g}) near a tangent pole"
                    )
        i = j
    return bad


def vertical_line_check(params: NeutralParams, eigs: list[Eigenvalue]) -> bool:
    """True iff no vertical line off ln|c| carries two upper roots and the
    tan-half-angle cross-check passes at every attained line."""
    return not vertical_line_report(params, eigs)
