"""Resolvent, spectral projections, operator norms, and the growth experiments.

For a simple eigenvalue xi the spectral projection is the rank-one residue

    (P_xi f)(theta) = e^{xi theta} F(xi, f) / h'(xi),
    F(lam, f) = f(0) + c f(-1) - (c lam + b) e^{-lam} I(lam, f),
    I(lam, f) = integral_{-1}^0 e^{-lam s} f(s) ds,

with the reduced-equation analogue using h0 and F0 (no b term).  Sums of
residues over a finite eigenvalue set expand into a kernel form

    (P f)(theta) = c0(theta) f(0) + c1(theta) f(-1)
                   + integral_{-1}^0 k(theta, s) f(s) ds,

whose exact operator norm on complex continuous functions is
sup_theta (|c0| + |c1| + integral |k|): the extremal input is a unimodular
function aligned against the kernel.  That norm drives the two headline
experiments: the perturbation decay of P_{lambda_n} - Q_{z_n} in n, and
the unbounded growth of the finite stable projections across nested
spectral gaps.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .characteristic import (
    NeutralParams,
    auxiliary_eigen,
    eval_h,
    eval_h0,
    eval_h0_prime,
    eval_h_prime,
)
from .classifier import FiniteSide, SpectralGap, enumerate_gaps, omega_configuration
from .errors import (
    BoundaryTooClose,
    DoubleRootExcluded,
    MultipleRoot,
    NearSpectrum,
    WrongCount,
)
from .funcspace import GridFunction, suffix_integrals, weighted_integral
from .rootfinder import (
    DEFAULT_TOLERANCES,
    Eigenvalue,
    Rectangle,
    Tolerances,
    certify_indexed_root,
    count_zeros_in_rect,
    enumerate_eigenvalues,
)

__all__ = [
    "Kind",
    "ProjectionOperator",
    "KernelForm",
    "F_functional",
    "resolvent",
    "residue_projection",
    "contour_projection",
    "aux_projection",
    "gap_projection",
    "kernel_form",
    "difference_kernel",
    "operator_norm",
    "partial_sum",
    "aux_partial_sum_operator",
    "perturbation_norm",
    "NormGrowthRow",
    "norm_growth_experiment",
]

_NEAR_SPECTRUM_FLOOR = 1e-8


class Kind(enum.Enum):
    MAIN = "main"
    AUXILIARY = "aux"


@dataclass(frozen=True)
class ProjectionOperator:
    """Finite set of simple certified eigenvalues defining a projection."""

    params: NeutralParams
    eigs: tuple[Eigenvalue, ...]
    kind: Kind = Kind.MAIN

    def __post_init__(self):
        for e in self.eigs:
            if e.multiplicity != 1:
                raise MultipleRoot(
                    f"projection formulas assume simple roots; {e.value} has "
                    f"multiplicity {e.multiplicity}"
                )

    @property
    def real_output(self) -> bool:
        """True when the eigenvalue set is closed under conjugation, so the
        operator maps real functions to real functions."""
        vals = [e.value for e in self.eigs]
        return all(
            any(abs(v.conjugate() - w) < 1e-9 for w in vals) for v in vals
        )


def _char_and_f(kind: Kind):
    if kind is Kind.MAIN:
        return eval_h, eval_h_prime
    return eval_h0, eval_h0_prime


def F_functional(
    params: NeutralParams, lam: complex, f: GridFunction, kind: Kind = Kind.MAIN
) -> complex:
    """Boundary functional F(lam, f) entering resolvent and projections."""
    lam = complex(lam)
    f0 = complex(f.samples[-1])
    fm1 = complex(f.samples[0])
    integral = weighted_integral(f, lam)
    w = np.exp(-lam)
    if kind is Kind.MAIN:
        coeff = (params.c * lam + params.b) * w
    else:
        coeff = params.c * lam * w
    return f0 + params.c * fm1 - coeff * integral


def resolvent(
    params: NeutralParams,
    lam: complex,
    f: GridFunction,
    kind: Kind = Kind.MAIN,
) -> GridFunction:
    """Apply the resolvent at lam: e^{lam theta}(F/h + suffix integral).

    Raises ``NearSpectrum`` when |h(lam)| <= 1e-8 (lam too close to an
    eigenvalue for the formula to be trustworthy).
    """
    lam = complex(lam)
    char_fn, _ = _char_and_f(kind)
    hv = complex(char_fn(params, lam))
    if abs(hv) <= _NEAR_SPECTRUM_FLOOR:
        raise NearSpectrum(f"|char({lam})| = {abs(hv):.3e}")
    head = F_functional(params, lam, f, kind) / hv
    sfx = suffix_integrals(f, lam)
    return GridFunction(np.exp(lam * f.nodes) * (head + sfx))


def residue_projection(
    params: NeutralParams, eig: Eigenvalue, f: GridFunction
) -> GridFunction:
    """Rank-one residue projection at a simple eigenvalue of h."""
    if eig.multiplicity != 1:
        raise MultipleRoot(f"{eig.value} has multiplicity {eig.multiplicity}")
    lam = complex(eig.value)
    coef = F_functional(params, lam, f) / complex(eval_h_prime(params, lam))
    return GridFunction(coef * np.exp(lam * f.nodes))


def _aux_residue(params: NeutralParams, z: complex, f: GridFunction) -> GridFunction:
    coef = F_functional(params, z, f, Kind.AUXILIARY) / complex(
        eval_h0_prime(params, z)
    )
    return GridFunction(coef * np.exp(z * f.nodes))


def contour_projection(
    params: NeutralParams,
    center: complex,
    radius: float,
    quad_nodes: int,
    f: GridFunction,
    kind: Kind = Kind.MAIN,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> GridFunction:
    """Spectral projection by trapezoidal contour quadrature of the resolvent.

    The circle must enclose exactly one eigenvalue, checked through winding
    counts on bracketing squares (side 1.4*radius inside, 2.2*radius
    outside); ``WrongCount`` otherwise, ``BoundaryTooClose`` if |char|
    dips below the clearance on the contour samples.  The periodic
    trapezoid rule converges spectrally in ``quad_nodes``.
    """
    if quad_nodes < 64:
        raise ValueError("quad_nodes must be >= 64")
    center = complex(center)
    char = "main" if kind is Kind.MAIN else "aux"
    outer = Rectangle(
        center.real - 1.1 * radius,
        center.real + 1.1 * radius,
        center.imag - 1.1 * radius,
        center.imag + 1.1 * radius,
    )
    inner = Rectangle(
        center.real - 0.7 * radius,
        center.real + 0.7 * radius,
        center.imag - 0.7 * radius,
        center.imag + 0.7 * radius,
    )
    n_out = count_zeros_in_rect(params, outer, tol, char)
    n_in = count_zeros_in_rect(params, inner, tol, char)
    if not (n_out == 1 and n_in == 1):
        raise WrongCount(
            f"contour around {center} encloses {n_in}..{n_out} zeros, need exactly 1"
        )
    ts = 2.0 * math.pi * np.arange(quad_nodes) / quad_nodes
    omegas = center + radius * np.exp(1j * ts)
    char_fn, _ = _char_and_f(kind)
    if np.min(np.abs(char_fn(params, omegas))) < tol.boundary_clearance:
        raise BoundaryTooClose("eigenvalue on or near the contour")
    acc = np.zeros(f.n_intervals + 1, dtype=np.complex128)
    for t_k, omega in zip(ts, omegas):
        acc += np.exp(1j * t_k) * resolvent(params, omega, f, kind).samples
    return GridFunction(acc * radius / quad_nodes)


def aux_projection(params: NeutralParams, n: int, f: GridFunction) -> GridFunction:
    """Closed-form projection onto the reduced-equation eigenfunction e^{z_n theta}:

        Q_n f = (f(0) + c f(-1) + z_n integral e^{-z_n s} f(s) ds) e^{z_n theta} / z_n.
    """
    if params.c == -1.0 and n == 0:
        raise DoubleRootExcluded(
            "c = -1 makes z_0 = 0 a double root; index 0 has no rank-one projection"
        )
    z = auxiliary_eigen(params, n)
    integral = weighted_integral(f, z)
    coef = (complex(f.samples[-1]) + params.c * complex(f.samples[0]) + z * integral) / z
    return GridFunction(coef * np.exp(z * f.nodes))


def gap_projection(
    params: NeutralParams, gap: SpectralGap, f: GridFunction
) -> tuple[GridFunction, GridFunction]:
    """Split f into the finite-rank part of a spectral gap and its complement.

    The finite part sums the residue projections over the gap's finite
    side; conjugate eigenvalue pairs make both outputs real for real f.
    """
    acc = np.zeros(f.n_intervals + 1, dtype=np.complex128)
    for e in gap.finite_eigs:
        acc += residue_projection(params, e, f).samples
    finite = GridFunction(acc)
    return finite, f - finite


# --------------------------------------------------------------------------
# kernel form and exact operator norms
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KernelForm:
    """Expansion c0(theta) f(0) + c1(theta) f(-1) + integral k(theta,s) f(s) ds.

    c0(theta) = sum_i w0_i e^{xi_i theta};  c1 = c * c0;
    k(theta, s) = sum_i kw_i e^{xi_i (theta - s)}.

    A difference of two projections is the same structure with negated
    weights on the second set, so norms of perturbation operators reuse
    this type unchanged.
    """

    xi: np.ndarray
    w0: np.ndarray
    kw: np.ndarray
    c: float

    def __post_init__(self):
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=np.complex128))
        object.__setattr__(self, "w0", np.asarray(self.w0, dtype=np.complex128))
        object.__setattr__(self, "kw", np.asarray(self.kw, dtype=np.complex128))

    @property
    def is_empty(self) -> bool:
        return self.xi.size == 0

    def c0(self, thetas: np.ndarray) -> np.ndarray:
        if self.is_empty:
            return np.zeros_like(np.asarray(thetas, dtype=np.complex128))
        return np.exp(np.multiply.outer(np.asarray(thetas), self.xi)) @ self.w0

    def c1(self, thetas: np.ndarray) -> np.ndarray:
        return self.c * self.c0(thetas)

    def kernel(self, thetas: np.ndarray, ss: np.ndarray) -> np.ndarray:
        u = np.exp(np.multiply.outer(np.asarray(thetas), self.xi)) * self.kw
        v = np.exp(np.multiply.outer(-self.xi, np.asarray(ss)))
        return u @ v

    def apply(self, f: GridFunction) -> GridFunction:
        """Apply through the kernel representation (Simpson in s).

        Numerically independent of the residue-sum route: the kernel is
        evaluated on the grid and integrated against the samples.
        """
        thetas = f.nodes
        f0 = complex(f.samples[-1])
        fm1 = complex(f.samples[0])
        out = self.c0(thetas) * f0 + self.c1(thetas) * fm1
        if not self.is_empty:
            n = f.n_intervals
            w = _simpson_weights(n) * f.h
            kmat = self.kernel(thetas, thetas)
            out = out + kmat @ (w * f.samples)
        return GridFunction(out)


def _simpson_weights(n: int) -> np.ndarray:
    w = np.ones(n + 1)
    w[1:n:2] = 4.0
    w[2 : n - 1 : 2] = 2.0
    return w / 3.0


def kernel_form(op: ProjectionOperator) -> KernelForm:
    """Expand a residue-sum projection into its kernel representation."""
    params = op.params
    xi = np.array([e.value for e in op.eigs], dtype=np.complex128)
    if op.kind is Kind.MAIN:
        den = np.array([eval_h_prime(params, z) for z in xi], dtype=np.complex128)
        num = -(params.c * xi + params.b) * np.exp(-xi)
    else:
        den = np.array([eval_h0_prime(params, z) for z in xi], dtype=np.complex128)
        num = -(params.c * xi) * np.exp(-xi)
    if xi.size and np.min(np.abs(den)) < 1e-12:
        raise MultipleRoot("vanishing h' at an eigenvalue: not a simple root")
    w0 = 1.0 / den if xi.size else np.zeros(0)
    kw = num / den if xi.size else np.zeros(0)
    return KernelForm(xi=xi, w0=w0, kw=kw, c=params.c)


def difference_kernel(kf1: KernelForm, kf2: KernelForm) -> KernelForm:
    """Kernel form of the operator difference kf1 - kf2."""
    if kf1.c != kf2.c:
        raise ValueError("kernel forms belong to different equations")
    return KernelForm(
        xi=np.concatenate([kf1.xi, kf2.xi]),
        w0=np.concatenate([kf1.w0, -kf2.w0]),
        kw=np.concatenate([kf1.kw, -kf2.kw]),
        c=kf1.c,
    )


def operator_norm(op: ProjectionOperator | KernelForm, grid: int = 4096) -> float:
    """Exact sup-norm of the operator on complex continuous functions.

    Equals sup_theta (|c0| + |c1| + integral |k(theta, .)|): the supremum
    is attained (in the limit) by unimodular inputs aligned against the
    kernel.  The theta sup runs over ``grid``+1 points and the |k|
    integral uses composite Simpson at the same resolution.
    """
    kf = kernel_form(op) if isinstance(op, ProjectionOperator) else op
    if kf.is_empty:
        return 0.0
    if grid % 2 != 0:
        raise ValueError("grid must be even")
    thetas = -1.0 + np.arange(grid + 1) / grid
    h = 1.0 / grid
    w = _simpson_weights(grid) * h
    c0v = np.abs(kf.c0(thetas))
    point_terms = c0v * (1.0 + abs(kf.c))
    u = np.exp(np.multiply.outer(thetas, kf.xi)) * kf.kw
    v = np.exp(np.multiply.outer(-kf.xi, thetas))
    best = 0.0
    chunk = max(1, (1 << 22) // (grid + 1))
    for i in range(0, grid + 1, chunk):
        rows = np.abs(u[i : i + chunk] @ v)
        best = max(best, float(np.max(point_terms[i : i + chunk] + rows @ w)))
    return best


# --------------------------------------------------------------------------
# partial sums of reduced-equation projections
# --------------------------------------------------------------------------


def partial_sum(
    params: NeutralParams, indices, f: GridFunction
) -> GridFunction:
    """Sum of the closed-form reduced-equation projections over ``indices``."""
    idx = sorted(set(int(n) for n in indices))
    if params.c == -1.0 and 0 in idx:
        raise DoubleRootExcluded("index 0 excluded for c = -1 (double root)")
    acc = np.zeros(f.n_intervals + 1, dtype=np.complex128)
    for n in idx:
        acc += aux_projection(params, n, f).samples
    return GridFunction(acc)


def aux_partial_sum_operator(params: NeutralParams, indices) -> KernelForm:
    """Kernel form of the reduced-equation partial-sum operator."""
    idx = sorted(set(int(n) for n in indices))
    if params.c == -1.0 and 0 in idx:
        raise DoubleRootExcluded("index 0 excluded for c = -1 (double root)")
    eigs = tuple(
        Eigenvalue(value=auxiliary_eigen(params, n), index=n, certified=True)
        for n in idx
    )
    return kernel_form(ProjectionOperator(params, eigs, Kind.AUXILIARY))


def perturbation_norm(
    params: NeutralParams,
    n: int,
    grid: int = 4096,
    eig: Eigenvalue | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Exact norm of P_{lambda_n} - Q_{z_n} via their kernel difference."""
    if n == 0:
        raise ValueError("perturbation norms are defined for n != 0")
    if params.c == -1.0 and n == 0:
        raise DoubleRootExcluded("index 0 excluded for c = -1")
    if eig is None:
        eig = certify_indexed_root(params, n, tol)
    if eig.multiplicity != 1:
        raise MultipleRoot(f"lambda_{n} is not simple")
    kf_main = kernel_form(ProjectionOperator(params, (eig,), Kind.MAIN))
    kf_aux = aux_partial_sum_operator(params, [n])
    return operator_norm(difference_kernel(kf_main, kf_aux), grid)


# --------------------------------------------------------------------------
# norm-growth experiment
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NormGrowthRow:
    m: int
    k_tilde: int
    norm: float


def norm_growth_experiment(
    params: NeutralParams,
    m_max: int,
    grid: int = 4096,
    n_max: int | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[NormGrowthRow]:
    """Exact norms of the finite stable projections across nested gaps.

    For each stable-side gap m the finite projection sums the residues of
    the K~_m eigenvalues left of the gap; the table of (m, K~_m, norm)
    witnesses the unbounded growth of the dichotomy projections.
    """
    if n_max is None:
        n_max = 2 * m_max + 10
    eigs = enumerate_eigenvalues(params, n_max, tol)
    config = omega_configuration(params, eigs, tol)
    gaps = enumerate_gaps(config, eigs, m_max, side="stable", tol=tol)
    rows: list[NormGrowthRow] = []
    for gap in gaps:
        op = ProjectionOperator(params, gap.finite_eigs, Kind.MAIN)
        rows.append(
            NormGrowthRow(m=gap.index, k_tilde=len(gap.finite_eigs), norm=operator_norm(op, grid))
        )
    return rows
