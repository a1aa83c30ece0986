"""Grid representation of complex continuous functions on [-1, 0].

A ``GridFunction`` holds N+1 complex samples on the uniform nodes
theta_j = -1 + j/N (N even) and interpolates between them with a fixed
piecewise-cubic Lagrange rule (4-point stencils, clamped at the ends).
It is the computational stand-in for the phase space of the neutral
equation: state evaluation, sup-norm, and the exponential-weighted
integrals

    I(lam; lo, up) = integral_lo^up e^{-lam s} f(s) ds

that every resolvent/projection formula consumes.

Quadrature strategy
-------------------
* Full-range integrals with a moderate weight (max(|Re lam|, |Im lam|)
  <= N/4) use composite Simpson on the sampled integrand.  Simpson's
  periodic weight pattern integrates sampled full-period complex
  exponentials to roundoff, which the orthogonality checks rely on.
* Everything else (oscillatory or steep weights, sub-ranges, cumulative
  integrals) integrates the cubic interpolant against the exact
  antiderivative of (polynomial x e^{-lam s}) cell by cell, with a series
  branch for small |lam|/N where the closed form would cancel.  The result
  is then exact for the interpolant, so the only error is the O(N^-4)
  interpolation error, uniformly in lam.

GridFunctions are immutable; arithmetic returns new values.  All
operations are pure and safe for concurrent use.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "GridFunction",
    "from_callable",
    "sup_norm",
    "weighted_integral",
    "suffix_integrals",
    "fourier_coefficient",
]

# Inverse Vandermonde matrices mapping 4 stencil samples to cubic
# coefficients in the local cell coordinate u = (s - theta_cell)*N.
# Stencil node offsets relative to the cell's left node:
_OFF_INTERIOR = np.array([-1.0, 0.0, 1.0, 2.0])
_OFF_FIRST = np.array([0.0, 1.0, 2.0, 3.0])
_OFF_LAST = np.array([-2.0, -1.0, 0.0, 1.0])


def _inv_vandermonde(offsets):
    v = np.vander(offsets, 4, increasing=True)
    return np.linalg.inv(v)


_MINV_INTERIOR = _inv_vandermonde(_OFF_INTERIOR)
_MINV_FIRST = _inv_vandermonde(_OFF_FIRST)
_MINV_LAST = _inv_vandermonde(_OFF_LAST)

_NODE_SNAP = 1e-9  # node hits reproduce samples exactly


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex function on [-1, 0] sampled at N+1 uniform nodes."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        n = arr.size - 1
        if n < 8 or n % 2 != 0:
            raise ValueError("n_intervals must be an even integer >= 8")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @property
    def n_intervals(self) -> int:
        return self.samples.size - 1

    @property
    def h(self) -> float:
        return 1.0 / self.n_intervals

    @property
    def nodes(self) -> np.ndarray:
        return -1.0 + np.arange(self.n_intervals + 1) / self.n_intervals

    @cached_property
    def _cell_coeffs(self) -> np.ndarray:
        """(N, 4) cubic coefficients per cell in the local u coordinate."""
        s = self.samples
        n = self.n_intervals
        coeffs = np.empty((n, 4), dtype=np.complex128)
        windows = np.lib.stride_tricks.sliding_window_view(s, 4)
        coeffs[1 : n - 1] = windows[: n - 2] @ _MINV_INTERIOR.T
        coeffs[0] = _MINV_FIRST @ s[:4]
        coeffs[n - 1] = _MINV_LAST @ s[n - 3 :]
        return coeffs

    def __call__(self, theta):
        theta_arr = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta_arr.size and (theta_arr.min() < -1.0 - 1e-12 or theta_arr.max() > 1e-12):
            raise ValueError("theta outside [-1, 0]")
        n = self.n_intervals
        u_glob = np.clip((theta_arr + 1.0) * n, 0.0, float(n))
        near = np.rint(u_glob)
        on_node = np.abs(u_glob - near) < _NODE_SNAP
        cell = np.clip(u_glob.astype(int), 0, n - 1)
        u = u_glob - cell
        c = self._cell_coeffs[cell]
        out = c[:, 0] + u * (c[:, 1] + u * (c[:, 2] + u * c[:, 3]))
        out[on_node] = self.samples[near[on_node].astype(int)]
        if np.isscalar(theta) or np.asarray(theta).ndim == 0:
            return complex(out[0])
        return out

    # -- arithmetic: immutable values, every operation returns a new one --

    def _like(self, samples) -> "GridFunction":
        return GridFunction(samples)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_compatible(other)
        return self._like(self.samples + other.samples)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_compatible(other)
        return self._like(self.samples - other.samples)

    def __mul__(self, scalar) -> "GridFunction":
        return self._like(self.samples * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return self._like(-self.samples)

    def conjugate(self) -> "GridFunction":
        return self._like(np.conj(self.samples))

    def real_part(self) -> "GridFunction":
        return self._like(self.samples.real.astype(np.complex128))

    def imag_part(self) -> "GridFunction":
        return self._like(self.samples.imag.astype(np.complex128))

    def _check_compatible(self, other: "GridFunction"):
        if self.n_intervals != other.n_intervals:
            raise ValueError("grid sizes differ")

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    # ----------------------------- serialization -----------------------------

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())

    def to_csv_text(self) -> str:
        lines = [f"# gridfunction n_intervals={self.n_intervals}", "re,im"]
        for v in self.samples:
            lines.append(f"{v.real!r},{v.imag!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        with open(path) as fh:
            return cls.from_csv_text(fh.read())

    @classmethod
    def from_csv_text(cls, text: str) -> "GridFunction":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        header = None
        rows = []
        for ln in lines:
            if ln.startswith("#"):
                if "n_intervals=" in ln:
                    header = int(ln.split("n_intervals=")[1])
                continue
            if ln.lower().startswith("re"):
                continue
            re_s, im_s = ln.split(",")
            rows.append(complex(float(re_s), float(im_s)))
        arr = np.array(rows, dtype=np.complex128)
        if header is not None and arr.size != header + 1:
            raise ValueError(
                f"csv declares n_intervals={header} but has {arr.size} rows"
            )
        return cls(arr)

    def to_json_text(self) -> str:
        payload = {
            "n_intervals": self.n_intervals,
            "re": [float(v) for v in self.samples.real],
            "im": [float(v) for v in self.samples.imag],
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json_text(cls, text: str) -> "GridFunction":
        payload = json.loads(text)
        arr = np.array(payload["re"], dtype=float) + 1j * np.array(
            payload["im"], dtype=float
        )
        if arr.size != payload["n_intervals"] + 1:
            raise ValueError("json n_intervals mismatch")
        return cls(arr)


def from_callable(f, n_intervals: int) -> GridFunction:
    """Sample ``f`` at the uniform nodes theta_j = -1 + j/N."""
    if n_intervals < 8 or n_intervals % 2 != 0:
        raise ValueError("n_intervals must be an even integer >= 8")
    nodes = -1.0 + np.arange(n_intervals + 1) / n_intervals
    vals = np.array([f(t) for t in nodes], dtype=np.complex128)
    return GridFunction(vals)


def sup_norm(f: GridFunction) -> float:
    """Discrete sup-norm: max over nodes of |f| (node convention)."""
    return f.sup_norm()


# --------------------------------------------------------------------------
# exponential-weighted quadrature
# --------------------------------------------------------------------------


def _series_cell_moment(coeffs, mu, u1, u2):
    """integral_{u1}^{u2} q(u) e^{-mu u} du by Taylor expansion of the weight.

    Valid (and accurate to ~1e-18 relative) for |mu| < 0.5; coeffs may be
    (4,) or (M, 4).
    """
    coeffs = np.atleast_2d(coeffs)
    total = np.zeros(coeffs.shape[0], dtype=np.complex128)
    term = 1.0 + 0.0j  # (-mu)^m / m!
    for m in range(0, 24):
        # integral of u^{k+m} over [u1, u2]
        mono = np.array(
            [
                (u2 ** (k + m + 1) - u1 ** (k + m + 1)) / (k + m + 1)
                for k in range(4)
            ],
            dtype=np.complex128,
        )
        total += term * (coeffs @ mono)
        term *= -mu / (m + 1)
        if abs(term) < 1e-20:
            break
    return total


def _closed_cell_moment(coeffs, mu, u1, u2):
    """integral_{u1}^{u2} q(u) e^{-mu u} du via the exact antiderivative.

    Uses e^{-mu u} (q/mu + q'/mu^2 + q''/mu^3 + q'''/mu^4); stable for
    |mu| >= 0.5.
    """
    coeffs = np.atleast_2d(coeffs)
    c0, c1, c2, c3 = (coeffs[:, k] for k in range(4))

    def bval(u):
        q = c0 + u * (c1 + u * (c2 + u * c3))
        qp = c1 + u * (2.0 * c2 + 3.0 * u * c3)
        qpp = 2.0 * c2 + 6.0 * u * c3
        qppp = 6.0 * c3
        return np.exp(-mu * u) * (q / mu + qp / mu**2 + qpp / mu**3 + qppp / mu**4)

    return bval(u1) - bval(u2)


def _cell_moment(coeffs, mu, u1=0.0, u2=1.0):
    if abs(mu) < 0.5:
        return _series_cell_moment(coeffs, mu, u1, u2)
    return _closed_cell_moment(coeffs, mu, u1, u2)


def _cell_integrals(f: GridFunction, lam: complex) -> np.ndarray:
    """Per-cell integrals of e^{-lam s} times the interpolant of f."""
    n = f.n_intervals
    h = f.h
    mu = lam * h
    nodes_left = f.nodes[:-1]
    moments = _cell_moment(f._cell_coeffs, mu)
    return h * np.exp(-lam * nodes_left) * moments


def _simpson_full(f: GridFunction, lam: complex) -> complex:
    p = np.exp(-lam * f.nodes) * f.samples
    n = f.n_intervals
    s = p[0] + p[n] + 4.0 * np.sum(p[1:n:2]) + 2.0 * np.sum(p[2 : n - 1 : 2])
    return complex(s * f.h / 3.0)


def _plain_weight_ok(f: GridFunction, lam: complex) -> bool:
    lim = f.n_intervals / 4.0
    return max(abs(lam.real), abs(lam.imag)) <= lim


def weighted_integral(
    f: GridFunction, lam: complex, lower: float = -1.0, upper: float = 0.0
) -> complex:
    """integral_lower^upper e^{-lam s} f(s) ds.

    Error is O(N^-4) for smooth f.  Full-range integrals with moderate
    weights go through composite Simpson; oscillatory or steep weights and
    partial ranges use exact per-cell antiderivatives of the interpolant
    (see module docstring).
    """
    lam = complex(lam)
    if lower > upper + 1e-15:
        raise ValueError("lower must not exceed upper")
    lower = min(max(lower, -1.0), 0.0)
    upper = min(max(upper, -1.0), 0.0)
    full = lower <= -1.0 + 1e-15 and upper >= -1e-15
    if full and _plain_weight_ok(f, lam):
        return _simpson_full(f, lam)

    n = f.n_intervals
    h = f.h
    mu = lam * h
    ga = min(max((lower + 1.0) * n, 0.0), float(n))
    gb = min(max((upper + 1.0) * n, 0.0), float(n))
    ja = min(int(ga), n - 1)
    jb = min(int(gb), n - 1)
    ua = ga - ja
    ub = gb - jb
    coeffs = f._cell_coeffs
    nodes_left = f.nodes[:-1]
    if ja == jb:
        mom = _cell_moment(coeffs[ja], mu, ua, ub)[0]
        return complex(h * np.exp(-lam * nodes_left[ja]) * mom)
    total = h * np.exp(-lam * nodes_left[ja]) * _cell_moment(coeffs[ja], mu, ua, 1.0)[0]
    if jb > ja + 1:
        mid = _cell_integrals(f, lam)[ja + 1 : jb]
        total += np.sum(mid)
    total += h * np.exp(-lam * nodes_left[jb]) * _cell_moment(coeffs[jb], mu, 0.0, ub)[0]
    return complex(total)


def suffix_integrals(f: GridFunction, lam: complex) -> np.ndarray:
    """Array of integral_{theta_j}^0 e^{-lam s} f(s) ds for every node j."""
    cells = _cell_integrals(f, complex(lam))
    out = np.zeros(f.n_intervals + 1, dtype=np.complex128)
    out[:-1] = np.cumsum(cells[::-1])[::-1]
    return out


def fourier_coefficient(f: GridFunction, params, n: int) -> complex:
    """Coefficient a_n(f) = integral_{-1}^0 e^{z_n theta} f(theta) dtheta.

    z_n is the n-th eigenvalue of the reduced equation; the weight is
    e^{+z_n theta}, i.e. the lam = -z_n case of ``weighted_integral``.
    After reweighting by e^{(ln|c| + i arg(-c)) theta} these are Fourier
    coefficients, hence sum |a_n|^2 <= max(1, |c|^-2) sup|f|^2.
    """
    from .characteristic import auxiliary_eigen

    z_n = auxiliary_eigen(params, n)
    return weighted_integral(f, -z_n, -1.0, 0.0)
