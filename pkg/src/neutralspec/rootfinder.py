"""Location and certification of characteristic roots.

All roots of h lie in a vertical strip nu1 < Re lambda < nu2 and, apart
from finitely many low-lying ones, sit in small balls around the reduced
equation's eigenvalue ladder z_n.  This module computes conservative
strip bounds, finds the (at most three) real roots by bisection on
monotone pieces, counts zeros in rectangles with a numerically certified
argument principle, refines asymptotic seeds by Newton iteration, and
assembles the complete certified spectrum up to a requested index.

Certification is exhaustive: every returned eigenvalue is the unique zero
of a rectangle with winding number one (or an explicitly flagged multiple
zero of a minimal rectangle), and the total multiplicity is cross-checked
against the winding number over the whole enumerated region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .characteristic import (
    NeutralParams,
    auxiliary_eigen,
    eval_h,
    eval_h0,
    eval_h_prime,
)
from .errors import (
    BoundaryTooClose,
    DerivativeVanished,
    IncompleteEnumeration,
    ToleranceNotMet,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "Eigenvalue",
    "Rectangle",
    "strip_bounds",
    "real_roots",
    "count_zeros_in_rect",
    "find_eigenvalue_near",
    "enumerate_eigenvalues",
    "certify_indexed_root",
]


@dataclass(frozen=True)
class Tolerances:
    """Every tolerance used by the root machinery, in one record."""

    residual_scale: float = 1e-12  # converged when |h| <= residual_scale*(1+|lam|)
    newton_max_iter: int = 50
    derivative_floor: float = 1e-14
    boundary_clearance: float = 1e-8  # min |h| allowed on counting contours
    snap_imag: float = 1e-10  # |Im| below this snaps to the real axis
    cluster_real: float = 1e-9  # real parts closer than this form one gamma
    ball_cap: float = 0.5  # largest admissible |root - z_n| for an index
    ball_floor: float = 0.05
    min_rect: float = 1e-6  # rectangles this small with count >= 2 hold a multiple root
    perturb_retries: int = 5
    low_imag_floor: float = 1e-4  # subdivision region starts above this Im


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class Eigenvalue:
    """A certified characteristic root.

    ``index`` is the asymptotic index n when the root lies in the ball
    around z_n (absent for low-lying roots); ``residual`` is |h(value)|;
    ``ball_radius`` records the certification ball actually used.
    """

    value: complex
    index: int | None = None
    residual: float = 0.0
    multiplicity: int = 1
    certified: bool = False
    ball_radius: float | None = None

    @property
    def is_real(self) -> bool:
        return self.value.imag == 0.0

    def conjugate(self, index: int | None) -> "Eigenvalue":
        return replace(self, value=self.value.conjugate(), index=index)


def _sort_key(e: Eigenvalue):
    return (e.value.real, e.value.imag)


@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("degenerate rectangle")

    @property
    def center(self) -> complex:
        return complex(
            0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max)
        )

    @property
    def widths(self) -> tuple[float, float]:
        return (self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (
            self.re_min + margin <= z.real <= self.re_max - margin
            and self.im_min + margin <= z.imag <= self.im_max - margin
        )


def strip_bounds(params: NeutralParams) -> tuple[float, float]:
    """Conservative strip (nu1, nu2) containing every root of h.

    At a root, e^lambda = -c + (ac-b)/(lambda+a); the returned bounds
    satisfy the sufficient conditions |e^lambda| + |(ac-b)/(lambda+a)| <=
    |c|/2 for Re lambda <= nu1 and |e^lambda| >= 2|c| + |(ac-b)/(lambda+a)|
    for Re lambda >= nu2, so no root can cross either line.
    """
    a, c = params.a, params.c
    acb = abs(a * c - params.b)
    target = abs(c) / 2.0
    nu1 = min(-1.0, -abs(a) - 1.0)
    while math.exp(nu1) + (acb / (-nu1 - abs(a)) if acb else 0.0) > target:
        nu1 -= 0.5
        if nu1 < -745.0:  # exp underflow floor; the tail term must now decide
            while acb / (-nu1 - abs(a)) > target:
                nu1 -= max(1.0, -0.1 * nu1)
            break
    nu2 = max(1.0, math.log(2.0 * abs(c)), 1.0 - a)
    while math.exp(nu2) < 2.0 * abs(c) + acb / (nu2 + a):
        nu2 += 0.5
    return nu1, nu2


# --------------------------------------------------------------------------
# argument principle
# --------------------------------------------------------------------------


def _char_values(params: NeutralParams, pts: np.ndarray, char: str) -> np.ndarray:
    if char == "main":
        return eval_h(params, pts)
    if char == "aux":
        return eval_h0(params, pts)
    raise ValueError(f"unknown characteristic kind {char!r}")


def _boundary_points(rect: Rectangle, per_unit: float = 24.0) -> np.ndarray:
    corners = [
        complex(rect.re_min, rect.im_min),
        complex(rect.re_max, rect.im_min),
        complex(rect.re_max, rect.im_max),
        complex(rect.re_min, rect.im_max),
    ]
    pts = []
    for k in range(4):
        z0, z1 = corners[k], corners[(k + 1) % 4]
        m = max(12, int(math.ceil(abs(z1 - z0) * per_unit)))
        seg = z0 + (z1 - z0) * np.arange(m) / m
        pts.append(seg)
    pts = np.concatenate(pts)
    return np.append(pts, pts[0])


def count_zeros_in_rect(
    params: NeutralParams,
    rect: Rectangle,
    tol: Tolerances = DEFAULT_TOLERANCES,
    char: str = "main",
) -> int:
    """Number of zeros (with multiplicity) of h inside ``rect``.

    Winding number of h over the positively oriented boundary, by adaptive
    sampling with phase continuation: segments are bisected until adjacent
    phase increments stay below pi/2, which pins the continuous argument.

    Raises ``BoundaryTooClose`` if |h| dips under the clearance threshold
    on the sampled boundary (a zero is on or near the contour and the
    caller must perturb the rectangle).
    """
    pts = _boundary_points(rect)
    vals = _char_values(params, pts, char)
    for _ in range(48):
        if np.min(np.abs(vals)) < tol.boundary_clearance:
            raise BoundaryTooClose(
                f"min |h| = {np.min(np.abs(vals)):.3e} on boundary of {rect}"
            )
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.flatnonzero(np.abs(dphi) >= 0.5 * math.pi)
        if bad.size == 0:
            total = float(np.sum(dphi))
            winding = total / (2.0 * math.pi)
            k = int(round(winding))
            if abs(winding - k) > 0.25:
                raise BoundaryTooClose(
                    f"phase sum {winding:.3f} not near an integer on {rect}"
                )
            return k
        mids = 0.5 * (pts[bad] + pts[bad + 1])
        mvals = _char_values(params, mids, char)
        pts = np.insert(pts, bad + 1, mids)
        vals = np.insert(vals, bad + 1, mvals)
    raise BoundaryTooClose(f"phase continuation failed to settle on {rect}")


def _count_with_retries(
    params: NeutralParams,
    rect: Rectangle,
    tol: Tolerances,
    char: str = "main",
    grow: float = 0.02,
) -> tuple[int, Rectangle]:
    """Count zeros, growing the rectangle slightly when a zero sits on the
    boundary.  Growth never exceeds ~10% so the caller's containment logic
    stays valid."""
    r = rect
    for attempt in range(tol.perturb_retries + 1):
        try:
            return count_zeros_in_rect(params, r, tol, char), r
        except BoundaryTooClose:
            if attempt == tol.perturb_retries:
                raise
            w, hgt = r.widths
            d = grow * (attempt + 1)
            r = Rectangle(
                r.re_min - d * w, r.re_max + d * w, r.im_min - d * hgt, r.im_max + d * hgt
            )
    raise AssertionError("unreachable")


# --------------------------------------------------------------------------
# Newton refinement
# --------------------------------------------------------------------------


def find_eigenvalue_near(
    params: NeutralParams, seed: complex, tol: Tolerances = DEFAULT_TOLERANCES
) -> Eigenvalue:
    """Newton-refine ``seed`` to a root of h.

    Iterates lambda <- lambda - h/h' until |h| <= residual_scale*(1+|lambda|)
    or the iteration budget runs out; the result carries certified=False
    either way (certification is the enumerator's job).  Raises
    ``DerivativeVanished`` when |h'| drops under the floor, signalling a
    possible multiple root.
    """
    lam = complex(seed)
    for _ in range(tol.newton_max_iter + 1):
        hv = complex(eval_h(params, lam))
        res = abs(hv)
        if res <= tol.residual_scale * (1.0 + abs(lam)):
            return Eigenvalue(value=lam, residual=res)
        hp = complex(eval_h_prime(params, lam))
        if abs(hp) < tol.derivative_floor:
            raise DerivativeVanished(f"|h'| = {abs(hp):.3e} at {lam}")
        lam = lam - hv / hp
    return Eigenvalue(value=lam, residual=abs(complex(eval_h(params, lam))))


def _bisect_real(fn, lo: float, hi: float, flo: float, fhi: float) -> float:
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (flo < 0) != (fm < 0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def real_roots(
    params: NeutralParams, tol: Tolerances = DEFAULT_TOLERANCES
) -> list[Eigenvalue]:
    """All real roots of h inside the strip (at most three).

    h'' = c (lambda - (2c-b)/c) e^{-lambda} has a single real zero, so h'
    is monotone on the two flanking intervals (hence <= 2 real zeros) and
    h is monotone between consecutive critical points (hence <= 3 real
    zeros, each caught by a sign change).
    """
    nu1, nu2 = strip_bounds(params)
    h = lambda x: float(np.real(eval_h(params, complex(x))))
    hp = lambda x: float(np.real(eval_h_prime(params, complex(x))))
    inflection = (2.0 * params.c - params.b) / params.c

    crits: list[float] = []
    pieces = []
    if nu1 < inflection < nu2:
        pieces = [(nu1, inflection), (inflection, nu2)]
    else:
        pieces = [(nu1, nu2)]
    for lo, hi in pieces:
        flo, fhi = hp(lo), hp(hi)
        if flo == 0.0:
            crits.append(lo)
        elif fhi == 0.0:
            crits.append(hi)
        elif (flo < 0) != (fhi < 0):
            crits.append(_bisect_real(hp, lo, hi, flo, fhi))

    bounds = [nu1] + sorted(c for c in crits if nu1 < c < nu2) + [nu2]
    roots: list[Eigenvalue] = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        flo, fhi = h(lo), h(hi)
        if (flo < 0) == (fhi < 0) and flo != 0.0 and fhi != 0.0:
            continue
        x = _bisect_real(h, lo, hi, flo, fhi)
        # Newton polish on the real axis
        for _ in range(8):
            hv = h(x)
            if abs(hv) <= tol.residual_scale * (1.0 + abs(x)):
                break
            d = hp(x)
            if abs(d) < tol.derivative_floor:
                break
            x = x - hv / d
        res = abs(h(x))
        if res > tol.residual_scale * (1.0 + abs(x)):
            raise ToleranceNotMet(
                f"real-root refinement stalled at {x} with |h| = {res:.3e}"
            )
        roots.append(
            Eigenvalue(value=complex(x, 0.0), residual=res, certified=True)
        )

    # A touching (double) root hides at a critical point without a sign change.
    for cr in crits:
        res = abs(h(cr))
        if res <= 100.0 * tol.residual_scale * (1.0 + abs(cr)) and all(
            abs(r.value.real - cr) > 1e-9 * (1.0 + abs(cr)) for r in roots
        ):
            mult = 3 if abs(cr - inflection) < 1e-9 else 2
            roots.append(
                Eigenvalue(
                    value=complex(cr, 0.0),
                    residual=res,
                    multiplicity=mult,
                    certified=True,
                )
            )
    roots.sort(key=_sort_key)
    return roots


# --------------------------------------------------------------------------
# full enumeration
# --------------------------------------------------------------------------


def _slice_edges(params: NeutralParams, n_max: int) -> np.ndarray:
    """Horizontal lines between consecutive aux eigenvalue ladders.

    For c > 0 the centers are (2n+1) pi (n = 0..n_max) and the edges the
    even multiples 2n pi; for c < 0 the centers are 2n pi (n = 1..n_max)
    and the edges the odd multiples.  Index k of the returned array is the
    lower edge of the slice owning center index k (c > 0) / k+1 (c < 0).
    """
    if params.c > 0:
        return 2.0 * math.pi * np.arange(n_max + 2)
    return math.pi * (2.0 * np.arange(n_max + 2) - 1.0)


def _vet_edges(
    params: NeutralParams, edges: np.ndarray, nu1: float, nu2: float, tol: Tolerances
) -> np.ndarray:
    """Nudge horizontal edges until |h| clears the contour threshold."""
    xs = np.linspace(nu1, nu2, max(64, int(16 * (nu2 - nu1))))
    out = edges.astype(float).copy()
    for i, e in enumerate(out):
        if e <= 0.0:
            continue
        for shift in (0.0, 0.2, -0.2, 0.35, -0.35, 0.5):
            cand = e + shift
            vals = eval_h(params, xs + 1j * cand)
            if np.min(np.abs(vals)) >= 10.0 * tol.boundary_clearance:
                out[i] = cand
                break
        else:
            raise BoundaryTooClose(f"no clear horizontal line near Im = {e}")
    return out


def certify_indexed_root(
    params: NeutralParams, n: int, tol: Tolerances = DEFAULT_TOLERANCES
) -> Eigenvalue:
    """Newton-refine the seed z_n and certify the result in its strip slice.

    The certificate is: the root converged to residual tolerance, lies in
    the horizontal slice between the midlines around z_n, is closer to z_n
    than to any other ladder point, and the slice contains exactly one zero
    by winding count.
    """
    if n < 0:
        mirrored = certify_indexed_root(params, _mirror_index(params, n), tol)
        return mirrored.conjugate(n)
    nu1, nu2 = strip_bounds(params)
    z_n = auxiliary_eigen(params, n)
    if z_n.imag <= 0:
        raise ValueError(f"index {n} has no positive-imaginary ladder point")
    lo, hi = z_n.imag - math.pi, z_n.imag + math.pi
    lo = max(lo, tol.low_imag_floor)
    eig = find_eigenvalue_near(params, z_n, tol)
    lam = eig.value
    corr = abs(lam - z_n)
    ok = (
        eig.residual <= tol.residual_scale * (1.0 + abs(lam))
        and lo < lam.imag < hi
        and nu1 < lam.real < nu2
        and corr <= tol.ball_cap
    )
    if not ok:
        raise ToleranceNotMet(f"seed z_{n} did not certify (|corr| = {corr:.3g})")
    cnt, _ = _count_with_retries(params, Rectangle(nu1, nu2, lo, hi), tol)
    if cnt != 1:
        raise ToleranceNotMet(f"slice of z_{n} holds {cnt} zeros, not 1")
    radius = min(tol.ball_cap, max(4.0 * corr, tol.ball_floor))
    return Eigenvalue(
        value=lam,
        index=n,
        residual=eig.residual,
        certified=True,
        ball_radius=radius,
    )


def _mirror_index(params: NeutralParams, n: int) -> int:
    # conj(z_n) = z_m with m = -n-1 for c > 0 (centers at odd pi) and
    # m = -n for c < 0 (centers at even pi).
    return -n - 1 if params.c > 0 else -n


def _subdivide(
    params: NeutralParams,
    rect: Rectangle,
    tol: Tolerances,
    depth: int = 0,
) -> list[Eigenvalue]:
    """Recursively isolate every zero inside ``rect`` (upper half plane)."""
    cnt, rect = _count_with_retries(params, rect, tol)
    if cnt == 0:
        return []
    w, hgt = rect.widths
    if cnt == 1:
        seeds = [rect.center]
        seeds += [
            complex(
                rect.re_min + fx * w,
                rect.im_min + fy * hgt,
            )
            for fx, fy in ((0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75))
        ]
        for seed in seeds:
            try:
                eig = find_eigenvalue_near(params, seed, tol)
            except DerivativeVanished:
                continue
            lam = eig.value
            if eig.residual <= tol.residual_scale * (1.0 + abs(lam)) and rect.contains(
                lam
            ):
                return [replace(eig, certified=True, index=_maybe_index(params, lam, tol))]
        # Newton failed; fall through to splitting.
    if max(w, hgt) < tol.min_rect and cnt >= 1:
        lam = rect.center
        return [
            Eigenvalue(
                value=lam,
                residual=float(abs(eval_h(params, lam))),
                multiplicity=cnt,
                certified=True,
            )
        ]
    if depth > 60:
        raise IncompleteEnumeration(f"subdivision depth exhausted at {rect}")
    # split the longer side, with perturbed cut lines when a zero interferes
    for frac in (0.5, 0.45, 0.55, 0.4, 0.6):
        if w >= hgt:
            cut = rect.re_min + frac * w
            halves = (
                Rectangle(rect.re_min, cut, rect.im_min, rect.im_max),
                Rectangle(cut, rect.re_max, rect.im_min, rect.im_max),
            )
        else:
            cut = rect.im_min + frac * hgt
            halves = (
                Rectangle(rect.re_min, rect.re_max, rect.im_min, cut),
                Rectangle(rect.re_min, rect.re_max, cut, rect.im_max),
            )
        try:
            found = []
            for half in halves:
                found.extend(_subdivide(params, half, tol, depth + 1))
            return found
        except BoundaryTooClose:
            continue
    raise BoundaryTooClose(f"could not find a clear cut line for {rect}")


def _maybe_index(params: NeutralParams, lam: complex, tol: Tolerances) -> int | None:
    two_pi = 2.0 * math.pi
    if params.c > 0:
        n = int(round((lam.imag - math.pi) / two_pi))
    else:
        n = int(round(lam.imag / two_pi))
    if abs(lam - auxiliary_eigen(params, n)) <= tol.ball_cap:
        return n
    return None


def enumerate_eigenvalues(
    params: NeutralParams, n_max: int, tol: Tolerances = DEFAULT_TOLERANCES
) -> list[Eigenvalue]:
    """Every root with |asymptotic index| <= n_max plus all low-lying roots.

    Strategy: Newton from each ladder seed z_n with a per-slice winding
    certificate; slices that refuse the certificate (small n, wandering
    roots) are swept by rectangle subdivision; real roots come from the
    monotone-piece bisection; the lower half plane is filled in by
    conjugation.  A final winding count over the whole enumerated region
    must match the total multiplicity, otherwise ``IncompleteEnumeration``
    is raised.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    nu1, nu2 = strip_bounds(params)
    edges = _vet_edges(params, _slice_edges(params, n_max), nu1, nu2, tol)

    n_lo = 0 if params.c > 0 else 1
    certified: dict[int, Eigenvalue] = {}
    for n in range(n_lo, n_max + 1):
        z_n = auxiliary_eigen(params, n)
        lo = max(float(edges[n - n_lo]), tol.low_imag_floor)
        hi = float(edges[n - n_lo + 1])
        try:
            eig = find_eigenvalue_near(params, z_n, tol)
        except DerivativeVanished:
            continue
        lam = eig.value
        corr = abs(lam - z_n)
        if not (
            eig.residual <= tol.residual_scale * (1.0 + abs(lam))
            and lo < lam.imag < hi
            and nu1 < lam.real < nu2
            and corr <= tol.ball_cap
        ):
            continue
        try:
            cnt = count_zeros_in_rect(params, Rectangle(nu1, nu2, lo, hi), tol)
        except BoundaryTooClose:
            continue
        if cnt != 1:
            continue
        radius = min(tol.ball_cap, max(4.0 * corr, tol.ball_floor))
        certified[n] = Eigenvalue(
            value=lam,
            index=n,
            residual=eig.residual,
            certified=True,
            ball_radius=radius,
        )

    # first index from which the ladder certificates run unbroken to n_max
    n_start = n_max + 1
    for n in range(n_max, n_lo - 1, -1):
        if n in certified:
            n_start = n
        else:
            break
    upper = [certified[n] for n in range(n_start, n_max + 1)]

    # everything below the unbroken ladder: rectangle subdivision
    low_top = float(edges[n_start - n_lo]) if n_start <= n_max else float(edges[-1])
    low_found: list[Eigenvalue] = []
    if low_top > tol.low_imag_floor:
        low_rect = Rectangle(nu1, nu2, tol.low_imag_floor, low_top)
        low_found = _subdivide(params, low_rect, tol)
    upper_all = sorted(low_found + upper, key=_sort_key)

    reals = real_roots(params, tol)
    if params.c < 0:
        # the ladder point z_0 = ln|c| is real; tag the matching real root
        tagged = []
        for r in reals:
            if (
                abs(r.value.real - params.accumulation) <= tol.ball_cap
                and r.index is None
            ):
                tagged.append(replace(r, index=0, ball_radius=tol.ball_floor))
            else:
                tagged.append(r)
        reals = tagged

    lower = [e.conjugate(_mirror_index(params, e.index) if e.index is not None else None)
             for e in upper_all]
    result = sorted(reals + upper_all + lower, key=_sort_key)

    # completeness: winding count over the whole region == total multiplicity
    y_top = float(edges[-1]) if n_start <= n_max else low_top
    total_expected = sum(e.multiplicity for e in result)
    cnt = count_zeros_in_rect(params, Rectangle(nu1, nu2, -y_top, y_top), tol)
    if cnt != total_expected:
        raise IncompleteEnumeration(
            f"winding count {cnt} over the enumerated region does not match "
            f"the {total_expected} roots found"
        )
    return result
