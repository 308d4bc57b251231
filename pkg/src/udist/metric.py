"""Projective-invariant distance between unitary operators.

The distance is ``D(U, V) = max_psi sqrt(1 - |<psi|U†V|psi>|^2)`` over unit
vectors, which ignores global phases on either operator. Three independent
routes compute it:

* ``u_distance_arc``   -- from the minimal circular arc covering the
  eigenphases of ``U†V``: ``sin(d/2)`` while the arc fits in a semicircle,
  1 otherwise.
* ``u_distance_hull``  -- from the Euclidean distance between the origin and
  the convex polygon spanned by those eigenvalues (the numerical range).
* ``u_distance_bruteforce`` -- direct maximisation over the unit sphere;
  a seeded sampling-plus-ascent estimator that converges from below and
  serves as the independent cross-check for the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    TWO_PI,
    as_complex_matrix,
    as_state,
    eigenphases,
    is_unitary,
    operator_norm,
    unitary_eigenvalues,
    UnitarySpectrum,
)

_HULL_TOL = 1e-12


@dataclass(frozen=True)
class DistanceResult:
    """Distance value with provenance.

    ``arc_length`` is the covering-arc length when the arc route produced the
    value; ``witness`` is a unit vector with ``U psi`` orthogonal to ``V psi``
    whenever the distance reaches 1.
    """

    value: float
    method: str  # "arc" | "hull" | "brute_force"
    arc_length: float | None = None
    witness: np.ndarray | None = None

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "arc_length": self.arc_length,
            "witness": None
            if self.witness is None
            else [[float(z.real), float(z.imag)] for z in self.witness],
        }


@dataclass(frozen=True)
class NumericalRangePolygon:
    """Eigenvalues of a unitary on the unit circle plus their convex hull.

    ``hull`` lists hull vertices counterclockwise with duplicates and
    collinear points merged (tolerance 1e-12).
    """

    vertices: np.ndarray
    hull: np.ndarray


def _relative_operator(u, v, tol: float) -> np.ndarray:
    """Validated U†V for unitary operands of equal dimension."""
    u = as_complex_matrix(u)
    v = as_complex_matrix(v)
    if u.shape != v.shape or u.shape[0] != u.shape[1]:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    if not is_unitary(u, tol) or not is_unitary(v, tol):
        raise ValueError("both operators must be unitary")
    return u.conj().T @ v


def _clamped_root(t: float) -> float:
    """sqrt(1 - t) with t clamped into [0, 1] to absorb roundoff."""
    return float(np.sqrt(1.0 - min(1.0, max(0.0, t))))


def d_psi(u, v, psi, tol: float = DEFAULT_TOL) -> float:
    """State-resolved distance sqrt(1 - |<psi|U†V|psi>|^2), in [0, 1]."""
    w = _relative_operator(u, v, tol)
    psi = as_state(psi, dim=w.shape[0])
    amp = np.vdot(psi, w @ psi)
    return _clamped_root(abs(amp) ** 2)


def minimal_covering_arc(phases) -> float:
    """Length of the shortest circular arc containing all phases.

    Computed as 2*pi minus the largest gap between circularly consecutive
    phases; the result lies in [0, 2*pi).
    """
    p = np.sort(np.asarray(phases, dtype=float).ravel())
    if p.size == 0:
        raise ValueError("minimal_covering_arc requires at least one phase")
    if p.size == 1:
        return 0.0
    largest_gap = max(float(np.diff(p).max()), float(TWO_PI - p[-1] + p[0]))
    return float(TWO_PI - largest_gap)


def _arc_start(phases: np.ndarray) -> float:
    """First phase of the minimal covering arc (the phase after the largest gap)."""
    p = np.asarray(phases, dtype=float)
    if p.size == 1:
        return float(p[0])
    gaps = np.diff(p)
    wrap = TWO_PI - p[-1] + p[0]
    if wrap >= gaps.max():
        return float(p[0])
    return float(p[int(np.argmax(gaps)) + 1])


def _labels_from_arc_start(phases: np.ndarray) -> np.ndarray:
    """Eigenvalues ordered counterclockwise starting at the covering arc."""
    p = np.asarray(phases, dtype=float)
    if p.size == 1:
        return np.exp(1j * p)
    gaps = np.diff(p)
    wrap = TWO_PI - p[-1] + p[0]
    start = 0 if wrap >= gaps.max() else int(np.argmax(gaps)) + 1
    return np.exp(1j * np.roll(p, -start))


def arc_distance_value(w) -> float:
    """Arc-route distance D(I, w) from eigenvalues only (no certificates).

    Fast path for bulk numeric work; ``w`` must already be unitary.
    """
    z = unitary_eigenvalues(w)
    phases = np.mod(np.angle(z), TWO_PI)
    d = minimal_covering_arc(phases)
    return float(np.sin(0.5 * d)) if d <= np.pi else 1.0


def u_distance_arc(u, v, tol: float = DEFAULT_TOL) -> DistanceResult:
    """Distance via the eigenphase covering arc of U†V.

    Returns ``sin(d/2)`` when the arc length d is at most pi; otherwise the
    eigenvalues surround the origin and the distance is 1, in which case a
    witness state with ``U psi`` orthogonal to ``V psi`` is attached (the
    boundary d = pi emits the witness as well).
    """
    w = _relative_operator(u, v, tol)
    spectrum = eigenphases(w, tol)
    d = minimal_covering_arc(spectrum.phases)
    value = float(np.sin(0.5 * d)) if d <= np.pi else 1.0
    witness = _witness_from_spectrum(spectrum) if d >= np.pi else None
    return DistanceResult(value=value, method="arc", arc_length=d, witness=witness)


def _merge_close_points(points: list[complex], tol: float) -> list[complex]:
    out: list[complex] = []
    for p in sorted(points, key=lambda z: (z.real, z.imag)):
        if out and abs(p - out[-1]) <= tol:
            continue
        out.append(p)
    return out


def _convex_hull_ccw(points, tol: float = _HULL_TOL) -> np.ndarray:
    """Monotone-chain convex hull, counterclockwise, collinear points merged."""
    pts = _merge_close_points([complex(z) for z in points], tol)
    if len(pts) <= 2:
        return np.array(pts, dtype=complex)

    def cross(o: complex, a: complex, b: complex) -> float:
        return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)

    lower: list[complex] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    upper: list[complex] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1], dtype=complex)


def numerical_range_polygon(w, tol: float = DEFAULT_TOL) -> NumericalRangePolygon:
    """Numerical range of a unitary: the polygon spanned by its eigenvalues."""
    spectrum = eigenphases(w, tol)
    vertices = np.exp(1j * spectrum.phases)
    return NumericalRangePolygon(vertices=vertices, hull=_convex_hull_ccw(vertices))


def _segment_distance_to_origin(a: complex, b: complex) -> float:
    d = b - a
    length_sq = abs(d) ** 2
    if length_sq == 0.0:
        return abs(a)
    t = min(1.0, max(0.0, -(a.real * d.real + a.imag * d.imag) / length_sq))
    return abs(a + t * d)


def hull_distance_to_origin(polygon: NumericalRangePolygon) -> float:
    """Euclidean distance from the origin to the hull (0 if inside or on it)."""
    hull = polygon.hull
    if len(hull) == 1:
        return float(abs(hull[0]))
    if len(hull) == 2:
        return _segment_distance_to_origin(complex(hull[0]), complex(hull[1]))
    nxt = np.roll(hull, -1)
    # Origin is inside the CCW polygon iff it is on the left of every edge.
    crosses = (nxt.real - hull.real) * (-hull.imag) - (nxt.imag - hull.imag) * (-hull.real)
    if np.all(crosses >= -_HULL_TOL):
        return 0.0
    return float(
        min(
            _segment_distance_to_origin(complex(a), complex(b))
            for a, b in zip(hull, nxt)
        )
    )


def u_distance_hull(u, v, tol: float = DEFAULT_TOL) -> DistanceResult:
    """Distance via the numerical-range polygon of U†V: sqrt(1 - rho^2)."""
    w = _relative_operator(u, v, tol)
    rho = hull_distance_to_origin(numerical_range_polygon(w, tol))
    return DistanceResult(value=_clamped_root(rho * rho), method="hull")


def r_value(u, tol: float = DEFAULT_TOL) -> float:
    """min over unit states of |<psi|U|psi>|^2, i.e. the squared distance from
    the origin to the numerical range of U."""
    u = as_complex_matrix(u)
    rho = hull_distance_to_origin(numerical_range_polygon(u, tol))
    return rho * rho


def _zero_convex_weights(points: np.ndarray, tol: float = 1e-9) -> np.ndarray | None:
    """Convex weights p with sum p_i z_i = 0 for unit-circle points, or None.

    Tries an antipodal pair first, then walks the fan triangulation of the
    hull for a triangle containing the origin.
    """
    n = len(points)
    pair_i, pair_j = np.triu_indices(n, k=1)
    antipodal = np.abs(points[pair_i] + points[pair_j]) <= tol
    if antipodal.any():
        hit = int(np.argmax(antipodal))
        weights = np.zeros(n)
        weights[pair_i[hit]] = weights[pair_j[hit]] = 0.5
        return weights
    hull = _convex_hull_ccw(points)
    if len(hull) < 3:
        return None
    hull_to_original = [int(np.argmin(np.abs(points - h))) for h in hull]
    anchor = hull[0]
    for k in range(1, len(hull) - 1):
        a, b = hull[k], hull[k + 1]
        system = np.array(
            [[anchor.real, a.real, b.real], [anchor.imag, a.imag, b.imag], [1.0, 1.0, 1.0]]
        )
        try:
            bary = np.linalg.solve(system, np.array([0.0, 0.0, 1.0]))
        except np.linalg.LinAlgError:
            continue
        if np.all(bary >= -1e-12):
            bary = np.clip(bary, 0.0, None)
            bary /= bary.sum()
            weights = np.zeros(n)
            for idx, p in zip((hull_to_original[0], hull_to_original[k], hull_to_original[k + 1]), bary):
                weights[idx] += p
            return weights
    return None


def _witness_from_spectrum(spectrum: UnitarySpectrum) -> np.ndarray | None:
    points = np.exp(1j * spectrum.phases)
    weights = _zero_convex_weights(points)
    if weights is None:
        return None
    psi = spectrum.eigenvectors @ np.sqrt(weights).astype(complex)
    return psi / np.linalg.norm(psi)


def orthogonalizing_state(u, v, tol: float = DEFAULT_TOL) -> np.ndarray | None:
    """A unit vector psi with U psi orthogonal to V psi, if one exists.

    Exists exactly when the distance reaches 1, i.e. when the origin lies in
    the hull of the eigenvalues of U†V; returns None otherwise. The state is
    built as sum_i sqrt(p_i) v_i over eigenvectors, where the convex weights
    p zero out the corresponding eigenvalues.
    """
    w = _relative_operator(u, v, tol)
    spectrum = eigenphases(w, tol)
    if minimal_covering_arc(spectrum.phases) < np.pi:
        return None
    return _witness_from_spectrum(spectrum)


def u_distance_bruteforce(
    u,
    v,
    samples: int = 200,
    refine_iters: int = 500,
    rng_seed=0,
    tol: float = DEFAULT_TOL,
) -> DistanceResult:
    """Distance by direct search over the unit sphere.

    Draws ``samples`` random unit states, keeps the most promising starts and
    runs a projected gradient descent on |<psi|W|psi>|^2 (step sizes adapt
    per start, candidates that fail to improve are rejected). Every reported
    value is sqrt(1 - |<psi|W|psi>|^2) of an actually evaluated state, so
    the result is a lower bound on the distance that converges from below.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    w = _relative_operator(u, v, tol)
    n = w.shape[0]
    rng = np.random.default_rng(rng_seed)

    starts = rng.standard_normal((n, samples)) + 1j * rng.standard_normal((n, samples))
    starts /= np.linalg.norm(starts, axis=0)
    overlaps = np.abs(np.sum(starts.conj() * (w @ starts), axis=0)) ** 2

    k = min(8, samples)
    psi = starts[:, np.argsort(overlaps)[:k]]
    w_dag = w.conj().T
    w_psi = w @ psi
    m = np.sum(psi.conj() * w_psi, axis=0)
    f = np.abs(m) ** 2
    eta = np.full(k, 0.25)
    best = float(f.min())
    stall = 0
    for _ in range(refine_iters):
        grad = m.conj() * w_psi + m * (w_dag @ psi)
        grad -= psi * np.sum(psi.conj() * grad, axis=0)
        cand = psi - eta * grad
        cand /= np.linalg.norm(cand, axis=0)
        w_cand = w @ cand
        m_cand = np.sum(cand.conj() * w_cand, axis=0)
        f_cand = np.abs(m_cand) ** 2
        improved = f_cand < f
        psi = np.where(improved, cand, psi)
        w_psi = np.where(improved, w_cand, w_psi)
        m = np.where(improved, m_cand, m)
        f = np.where(improved, f_cand, f)
        eta = np.clip(np.where(improved, eta * 1.25, eta * 0.5), 1e-8, 4.0)
        new_best = float(f.min())
        stall = stall + 1 if best - new_best < 1e-16 else 0
        best = new_best
        if stall >= 16:
            break
    value = _clamped_root(min(best, float(overlaps.min())))
    return DistanceResult(value=value, method="brute_force")


def supnorm_distance(u, v, tol: float = DEFAULT_TOL) -> float:
    """Operator-norm distance ||U - V|| read off the eigenphases of U†V.

    Equals 2 sin(c/2) for the eigenphase c of U†V closest to pi; the SVD
    route ``operator_norm(u - v)`` gives the same number and serves as the
    independent cross-check in the test suite.
    """
    w = _relative_operator(u, v, tol)
    phases = eigenphases(w, tol).phases
    closest = phases[int(np.argmin(np.abs(phases - np.pi)))]
    return float(2.0 * np.sin(0.5 * closest))


def align_phase(u, v, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Phase x with D(U, V) = 0.5 * ||U - e^{ix} V||, plus that half norm.

    While the eigenphases of U†V fit in a semicircle, x rotates the covering
    arc to start at phase 0; once the distance saturates at 1, x instead puts
    -1 in the rotated spectrum, making the norm exactly 2. The returned half
    norm is computed from the operator norm directly, so the pair cross-checks
    the arc value.
    """
    w = _relative_operator(u, v, tol)
    spectrum = eigenphases(w, tol)
    d = minimal_covering_arc(spectrum.phases)
    if d <= np.pi:
        x = float(np.mod(-_arc_start(spectrum.phases), TWO_PI))
    else:
        x = float(np.mod(np.pi - spectrum.phases[0], TWO_PI))
    half_norm = 0.5 * operator_norm(as_complex_matrix(u) - np.exp(1j * x) * as_complex_matrix(v))
    return x, half_norm


def tensor_distance_formula(d1: float, d2: float) -> float:
    """Distance between tensor products from the factor distances.

    With d_i = sin(a_i/2) for covering arcs a_i, the combined spectrum spans
    an arc of a_1 + a_2, so the distance is sin((a_1 + a_2)/2) until the
    combined arc reaches a half circle -- which happens exactly when
    d1^2 + d2^2 >= 1 -- and is 1 from then on.
    """
    if not (0.0 <= d1 <= 1.0 and 0.0 <= d2 <= 1.0):
        raise ValueError("factor distances must lie in [0, 1]")
    if d1 * d1 + d2 * d2 >= 1.0:
        return 1.0
    return d1 * np.sqrt(1.0 - d2 * d2) + d2 * np.sqrt(1.0 - d1 * d1)


def eigenvalue_perturbation_check(
    a, b, tol: float = DEFAULT_TOL, slack: float = 1e-9
) -> bool:
    """Check max_i |a_i - b_i| <= ||A - B|| for semicircle-confined spectra.

    Both operators must have eigenphases fitting in a semicircle (otherwise
    ``ValueError``); each spectrum is labelled counterclockwise from the
    start of its covering arc before the elementwise comparison.
    """
    spec_a = eigenphases(a, tol)
    spec_b = eigenphases(b, tol)
    if spec_a.phases.size != spec_b.phases.size:
        raise ValueError("operators must have equal dimension")
    for phases in (spec_a.phases, spec_b.phases):
        if minimal_covering_arc(phases) > np.pi + 1e-12:
            raise ValueError("eigenvalues do not fit in a semicircle")
    labels_a = _labels_from_arc_start(spec_a.phases)
    labels_b = _labels_from_arc_start(spec_b.phases)
    gap = float(np.abs(labels_a - labels_b).max())
    return gap <= operator_norm(as_complex_matrix(a) - as_complex_matrix(b)) + slack
