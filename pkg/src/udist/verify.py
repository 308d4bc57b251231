"""Verification of circuit approximations by projective measurements.

The protocol runs each basis vector of n+1 independent orthonormal bases
through the candidate circuit followed by the inverse of the reference
circuit, measures against the prepared vector, and turns the survival
probability p into the state-resolved distance estimate sqrt(1 - p). The
basis-set independence (the shifted projectors span the traceless hermitian
operators) is what makes the finite family of states informative about the
full distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_TOL, as_complex_matrix, as_state, is_unitary
from .metric import _clamped_root
from .serialize import matrix_from_json, matrix_to_json

#: Family-wise error rate for the finite-shot confidence radii.
CONFIDENCE_ALPHA = 0.01

#: Singular values above this threshold count toward the independence rank.
RANK_TOL = 1e-8


@dataclass(frozen=True)
class Circuit:
    """A unitary built from gates acting on subsets of equal-dimension wires.

    ``dim`` is the total Hilbert dimension, ``wires`` the number of wires, so
    the local dimension is the integer w-th root of dim. Gates are pairs
    ``(matrix, wire_indices)`` applied in list order (first gate acts first).
    """

    dim: int
    wires: int
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.dim < 1 or self.wires < 1:
            raise ValueError("dim and wires must be positive")
        q = self.local_dim
        if q**self.wires != self.dim:
            raise ValueError(
                f"dim {self.dim} is not a {self.wires}-th power of an integer local dimension"
            )
        normalized = []
        for gate, wire_list in self.gates:
            gate = as_complex_matrix(gate)
            wire_list = tuple(int(w) for w in wire_list)
            if len(set(wire_list)) != len(wire_list):
                raise ValueError(f"gate wires {wire_list} are not distinct")
            if any(w < 0 or w >= self.wires for w in wire_list):
                raise ValueError(f"gate wires {wire_list} out of range for {self.wires} wires")
            expected = q ** len(wire_list)
            if gate.shape != (expected, expected):
                raise ValueError(
                    f"gate on wires {wire_list} has shape {gate.shape}, expected {expected}x{expected}"
                )
            if not is_unitary(gate, 1e-9):
                raise ValueError(f"gate on wires {wire_list} is not unitary")
            normalized.append((gate, wire_list))
        object.__setattr__(self, "gates", tuple(normalized))

    @property
    def local_dim(self) -> int:
        return round(self.dim ** (1.0 / self.wires))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "wires": self.wires,
            "gates": [
                {"matrix": matrix_to_json(g), "wires": list(ws)} for g, ws in self.gates
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "Circuit":
        try:
            dim = int(obj["dim"])
            wires = int(obj["wires"])
            raw_gates = obj.get("gates", [])
            gates = [
                (matrix_from_json(g["matrix"]), tuple(int(w) for w in g["wires"]))
                for g in raw_gates
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed circuit JSON: {exc}") from exc
        return cls(dim=dim, wires=wires, gates=tuple(gates))


def _embed_gate(gate: np.ndarray, wire_list: tuple, wires: int, q: int) -> np.ndarray:
    """Expand a gate on selected wires to the full Hilbert space."""
    rest = [w for w in range(wires) if w not in wire_list]
    full = np.kron(gate, np.eye(q ** len(rest), dtype=complex))
    order = list(wire_list) + rest
    inv = np.argsort(order)
    tensorized = full.reshape([q] * (2 * wires))
    axes = list(inv) + [wires + i for i in inv]
    return tensorized.transpose(axes).reshape(q**wires, q**wires)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """The full unitary of the circuit, gates applied in time order."""
    q = circuit.local_dim
    total = np.eye(circuit.dim, dtype=complex)
    for gate, wire_list in circuit.gates:
        total = _embed_gate(gate, wire_list, circuit.wires, q) @ total
    if not is_unitary(total, 1e-8):
        raise ValueError("accumulated circuit unitary drifted beyond tolerance")
    return total


@dataclass(frozen=True)
class BasisSet:
    """n+1 orthonormal bases of C^n with an independence certificate.

    Each basis is an n x n unitary whose columns are the basis vectors;
    ``independent`` certifies that the shifted projectors
    P^k_i - I/n (i = 1..n-1 per basis) have full rank n^2 - 1.
    """

    dim: int
    bases: tuple
    independent: bool = False

    def __post_init__(self):
        bases = tuple(as_complex_matrix(b) for b in self.bases)
        for b in bases:
            if b.shape != (self.dim, self.dim):
                raise ValueError(f"basis has shape {b.shape}, expected {self.dim}x{self.dim}")
            if not is_unitary(b, 1e-9):
                raise ValueError("basis matrix is not unitary")
        object.__setattr__(self, "bases", bases)

    def to_json(self) -> dict:
        return {"dim": self.dim, "bases": [matrix_to_json(b) for b in self.bases]}

    @classmethod
    def from_json(cls, obj) -> "BasisSet":
        try:
            dim = int(obj["dim"])
            bases = tuple(matrix_from_json(b) for b in obj["bases"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed basis-set JSON: {exc}") from exc
        out = cls(dim=dim, bases=bases)
        return cls(dim=dim, bases=bases, independent=independence_check(out))


def independence_check(basis_set: BasisSet) -> bool:
    """Rank test for basis independence.

    Flattens each shifted projector P^k_i - I/n (first n-1 vectors of every
    basis) into a real vector and checks that the stack has rank n^2 - 1
    under singular-value threshold 1e-8.
    """
    n = basis_set.dim
    rows = []
    for basis in basis_set.bases:
        for i in range(n - 1):
            v = basis[:, i]
            shifted = np.outer(v, v.conj()) - np.eye(n) / n
            rows.append(np.concatenate([shifted.real.ravel(), shifted.imag.ravel()]))
    if not rows:
        return False
    singular = np.linalg.svd(np.array(rows), compute_uv=False)
    return int(np.sum(singular > RANK_TOL)) == n * n - 1


def _is_prime(d: int) -> bool:
    if d < 2:
        return False
    if d < 4:
        return True
    if d % 2 == 0:
        return False
    f = 3
    while f * f <= d:
        if d % f == 0:
            return False
        f += 2
    return True


def mub_bases(d: int) -> BasisSet:
    """The d+1 mutually unbiased bases of prime dimension d.

    Computational basis plus, for odd d, the quadratic-phase bases with
    vector components omega^(k m^2 + j m)/sqrt(d); d = 2 uses the X and Y
    eigenbases. Every cross-basis overlap satisfies |<u|v>|^2 = 1/d and the
    independence certificate is verified on construction.
    """
    if not _is_prime(d):
        raise ValueError(f"mub_bases requires a prime dimension, got {d}")
    bases = [np.eye(d, dtype=complex)]
    if d == 2:
        s = 1.0 / np.sqrt(2.0)
        bases.append(np.array([[s, s], [s, -s]], dtype=complex))
        bases.append(np.array([[s, s], [1j * s, -1j * s]], dtype=complex))
    else:
        omega = np.exp(2j * np.pi / d)
        m = np.arange(d)
        for k in range(d):
            basis = np.empty((d, d), dtype=complex)
            for j in range(d):
                basis[:, j] = omega ** ((k * m * m + j * m) % d) / np.sqrt(d)
            bases.append(basis)
    out = BasisSet(dim=d, bases=tuple(bases))
    independent = independence_check(out)
    if not independent:
        raise RuntimeError(f"constructed bases for d={d} failed the independence check")
    return BasisSet(dim=d, bases=out.bases, independent=True)


def simulate_measurement(state, projector_state, shots: int, rng_seed=0) -> int:
    """Success count of ``shots`` projective measurements.

    Each shot succeeds with probability |<projector_state|state>|^2;
    deterministic for a fixed seed.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    state = as_state(state)
    projector_state = as_state(projector_state, dim=state.size)
    p = min(1.0, abs(np.vdot(projector_state, state)) ** 2)
    rng = np.random.default_rng(rng_seed)
    return int(rng.binomial(shots, p))


@dataclass(frozen=True)
class StateEstimate:
    basis_index: int
    vector_index: int
    estimate: float
    radius: float

    def to_json(self) -> dict:
        return {
            "basis": self.basis_index,
            "vector": self.vector_index,
            "estimate": self.estimate,
            "radius": self.radius,
        }


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of the approximation protocol.

    ``shots`` is None in exact mode. The verdict is ``pass`` when every
    state's upper confidence limit stays at or below epsilon, ``fail`` when
    some lower limit exceeds it, and ``inconclusive`` otherwise.
    """

    epsilon: float
    shots: int | None
    per_state: tuple
    max_estimate: float
    verdict: str

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "shots": self.shots,
            "per_state": [s.to_json() for s in self.per_state],
            "max_estimate": self.max_estimate,
            "verdict": self.verdict,
        }


def _unitary_of(circuit_or_matrix) -> np.ndarray:
    if isinstance(circuit_or_matrix, Circuit):
        return circuit_unitary(circuit_or_matrix)
    return as_complex_matrix(circuit_or_matrix)


def verify_approximation(
    u,
    v,
    bases: BasisSet,
    epsilon: float,
    shots: int | None = None,
    rng_seed=0,
    tol: float = DEFAULT_TOL,
) -> VerificationReport:
    """Estimate the distance between two circuits over a basis family.

    For every basis vector alpha: prepare alpha, apply the candidate circuit
    ``v``, undo the reference ``u`` (i.e. apply its inverse), and measure
    against alpha. ``shots=None`` uses exact probabilities; otherwise each
    state gets a seeded binomial draw and a two-sided Hoeffding radius at
    family-wise level 99% (Bonferroni across the (n+1)*n states), propagated
    through sqrt(1 - p).

    Refuses bases without a verified independence certificate, since the
    whole point of the basis family is that it determines the state.
    """
    u_mat = _unitary_of(u)
    v_mat = _unitary_of(v)
    if u_mat.shape != v_mat.shape:
        raise ValueError(f"dimension mismatch: {u_mat.shape} vs {v_mat.shape}")
    n = u_mat.shape[0]
    if bases.dim != n:
        raise ValueError(f"bases have dimension {bases.dim}, circuits have {n}")
    if not (bases.independent and independence_check(bases)):
        raise ValueError("basis set is not independent; refusing to certify")
    if not (is_unitary(u_mat, tol) and is_unitary(v_mat, tol)):
        raise ValueError("both circuits must be unitary")

    w = u_mat.conj().T @ v_mat
    n_states = len(bases.bases) * n
    if shots is None:
        seeds = [None] * n_states
    else:
        if shots < 1:
            raise ValueError("shots must be at least 1")
        seeds = np.random.SeedSequence(rng_seed).spawn(n_states)
        delta = CONFIDENCE_ALPHA / n_states
        eps_p = math.sqrt(math.log(2.0 / delta) / (2.0 * shots))

    estimates = []
    state_index = 0
    for b_idx, basis in enumerate(bases.bases):
        transported = w @ basis
        for v_idx in range(n):
            p = min(1.0, abs(np.vdot(basis[:, v_idx], transported[:, v_idx])) ** 2)
            if shots is None:
                p_hat, radius = p, 0.0
                est = _clamped_root(p_hat)
            else:
                count = simulate_measurement(
                    transported[:, v_idx], basis[:, v_idx], shots, seeds[state_index]
                )
                p_hat = count / shots
                est = _clamped_root(p_hat)
                hi = _clamped_root(p_hat - eps_p)
                lo = _clamped_root(p_hat + eps_p)
                radius = max(hi - est, est - lo)
            estimates.append(
                StateEstimate(basis_index=b_idx, vector_index=v_idx, estimate=est, radius=radius)
            )
            state_index += 1

    max_estimate = max(s.estimate for s in estimates)
    if all(s.estimate + s.radius <= epsilon for s in estimates):
        verdict = "pass"
    elif any(s.estimate - s.radius > epsilon for s in estimates):
        verdict = "fail"
    else:
        verdict = "inconclusive"
    return VerificationReport(
        epsilon=float(epsilon),
        shots=shots,
        per_state=tuple(estimates),
        max_estimate=max_estimate,
        verdict=verdict,
    )
