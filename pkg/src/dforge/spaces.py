"""Dense-matrix realization of symbolic expressions on (levels) x (Fock 0..n_max).

Basis ordering is level-major, Fock-minor: index(level_k, n) = k*(n_max+1) + n,
with levels in their declared order.  The ladder convention is
<n-1| a |n> = sqrt(n), and the hard cutoff gives ad|n_max> = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .algebra import OperatorExpr
from .errors import FockOverflow, UnknownLevel

__all__ = [
    "SpaceSpec",
    "realize",
    "build_state",
    "coherent_tail_mass",
    "hermiticity_defect",
    "opnorm",
]


@dataclass(frozen=True)
class SpaceSpec:
    levels: tuple[str, ...]
    n_max: int

    def __post_init__(self):
        if len(self.levels) < 2:
            raise ValueError("need at least two atomic levels")
        if len(set(self.levels)) != len(self.levels):
            raise ValueError("duplicate level labels")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def fock_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return len(self.levels) * self.fock_dim

    def level_index(self, label: str) -> int:
        try:
            return self.levels.index(label)
        except ValueError:
            raise UnknownLevel(label) from None

    def index(self, label: str, n: int) -> int:
        if not 0 <= n <= self.n_max:
            raise FockOverflow(n, self.n_max)
        return self.level_index(label) * self.fock_dim + n


def _annihilator(fock_dim: int) -> np.ndarray:
    a = np.zeros((fock_dim, fock_dim), dtype=complex)
    for n in range(1, fock_dim):
        a[n - 1, n] = math.sqrt(n)
    return a


def realize(
    expr: OperatorExpr, space: SpaceSpec, params: Mapping[str, float] | None = None
) -> np.ndarray:
    """Dense complex matrix of an expression on the truncated space."""
    params = params or {}
    fd = space.fock_dim
    nlev = len(space.levels)
    a = _annihilator(fd)
    ad = a.conj().T
    # cache ladder powers appearing in the expression
    pow_cache: dict[tuple[str, int], np.ndarray] = {("a", 0): np.eye(fd, dtype=complex)}
    pow_cache[("ad", 0)] = pow_cache[("a", 0)]

    def power(base: str, k: int) -> np.ndarray:
        key = (base, k)
        if key not in pow_cache:
            pow_cache[key] = power(base, k - 1) @ (a if base == "a" else ad)
        return pow_cache[key]

    out = np.zeros((space.dim, space.dim), dtype=complex)
    eye_atom = np.eye(nlev, dtype=complex)
    for m in expr.terms:
        c = m.coeff.evaluate(params)
        boson = power("ad", m.boson.creators) @ power("a", m.boson.annihilators)
        if m.atom.pair is None:
            atom = eye_atom
        else:
            i, j = m.atom.pair
            atom = np.zeros((nlev, nlev), dtype=complex)
            atom[space.level_index(i), space.level_index(j)] = 1.0
        out += c * np.kron(atom, boson)
    return out


def coherent_tail_mass(alpha: complex, n_max: int) -> float:
    """Poisson weight beyond the truncation, before renormalization."""
    nbar = abs(alpha) ** 2
    kept = 0.0
    term = math.exp(-nbar)
    for n in range(n_max + 1):
        kept += term
        term *= nbar / (n + 1)
    return max(0.0, 1.0 - kept)


def build_state(descriptor: str, space: SpaceSpec) -> np.ndarray:
    """Build a unit state from "level,n" or "level,coherent(alpha)"."""
    parts = descriptor.split(",", 1)
    if len(parts) != 2:
        raise ValueError(f"bad state descriptor {descriptor!r}")
    label = parts[0].strip()
    rest = parts[1].strip()
    lidx = space.level_index(label)
    psi = np.zeros(space.dim, dtype=complex)
    if rest.startswith("coherent(") and rest.endswith(")"):
        alpha = complex(rest[len("coherent(") : -1])
        if alpha.imag == 0:
            alpha = alpha.real
        n = np.arange(space.fock_dim)
        log_fact = np.cumsum(np.concatenate([[0.0], np.log(n[1:])]))
        amps = np.exp(
            -abs(alpha) ** 2 / 2 + n * np.log(complex(alpha)) - log_fact / 2
        ) if alpha != 0 else np.eye(space.fock_dim)[0].astype(complex)
        amps = np.asarray(amps, dtype=complex)
        amps /= np.linalg.norm(amps)
        psi[lidx * space.fock_dim : (lidx + 1) * space.fock_dim] = amps
    else:
        n = int(rest)
        psi[space.index(label, n)] = 1.0
    return psi


def hermiticity_defect(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat - mat.conj().T)))


def opnorm(mat: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(mat, 2))
