"""Full-rank lattices in R^(n+1) and enumeration of their short vectors."""
from __future__ import annotations

import functools
import itertools
import json
import math
import threading
import warnings
from dataclasses import dataclass
from os import PathLike
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .slice_algebra import Characteristic, CPlaneValue

__all__ = [
    "Lattice",
    "LatticePoint",
    "PointSet",
    "CosetRep",
    "NonIntegralLatticeWarning",
    "bilinear_form",
    "parse_lattice",
]

_INT_TOL = 1e-9


class NonIntegralLatticeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LatticePoint:
    coords: np.ndarray
    coeffs: np.ndarray

    @property
    def norm_sq(self) -> float:
        return float(np.dot(self.coords, self.coords))


@dataclass(frozen=True)
class CosetRep:
    """Element ``sum m_i Q_i`` of ``L/2`` with every ``m_i`` in ``{0, 1/2}``."""

    coeffs: np.ndarray
    coords: np.ndarray

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(int(round(2 * c)) for c in self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def as_characteristic(self) -> Characteristic:
        return Characteristic(self.coords)


@dataclass(frozen=True)
class PointSet:
    """Lattice points of a ball, sorted by norm then coefficients."""

    coeffs: np.ndarray
    coords: np.ndarray
    norm_sq: np.ndarray
    radius_sq: float

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def __iter__(self) -> Iterator[LatticePoint]:
        for m, q in zip(self.coeffs, self.coords):
            yield LatticePoint(q, m)

    def select(self, mask: np.ndarray) -> PointSet:
        return PointSet(self.coeffs[mask], self.coords[mask], self.norm_sq[mask], self.radius_sq)


class Lattice:
    """``L = { sum m_i Q_i : m in Z^(n+1) }`` from generator rows ``Q_i``."""

    def __init__(self, generators, *, warn_nonintegral: bool = False):
        g = np.array(generators, dtype=np.float64)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
            raise ValueError(f"generators must be a non-empty square matrix, got shape {g.shape}")
        det = float(np.linalg.det(g))
        if abs(det) <= 1e-12:
            raise ValueError("generators are linearly dependent (singular matrix)")
        g.flags.writeable = False
        self.generators = g
        gram = g @ g.T
        gram.flags.writeable = False
        self.gram = gram
        self.gram_det = float(np.linalg.det(gram))
        self._chol = np.ascontiguousarray(np.linalg.cholesky(gram).T)
        self._cache: dict[float, PointSet] = {}
        self._lock = threading.Lock()
        if warn_nonintegral and not self.is_integral_norms():
            warnings.warn(
                "lattice norms |q|^2 are not all integers; transformation and periodicity laws need them",
                NonIntegralLatticeWarning,
                stacklevel=2,
            )

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_generators(cls, rows, warn_nonintegral: bool = True) -> Lattice:
        return cls(rows, warn_nonintegral=warn_nonintegral)

    @classmethod
    def integer(cls, dim: int) -> Lattice:
        return cls(np.eye(dim))

    @classmethod
    def checkerboard(cls, dim: int) -> Lattice:
        """``D_dim``: integer vectors with even coordinate sum."""
        if dim < 2:
            raise ValueError("D_n needs n >= 2")
        rows = np.zeros((dim, dim))
        rows[0, 0] = rows[0, 1] = -1.0
        for i in range(1, dim):
            rows[i, i - 1] = 1.0
            rows[i, i] = -1.0
        return cls(rows)

    @classmethod
    def from_json(cls, source) -> Lattice:
        """Load ``{"generators": [[...], ...]}`` from a path, a JSON string or a dict."""
        if isinstance(source, dict):
            data = source
        elif isinstance(source, (str, PathLike)) and not str(source).lstrip().startswith("{"):
            with open(source) as fh:
                data = json.load(fh)
        else:
            data = json.loads(source)
        if "generators" not in data:
            raise ValueError('lattice JSON must have a "generators" key')
        return cls.from_generators(data["generators"])

    def to_json(self) -> dict:
        return {"generators": self.generators.tolist()}

    # -- basic invariants ---------------------------------------------------
    @property
    def dim(self) -> int:
        return self.generators.shape[0]

    @property
    def covolume(self) -> float:
        """Volume of a fundamental cell, ``sqrt(gram_det)``."""
        return math.sqrt(self.gram_det)

    @functools.cached_property
    def _dual(self) -> Lattice:
        return Lattice(np.linalg.inv(self.generators).T)

    def dual(self) -> Lattice:
        """Reciprocal lattice; its generators are the inverse transpose."""
        return self._dual

    def scaled(self, s: float) -> Lattice:
        return Lattice(self.generators * s)

    def is_integral_norms(self) -> bool:
        """All ``|q|^2`` are integers: integer diagonal, half-integer off-diagonal Gram."""
        diag = np.diag(self.gram)
        off = 2.0 * self.gram
        return bool(
            np.all(np.abs(diag - np.round(diag)) < _INT_TOL)
            and np.all(np.abs(off - np.round(off)) < _INT_TOL)
        )

    def is_integral(self) -> bool:
        """All inner products ``<q, l>`` are integers (``L`` inside its dual)."""
        return bool(np.all(np.abs(self.gram - np.round(self.gram)) < _INT_TOL))

    def is_even(self) -> bool:
        diag = np.diag(self.gram)
        return self.is_integral() and bool(np.all(np.round(diag) % 2 == 0))

    def is_unimodular(self) -> bool:
        return self.is_integral() and abs(abs(self.gram_det) - 1.0) < _INT_TOL

    def coefficients_of(self, point: Sequence[float]) -> np.ndarray:
        return np.linalg.solve(self.generators.T, np.asarray(point, dtype=np.float64))

    def contains(self, point: Sequence[float], tol: float = 1e-9) -> bool:
        m = self.coefficients_of(point)
        return bool(np.all(np.abs(m - np.round(m)) < tol))

    @property
    def cell_radius(self) -> float:
        """Largest distance from the centre of the generator parallelepiped to a corner."""
        best = 0.0
        for signs in itertools.product((-0.5, 0.5), repeat=self.dim):
            best = max(best, float(np.linalg.norm(np.asarray(signs) @ self.generators)))
        return best

    def count_upper_bound(self, t: float) -> float:
        """Upper bound for ``#{q in L : |q| <= t}``.

        Translates of the centred cell by points of the ball are disjoint and
        lie in the ball of radius ``t + cell_radius``.
        """
        d = self.dim
        ball = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
        return ball * (t + self.cell_radius) ** d / self.covolume

    # -- enumeration ------------------------------------------------------
    def point_set(self, radius_sq: float) -> PointSet:
        """All points with ``|q|^2 <= radius_sq``, cached per radius."""
        radius_sq = float(radius_sq)
        if radius_sq < 0:
            raise ValueError("radius_sq must be non-negative")
        with self._lock:
            hit = self._cache.get(radius_sq)
        if hit is not None:
            return hit
        slack = 1e-9 * max(1.0, radius_sq)
        coeffs = kernels.ball_coefficients(self._chol, radius_sq, slack)
        coords = coeffs.astype(np.float64) @ self.generators
        norm_sq = np.einsum("ij,ij->i", coords, coords)
        keep = norm_sq <= radius_sq + slack
        coeffs, coords, norm_sq = coeffs[keep], coords[keep], norm_sq[keep]
        keys = [coeffs[:, j] for j in range(self.dim - 1, -1, -1)]
        keys.append(np.round(norm_sq, 9))
        order = np.lexsort(keys)
        for arr in (coeffs, coords, norm_sq):
            arr.flags.writeable = False
        ps = PointSet(coeffs[order], coords[order], norm_sq[order], radius_sq)
        for arr in (ps.coeffs, ps.coords, ps.norm_sq):
            arr.flags.writeable = False
        with self._lock:
            self._cache[radius_sq] = ps
        return ps

    def enumerate_ball(self, radius_sq: float) -> list[LatticePoint]:
        return list(self.point_set(radius_sq))

    def half_coset_reps(self) -> list[CosetRep]:
        reps = []
        for k in range(1 << self.dim):
            m = np.array([0.5 if k >> i & 1 else 0.0 for i in range(self.dim)])
            reps.append(CosetRep(m, m @ self.generators))
        return reps

    def coset_rep(self, bits: Sequence[int]) -> CosetRep:
        if len(bits) != self.dim or any(b not in (0, 1) for b in bits):
            raise ValueError(f"need {self.dim} bits in {{0, 1}}, got {list(bits)}")
        m = 0.5 * np.asarray(bits, dtype=np.float64)
        return CosetRep(m, m @ self.generators)

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return np.array_equal(self.generators, other.generators)

    def __hash__(self):
        return hash(self.generators.tobytes())

    def __repr__(self) -> str:
        return f"Lattice(dim={self.dim}, gram_det={self.gram_det:.6g})"


def bilinear_form(q, w: Characteristic) -> CPlaneValue:
    """``<q, w> = sum q_i (u_i + v_i omega)``; bilinear, not Hermitian."""
    coords = q.coords if isinstance(q, (LatticePoint, CosetRep)) else np.asarray(q, dtype=np.float64)
    if coords.shape != w.u.shape:
        raise ValueError(f"dimension mismatch: {coords.size} vs {w.dim}")
    return CPlaneValue(float(np.dot(coords, w.u)), float(np.dot(coords, w.v)))


_PRESETS = {
    "Z1": lambda: Lattice.integer(1),
    "Z2": lambda: Lattice.integer(2),
    "Z3": lambda: Lattice.integer(3),
    "Z4": lambda: Lattice.integer(4),
    "D4": lambda: Lattice.checkerboard(4),
}


def parse_lattice(spec: str) -> Lattice:
    """Lattice from a preset name (``Z2``, ``D4``, ...), inline rows or a JSON file.

    Inline rows are separated by ``;`` and entries by ``,`` as in ``"1,0;0,1"``.
    """
    key = spec.strip()
    if key.upper() in _PRESETS:
        return _PRESETS[key.upper()]()
    if key.upper().startswith("Z") and key[1:].isdigit():
        return Lattice.integer(int(key[1:]))
    if key.upper().startswith("D") and key[1:].isdigit():
        return Lattice.checkerboard(int(key[1:]))
    if ";" in key or ("," in key and not key.endswith(".json")):
        rows = []
        for r, row in enumerate(key.split(";"), start=1):
            entries = []
            for c, item in enumerate(row.split(","), start=1):
                try:
                    entries.append(float(item))
                except ValueError:
                    raise ValueError(f"row {r}, column {c}: cannot parse {item.strip()!r} as a number") from None
            rows.append(entries)
        if len({len(r) for r in rows}) != 1:
            raise ValueError("inline lattice rows have different lengths")
        return Lattice.from_generators(rows)
    return Lattice.from_json(key)
