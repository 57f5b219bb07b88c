"""Real Clifford algebra R_n with e_i e_j + e_j e_i = -2 delta_ij.

Elements are stored densely as 2**n blade coefficients.  Blade ``A`` is a
bitmask over the generators, bit ``i - 1`` standing for ``e_i``, so the
product ``e_A`` always lists its generators in increasing order.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionError

MAX_DIM = 8

__all__ = [
    "MAX_DIM",
    "Multivector",
    "Paravector",
    "UnitVector",
    "blade_mul",
    "blade_grade",
    "mul",
    "conjugate",
    "reverse",
    "involute",
    "norm",
    "paravector_inverse",
]


def blade_grade(a: int) -> int:
    return bin(a).count("1")


def blade_mul(a: int, b: int) -> tuple[int, int]:
    """Product of two basis blades.

    Returns ``(sign, c)`` with ``e_a e_b = sign * e_c`` and ``c = a ^ b``.
    The sign collects one factor -1 per transposition needed to sort the
    concatenated generator string and one per squared generator.
    """
    swaps = 0
    x = a >> 1
    while x:
        swaps += bin(x & b).count("1")
        x >>= 1
    swaps += bin(a & b).count("1")
    return (-1 if swaps & 1 else 1), a ^ b


@lru_cache(maxsize=None)
def _product_tables(dim: int) -> tuple[np.ndarray, np.ndarray]:
    n = 1 << dim
    sign = np.empty((n, n), dtype=np.float64)
    index = np.empty((n, n), dtype=np.intp)
    for a in range(n):
        for b in range(n):
            s, c = blade_mul(a, b)
            sign[a, b] = s
            index[a, b] = c
    sign.flags.writeable = False
    index.flags.writeable = False
    return sign, index


@lru_cache(maxsize=None)
def _grade_signs(dim: int) -> dict[str, np.ndarray]:
    grades = np.array([blade_grade(a) for a in range(1 << dim)])
    return {
        "reverse": np.where((grades * (grades - 1) // 2) % 2, -1.0, 1.0),
        "involute": np.where(grades % 2, -1.0, 1.0),
        "conjugate": np.where((grades * (grades + 1) // 2) % 2, -1.0, 1.0),
        "grades": grades,
    }


def _check_dim(dim: int) -> None:
    if not 0 <= dim <= MAX_DIM:
        raise ValueError(f"Clifford dimension must be in [0, {MAX_DIM}], got {dim}")


class Multivector:
    """Element of R_n.

    Immutable: the coefficient array is copied on construction and marked
    read-only.
    """

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Sequence[float] | np.ndarray):
        _check_dim(dim)
        arr = np.array(coeffs, dtype=np.float64)
        if arr.shape != (1 << dim,):
            raise ValueError(f"expected {1 << dim} coefficients for dim {dim}, got shape {arr.shape}")
        arr.flags.writeable = False
        self.dim = dim
        self.coeffs = arr

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> Multivector:
        return cls(dim, np.zeros(1 << dim))

    @classmethod
    def scalar(cls, value: float, dim: int) -> Multivector:
        c = np.zeros(1 << dim)
        c[0] = value
        return cls(dim, c)

    @classmethod
    def blade(cls, mask: int, dim: int, value: float = 1.0) -> Multivector:
        c = np.zeros(1 << dim)
        c[mask] = value
        return cls(dim, c)

    @classmethod
    def basis_vector(cls, i: int, dim: int) -> Multivector:
        """``e_i`` for ``1 <= i <= dim``."""
        if not 1 <= i <= dim:
            raise ValueError(f"generator index {i} out of range for dim {dim}")
        return cls.blade(1 << (i - 1), dim)

    @classmethod
    def from_vector(cls, x0: float, xv: Sequence[float]) -> Multivector:
        """Paravector ``x0 + sum x_i e_i`` as a multivector."""
        dim = len(xv)
        c = np.zeros(1 << dim)
        c[0] = x0
        for i, xi in enumerate(xv):
            c[1 << i] = xi
        return cls(dim, c)

    # -- parts ----------------------------------------------------------
    @property
    def scalar_part(self) -> float:
        return float(self.coeffs[0])

    def vector_part(self) -> np.ndarray:
        return np.array([self.coeffs[1 << i] for i in range(self.dim)])

    def grade(self, k: int) -> Multivector:
        mask = _grade_signs(self.dim)["grades"] == k
        return Multivector(self.dim, np.where(mask, self.coeffs, 0.0))

    def is_paravector(self, tol: float = 0.0) -> bool:
        grades = _grade_signs(self.dim)["grades"]
        return bool(np.all(np.abs(self.coeffs[grades > 1]) <= tol))

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> Multivector | None:
        if isinstance(other, Multivector):
            if other.dim != self.dim:
                raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector.scalar(float(other), self.dim)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Multivector(self.dim, self.coeffs + o.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Multivector(self.dim, self.coeffs - o.coeffs)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Multivector(self.dim, o.coeffs - self.coeffs)

    def __neg__(self):
        return Multivector(self.dim, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self.dim, self.coeffs * float(other))
        if isinstance(other, Multivector):
            return mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self.dim, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self.dim, self.coeffs / float(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.dim, self.coeffs.tobytes()))

    def allclose(self, other: Multivector, atol: float = 1e-12) -> bool:
        return self.dim == other.dim and bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= atol)

    def conjugate(self) -> Multivector:
        return conjugate(self)

    def reverse(self) -> Multivector:
        return reverse(self)

    def involute(self) -> Multivector:
        return involute(self)

    def norm(self) -> float:
        return norm(self)

    def __repr__(self) -> str:
        terms = []
        for mask, c in enumerate(self.coeffs):
            if c == 0.0:
                continue
            if mask == 0:
                terms.append(f"{c:g}")
            else:
                idx = "".join(str(i + 1) for i in range(self.dim) if mask >> i & 1)
                terms.append(f"{c:g}*e{idx}")
        return f"Multivector(dim={self.dim}, {' + '.join(terms) or '0'})"


def mul(a: Multivector, b: Multivector) -> Multivector:
    """Clifford product, the bilinear extension of :func:`blade_mul`."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    sign, index = _product_tables(a.dim)
    terms = np.outer(a.coeffs, b.coeffs) * sign
    out = np.bincount(index.ravel(), weights=terms.ravel(), minlength=1 << a.dim)
    return Multivector(a.dim, out)


def conjugate(a: Multivector) -> Multivector:
    return Multivector(a.dim, a.coeffs * _grade_signs(a.dim)["conjugate"])


def reverse(a: Multivector) -> Multivector:
    return Multivector(a.dim, a.coeffs * _grade_signs(a.dim)["reverse"])


def involute(a: Multivector) -> Multivector:
    return Multivector(a.dim, a.coeffs * _grade_signs(a.dim)["involute"])


def norm(a: Multivector) -> float:
    """Euclidean norm of the coefficient vector."""
    return float(np.sqrt(np.dot(a.coeffs, a.coeffs)))


class Paravector:
    """``x0 + x1 e1 + ... + xn en``, identified with a point of R^(n+1)."""

    __slots__ = ("x0", "xv")

    def __init__(self, x0: float, xv: Sequence[float]):
        v = np.array(xv, dtype=np.float64).reshape(-1)
        _check_dim(v.size)
        v.flags.writeable = False
        self.x0 = float(x0)
        self.xv = v

    @property
    def dim(self) -> int:
        return self.xv.size

    @classmethod
    def from_multivector(cls, m: Multivector, tol: float = 1e-12) -> Paravector:
        if not m.is_paravector(tol):
            raise ValueError("multivector has components of grade > 1")
        return cls(m.scalar_part, m.vector_part())

    def to_multivector(self) -> Multivector:
        return Multivector.from_vector(self.x0, self.xv)

    def coords(self) -> np.ndarray:
        return np.concatenate([[self.x0], self.xv])

    def conjugate(self) -> Paravector:
        return Paravector(self.x0, -self.xv)

    def norm(self) -> float:
        return float(np.sqrt(self.x0 * self.x0 + np.dot(self.xv, self.xv)))

    def inverse(self) -> Paravector:
        return paravector_inverse(self)

    def __neg__(self) -> Paravector:
        return Paravector(-self.x0, -self.xv)

    def __add__(self, other):
        if isinstance(other, Paravector):
            return Paravector(self.x0 + other.x0, self.xv + other.xv)
        if isinstance(other, (int, float)):
            return Paravector(self.x0 + other, self.xv)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Paravector(self.x0 * other, self.xv * other)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Paravector({self.x0!r}, {self.xv.tolist()!r})"


def paravector_inverse(x: Paravector) -> Paravector:
    """``x^-1 = conj(x) / |x|^2``."""
    n2 = x.x0 * x.x0 + float(np.dot(x.xv, x.xv))
    if n2 == 0.0:
        raise ZeroDivisionError("the zero paravector has no inverse")
    return Paravector(x.x0 / n2, -x.xv / n2)


class UnitVector:
    """Imaginary unit ``omega = a1 e1 + ... + an en`` with ``sum a_i^2 = 1``."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[float], tol: float = 1e-12):
        c = np.array(components, dtype=np.float64).reshape(-1)
        _check_dim(c.size)
        if c.size == 0:
            raise ValueError("a unit vector needs at least one generator")
        if abs(float(np.dot(c, c)) - 1.0) > tol:
            raise ValueError(f"not a unit vector: |omega|^2 = {np.dot(c, c)!r}")
        c.flags.writeable = False
        self.components = c

    @classmethod
    def normalized(cls, raw: Sequence[float]) -> UnitVector:
        c = np.asarray(raw, dtype=np.float64)
        n = float(np.linalg.norm(c))
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(c / n)

    @classmethod
    def basis(cls, i: int, dim: int) -> UnitVector:
        """``e_i`` with ``1 <= i <= dim``."""
        if not 1 <= i <= dim:
            raise ValueError(f"generator index must be in [1, {dim}], got {i}")
        c = np.zeros(dim)
        c[i - 1] = 1.0
        return cls(c)

    @property
    def dim(self) -> int:
        return self.components.size

    def to_multivector(self) -> Multivector:
        return Multivector.from_vector(0.0, self.components)

    def __neg__(self) -> UnitVector:
        return UnitVector(-self.components)

    def inverse(self) -> UnitVector:
        # omega^2 = -1
        return -self

    def __eq__(self, other):
        if not isinstance(other, UnitVector):
            return NotImplemented
        return bool(np.array_equal(self.components, other.components))

    def __hash__(self):
        return hash(self.components.tobytes())

    def __repr__(self) -> str:
        return f"UnitVector({self.components.tolist()!r})"
