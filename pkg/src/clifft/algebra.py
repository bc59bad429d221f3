"""Dense Clifford geometric algebra Cl(p, q).

Blades are addressed by bitmask: bit ``k`` set means basis vector
``e_{k+1}`` is a factor. Coefficient arrays are ordered by ascending
bitmask, so index 0 is the scalar blade and index ``2**n - 1`` the
pseudoscalar.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_DIMENSION = 12
DEFAULT_UNIT_TOL = 1e-12


class SignatureMismatch(ValueError):
    pass


class InvalidImaginaryUnit(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    """Metric of Cl(p, q): ``p`` vectors square to +1, ``q`` to -1."""

    p: int
    q: int = 0

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError(f"signature counts must be nonnegative, got ({self.p}, {self.q})")
        if self.p + self.q > MAX_DIMENSION:
            raise ValueError(f"n = p + q must be <= {MAX_DIMENSION}, got {self.p + self.q}")

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def size(self) -> int:
        return 1 << self.n

    def eps(self, ell: int) -> int:
        """Square of basis vector ``e_ell`` (1-based index)."""
        if not 1 <= ell <= self.n:
            raise IndexError(f"basis index {ell} out of range for n={self.n}")
        return 1 if ell <= self.p else -1

    @property
    def negative_mask(self) -> int:
        return ((1 << self.q) - 1) << self.p

    def __str__(self):
        return f"Cl({self.p},{self.q})"


def grade(blade: int) -> int:
    return bin(blade).count("1")


def blade_mul(sig: Signature, a: int, b: int) -> tuple[int, int]:
    """Product of two basis blades as ``(sign, a ^ b)``.

    The sign collects one factor -1 per transposition needed to merge the
    ascending factor lists, and the square of every shared basis vector.
    """
    size = sig.size
    if not (0 <= a < size and 0 <= b < size):
        raise ValueError(f"blade index out of range for {sig}")
    swaps = 0
    shifted = a >> 1
    while shifted:
        swaps += grade(shifted & b)
        shifted >>= 1
    sign = -1 if swaps & 1 else 1
    if grade(a & b & sig.negative_mask) & 1:
        sign = -sign
    return sign, a ^ b


@lru_cache(maxsize=None)
def _tables(p: int, q: int):
    sig = Signature(p, q)
    size = sig.size
    idx = np.arange(size)
    signs = np.empty((size, size), dtype=np.int8)
    for a in range(size):
        for b in range(size):
            signs[a, b] = blade_mul(sig, a, b)[0]
    grades = np.array([grade(k) for k in range(size)])
    neg = np.array([grade(k & sig.negative_mask) for k in range(size)])
    reverse = np.where(((grades * (grades - 1) // 2) + neg) % 2 == 0, 1, -1).astype(np.int8)
    signs.setflags(write=False)
    grades.setflags(write=False)
    reverse.setflags(write=False)
    return signs, idx, grades, reverse


def sign_table(sig: Signature) -> np.ndarray:
    return _tables(sig.p, sig.q)[0]


def grade_table(sig: Signature) -> np.ndarray:
    return _tables(sig.p, sig.q)[2]


def reverse_signs(sig: Signature) -> np.ndarray:
    return _tables(sig.p, sig.q)[3]


def gp_array(sig: Signature, a, b) -> np.ndarray:
    """Geometric product of coefficient arrays, broadcasting leading axes.

    ``a`` and ``b`` have trailing axis of length ``2**n``. Integer and
    object (e.g. ``Fraction``) dtypes are preserved, so small-integer inputs
    multiply exactly.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    size = sig.size
    if a.shape[-1] != size or b.shape[-1] != size:
        raise SignatureMismatch(f"coefficient length does not match {sig}")
    signs, idx, _, _ = _tables(sig.p, sig.q)
    shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(shape, dtype=np.result_type(a, b, np.int8))
    for k in range(size):
        ak = a[..., k : k + 1]
        if a.dtype != object and not np.any(ak):
            continue
        out[..., k ^ idx] += signs[k] * ak * b
    return out


def _as_coeffs(values, size: int) -> np.ndarray:
    arr = np.array(values)
    if arr.dtype.kind in "iub":
        arr = arr.astype(np.int64)
    elif arr.dtype.kind == "f":
        arr = arr.astype(np.float64)
    elif arr.dtype.kind != "O":
        raise TypeError(f"unsupported coefficient dtype {arr.dtype}")
    if arr.shape != (size,):
        raise ValueError(f"expected {size} coefficients, got shape {arr.shape}")
    if arr.dtype.kind == "f" and not np.all(np.isfinite(arr)):
        raise ValueError("multivector coefficients must be finite")
    arr.setflags(write=False)
    return arr


class Multivector:
    """Immutable element of Cl(p, q) stored as ``2**n`` dense coefficients."""

    __slots__ = ("signature", "coeffs")

    def __init__(self, signature: Signature, coeffs):
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "coeffs", _as_coeffs(coeffs, signature.size))

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    @classmethod
    def zero(cls, sig: Signature) -> Multivector:
        return cls(sig, np.zeros(sig.size))

    @classmethod
    def scalar(cls, sig: Signature, value: float = 1.0) -> Multivector:
        c = np.zeros(sig.size, dtype=np.result_type(value, np.int64))
        c[0] = value
        return cls(sig, c)

    @classmethod
    def blade(cls, sig: Signature, bitmask: int, value: float = 1) -> Multivector:
        if not 0 <= bitmask < sig.size:
            raise ValueError(f"blade {bitmask} out of range for {sig}")
        c = np.zeros(sig.size, dtype=np.result_type(value, np.int64))
        c[bitmask] = value
        return cls(sig, c)

    @classmethod
    def basis_vector(cls, sig: Signature, ell: int) -> Multivector:
        """``e_ell`` with 1-based index."""
        sig.eps(ell)
        return cls.blade(sig, 1 << (ell - 1))

    @classmethod
    def parse(cls, sig: Signature, text: str) -> Multivector:
        return parse_multivector(sig, text)

    def __getitem__(self, bitmask: int):
        return self.coeffs[bitmask]

    def _check(self, other: Multivector):
        if not isinstance(other, Multivector):
            return NotImplemented
        if other.signature != self.signature:
            raise SignatureMismatch(f"{self.signature} vs {other.signature}")
        return None

    def _coerce(self, other) -> Multivector | None:
        if isinstance(other, Multivector):
            self._check(other)
            return other
        if isinstance(other, (int, float, np.integer, np.floating)):
            return Multivector.scalar(self.signature, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Multivector(self.signature, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Multivector(self.signature, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Multivector(self.signature, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return gp(self, other)
        if isinstance(other, (int, float, np.integer, np.floating)):
            return Multivector(self.signature, self.coeffs * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return Multivector(self.signature, other * self.coeffs)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return Multivector(self.signature, self.coeffs / other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.signature == other.signature and bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash((self.signature, tuple(self.coeffs.tolist())))

    def __abs__(self):
        return modulus(self)

    def __repr__(self):
        return f"Multivector({self.signature}, {format_multivector(self)!r})"

    def __str__(self):
        return format_multivector(self)

    def allclose(self, other: Multivector, atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.coeffs.astype(float), other.coeffs.astype(float), rtol=0, atol=atol))

    def grade(self, ell: int) -> Multivector:
        return grade_project(self, ell)

    def reverse(self) -> Multivector:
        return principal_reverse(self)


def _same_signature(c: Multivector, d: Multivector):
    if c.signature != d.signature:
        raise SignatureMismatch(f"{c.signature} vs {d.signature}")


def gp(c: Multivector, d: Multivector) -> Multivector:
    _same_signature(c, d)
    return Multivector(c.signature, gp_array(c.signature, c.coeffs, d.coeffs))


def grade_project(c: Multivector, ell: int) -> Multivector:
    n = c.signature.n
    if not 0 <= ell <= n:
        raise ValueError(f"grade {ell} out of range 0..{n}")
    mask = grade_table(c.signature) == ell
    return Multivector(c.signature, np.where(mask, c.coeffs, 0 * c.coeffs))


def principal_reverse(c: Multivector) -> Multivector:
    """Grade reversal combined with a sign flip per negative-square factor."""
    return Multivector(c.signature, reverse_signs(c.signature) * c.coeffs)


def scalar_product(c: Multivector, d: Multivector):
    _same_signature(c, d)
    return np.sum(c.coeffs * d.coeffs)


def modulus(c: Multivector) -> float:
    return math.sqrt(float(np.sum(np.asarray(c.coeffs, dtype=float) ** 2)))


def is_imaginary_unit(c: Multivector, tol: float = DEFAULT_UNIT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return modulus(gp(c, c) + 1) <= tol


@dataclass(frozen=True)
class ImaginaryUnit:
    """A multivector ``mu`` with ``mu * mu == -1`` up to ``tolerance``."""

    value: Multivector
    tolerance: float = DEFAULT_UNIT_TOL

    def __post_init__(self):
        if not is_imaginary_unit(self.value, self.tolerance):
            defect = modulus(gp(self.value, self.value) + 1)
            raise InvalidImaginaryUnit(
                f"{format_multivector(self.value)} does not square to -1 "
                f"(|mu^2 + 1| = {defect:.3g}, tolerance {self.tolerance:g})"
            )

    @property
    def signature(self) -> Signature:
        return self.value.signature

    def right_matrix(self) -> np.ndarray:
        """Row ``k`` holds the coefficients of ``e_k * mu``."""
        return _right_matrix(self.value.signature, self.value.coeffs.astype(float).tobytes())

    def exp(self, theta) -> np.ndarray:
        """Coefficients of ``cos(theta) + mu sin(theta)`` for each angle."""
        theta = np.asarray(theta, dtype=float)
        out = np.multiply.outer(np.sin(theta), self.value.coeffs.astype(float))
        out[..., 0] += np.cos(theta)
        return out

    def embed(self, z) -> np.ndarray:
        """Map complex values ``a + ib`` to coefficients of ``a + b mu``."""
        z = np.asarray(z, dtype=complex)
        out = np.multiply.outer(z.imag, self.value.coeffs.astype(float))
        out[..., 0] += z.real
        return out


@lru_cache(maxsize=64)
def _right_matrix(sig: Signature, mu_bytes: bytes) -> np.ndarray:
    mu = np.frombuffer(mu_bytes, dtype=float)
    m = gp_array(sig, np.eye(sig.size), mu)
    m.setflags(write=False)
    return m


def default_mu(sig: Signature) -> Multivector:
    """First blade squaring to -1 in ascending bitmask order."""
    signs = sign_table(sig)
    for k in range(1, sig.size):
        if signs[k, k] == -1:
            return Multivector.blade(sig, k)
    raise InvalidImaginaryUnit(f"{sig} has no basis blade squaring to -1")


@dataclass(frozen=True)
class CMuNumber:
    """``a + b mu`` in the commutative plane spanned by 1 and mu."""

    a: float
    b: float

    def to_multivector(self, mu: ImaginaryUnit) -> Multivector:
        return Multivector(mu.signature, mu.embed(complex(self.a, self.b)))


def cmu_polar(z: CMuNumber) -> tuple[float, float]:
    """Polar form ``(r, theta)`` with theta in (-pi, pi]; the origin maps to angle 0."""
    r = math.hypot(z.a, z.b)
    if r == 0:
        return 0.0, 0.0
    theta = math.atan2(z.b + 0.0, z.a)
    if theta == -math.pi:
        theta = math.pi
    return r, theta


# -- text form -------------------------------------------------------------

_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(
    rf"\s*(?P<sign>[+-])?\s*(?:(?P<coef>{_NUMBER})\s*(?P<star>\*)?\s*)?(?P<blade>e[0-9_]+)?\s*"
)


def _blade_indices(token: str) -> list[int]:
    body = token[1:]
    if "_" in body:
        return [int(part) for part in body.split("_") if part]
    return [int(ch) for ch in body]


def parse_multivector(sig: Signature, text: str) -> Multivector:
    """Parse signed ``coef*eK...`` terms, e.g. ``0.5*e12-1.0*e3+2``.

    Blade tokens list 1-based factor indices, one digit each (``e12`` is
    ``e1 e2``) or underscore separated for n > 9 (``e1_10``). Factors are
    multiplied out, so ``e21`` parses as ``-e12`` and ``e11`` as ``eps_1``.
    """
    if not text or not text.strip():
        raise ValueError("empty multivector expression")
    coeffs = np.zeros(sig.size)
    pos = 0
    first = True
    text = text.strip()
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None or m.end() == pos or (not m.group("coef") and not m.group("blade")):
            raise ValueError(f"cannot parse multivector term at {text[pos:]!r}")
        if not first and m.group("sign") is None:
            raise ValueError(f"missing operator before {text[pos:]!r}")
        if m.group("star") and not m.group("blade"):
            raise ValueError(f"dangling '*' in {text!r}")
        if m.group("coef") and m.group("blade") and not m.group("star"):
            raise ValueError(f"expected '*' between coefficient and blade in {text!r}")
        value = float(m.group("coef")) if m.group("coef") else 1.0
        if m.group("sign") == "-":
            value = -value
        sign, blade = 1, 0
        if m.group("blade"):
            for ell in _blade_indices(m.group("blade")):
                if not 1 <= ell <= sig.n:
                    raise ValueError(f"basis index {ell} out of range for {sig}")
                s, blade = blade_mul(sig, blade, 1 << (ell - 1))
                sign *= s
        coeffs[blade] += sign * value
        pos = m.end()
        first = False
    return Multivector(sig, coeffs)


def blade_name(bitmask: int) -> str:
    if bitmask == 0:
        return "1"
    idx = [k + 1 for k in range(bitmask.bit_length()) if bitmask >> k & 1]
    if max(idx) > 9:
        return "e" + "_".join(str(i) for i in idx)
    return "e" + "".join(str(i) for i in idx)


def format_multivector(c: Multivector) -> str:
    terms = []
    for k, v in enumerate(c.coeffs.tolist()):
        if v == 0:
            continue
        mag = repr(abs(v)) if not isinstance(v, int) else str(abs(v))
        if k == 0:
            body = mag
        elif abs(v) == 1:
            body = blade_name(k)
        else:
            body = f"{mag}*{blade_name(k)}"
        terms.append(("-" if v < 0 else "+") + body)
    if not terms:
        return "0"
    out = "".join(terms)
    return out[1:] if out[0] == "+" else out


def random_multivectors(sig: Signature, count: int, rng: np.random.Generator, integer: bool = False) -> np.ndarray:
    """Coefficient block of shape ``(count, 2**n)``; uniform in [-1, 1] or small integers."""
    if integer:
        return rng.integers(-5, 6, size=(count, sig.size))
    return rng.uniform(-1.0, 1.0, size=(count, sig.size))


def sum_blades(sig: Signature, blades: Iterable[int]) -> Multivector:
    c = np.zeros(sig.size)
    for b in blades:
        c[b] += 1.0
    return Multivector(sig, c)


def as_signature(value: Signature | Sequence[int]) -> Signature:
    if isinstance(value, Signature):
        return value
    p, q = value
    return Signature(int(p), int(q))
