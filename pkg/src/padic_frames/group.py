"""Exact digit arithmetic on finite quotients of Q_p and of its dual group.

Conventions used throughout the package:

* A group element ``x = sum a_k p^k`` restricted to the digit window
  ``[-J, K)`` is encoded as ``w = sum a_k p^(k+J)``, so ``x = w / p^J`` as a
  rational number and group addition is integer addition mod ``p^(J+K)``.
* A character ``chi = prod r_j^(alpha_j)`` restricted to the window
  ``[-N, M)`` is encoded as ``u = sum alpha_j p^(j+N)``.  It acts as
  ``x -> exp(2 pi i {xi x}_p)`` with ``xi = sum alpha_j p^(-j-1)``, which
  reproduces ``(r_j, g_k) = exp(2 pi i / p^(j-k+1))``.
* On aligned windows the pairing exponent is ``rev(u) * w mod p^(J+K)``.

Every root of unity is produced from an exact integer exponent, with a single
complex exponential at the end.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import IllPosedPairing, InvalidParams, WindowOverflow

# Zero detection threshold vs approximate-equality tolerance.
TAU_ZERO = 1e-12
TAU_EQ = 1e-10


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Params:
    """The triple ``(p, N, M)`` fixing every finite quotient dimension.

    ``N`` is the support depth of the scaling function (supp in ``G_{-N}``)
    and ``M`` its constancy depth (constant on cosets of ``G_M``).
    """

    p: int
    N: int
    M: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise InvalidParams(f"p must be prime, got {self.p!r}")
        if self.N < 0 or self.M < 0:
            raise InvalidParams(f"N and M must be >= 0, got N={self.N}, M={self.M}")
        if self.p ** (self.M + self.N + 1) > sys.maxsize:
            raise InvalidParams("p^(M+N+1) exceeds the platform index range")

    @property
    def height(self) -> int:
        """Height M+N of the mask tree."""
        return self.M + self.N

    @property
    def n_beta(self) -> int:
        return self.p ** (self.N + 1)

    @property
    def n_nodes(self) -> int:
        return self.p ** (self.M + self.N + 1)

    @property
    def n_cells(self) -> int:
        """Number of cells of the scaling spectrum (cosets of G_{-N}^perp in G_M^perp)."""
        return self.p ** (self.M + self.N)


def to_digits(u: int, length: int, p: int) -> list[int]:
    """Little-endian base-``p`` digits of ``u``, exactly ``length`` of them."""
    out = []
    for _ in range(length):
        u, d = divmod(u, p)
        out.append(d)
    return out


def from_digits(digits, p: int) -> int:
    u = 0
    for d in reversed(digits):
        u = u * p + d
    return u


def digit_reverse(u: int, length: int, p: int) -> int:
    """Reverse the ``length`` base-``p`` digits of ``u``.

    >>> digit_reverse(5, 2, 3)
    7
    >>> digit_reverse(6, 3, 2)
    3
    """
    if not 0 <= u < p**length:
        raise ValueError(f"{u} is not a {length}-digit base-{p} number")
    r = 0
    for _ in range(length):
        u, d = divmod(u, p)
        r = r * p + d
    return r


def digit_reverse_array(length: int, p: int) -> np.ndarray:
    """``perm[u] = digit_reverse(u, length, p)`` for every ``u < p**length``."""
    n = p**length
    u = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(length):
        rev = rev * p + u % p
        u //= p
    return rev


def pairing_exponent(u: int, w: int, length: int, p: int) -> int:
    """Exponent ``e`` with ``(chi_u, x_w) = exp(2 pi i e / p^length)`` on aligned windows."""
    mod = p**length
    return (digit_reverse(u, length, p) * w) % mod


def unit_root(num: int, den: int) -> complex:
    """``exp(2 pi i num / den)`` after exact reduction of ``num`` mod ``den``."""
    num %= den
    if 2 * num > den:
        num -= den
    angle = 2.0 * math.pi * num / den
    return complex(math.cos(angle), math.sin(angle))


def unit_roots(nums: np.ndarray, den: int) -> np.ndarray:
    """Vectorised :func:`unit_root` for an integer array of exponents."""
    nums = np.mod(nums, den)
    nums = np.where(2 * nums > den, nums - den, nums)
    return np.exp(2j * np.pi * (nums / den))


def rademacher_pair(j: int, k: int, p: int) -> complex:
    """Value of the Rademacher character ``r_j`` at the basis element ``g_k``."""
    d = j - k + 1
    if d < 1:
        return 1.0 + 0.0j
    return unit_root(1, p**d)


@dataclass(frozen=True)
class PointIndex:
    """A coset ``x + G_K`` of an element ``x`` of ``G_{-J}``, encoded by ``w``."""

    w: int
    J: int
    K: int
    p: int

    def __post_init__(self):
        if self.J + self.K < 0:
            raise ValueError("window length J+K must be >= 0")
        if not 0 <= self.w < self.p ** (self.J + self.K):
            raise ValueError(f"w={self.w} outside [0, p^(J+K))")

    @property
    def length(self) -> int:
        return self.J + self.K

    def digits(self) -> dict[int, int]:
        """Map level ``k`` -> digit ``a_k`` over the window ``[-J, K)``."""
        ds = to_digits(self.w, self.length, self.p)
        return {k - self.J: d for k, d in enumerate(ds)}

    def value(self) -> Fraction:
        """The truncated element as a rational number."""
        return Fraction(self.w, self.p**self.J) if self.J >= 0 else Fraction(self.w * self.p ** (-self.J))

    def __add__(self, other: "PointIndex") -> "PointIndex":
        self._check_same_window(other)
        return PointIndex((self.w + other.w) % self.p**self.length, self.J, self.K, self.p)

    def __neg__(self) -> "PointIndex":
        return PointIndex((-self.w) % self.p**self.length, self.J, self.K, self.p)

    def _check_same_window(self, other):
        if (self.J, self.K, self.p) != (other.J, other.K, other.p):
            raise ValueError("points live in different windows")

    @classmethod
    def from_digits(cls, digits: dict[int, int], J: int, K: int, p: int) -> "PointIndex":
        w = 0
        for k, a in digits.items():
            if a and not -J <= k < K:
                raise WindowOverflow(f"digit at level {k} outside window [-{J}, {K})")
            w += a * p ** (k + J)
        return cls(w, J, K, p)


def padic_digit_sum(x: PointIndex, y: PointIndex) -> PointIndex:
    """Digit-wise addition with carries, independent of the integer encoding."""
    x._check_same_window(y)
    p = x.p
    dx, dy = x.digits(), y.digits()
    out = {}
    carry = 0
    for k in range(-x.J, x.K):
        t = dx[k] + dy[k] + carry
        carry, out[k] = divmod(t, p)
    return PointIndex.from_digits(out, x.J, x.K, p)


@dataclass(frozen=True)
class ShiftIndex:
    """An element ``h = sum_{v=1}^{s} a_{-v} g_{-v}`` of ``H_0^(s)``.

    Encoded by ``n = sum a_{-v} p^(s-v)``, so ``a_{-1}`` is the most
    significant digit and ``h = n / p^s``.
    """

    s: int
    n: int
    p: int

    def __post_init__(self):
        if self.s < 0 or not 0 <= self.n < self.p**self.s:
            raise ValueError(f"invalid shift index n={self.n} for s={self.s}")

    def digit(self, v: int) -> int:
        """The digit ``a_{-v}`` for ``1 <= v <= s``."""
        return (self.n // self.p ** (self.s - v)) % self.p

    def as_point(self, J: int, K: int) -> PointIndex:
        if self.s > J:
            raise WindowOverflow(f"shift of depth {self.s} does not fit window depth {J}")
        return PointIndex(self.n * self.p ** (J - self.s), J, K, self.p)


@dataclass(frozen=True)
class CharCoset:
    """The coset ``G_b^perp r_b^(d_0) r_{b+1}^(d_1) ... r_{b+L-1}^(d_{L-1})``."""

    base: int
    digits: tuple[int, ...]
    p: int

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if any(not 0 <= d < self.p for d in self.digits):
            raise ValueError(f"digits must lie in [0, {self.p})")

    @property
    def top(self) -> int:
        """The coset lies in ``G_top^perp``."""
        return self.base + len(self.digits)

    @property
    def measure(self) -> float:
        return float(self.p) ** self.base

    @property
    def leading_level(self) -> int | None:
        """Level of the highest nonzero digit, ``None`` for a subgroup coset."""
        for i in range(len(self.digits) - 1, -1, -1):
            if self.digits[i]:
                return self.base + i
        return None

    def digit_at(self, level: int) -> int:
        i = level - self.base
        if 0 <= i < len(self.digits):
            return self.digits[i]
        if level >= self.top:
            return 0
        raise ValueError(f"level {level} is below the coset base {self.base}")

    def xi_numerator(self, scale: int) -> int:
        """Integer ``X`` with ``xi = X / p^scale`` for the coset representative."""
        if scale < self.top:
            raise ValueError("scale must be at least the coset top level")
        return sum(d * self.p ** (scale - self.base - i - 1) for i, d in enumerate(self.digits))


def char_point_pair(chi: CharCoset, x: PointIndex) -> complex:
    """Brute-force Rademacher product ``prod_{j,k} (r_j, g_k)^(d_j a_k)``.

    The rational phase is accumulated exactly over a common denominator.
    """
    if chi.p != x.p:
        raise ValueError("prime mismatch")
    p = chi.p
    if chi.base > -x.J:
        raise IllPosedPairing(
            f"character coset base {chi.base} is coarser than the point support level {-x.J}"
        )
    lead = chi.leading_level
    if lead is not None and lead >= x.K:
        raise IllPosedPairing(f"character has a digit at level {lead} >= point constancy level {x.K}")
    xd = x.digits()
    den_exp = max(1, (chi.top - 1) + x.J + 1)
    den = p**den_exp
    num = 0
    for i, dj in enumerate(chi.digits):
        if not dj:
            continue
        j = chi.base + i
        for k, ak in xd.items():
            if ak and k <= j:
                num += dj * ak * p ** (den_exp - (j - k + 1))
    return unit_root(num, den)


def coset_dilate(c: CharCoset, t: int) -> CharCoset:
    """Image ``c A^t``: every Rademacher factor moves up ``t`` levels."""
    return CharCoset(c.base + t, c.digits, c.p)


def coset_cells(c: CharCoset, cell_base: int, top: int | None = None) -> np.ndarray:
    """Indices of the ``G_{cell_base}^perp`` cells making up ``c``.

    Indices are taken in the window ``[cell_base, top)``; ``top`` defaults to
    the coset's own top level.
    """
    if cell_base > c.base:
        raise ValueError(f"cell base {cell_base} is coarser than the coset base {c.base}")
    if top is None:
        top = c.top
    lead = c.leading_level
    if lead is not None and lead >= top:
        raise WindowOverflow(f"coset digit at level {lead} exceeds window top {top}")
    p = c.p
    offset = sum(d * p ** (c.base + i - cell_base) for i, d in enumerate(c.digits) if d)
    return offset + np.arange(p ** (c.base - cell_base), dtype=np.int64)


def index_coset(u: int, lo: int, hi: int, p: int) -> CharCoset:
    """The ``G_lo^perp`` cell with window index ``u`` in ``[lo, hi)``."""
    return CharCoset(lo, tuple(to_digits(u, hi - lo, p)), p)


def char_norm(level: int, p: int) -> Fraction:
    """``|chi|_p = p^level`` for ``chi`` in ``G_level^perp \\ G_{level-1}^perp``."""
    return Fraction(p) ** level


def log_p_plus(level: int) -> int:
    """``log_p^+ |chi|_p``: the level when ``|chi|_p > 1``, else 1."""
    return level if level > 0 else 1


def mu_ball(n: int, p: int) -> float:
    """Haar measure of ``G_n``."""
    return float(p) ** (-n)


def nu_ball(n: int, p: int) -> float:
    """Dual Haar measure of ``G_n^perp``."""
    return float(p) ** n
