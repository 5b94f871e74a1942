"""Truncated matrix representations of su(2), su(1,1) and h(1).

Every representation exposes a raising operator ``x_plus``, its adjoint
``x_minus`` and a real diagonal ``x_zero`` obeying

    [x_zero, x_plus] = x_plus,    [x_plus, x_minus] = sign * 2 * x_zero

with ``sign = +1`` for su(2) and ``sign = -1`` for su(1,1).  For h(1) the
second relation reads ``[a^dag, a] = -1``.  Bosonic realizations are
truncated Fock spaces, so their relations only hold on the interior block
(indices below ``dim - 2``).

Diagonal polynomials (the structural function ``phi(X0) = X+ X-`` and its
discrete derivatives) are stored as plain coefficient arrays in increasing
powers, one axis per diagonal variable, as used by
:mod:`numpy.polynomial.polynomial`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
from numpy.polynomial import polynomial as npoly

from .exceptions import CapacityError, ParameterError

__all__ = [
    "AlgebraKind",
    "SU2",
    "SU11_BOSON",
    "H1",
    "GeneratorSet",
    "ProductSpace",
    "build_generators",
    "tensor_embed",
    "structural_phi",
    "discrete_nabla",
    "evaluate_diagonal",
    "shift_polynomial",
    "polymul",
    "DEFAULT_DIM_CAP",
]

SU2 = "su2"
SU11_BOSON = "su11_boson"
H1 = "h1"

DEFAULT_DIM_CAP = 4096
_MIN_TRUNCATION = 4


@dataclass(frozen=True)
class AlgebraKind:
    """Which algebra and which finite representation of it.

    Use the :meth:`su2`, :meth:`su11_boson` and :meth:`h1` constructors
    rather than the raw initializer; they validate the size parameter.
    """

    tag: str
    size: float

    @classmethod
    def su2(cls, spin) -> "AlgebraKind":
        two_s = 2 * Fraction(spin).limit_denominator(1000)
        if two_s.denominator != 1 or two_s < 1 or abs(float(two_s) / 2 - float(spin)) > 1e-12:
            raise ParameterError(f"spin must be a positive half-integer, got {spin!r}")
        return cls(SU2, float(two_s) / 2)

    @classmethod
    def su11_boson(cls, truncation: int) -> "AlgebraKind":
        return cls(SU11_BOSON, _check_truncation(truncation))

    @classmethod
    def h1(cls, truncation: int) -> "AlgebraKind":
        return cls(H1, _check_truncation(truncation))

    @property
    def sign(self) -> int:
        """+1 for su(2), -1 for su(1,1) and 0 for h(1)."""
        return {SU2: 1, SU11_BOSON: -1, H1: 0}[self.tag]

    @property
    def dim(self) -> int:
        if self.tag == SU2:
            return int(round(2 * self.size)) + 1
        return int(self.size)

    @property
    def is_bosonic(self) -> bool:
        return self.tag != SU2

    def __str__(self):
        if self.tag == SU2:
            return f"SU2(S={Fraction(self.size)})"
        return f"{self.tag.upper()}(N={int(self.size)})"


def _check_truncation(n) -> int:
    if int(n) != n or n < _MIN_TRUNCATION:
        raise ParameterError(f"truncation must be an integer >= {_MIN_TRUNCATION}, got {n!r}")
    return int(n)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GeneratorSet:
    """Matrices of one algebra representation.

    Attributes
    ----------
    kind : AlgebraKind
    x_plus, x_minus, x_zero : ndarray of complex, shape (dim, dim)
        Raising, lowering and diagonal generators.  ``x_minus`` is the exact
        conjugate transpose of ``x_plus``.
    dim : int
    """

    kind: AlgebraKind
    x_plus: np.ndarray = field(repr=False)
    x_minus: np.ndarray = field(repr=False)
    x_zero: np.ndarray = field(repr=False)
    dim: int

    @property
    def sign(self) -> int:
        return self.kind.sign

    @property
    def diagonal(self) -> np.ndarray:
        """Real spectrum of ``x_zero`` in basis order."""
        return self.x_zero.diagonal().real.copy()

    def interior(self) -> slice:
        """Index block on which truncated commutation relations are exact."""
        if self.kind.is_bosonic:
            return slice(0, self.dim - 2)
        return slice(0, self.dim)


def build_generators(kind: AlgebraKind) -> GeneratorSet:
    """Build the truncated representation described by ``kind``.

    su(2) uses the basis ``|S, m>`` ordered ``m = S, S-1, ..., -S``.  The
    bosonic kinds use the Fock basis ``|0>, |1>, ..., |N-1>``; su(1,1) is
    realized as ``K+ = a^dag^2 / 2``, ``K- = a^2 / 2`` and
    ``K0 = (a^dag a + a a^dag) / 4``.
    """
    if not isinstance(kind, AlgebraKind):
        raise ParameterError(f"expected an AlgebraKind, got {type(kind).__name__}")
    dim = kind.dim
    xp = np.zeros((dim, dim), dtype=complex)
    if kind.tag == SU2:
        s = kind.size
        m = s - np.arange(dim)
        # S+|m> = sqrt(S(S+1) - m(m+1)) |m+1>, and |m+1> sits one row up.
        for i in range(1, dim):
            xp[i - 1, i] = np.sqrt(s * (s + 1) - m[i] * (m[i] + 1))
        x0 = np.diag(m).astype(complex)
    elif kind.tag == H1:
        n = np.arange(dim)
        xp[n[1:], n[:-1]] = np.sqrt(n[1:])
        x0 = np.diag(n).astype(complex)
    elif kind.tag == SU11_BOSON:
        n = np.arange(dim)
        xp[n[2:], n[:-2]] = np.sqrt(n[2:] * (n[2:] - 1)) / 2
        x0 = np.diag((n + 0.5) / 2).astype(complex)
    else:
        raise ParameterError(f"unknown algebra tag {kind.tag!r}")
    xm = xp.conj().T.copy()
    return GeneratorSet(kind, _frozen(xp), _frozen(xm), _frozen(x0), dim)


@dataclass(frozen=True)
class Lifted:
    """Generators of one factor embedded in a product space."""

    x_plus: np.ndarray = field(repr=False)
    x_minus: np.ndarray = field(repr=False)
    x_zero: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ProductSpace:
    """Tensor product of up to three generator sets (first factor slowest)."""

    factors: tuple
    lifted: tuple = field(repr=False)
    dim: int

    @property
    def factor_dims(self) -> tuple:
        return tuple(f.dim for f in self.factors)

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def basis_index(self, levels) -> int:
        """Flat index of the product basis state with per-factor ``levels``."""
        levels = tuple(int(v) for v in levels)
        if len(levels) != len(self.factors):
            raise ParameterError(f"expected {len(self.factors)} levels, got {len(levels)}")
        for lv, d in zip(levels, self.factor_dims):
            if not 0 <= lv < d:
                raise ParameterError(f"level {lv} out of range for factor of dimension {d}")
        return int(np.ravel_multi_index(levels, self.factor_dims))


def _embed(op: np.ndarray, position: int, dims) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == position else np.eye(d, dtype=complex))
    return out


def tensor_embed(factors, dim_cap: int = DEFAULT_DIM_CAP) -> ProductSpace:
    """Lift each factor's generators into the tensor-product space."""
    factors = tuple(factors)
    if not 1 <= len(factors) <= 3:
        raise ParameterError(f"tensor_embed takes 1 to 3 factors, got {len(factors)}")
    dims = [f.dim for f in factors]
    dim = int(np.prod(dims))
    if dim > dim_cap:
        raise CapacityError(f"product dimension {dim} exceeds the cap {dim_cap}")
    lifted = []
    for i, f in enumerate(factors):
        lifted.append(Lifted(
            _frozen(_embed(f.x_plus, i, dims)),
            _frozen(_embed(f.x_minus, i, dims)),
            _frozen(_embed(f.x_zero, i, dims)),
        ))
    return ProductSpace(factors, tuple(lifted), dim)


def structural_phi(g: GeneratorSet) -> np.ndarray:
    """Coefficients of ``phi`` with ``phi(X0) = X+ X-`` (increasing powers).

    su(2): ``S(S+1) - m(m-1)``; h(1): ``n``; su(1,1) with ``K0 = (n + 1/2)/2``:
    ``k^2 - k + 3/16``.
    """
    tag = g.kind.tag
    if tag == SU2:
        s = g.kind.size
        return np.array([s * (s + 1), 1.0, -1.0])
    if tag == H1:
        return np.array([0.0, 1.0])
    return np.array([3.0 / 16.0, -1.0, 1.0])


def _shift_1d(c: np.ndarray, m: float) -> np.ndarray:
    # c(x + m) via the binomial expansion
    out = np.zeros(len(c), dtype=np.result_type(c, float))
    for i, ci in enumerate(c):
        for j in range(i + 1):
            out[j] += ci * comb(i, j) * m ** (i - j)
    return out


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c))
    if c.ndim == 1:
        return npoly.polytrim(c) if c.size else np.zeros(1)
    # drop trailing all-zero rows/columns but keep at least one of each
    while c.shape[0] > 1 and not np.any(c[-1]):
        c = c[:-1]
    while c.shape[1] > 1 and not np.any(c[:, -1]):
        c = c[:, :-1]
    return c


def shift_polynomial(poly, shift) -> np.ndarray:
    """Coefficients of ``f(x + m)`` (one variable) or ``f(x + m, y + n)``."""
    c = np.asarray(poly, dtype=float)
    shifts = np.atleast_1d(shift)
    if c.ndim == 1:
        if shifts.size != 1:
            raise ParameterError("one-variable polynomial needs a scalar shift")
        return _shift_1d(c, float(shifts[0]))
    if c.ndim != 2 or shifts.size != 2:
        raise ParameterError("two-variable polynomial needs a 2-D coefficient array and (m, n)")
    m, n = (float(s) for s in shifts)
    out = np.array([_shift_1d(col, m) for col in c.T]).T
    return np.array([_shift_1d(row, n) for row in out])


def polymul(p, q) -> np.ndarray:
    """Product of two polynomials of equal dimensionality (1-D or 2-D)."""
    p, q = np.atleast_1d(np.asarray(p, float)), np.atleast_1d(np.asarray(q, float))
    if p.ndim != q.ndim:
        raise ParameterError("polynomials must have the same number of variables")
    if p.ndim == 1:
        return npoly.polymul(p, q)
    out = np.zeros((p.shape[0] + q.shape[0] - 1, p.shape[1] + q.shape[1] - 1))
    for i in range(p.shape[0]):
        for j in range(p.shape[1]):
            out[i:i + q.shape[0], j:j + q.shape[1]] += p[i, j] * q
    return out


def discrete_nabla(poly, shift) -> np.ndarray:
    """Discrete derivative ``f(X0, Y0) - f(X0 + m, Y0 + n)``.

    Parameters
    ----------
    poly : array_like
        1-D coefficients ``c[i]`` of ``x**i`` or 2-D coefficients ``c[i, j]``
        of ``x**i * y**j``; degree at most 4 per variable.
    shift : int or tuple of int
        ``m`` for one variable, ``(m, n)`` for two.
    """
    c = np.asarray(poly, dtype=float)
    if max(c.shape) > 5:
        raise ParameterError("polynomial degree is limited to 4 per variable")
    return _trim(c - shift_polynomial(c, shift))


def evaluate_diagonal(poly, x_diag, y_diag=None) -> np.ndarray:
    """Evaluate a diagonal polynomial on spectra, returning a diagonal matrix.

    With two variables, ``x_diag`` and ``y_diag`` must be the spectra of two
    commuting diagonal operators on the same (product) space.
    """
    c = np.asarray(poly)
    x = np.asarray(x_diag, dtype=float)
    if c.ndim == 1:
        vals = npoly.polyval(x, c)
    else:
        if y_diag is None:
            raise ParameterError("two-variable polynomial needs y_diag")
        vals = npoly.polyval2d(x, np.asarray(y_diag, dtype=float), c)
    return np.diag(vals).astype(complex)
