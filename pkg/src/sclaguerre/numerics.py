"""Arbitrary-precision real arithmetic services.

Everything here takes an explicit :class:`PrecisionContext`. Each context owns
a private ``mpmath.MPContext`` so nothing touches the global ``mpmath.mp``
precision. Results are ``mpf`` values of ``ctx.mp``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, NamedTuple, Sequence

import mpmath

from .exceptions import ConvergenceError, DomainError

__all__ = [
    "PrecisionContext",
    "RealSeries",
    "FDResult",
    "as_mpf",
    "gamma_ln",
    "hyp1f1",
    "barnes_g_ln",
    "glaisher_ln",
    "zeta_prime_minus1",
    "fd_derivative",
    "fd_guard_digits",
]


def as_mpf(mp, x):
    """Convert ``x`` to an ``mpf`` of context ``mp``.

    Floats go through ``repr`` so that ``0.8`` means the decimal 0.8, not its
    binary neighbour. Strings and fractions are converted exactly to working
    precision.
    """
    if isinstance(x, float):
        return mp.mpf(repr(x))
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision plus tolerance policy.

    ``target_tol`` defaults to ``10**(20 - digits)`` and ``fd_step`` to
    ``10**(-digits/3)``.
    """

    digits: int = 50
    target_tol: Any = None
    fd_step: Any = None
    mp: Any = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 30:
            raise DomainError(f"digits must be an integer >= 30, got {self.digits!r}")
        object.__setattr__(self, "digits", int(self.digits))
        mp = mpmath.MPContext()
        mp.dps = self.digits
        object.__setattr__(self, "mp", mp)
        tol = mp.mpf(10) ** (20 - self.digits) if self.target_tol is None else as_mpf(mp, self.target_tol)
        if not tol > mp.mpf(10) ** (-self.digits):
            raise DomainError("target_tol must exceed 10**(-digits)")
        object.__setattr__(self, "target_tol", tol)
        step = (mp.mpf(10) ** (-mp.mpf(self.digits) / 3)
                if self.fd_step is None else as_mpf(mp, self.fd_step))
        if not step > 0:
            raise DomainError("fd_step must be positive")
        object.__setattr__(self, "fd_step", step)

    def mpf(self, x):
        return as_mpf(self.mp, x)

    def eps(self):
        return self.mp.mpf(10) ** (-self.digits)

    def with_digits(self, digits):
        """Context at ``digits`` with default tolerances for that precision."""
        return PrecisionContext(digits)

    def extended(self, extra):
        """Same tolerance policy, ``extra`` more working digits."""
        return PrecisionContext(self.digits + int(extra), self.target_tol, self.fd_step)


@dataclass(frozen=True)
class RealSeries:
    """A truncated expansion ``sum c * n**e * (ln n)**k`` in a large variable.

    ``terms`` holds ``(exponent, log_power, coefficient)`` triples. Exponents
    are half-integers (``Fraction``); the ``(exponent, log_power)`` keys must
    be strictly decreasing.
    """

    terms: tuple
    variable_name: str = "n"

    def __post_init__(self):
        keys = [(Fraction(e), int(k)) for e, k, _ in self.terms]
        for e, _ in keys:
            if (2 * e).denominator != 1:
                raise DomainError(f"exponent {e} is not a half-integer")
        if any(a <= b for a, b in zip(keys, keys[1:])):
            raise DomainError("series terms must be strictly decreasing in (exponent, log power)")

    def truncated(self, lowest_exponent):
        """Terms with exponent >= ``lowest_exponent``."""
        low = Fraction(lowest_exponent)
        return RealSeries(tuple(tm for tm in self.terms if Fraction(tm[0]) >= low), self.variable_name)

    def term_values(self, n, mp):
        n = as_mpf(mp, n)
        ln_n = mp.log(n)
        out = []
        for e, k, c in self.terms:
            e = Fraction(e)
            out.append(c * n ** (mp.mpf(e.numerator) / e.denominator) * ln_n ** k)
        return out

    def __call__(self, n, mp):
        return mp.fsum(self.term_values(n, mp))


def gamma_ln(x, ctx: PrecisionContext):
    """ln Gamma(x) for real x > 0."""
    mp = ctx.mp
    x = ctx.mpf(x)
    if not x > 0:
        raise DomainError(f"gamma_ln needs x > 0, got {x}")
    return mp.loggamma(x)


def _is_nonpositive_integer(mp, x):
    return x <= 0 and mp.isint(x)


def _kummer_series(mp, a, b, z, eps):
    # Returns (sum, largest |term|); z may have either sign here.
    total = mp.one
    term = mp.one
    biggest = mp.one
    k = 0
    while True:
        term = term * (a + k) * z / ((b + k) * (k + 1))
        k += 1
        total += term
        if term == 0:
            return total, biggest
        if abs(term) > biggest:
            biggest = abs(term)
        if k % 4 == 0 and a + k > 0 and b + k > 0:
            ratio = abs(z) * max(mp.one, (a + k) / (b + k)) / (k + 1)
            if ratio < 1 and abs(term) * ratio / (1 - ratio) <= eps * abs(total):
                return total, biggest
        if k > 10 ** 7:
            raise ConvergenceError("Kummer series did not converge")


def hyp1f1(a, b, z, ctx: PrecisionContext):
    """Confluent hypergeometric 1F1(a; b; z) for real arguments.

    Negative ``z`` is mapped through Kummer's transformation
    ``1F1(a; b; z) = e^z 1F1(b - a; b; -z)`` so the summed series has
    non-alternating tail. The series runs until a geometric bound on the
    remaining tail falls below ``10**-digits`` relative.
    """
    guard = 20
    wctx = ctx.extended(guard)
    mp = wctx.mp
    a, b, z = wctx.mpf(a), wctx.mpf(b), wctx.mpf(z)
    if _is_nonpositive_integer(mp, b):
        raise DomainError(f"1F1 undefined for b = {b}")
    prefactor = mp.one
    if z < 0:
        prefactor = mp.exp(z)
        a, z = b - a, -z
    eps = ctx.eps() / 100
    total, biggest = _kummer_series(mp, a, b, z, eps)
    # Cancellation only happens while a + k < 0; redo with enough digits to absorb it.
    if total != 0 and biggest / abs(total) > mp.mpf(10) ** (guard - 5):
        extra = int(mp.log10(biggest / abs(total))) + guard
        wctx = ctx.extended(extra)
        mp = wctx.mp
        total, _ = _kummer_series(mp, mp.mpf(a), mp.mpf(b), mp.mpf(z), eps)
        prefactor = mp.mpf(prefactor)
    return ctx.mp.mpf(prefactor * total)


def barnes_g_ln(z, ctx: PrecisionContext):
    """ln G(z) for real z > 0, G the Barnes G-function with G(1) = 1.

    Uses the Taylor series of ln G(1 + w) about w = 0 (radius 1) on
    |w| <= 1/2, and ``G(z + 1) = Gamma(z) G(z)`` to move the argument there.
    """
    wctx = ctx.extended(15)
    mp = wctx.mp
    z = wctx.mpf(z)
    if not z > 0:
        raise DomainError(f"barnes_g_ln is defined here for real z > 0, got {z}")
    shift = mp.zero
    # z < 1/2: G(z) = G(z + 1) / Gamma(z)
    if z < mp.mpf(1) / 2:
        shift -= mp.loggamma(z)
        z += 1
    m = int(mp.floor(z - mp.mpf(1) / 2))
    w = z - 1 - m
    # G(1 + w + m) = G(1 + w) * prod_{k<m} Gamma(1 + w + k)
    for k in range(m):
        shift += mp.loggamma(1 + w + k)
    eps = mp.mpf(10) ** (-wctx.digits)
    total = w * (mp.log(2 * mp.pi) - 1) / 2 - (1 + mp.euler) * w ** 2 / 2
    if w != 0:
        aw = abs(w)
        k = 2
        power = w ** 3
        while True:
            term = (-1) ** k * mp.zeta(k) * power / (k + 1)
            total += term
            # |zeta(j)| <= zeta(2) and the tail is geometric in |w| <= 1/2
            if mp.zeta(2) * abs(power) * aw / (1 - aw) < eps * max(abs(total), eps):
                break
            k += 1
            power *= w
    return ctx.mp.mpf(total + shift)


def glaisher_ln(ctx: PrecisionContext):
    """ln A for the Glaisher-Kinkelin constant A.

    Euler-Maclaurin applied to ``sum_{k<=N} k ln k``:
    ln A = S_N - (N^2/2 + N/2 + 1/12) ln N + N^2/4
           + sum_{j>=2} B_{2j} / (2j (2j-1) (2j-2)) N^(2-2j).
    N is chosen so the optimally truncated correction is below 10**-digits.
    """
    wctx = ctx.extended(15)
    mp = wctx.mp
    N = int(math.ceil(wctx.digits * math.log(10) / (2 * math.pi))) + 10
    s = mp.fsum(k * mp.log(k) for k in range(2, N + 1))
    Nm = mp.mpf(N)
    total = s - (Nm ** 2 / 2 + Nm / 2 + mp.mpf(1) / 12) * mp.log(Nm) + Nm ** 2 / 4
    eps = mp.mpf(10) ** (-wctx.digits)
    prev = None
    j = 2
    while True:
        term = mp.bernoulli(2 * j) / (2 * j * (2 * j - 1) * (2 * j - 2)) * Nm ** (2 - 2 * j)
        if prev is not None and abs(term) > abs(prev):
            raise ConvergenceError("Euler-Maclaurin corrections diverged before reaching precision")
        total += term
        if abs(term) < eps:
            break
        prev = term
        j += 1
    return ctx.mp.mpf(total)


def zeta_prime_minus1(ctx: PrecisionContext):
    """zeta'(-1) = 1/12 - ln A."""
    return ctx.mp.mpf(1) / 12 - glaisher_ln(ctx)


class FDResult(NamedTuple):
    value: Any
    error: Any
    flagged: bool


def fd_guard_digits(step, order, levels=3):
    """Extra digits a stencil function needs so roundoff does not leak into
    the derivative at base step ``step``."""
    h = float(step) / 2 ** levels
    return int(math.ceil(order * -math.log10(h))) + 10 if h < 1 else 10


def fd_derivative(f: Callable, t0, order: int, ctx: PrecisionContext, step=None,
                  levels: int = 3, tol=None) -> FDResult:
    """Central-difference derivative of ``f`` at ``t0`` with Richardson extrapolation.

    The step is halved ``levels`` times; each halving adds one Richardson
    level in powers of ``h**2``. The error estimate is the size of the last
    Richardson increment. ``f`` is called with ``mpf`` arguments carrying
    :func:`fd_guard_digits` extra digits; a function that computes at its
    argument's precision gets a roundoff-free derivative.

    Returns ``FDResult(value, error, flagged)`` with ``flagged`` set when the
    error estimate exceeds ``tol`` (default ``ctx.target_tol``).
    """
    if order not in (1, 2):
        raise DomainError("fd_derivative supports order 1 or 2")
    if levels < 1:
        raise DomainError("at least one Richardson level is required")
    h0 = ctx.fd_step if step is None else ctx.mpf(step)
    wctx = ctx.extended(fd_guard_digits(h0, order, levels))
    mp = wctx.mp
    t0 = wctx.mpf(t0)
    h0 = wctx.mpf(h0)
    f0 = mp.mpf(f(t0)) if order == 2 else None
    table = []
    for k in range(levels + 1):
        h = h0 / 2 ** k
        fp, fm = mp.mpf(f(t0 + h)), mp.mpf(f(t0 - h))
        d = (fp - fm) / (2 * h) if order == 1 else (fp - 2 * f0 + fm) / h ** 2
        row = [d]
        for j in range(1, k + 1):
            fac = mp.mpf(4) ** j
            row.append((fac * row[j - 1] - table[k - 1][j - 1]) / (fac - 1))
        table.append(row)
    value = table[-1][-1]
    error = max(abs(value - table[-1][-2]), abs(value - table[-2][-1]))
    tol = ctx.target_tol if tol is None else ctx.mpf(tol)
    return FDResult(ctx.mp.mpf(value), ctx.mp.mpf(error), bool(error > tol))


def richardson_limit(values: Sequence, ratio, power, mp):
    """Repeated Richardson elimination of ``c h**(power*j)`` error terms for a
    sequence whose step shrinks by ``ratio`` each entry. Returns the last
    diagonal entry and the last increment."""
    vals = list(values)
    if len(vals) < 2:
        raise DomainError("need at least two values to extrapolate")
    prev_diag = vals[-1]
    diag = vals[-1]
    for j in range(1, len(vals)):
        fac = mp.mpf(ratio) ** (power * j)
        vals = [(fac * vals[k + 1] - vals[k]) / (fac - 1) for k in range(len(vals) - 1)]
        prev_diag, diag = diag, vals[-1]
    return diag, abs(diag - prev_diag)
