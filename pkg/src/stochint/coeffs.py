r"""Fourier coefficients of simplex kernels with monomial weights.

The kernel of an iterated stochastic integral of multiplicity :math:`k`
with weights :math:`(t-s)^{l_r}` (exponent :math:`l_1` attached to the
innermost integration variable) has, for the Legendre basis on an interval
of length :math:`\Delta = T - t`, the exact expansion coefficients

.. math::
    C_{j_k \ldots j_1}
    = \frac{\Delta^{L + k/2}}{2^{L + k}}
      \prod_{r=1}^{k} \sqrt{2 j_r + 1}\; \bar C_{j_k \ldots j_1},
    \qquad L = l_1 + \cdots + l_k,

where :math:`\bar C` is the purely rational nested integral

.. math::
    \bar C_{j_k \ldots j_1}
    = \int_{-1}^{1} w_{l_k}(t_k) P_{j_k}(t_k)
      \cdots \int_{-1}^{t_2} w_{l_1}(t_1) P_{j_1}(t_1)\, dt_1 \cdots dt_k,
    \qquad w_l(x) = \bigl(-(1+x)\bigr)^{l}.

The sign of each weight factor lives inside :math:`\bar C` (so the reference
coefficient tables for weighted kernels carry explicit signs) and the scale
factor above is sign-free.

``bar_coeff`` computes single entries, ``coeff_tensor`` dense tensors with
shared-prefix memoization, ``scale_coeff`` the interval scaling, and
``trig_coeff`` the analogous coefficient for the trigonometric basis by
nested high-precision Gauss-Legendre quadrature.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .basis import RatPoly, antiderivative, legendre_poly

__all__ = [
    "KernelSpec",
    "CoeffTensor",
    "ScaledCoeff",
    "ScaledTensor",
    "TensorBudgetError",
    "QuadratureError",
    "TENSOR_ENTRY_BUDGET",
    "bar_coeff",
    "coeff_tensor",
    "scale_coeff",
    "scaled_tensor",
    "trig_coeff",
    "tensor_to_json",
    "tensor_to_csv",
]

#: Dense tensors refuse to materialize beyond this many entries.
TENSOR_ENTRY_BUDGET = 10_000_000


class TensorBudgetError(Exception):
    """Requested dense tensor exceeds the configured entry budget."""


class QuadratureError(Exception):
    """Nested quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved: float) -> None:
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True, slots=True)
class KernelSpec:
    r"""Multiplicity and monomial weight exponents of a simplex kernel.

    Args:
        k: multiplicity, 1 to 5.
        weights: exponents :math:`(l_1, \ldots, l_k)` of the factors
            :math:`(t-s)^{l}`, innermost integration variable first.
    """

    k: int
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.k <= 5:
            raise ValueError(f"multiplicity must be 1..5, got {self.k}")
        if len(self.weights) != self.k:
            raise ValueError("weights length must equal multiplicity")
        if any(l < 0 for l in self.weights):
            raise ValueError("weight exponents must be nonnegative")

    @staticmethod
    def unweighted(k: int) -> KernelSpec:
        return KernelSpec(k, (0,) * k)

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    @property
    def scale_exponent(self) -> Fraction:
        """Power of the interval length in the scaled coefficient."""
        return self.total_weight + Fraction(self.k, 2)


# Weight factor for exponent l, as a polynomial in the integration variable:
# (-(1+x))**l.
@lru_cache(maxsize=None)
def _weight_poly(l: int) -> RatPoly:
    base = RatPoly.from_coeffs([-1, -1])
    out = RatPoly.one()
    for _ in range(l):
        out = out * base
    return out


@lru_cache(maxsize=None)
def _inner_antiderivative(weights: tuple[int, ...], js: tuple[int, ...]) -> RatPoly:
    """Antiderivative, vanishing at -1, of the innermost ``len(js)`` levels.

    The returned polynomial is a function of the next integration variable.
    Shared prefixes across a tensor hit this cache.
    """
    depth = len(js)
    integrand = _weight_poly(weights[depth - 1]) * legendre_poly(js[depth - 1])
    if depth > 1:
        integrand = integrand * _inner_antiderivative(weights[: depth - 1], js[: depth - 1])
    anti = antiderivative(integrand)
    # shift so the antiderivative vanishes at the lower limit -1
    return anti - RatPoly.from_coeffs([anti(Fraction(-1))])


def bar_coeff(spec: KernelSpec, j: tuple[int, ...]) -> Fraction:
    r"""Exact rational coefficient :math:`\bar C` for one multi-index.

    Args:
        spec: kernel multiplicity and weights (innermost first).
        j: basis multi-index :math:`(j_1, \ldots, j_k)`, innermost first.

    Returns:
        The exact nested integral over the simplex in ``[-1, 1]``.
    """
    j = tuple(j)
    if len(j) != spec.k:
        raise ValueError("multi-index length must equal multiplicity")
    if any(x < 0 for x in j):
        raise ValueError("basis indices must be nonnegative")
    full = _inner_antiderivative(spec.weights, j)
    return full(Fraction(1))


def _float_bar(value: Fraction) -> float:
    return value.numerator / value.denominator


@dataclass(frozen=True, eq=False)
class CoeffTensor:
    r"""Dense tensor of exact coefficients :math:`\bar C` on ``{0..q}^k``.

    ``values`` is an object ndarray of :class:`~fractions.Fraction`; axis 0
    is :math:`j_1` (innermost integration variable).
    """

    spec: KernelSpec
    q: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        expected = (self.q + 1,) * self.spec.k
        if self.values.shape != expected:
            raise ValueError(f"tensor shape {self.values.shape} != {expected}")

    def bar(self, j: tuple[int, ...]) -> Fraction:
        return self.values[tuple(j)]

    def float_values(self) -> np.ndarray:
        out = np.empty(self.values.shape, dtype=np.float64)
        flat_in = self.values.reshape(-1)
        flat_out = out.reshape(-1)
        for i, v in enumerate(flat_in):
            flat_out[i] = _float_bar(v)
        return out

    def scaled(self, dt: float) -> "ScaledTensor":
        return scaled_tensor(self, dt)


@dataclass(frozen=True, slots=True)
class ScaledCoeff:
    """A single interval-scaled coefficient together with its derivation."""

    value: float
    bar: Fraction
    dt: float
    scale_exponent: Fraction
    scale_denominator: int
    norm_factor: float

    @staticmethod
    def from_bar(bar: Fraction, spec: KernelSpec, j: tuple[int, ...], dt: float) -> ScaledCoeff:
        norm = math.prod(math.sqrt(2 * idx + 1) for idx in j)
        denom = 2 ** (spec.total_weight + spec.k)
        exponent = spec.scale_exponent
        value = _float_bar(bar) * dt ** float(exponent) / denom * norm
        return ScaledCoeff(
            value=value,
            bar=bar,
            dt=dt,
            scale_exponent=exponent,
            scale_denominator=denom,
            norm_factor=norm,
        )


def scale_coeff(bar: Fraction, spec: KernelSpec, j: tuple[int, ...], dt: float) -> float:
    r"""Interval scaling :math:`\bar C \mapsto C` for interval length ``dt``.

    Returns ``dt**(L + k/2) / 2**(L + k) * prod(sqrt(2 j_r + 1)) * bar``.
    The weight signs are already inside ``bar``, so no extra sign appears
    here.  This is the only place rationals become floats.
    """
    if dt <= 0:
        raise ValueError("interval length must be positive")
    return ScaledCoeff.from_bar(bar, spec, tuple(j), dt).value


@dataclass(frozen=True, eq=False)
class ScaledTensor:
    """Float tensor of interval-scaled coefficients ``C`` on ``{0..q}^k``."""

    spec: KernelSpec
    q: int
    dt: float
    values: np.ndarray = field(repr=False)

    def truncated(self, q: int) -> np.ndarray:
        if q > self.q:
            raise ValueError(f"requested truncation {q} exceeds tensor order {self.q}")
        return self.values[(slice(0, q + 1),) * self.spec.k]


def scaled_tensor(tensor: CoeffTensor, dt: float) -> ScaledTensor:
    """Apply :func:`scale_coeff` across a whole tensor."""
    if dt <= 0:
        raise ValueError("interval length must be positive")
    spec = tensor.spec
    scale = dt ** float(spec.scale_exponent) / 2 ** (spec.total_weight + spec.k)
    norm1d = np.sqrt(2.0 * np.arange(tensor.q + 1) + 1.0)
    out = tensor.float_values() * scale
    for axis in range(spec.k):
        shape = [1] * spec.k
        shape[axis] = tensor.q + 1
        out = out * norm1d.reshape(shape)
    return ScaledTensor(spec=spec, q=tensor.q, dt=dt, values=out)


def coeff_tensor(spec: KernelSpec, q: int, threads: int = 1) -> CoeffTensor:
    r"""All exact coefficients :math:`\bar C` for ``j in {0..q}^k``.

    Shared inner antiderivatives are memoized across the tensor, so the
    cost is dominated by the ``(q+1)^k`` final evaluations.

    Args:
        spec: kernel description.
        q: truncation order (inclusive).
        threads: worker threads across the outermost index.

    Raises:
        TensorBudgetError: if ``(q+1)**k`` exceeds the dense entry budget.
    """
    if q < 0:
        raise ValueError("truncation order must be nonnegative")
    n = q + 1
    entries = n ** spec.k
    if entries > TENSOR_ENTRY_BUDGET:
        raise TensorBudgetError(
            f"dense tensor with {entries} entries exceeds budget {TENSOR_ENTRY_BUDGET}"
        )
    values = np.empty((n,) * spec.k, dtype=object)

    def fill_outer(j_outer: int) -> None:
        for idx in np.ndindex(*(n,) * (spec.k - 1)):
            j = idx + (j_outer,)
            values[j] = bar_coeff(spec, j)

    if spec.k == 1:
        for j0 in range(n):
            values[j0] = bar_coeff(spec, (j0,))
    elif threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill_outer, range(n)))
    else:
        for j_outer in range(n):
            fill_outer(j_outer)
    return CoeffTensor(spec=spec, q=q, values=values)


# ---------------------------------------------------------------------------
# Trigonometric coefficients by nested Gauss-Legendre quadrature
# ---------------------------------------------------------------------------

_GL_NODES = 24


@lru_cache(maxsize=None)
def _gl_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


@lru_cache(maxsize=None)
def _cumulative_matrix(n: int) -> np.ndarray:
    """Map values at Gauss-Legendre nodes to cumulative integrals.

    Row ``i`` gives the quadrature of the degree ``n-1`` interpolant from
    the panel start ``-1`` to node ``i`` (panel in local coordinates).
    """
    nodes, weights = _gl_rule(n)
    # Legendre-coefficient projection of the interpolant
    proj = np.empty((n, n))
    for deg in range(n):
        pvals = np.polynomial.legendre.legval(nodes, [0.0] * deg + [1.0])
        proj[deg] = (2 * deg + 1) / 2.0 * weights * pvals
    # antiderivative of P_deg vanishing at -1: (P_{deg+1} - P_{deg-1})/(2 deg + 1)
    cum = np.zeros((n, n))
    for deg in range(n):
        if deg == 0:
            anti = np.polynomial.legendre.legval(nodes, [1.0, 1.0])  # x + 1
        else:
            hi = np.polynomial.legendre.legval(nodes, [0.0] * (deg + 1) + [1.0])
            lo = np.polynomial.legendre.legval(nodes, [0.0] * (deg - 1) + [1.0])
            anti = (hi - lo) / (2 * deg + 1)
        cum += np.outer(anti, proj[deg])
    return cum


def _trig_basis_values(j: int, u: np.ndarray) -> np.ndarray:
    if j == 0:
        return np.ones_like(u)
    r = (j + 1) // 2
    if j % 2 == 1:
        return math.sqrt(2.0) * np.sin(2.0 * math.pi * r * u)
    return math.sqrt(2.0) * np.cos(2.0 * math.pi * r * u)


def _nested_trig_integral(spec: KernelSpec, j: tuple[int, ...], panels: int) -> float:
    """Nested simplex integral in unit coordinates with ``panels`` panels."""
    n = _GL_NODES
    nodes, weights = _gl_rule(n)
    cum = _cumulative_matrix(n)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 / panels
    u = (edges[:-1, None] + half) + half * nodes[None, :]  # (panels, n)

    running = np.ones_like(u)
    for level in range(spec.k):
        g = _trig_basis_values(j[level], u) * u ** spec.weights[level] * running
        panel_ints = half * g @ weights  # (panels,)
        starts = np.concatenate(([0.0], np.cumsum(panel_ints)))
        if level == spec.k - 1:
            return float(starts[-1])
        running = starts[:-1, None] + half * g @ cum.T
    raise AssertionError("unreachable")


def trig_coeff(
    spec: KernelSpec,
    j: tuple[int, ...],
    dt: float,
    tol: float = 1e-12,
) -> float:
    r"""Scaled coefficient ``C`` for the trigonometric basis.

    The basis on an interval of length ``dt`` is
    :math:`\{1, \sqrt2 \sin(2\pi r u), \sqrt2 \cos(2\pi r u)\}/\sqrt{dt}`
    with ``u`` the normalized coordinate; index ``2r-1`` is the sine and
    ``2r`` the cosine of frequency ``r``.  Computed by nested panelwise
    Gauss-Legendre quadrature, doubling the panel count until two
    successive refinements agree.

    Args:
        spec: kernel description (weights innermost first).
        j: basis multi-index, innermost first.
        dt: interval length.
        tol: absolute tolerance in units of ``dt**(L + k/2)``.

    Raises:
        QuadratureError: if refinement stalls before reaching ``tol``;
            the achieved difference is attached to the exception.
    """
    j = tuple(j)
    if len(j) != spec.k:
        raise ValueError("multi-index length must equal multiplicity")
    if any(x < 0 for x in j):
        raise ValueError("basis indices must be nonnegative")
    if dt <= 0:
        raise ValueError("interval length must be positive")

    max_freq = max(((idx + 1) // 2 for idx in j), default=0)
    panels = max(4, 2 * max_freq)
    prev = _nested_trig_integral(spec, j, panels)
    achieved = math.inf
    for _ in range(8):
        panels *= 2
        cur = _nested_trig_integral(spec, j, panels)
        achieved = abs(cur - prev)
        if achieved <= tol / 4.0:
            sign = (-1) ** spec.total_weight
            return sign * cur * dt ** float(spec.scale_exponent)
        prev = cur
    raise QuadratureError(
        f"quadrature did not converge below {tol} (achieved {achieved:.3e})",
        achieved,
    )


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def tensor_to_json(tensor: CoeffTensor) -> str:
    """Serialize a tensor to JSON with exact and float fields.

    Schema: top-level object with ``k``, ``weights`` (innermost first),
    ``q``, ``index_order`` and ``entries``; each entry has the multi-index
    ``j`` (innermost first), exact ``num``/``den`` and a ``float`` field.
    """
    entries = []
    for idx in np.ndindex(*tensor.values.shape):
        v: Fraction = tensor.values[idx]
        entries.append(
            {
                "j": list(idx),
                "num": v.numerator,
                "den": v.denominator,
                "float": _float_bar(v),
            }
        )
    doc = {
        "k": tensor.spec.k,
        "weights": list(tensor.spec.weights),
        "q": tensor.q,
        "index_order": "innermost_first",
        "entries": entries,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def tensor_to_csv(tensor: CoeffTensor) -> str:
    """Serialize a tensor to CSV with fractions as ``p/q`` strings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"j{i + 1}" for i in range(tensor.spec.k)] + ["bar"])
    for idx in np.ndindex(*tensor.values.shape):
        v: Fraction = tensor.values[idx]
        writer.writerow(list(idx) + [f"{v.numerator}/{v.denominator}"])
    return buf.getvalue()
