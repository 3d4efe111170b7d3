r"""Realized values of truncated expansions of iterated stochastic integrals.

An iterated Stratonovich integral of multiplicity :math:`k` expands into a
multiple series :math:`\sum_j C_j \prod_r \zeta_{j_r}^{(i_r)}` over products
of independent standard Gaussians :math:`\zeta_j^{(i)}` (one family per
Wiener component :math:`i`).  The matching Ito integral replaces each
product by its Wick form: every way of pairing positions that carry the
same component and the same basis index contributes a correction with sign
:math:`(-1)^{\#\text{pairs}}`.

This module assembles those truncated sums from coefficient tensors and
seeded Gaussian draws, together with the special closed forms that need no
general tensor: exact single integrals, the banded double series for
time-weighted pairs, Hermite-polynomial diagonal forms, trigonometric
Milstein-style forms, and the Ito/Stratonovich conversion corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import polygamma

from .coeffs import KernelSpec, ScaledTensor, bar_coeff, scale_coeff

__all__ = [
    "IndexPattern",
    "NoiseDraws",
    "TruncationSpec",
    "DOUBLE_SERIES_WEIGHTS",
    "draw_noise",
    "ito_expansion",
    "strat_expansion",
    "legendre_closed_single",
    "legendre_double_series",
    "diagonal_trace",
    "pair_series_support",
    "hermite_diagonal",
    "ito_strat_convert",
    "trig_milstein",
]

#: Weight pairs for which the banded double series is implemented.
DOUBLE_SERIES_WEIGHTS = ((0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (0, 2))


@dataclass(frozen=True)
class IndexPattern:
    """Wiener component labels ``(i_1, ..., i_k)``, innermost first."""

    components: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("at least one component required")
        if any(c < 1 for c in self.components):
            raise ValueError("component labels are 1-based")
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def k(self) -> int:
        return len(self.components)

    def equality_groups(self) -> tuple[tuple[int, ...], ...]:
        """Canonical partition of positions ``1..k`` by equal components."""
        buckets: dict[int, list[int]] = {}
        for pos, c in enumerate(self.components, start=1):
            buckets.setdefault(c, []).append(pos)
        return tuple(tuple(v) for v in sorted(buckets.values()))


@dataclass(frozen=True)
class NoiseDraws:
    """Seeded table of independent standard Gaussians.

    ``zeta[i - 1, j]`` realizes :math:`\\zeta_j^{(i)}`; ``xi`` and ``mu``
    hold one extra tail variable per component for the tail-augmented
    trigonometric forms.
    """

    zeta: np.ndarray
    xi: np.ndarray | None
    mu: np.ndarray | None
    seed: int

    @property
    def m(self) -> int:
        return self.zeta.shape[0]

    @property
    def q_max(self) -> int:
        return self.zeta.shape[-1] - 1

    def row(self, component: int, needed: int) -> np.ndarray:
        """Gaussian row of one component, checked to hold ``needed`` entries.

        The returned row indexes Gaussians along its last axis; extra
        leading axes (for example a batch of realizations) pass through.
        """
        if not 1 <= component <= self.m:
            raise ValueError(f"component {component} outside 1..{self.m}")
        if needed > self.zeta.shape[-1]:
            raise ValueError(
                f"draws hold {self.zeta.shape[-1]} Gaussians per component, need {needed}"
            )
        return self.zeta[component - 1]


@dataclass(frozen=True)
class TruncationSpec:
    """Truncation order of one expansion (different integrals may differ)."""

    q: int

    def __post_init__(self) -> None:
        if self.q < 0:
            raise ValueError("truncation order must be nonnegative")


def draw_noise(q_max: int, m: int, seed: int, tails: bool = True) -> NoiseDraws:
    """Reproducible i.i.d. standard normals from a counter-based stream.

    The ``zeta`` table is drawn first, so it is identical for the same
    ``(q_max, m, seed)`` whether or not tail variables are requested.
    """
    if m < 1:
        raise ValueError("component count must be >= 1")
    if q_max < 0:
        raise ValueError("q_max must be nonnegative")
    gen = np.random.Generator(np.random.Philox(key=seed))
    zeta = gen.standard_normal((m, q_max + 1))
    xi = mu = None
    if tails:
        xi = gen.standard_normal(m)
        mu = gen.standard_normal(m)
    return NoiseDraws(zeta=zeta, xi=xi, mu=mu, seed=seed)


# ---------------------------------------------------------------------------
# Generic product sums with Wick pairing corrections
# ---------------------------------------------------------------------------

_AXIS_LETTERS = "abcde"


@lru_cache(maxsize=None)
def _matchings(positions: tuple[int, ...]) -> tuple[tuple[tuple[int, int], ...], ...]:
    """All sets of disjoint position pairs (partial matchings), including ()."""
    if not positions:
        return ((),)
    first, rest = positions[0], positions[1:]
    out: list[tuple[tuple[int, int], ...]] = list(_matchings(rest))
    for i, other in enumerate(rest):
        remaining = rest[:i] + rest[i + 1 :]
        for sub in _matchings(remaining):
            out.append(((first, other),) + sub)
    return tuple(out)


def _matching_term(
    values: np.ndarray,
    rows: list[np.ndarray],
    components: tuple[int, ...],
    matching: tuple[tuple[int, int], ...],
):
    """One Wick term: paired axes share a diagonal, the rest contract."""
    k = len(components)
    for a, b in matching:
        if components[a - 1] != components[b - 1]:
            return None
    letter = {}
    for idx, (a, b) in enumerate(matching):
        letter[a] = letter[b] = _AXIS_LETTERS[idx]
    unpaired = [p for p in range(1, k + 1) if p not in letter]
    for idx, p in enumerate(unpaired):
        letter[p] = _AXIS_LETTERS[len(matching) + idx]
    batched = rows[0].ndim == 2
    tensor_sub = "".join(letter[p] for p in range(1, k + 1))
    vec_subs = [("z" if batched else "") + letter[p] for p in unpaired]
    out = "z" if batched and unpaired else ""
    expr = ",".join([tensor_sub] + vec_subs) + "->" + out
    operands = [values] + [rows[p - 1] for p in unpaired]
    return np.einsum(expr, *operands)


def _expansion_core(
    values: np.ndarray,
    components: tuple[int, ...],
    rows: list[np.ndarray],
    corrections: bool,
):
    k = len(components)
    if values.ndim != k:
        raise ValueError("tensor rank does not match component count")
    matchings = _matchings(tuple(range(1, k + 1))) if corrections else ((),)
    total = None
    for matching in matchings:
        term = _matching_term(values, rows, components, matching)
        if term is None:
            continue
        signed = term if len(matching) % 2 == 0 else -term
        total = signed if total is None else total + signed
    return total


def _tensor_rows(tensor: ScaledTensor, pattern: IndexPattern, draws: NoiseDraws, q: int):
    if tensor.spec.k != pattern.k:
        raise ValueError("tensor multiplicity does not match index pattern")
    values = tensor.truncated(q)
    rows = [draws.row(c, q + 1)[..., : q + 1] for c in pattern.components]
    return values, rows


def ito_expansion(
    tensor: ScaledTensor, pattern: IndexPattern, draws: NoiseDraws, q: int
) -> float:
    """Truncated Ito expansion: product sum with all pairing corrections."""
    values, rows = _tensor_rows(tensor, pattern, draws, q)
    return float(_expansion_core(values, pattern.components, rows, corrections=True))


def strat_expansion(
    tensor: ScaledTensor, pattern: IndexPattern, draws: NoiseDraws, q: int
) -> float:
    """Truncated Stratonovich expansion: the plain product sum."""
    values, rows = _tensor_rows(tensor, pattern, draws, q)
    return float(_expansion_core(values, pattern.components, rows, corrections=False))


# ---------------------------------------------------------------------------
# Exact single integrals (Legendre basis)
# ---------------------------------------------------------------------------


_SINGLE_FORMS = {
    0: (1.0, [1.0]),
    1: (-0.5, [1.0, 1.0 / math.sqrt(3.0)]),
    2: (1.0 / 3.0, [1.0, math.sqrt(3.0) / 2.0, 1.0 / (2.0 * math.sqrt(5.0))]),
    3: (-0.25, [1.0, 3.0 * math.sqrt(3.0) / 5.0, 1.0 / math.sqrt(5.0), 1.0 / (5.0 * math.sqrt(7.0))]),
}


def legendre_closed_single(l: int, i1: int, draws: NoiseDraws, dt: float):
    r"""Exact single integral with weight :math:`(t-s)^l`, ``l`` up to 3.

    A weight of degree ``l`` lies in the span of the first ``l + 1``
    Legendre polynomials, so the expansion terminates:
    e.g. ``l=1`` gives :math:`-dt^{3/2}(\zeta_0 + \zeta_1/\sqrt3)/2`.
    """
    if l not in _SINGLE_FORMS:
        raise ValueError("closed single form implemented for l = 0..3")
    lead, weights = _SINGLE_FORMS[l]
    z = draws.row(i1, l + 1)
    acc = weights[0] * z[..., 0]
    for j in range(1, l + 1):
        acc = acc + weights[j] * z[..., j]
    return lead * dt ** (l + 0.5) * acc


def _exact_single(l: int, row: np.ndarray, dt: float):
    """Terminating expansion of the weighted single integral for any ``l``."""
    spec = KernelSpec(1, (l,))
    acc = 0.0
    for j in range(l + 1):
        c = scale_coeff(bar_coeff(spec, (j,)), spec, (j,), dt)
        acc = acc + c * row[..., j]
    return acc


# ---------------------------------------------------------------------------
# Banded double series for time-weighted pairs (Legendre basis)
# ---------------------------------------------------------------------------


def _series_00(z1, z2, q: int, dt: float):
    total = z1[..., 0] * z2[..., 0]
    if q >= 1:
        i = np.arange(1, q + 1)
        total = total + np.sum(
            (z1[..., i - 1] * z2[..., i] - z1[..., i] * z2[..., i - 1])
            / np.sqrt(4.0 * i * i - 1.0),
            axis=-1,
        )
    return dt / 2.0 * total


def _series_01(z1, z2, q: int, dt: float):
    i = np.arange(0, q + 1)
    cross = np.sqrt((2.0 * i + 1.0) * (2.0 * i + 5.0)) * (2.0 * i + 3.0)
    diag = (2.0 * i - 1.0) * (2.0 * i + 3.0)
    bracket = z1[..., 0] * z2[..., 1] / math.sqrt(3.0)
    bracket = bracket + np.sum(
        ((i + 2.0) * z1[..., i] * z2[..., i + 2] - (i + 1.0) * z1[..., i + 2] * z2[..., i])
        / cross
        - z1[..., i] * z2[..., i] / diag,
        axis=-1,
    )
    return -dt / 2.0 * _series_00(z1, z2, q, dt) - dt * dt / 4.0 * bracket


def _series_10(z1, z2, q: int, dt: float):
    i = np.arange(0, q + 1)
    cross = np.sqrt((2.0 * i + 1.0) * (2.0 * i + 5.0)) * (2.0 * i + 3.0)
    diag = (2.0 * i - 1.0) * (2.0 * i + 3.0)
    bracket = z2[..., 0] * z1[..., 1] / math.sqrt(3.0)
    bracket = bracket + np.sum(
        ((i + 1.0) * z2[..., i + 2] * z1[..., i] - (i + 2.0) * z2[..., i] * z1[..., i + 2])
        / cross
        + z1[..., i] * z2[..., i] / diag,
        axis=-1,
    )
    return -dt / 2.0 * _series_00(z1, z2, q, dt) - dt * dt / 4.0 * bracket


def _series_02(z1, z2, q: int, dt: float):
    i = np.arange(0, q + 1)
    far = np.sqrt((2.0 * i + 1.0) * (2.0 * i + 7.0)) * (2.0 * i + 3.0) * (2.0 * i + 5.0)
    near = np.sqrt((2.0 * i + 1.0) * (2.0 * i + 3.0)) * (2.0 * i - 1.0) * (2.0 * i + 5.0)
    bracket = 2.0 / (3.0 * math.sqrt(5.0)) * z2[..., 2] * z1[..., 0] + z1[..., 0] * z2[..., 0] / 3.0
    bracket = bracket + np.sum(
        (
            (i + 2.0) * (i + 3.0) * z2[..., i + 3] * z1[..., i]
            - (i + 1.0) * (i + 2.0) * z2[..., i] * z1[..., i + 3]
        )
        / far
        + (
            (i * i + i - 3.0) * z2[..., i + 1] * z1[..., i]
            - (i * i + 3.0 * i - 1.0) * z2[..., i] * z1[..., i + 1]
        )
        / near,
        axis=-1,
    )
    return (
        -dt * dt / 4.0 * _series_00(z1, z2, q, dt)
        - dt * _series_01(z1, z2, q, dt)
        + dt**3 / 8.0 * bracket
    )


def _series_20(z1, z2, q: int, dt: float):
    i = np.arange(0, q + 1)
    far = np.sqrt((2.0 * i + 1.0) * (2.0 * i + 7.0)) * (2.0 * i + 3.0) * (2.0 * i + 5.0)
    near = np.sqrt((2.0 * i + 1.0) * (2.0 * i + 3.0)) * (2.0 * i - 1.0) * (2.0 * i + 5.0)
    bracket = 2.0 / (3.0 * math.sqrt(5.0)) * z1[..., 2] * z2[..., 0] + z1[..., 0] * z2[..., 0] / 3.0
    bracket = bracket + np.sum(
        (
            (i + 1.0) * (i + 2.0) * z2[..., i + 3] * z1[..., i]
            - (i + 2.0) * (i + 3.0) * z2[..., i] * z1[..., i + 3]
        )
        / far
        + (
            (i * i + 3.0 * i - 1.0) * z2[..., i + 1] * z1[..., i]
            - (i * i + i - 3.0) * z2[..., i] * z1[..., i + 1]
        )
        / near,
        axis=-1,
    )
    return (
        -dt * dt / 4.0 * _series_00(z1, z2, q, dt)
        - dt * _series_10(z1, z2, q, dt)
        + dt**3 / 8.0 * bracket
    )


def _series_11(z1, z2, q: int, dt: float):
    i = np.arange(0, q + 1)
    far = np.sqrt((2.0 * i + 1.0) * (2.0 * i + 7.0)) * (2.0 * i + 3.0) * (2.0 * i + 5.0)
    near = np.sqrt((2.0 * i + 1.0) * (2.0 * i + 3.0)) * (2.0 * i - 1.0) * (2.0 * i + 5.0)
    bracket = z1[..., 1] * z2[..., 1] / 3.0
    bracket = bracket + np.sum(
        (i + 1.0) * (i + 3.0) * (z2[..., i + 3] * z1[..., i] - z2[..., i] * z1[..., i + 3]) / far
        + (i + 1.0) ** 2 * (z2[..., i + 1] * z1[..., i] - z2[..., i] * z1[..., i + 1]) / near,
        axis=-1,
    )
    return (
        -dt * dt / 4.0 * _series_00(z1, z2, q, dt)
        - dt / 2.0 * (_series_10(z1, z2, q, dt) + _series_01(z1, z2, q, dt))
        + dt**3 / 8.0 * bracket
    )


_DOUBLE_SERIES = {
    (0, 0): (_series_00, 1),
    (0, 1): (_series_01, 3),
    (1, 0): (_series_10, 3),
    (1, 1): (_series_11, 4),
    (2, 0): (_series_20, 4),
    (0, 2): (_series_02, 4),
}


@lru_cache(maxsize=None)
def _diagonal_trace_bar(weights: tuple[int, int], q: int) -> Fraction:
    r"""Exact :math:`\sum_{i \le q} (2i+1)\,\bar C_{ii} / 2^{L+2}` for a pair kernel."""
    spec = KernelSpec(2, weights)
    scale = Fraction(1, 2 ** (sum(weights) + 2))
    return sum(
        ((2 * i + 1) * bar_coeff(spec, (i, i)) for i in range(q + 1)), Fraction(0)
    ) * scale


def diagonal_trace(weights: tuple[int, int], q: int, dt: float) -> float:
    r"""Truncated diagonal coefficient sum :math:`\sum_{i \le q} C_{ii}(dt)`.

    This is the deterministic term the Ito expansion subtracts at equal
    components (the mean of the truncated Gaussian product sum).  As
    ``q`` grows it converges to the exact Ito-Stratonovich conversion
    constant: ``dt/2`` for ``(0,0)`` (already exact at ``q=0``),
    ``-dt^2/4`` for ``(1,0)``/``(0,1)``, and ``dt^3/6`` for each of
    ``(1,1)``, ``(2,0)``, ``(0,2)``.
    """
    bar = _diagonal_trace_bar(tuple(weights), q)
    return float(bar) * dt ** (1 + sum(weights))


def legendre_double_series(
    weights: tuple[int, int],
    pattern: IndexPattern,
    draws: NoiseDraws,
    q: int,
    dt: float,
    calculus: str = "strat",
):
    r"""Banded double series for the pair kernel with weights ``(l_1, l_2)``.

    Computes the Stratonovich value as a band of near-diagonal products
    of Gaussians.  At equal components the Ito value subtracts the mean
    of the retained diagonal, :math:`\sum_{i \le q} C_{ii}`, so the
    truncated Ito expansion has mean zero and its mean-square error
    matches the closed error series at every ``q``.
    """
    weights = tuple(weights)
    if weights not in _DOUBLE_SERIES:
        raise ValueError(f"unsupported weight pair {weights}; supported: {DOUBLE_SERIES_WEIGHTS}")
    if pattern.k != 2:
        raise ValueError("double series requires a pair pattern")
    if q < 0:
        raise ValueError("truncation order must be nonnegative")
    if calculus not in ("ito", "strat"):
        raise ValueError("calculus must be 'ito' or 'strat'")
    fn, reach = _DOUBLE_SERIES[weights]
    needed = q + reach
    z1 = draws.row(pattern.components[0], needed)
    z2 = draws.row(pattern.components[1], needed)
    value = fn(z1, z2, q, dt)
    if calculus == "ito" and pattern.components[0] == pattern.components[1]:
        value = value - diagonal_trace(weights, q, dt)
    return value


def pair_series_support(q: int) -> np.ndarray:
    """Index support of the single-time-weight pair series at order ``q``.

    Boolean mask on ``{0..q+2}^2``: the diagonal up to ``q``, the first
    off-diagonals up to ``(q-1, q)``, and the second-off-diagonal pairs
    ``(i, i+2)`` up to ``i = q``.  For weights ``(1, 0)`` / ``(0, 1)``
    and ``q >= 1`` the truncated series equals the coefficient tensor
    masked to this set, so the masked form of :func:`exact_error
    <stochint.errors.exact_error>` reproduces its mean-square error.
    The double-weight forms ``(1, 1)``, ``(2, 0)``, ``(0, 2)`` carry
    adjusted coefficients on their outermost off-diagonal cells (that is
    what makes the diagonal product identities exact at finite ``q``),
    so no plain mask describes them.
    """
    n = q + 3
    mask = np.zeros((n, n), dtype=bool)
    for i in range(q + 1):
        mask[i, i] = True
        mask[i, i + 2] = mask[i + 2, i] = True
    for i in range(1, q + 1):
        mask[i - 1, i] = mask[i, i - 1] = True
    return mask


# ---------------------------------------------------------------------------
# Hermite diagonal forms (all components equal)
# ---------------------------------------------------------------------------


def hermite_diagonal(
    k: int, l: int, i1: int, draws: NoiseDraws, dt: float, calculus: str = "strat"
):
    r"""Closed form for the all-equal-component integral with weight ``l``.

    Uses the exact single integral :math:`I = \sum_{j \le l} C_j \zeta_j`
    and :math:`\Delta = \int_t^T (t-s)^{2l} ds = dt^{2l+1}/(2l+1)`:

    * ``k=3``: Stratonovich :math:`I^3/6`, Ito :math:`(I^3 - 3 I \Delta)/6`;
    * ``k=4``: Stratonovich :math:`I^4/24`,
      Ito :math:`(I^4 - 6 I^2 \Delta + 3 \Delta^2)/24`.
    """
    if k not in (3, 4):
        raise ValueError("Hermite diagonal forms implemented for k in {3, 4}")
    if calculus not in ("ito", "strat"):
        raise ValueError("calculus must be 'ito' or 'strat'")
    if l < 0:
        raise ValueError("weight exponent must be nonnegative")
    row = draws.row(i1, l + 1)
    single = _exact_single(l, row, dt)
    delta = dt ** (2 * l + 1) / (2 * l + 1)
    if k == 3:
        if calculus == "strat":
            return single**3 / 6.0
        return (single**3 - 3.0 * single * delta) / 6.0
    if calculus == "strat":
        return single**4 / 24.0
    return (single**4 - 6.0 * single**2 * delta + 3.0 * delta**2) / 24.0


# ---------------------------------------------------------------------------
# Ito <-> Stratonovich conversion
# ---------------------------------------------------------------------------


def ito_strat_convert(
    value,
    pattern: IndexPattern,
    weights: tuple[int, ...],
    dt: float,
    direction: str,
    draws: NoiseDraws | None = None,
    q: int | None = None,
):
    """Convert between Ito and Stratonovich values of one integral.

    Implemented cases: every pair weight of :data:`DOUBLE_SERIES_WEIGHTS`
    (deterministic correction at equal components), the unweighted triple
    (correction built from exact single integrals, needs ``draws``), and
    the unweighted quadruple (correction built from truncated pair series,
    needs ``draws`` and ``q``).  ``direction`` is ``"ito_to_strat"`` or
    ``"strat_to_ito"``; the correction is ``Ito - Stratonovich``.
    """
    if direction not in ("ito_to_strat", "strat_to_ito"):
        raise ValueError("direction must be 'ito_to_strat' or 'strat_to_ito'")
    weights = tuple(weights)
    comps = pattern.components
    k = len(comps)
    if len(weights) != k:
        raise ValueError("weights length must match pattern length")

    if k == 2 and weights in _DOUBLE_SERIES:
        shift = 0.0
        if comps[0] == comps[1]:
            # Ito - Strat = -(1/2) * int_t^T w1(s) w2(s) ds with w_l(s) = (t-s)^l.
            total = sum(weights)
            shift = -0.5 * (-1.0) ** total * dt ** (total + 1) / (total + 1)
    elif k == 3 and weights == (0, 0, 0):
        if draws is None:
            raise ValueError("triple conversion needs Gaussian draws")
        shift = 0.0
        if comps[0] == comps[1]:
            shift = shift + _exact_single(1, draws.row(comps[2], 2), dt) / 2.0
        if comps[1] == comps[2]:
            i0 = _exact_single(0, draws.row(comps[0], 1), dt)
            i1 = _exact_single(1, draws.row(comps[0], 2), dt)
            shift = shift - (dt * i0 + i1) / 2.0
    elif k == 4 and weights == (0, 0, 0, 0):
        if draws is None or q is None:
            raise ValueError("quadruple conversion needs Gaussian draws and a truncation order")
        shift = 0.0
        if comps[0] == comps[1]:
            shift = shift + 0.5 * legendre_double_series(
                (1, 0), IndexPattern((comps[2], comps[3])), draws, q, dt, "strat"
            )
        if comps[1] == comps[2]:
            tail = IndexPattern((comps[0], comps[3]))
            shift = shift - 0.5 * (
                legendre_double_series((1, 0), tail, draws, q, dt, "strat")
                - legendre_double_series((0, 1), tail, draws, q, dt, "strat")
            )
        if comps[2] == comps[3]:
            head = IndexPattern((comps[0], comps[1]))
            shift = shift - 0.5 * (
                dt * legendre_double_series((0, 0), head, draws, q, dt, "strat")
                + legendre_double_series((0, 1), head, draws, q, dt, "strat")
            )
        if comps[0] == comps[1] and comps[2] == comps[3]:
            shift = shift + dt * dt / 8.0
    else:
        raise ValueError(f"no conversion formula for k={k}, weights={weights}")

    if direction == "strat_to_ito":
        return value + shift
    return value - shift


# ---------------------------------------------------------------------------
# Trigonometric Milstein-style forms
# ---------------------------------------------------------------------------


def _alpha(q: int) -> float:
    r""":math:`\pi^2/6 - \sum_{r \le q} 1/r^2` (variance of the sine tail)."""
    return float(polygamma(1, q + 1))


def _beta(q: int) -> float:
    r""":math:`\pi^4/90 - \sum_{r \le q} 1/r^4` (variance of the cosine tail)."""
    return float(polygamma(3, q + 1)) / 6.0


def _tail_values(draws: NoiseDraws, component: int, need_mu: bool):
    if draws.xi is None or (need_mu and draws.mu is None):
        raise ValueError("tail-augmented form requested but draws carry no tail variables")
    xi = draws.xi[component - 1]
    mu = draws.mu[component - 1] if need_mu else None
    return xi, mu


def trig_milstein(kind: str, pattern: IndexPattern, draws: NoiseDraws, q: int, dt: float):
    r"""Trigonometric-basis forms for single and pair integrals.

    Kinds:

    * ``"I1"`` — weighted single :math:`\int (t-s)\,dW`; tail-augmented,
      mean-square exact at every ``q``.
    * ``"I2"`` — weighted single with :math:`(t-s)^2`; tail-augmented,
      mean-square exact.
    * ``"I00"`` — plain truncated pair series.
    * ``"I00_tail"`` — pair series plus the Gaussian tail term.

    Basis index ``2r-1`` is the sine and ``2r`` the cosine of frequency
    ``r``; tail variables come from :attr:`NoiseDraws.xi` / ``mu``.
    """
    if q < 0:
        raise ValueError("truncation order must be nonnegative")
    sqrt2 = math.sqrt(2.0)

    if kind == "I1":
        c = pattern.components[0]
        z = draws.row(c, max(1, 2 * q))
        xi, _ = _tail_values(draws, c, need_mu=False)
        r = np.arange(1, q + 1)
        sine_sum = np.sum(z[..., 2 * r - 1] / r, axis=-1) if q >= 1 else 0.0
        return -(dt**1.5) / 2.0 * (
            z[..., 0] - sqrt2 / math.pi * (sine_sum + math.sqrt(_alpha(q)) * xi)
        )

    if kind == "I2":
        c = pattern.components[0]
        z = draws.row(c, 2 * q + 1)
        xi, mu = _tail_values(draws, c, need_mu=True)
        r = np.arange(1, q + 1)
        sine_sum = np.sum(z[..., 2 * r - 1] / r, axis=-1) if q >= 1 else 0.0
        cos_sum = np.sum(z[..., 2 * r] / r**2, axis=-1) if q >= 1 else 0.0
        return dt**2.5 * (
            z[..., 0] / 3.0
            + (cos_sum + math.sqrt(_beta(q)) * mu) / (sqrt2 * math.pi**2)
            - (sine_sum + math.sqrt(_alpha(q)) * xi) / (sqrt2 * math.pi)
        )

    if kind in ("I00", "I00_tail"):
        if pattern.k != 2:
            raise ValueError("pair form requires two components")
        c1, c2 = pattern.components
        z1 = draws.row(c1, 2 * q + 1)
        z2 = draws.row(c2, 2 * q + 1)
        total = z1[..., 0] * z2[..., 0]
        if q >= 1:
            r = np.arange(1, q + 1)
            total = total + np.sum(
                (
                    z1[..., 2 * r] * z2[..., 2 * r - 1]
                    - z1[..., 2 * r - 1] * z2[..., 2 * r]
                    + sqrt2 * (z1[..., 2 * r - 1] * z2[..., 0] - z1[..., 0] * z2[..., 2 * r - 1])
                )
                / r,
                axis=-1,
            ) / math.pi
        value = dt / 2.0 * total
        if kind == "I00_tail":
            xi1, _ = _tail_values(draws, c1, need_mu=False)
            xi2, _ = _tail_values(draws, c2, need_mu=False)
            value = value + dt / 2.0 * (sqrt2 / math.pi) * math.sqrt(_alpha(q)) * (
                xi1 * z2[..., 0] - z1[..., 0] * xi2
            )
        return value

    raise ValueError(f"unknown kind {kind!r}; known: I1, I2, I00, I00_tail")
