"""Shared fixtures and helpers for the test suite.

``tests/data`` holds two frozen JSON files:

* ``coeff_tables.json`` — the numbered coefficient grids (4..36) as exact
  fraction strings, cell for cell as printed in the bundled reference
  tables.
* ``printed_values.json`` — error-table values, minimal truncation
  numbers, named error constants, and the polynomial/trigonometric ratio
  list, all at their printed precision.

Comparisons against printed values use :func:`printed_match`, which
treats a printed string as a half-ulp interval around its decimal value.
"""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@lru_cache(maxsize=None)
def _load(name: str) -> dict:
    with open(DATA_DIR / name, "r", encoding="utf-8") as fh:
        return json.load(fh)


def reference_coeff_tables() -> dict[int, list[list[Fraction]]]:
    """Frozen coefficient grids keyed by table number, cells as Fractions."""
    raw = _load("coeff_tables.json")
    return {
        int(num): [[Fraction(cell) for cell in row] for row in rows]
        for num, rows in raw.items()
    }


def reference_printed() -> dict:
    """Frozen printed values: error tables, q tables, constants, ratios."""
    return _load("printed_values.json")


def printed_match(computed: float, printed: str) -> bool:
    """True when ``computed`` rounds to the printed decimal string.

    A printed value like ``"0.0238"`` or ``"6.2450e-4"`` pins its last
    shown digit, so the acceptance window is half an ulp of that digit
    (with a one-part-in-1e7 cushion for the decimal-to-binary round trip).
    """
    dec = Decimal(printed)
    ulp = Decimal(1).scaleb(dec.as_tuple().exponent)
    return abs(Decimal(repr(float(computed))) - dec) <= ulp * Decimal("0.50000001")


@pytest.fixture(scope="session")
def coeff_tables() -> dict[int, list[list[Fraction]]]:
    return reference_coeff_tables()


@pytest.fixture(scope="session")
def printed() -> dict:
    return reference_printed()
