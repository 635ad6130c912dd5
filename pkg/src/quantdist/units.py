"""Ten measurement dimensions, the unit lexicon, and value normalization.

The registry maps unit surface forms ("km/h", "acre foot", "°F") to a
dimension and an affine conversion into that dimension's standard unit.
It is immutable after load, so concurrent readers need no locking.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .errors import DimensionMismatchError, LexiconError


class Dimension(Enum):
    """The ten supported measurement dimensions.

    The enum value is the name of the standard unit every mention of that
    dimension is normalized into. TIME is an hour-of-day in [0, 24) and is
    distinct from DURATION (elapsed seconds).
    """

    TIME = "hour of day"
    CURRENCY = "US dollar"
    LENGTH = "meter"
    AREA = "square meter"
    VOLUME = "cubic meter"
    MASS = "kilogram"
    TEMPERATURE = "kelvin"
    DURATION = "second"
    SPEED = "meter per second"
    VOLTAGE = "volt"

    @property
    def standard_unit(self) -> str:
        return self.value


@dataclass(frozen=True)
class UnitDef:
    """One unit with its aliases and affine conversion to the standard unit.

    ``value_std = scale * value + offset``. A nonzero offset is only legal
    for TEMPERATURE. ``requires_marker`` marks bare letters (C, F, K) that
    resolve only next to a degree sign or the word "degrees".
    """

    surface_forms: tuple[str, ...]
    dimension: Dimension
    scale: float
    offset: float = 0.0
    requires_marker: bool = False

    def __post_init__(self):
        if not self.surface_forms:
            raise LexiconError("unit needs at least one surface form")
        if not (self.scale > 0):
            raise LexiconError(f"unit {self.name!r}: scale must be positive")
        if self.offset != 0.0 and self.dimension is not Dimension.TEMPERATURE:
            raise LexiconError(
                f"unit {self.name!r}: nonzero offset outside TEMPERATURE"
            )

    @property
    def name(self) -> str:
        return self.surface_forms[0]


@dataclass(frozen=True)
class Quantity:
    """A measurement normalized into its dimension's standard unit."""

    dimension: Dimension
    value_std: float
    source_value: float
    source_unit: str


def _clean_zero(x: float) -> float:
    # fold -0.0 into +0.0 so serialized tables are order-independent
    return x + 0.0


class UnitRegistry:
    """Immutable lookup table from unit surface forms to conversions."""

    def __init__(self, units: list[UnitDef], version: str = "unversioned"):
        self.version = version
        self._units = tuple(units)
        self._by_alias: dict[str, UnitDef] = {}
        max_tokens = 1
        for unit in units:
            for alias in unit.surface_forms:
                key = alias.lower()
                if key in self._by_alias:
                    raise LexiconError(f"duplicate unit alias {alias!r}")
                self._by_alias[key] = unit
                max_tokens = max(max_tokens, len(key.split()))
        self.max_alias_tokens = max_tokens

    def __len__(self) -> int:
        return len(self._units)

    def units(self) -> tuple[UnitDef, ...]:
        return self._units

    def lookup_unit(self, surface: str, marker_present: bool = False) -> UnitDef | None:
        """Resolve a surface form; None signals coverage loss, never an error.

        A leading degree sign on the surface counts as the marker, so both
        ``lookup_unit("°F", True)`` and ``lookup_unit("°F", False)`` resolve
        while ``lookup_unit("F", False)`` does not.
        """
        key = surface.strip().lower()
        if key.startswith("°"):
            key = key[1:]
            marker_present = True
        unit = self._by_alias.get(key)
        if unit is None:
            return None
        if unit.requires_marker and not marker_present:
            return None
        return unit

    def normalize(self, value: float, unit: UnitDef, surface: str | None = None) -> Quantity:
        """Convert a raw (value, unit) pair into standard units."""
        if not math.isfinite(value):
            raise ValueError(f"cannot normalize non-finite value {value!r}")
        std = unit.scale * value + unit.offset
        if not math.isfinite(std):
            raise ValueError(f"normalization of {value!r} {unit.name!r} overflowed")
        if unit.dimension is Dimension.TIME:
            std = std % 24.0
        return Quantity(
            dimension=unit.dimension,
            value_std=_clean_zero(std),
            source_value=value,
            source_unit=surface if surface is not None else unit.name,
        )

    def denormalize(self, quantity: Quantity, target_unit: UnitDef) -> float:
        """Express a normalized quantity in another unit of the same dimension."""
        if target_unit.dimension is not quantity.dimension:
            raise DimensionMismatchError(
                f"cannot express {quantity.dimension.name} in "
                f"{target_unit.dimension.name} unit {target_unit.name!r}"
            )
        return (quantity.value_std - target_unit.offset) / target_unit.scale

    def time_unit(self) -> UnitDef:
        """The hour-of-day unit used by clock expressions."""
        unit = self.lookup_unit("hour of day")
        if unit is None or unit.dimension is not Dimension.TIME:
            raise LexiconError("lexicon has no 'hour of day' TIME unit")
        return unit


def _parse_rates(text: str, path: str = "<rates>") -> dict[str, float]:
    rates: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) != 2:
            raise LexiconError(f"{path}:{lineno}: expected 'code<TAB>rate', got {raw!r}")
        code = parts[0].upper()
        try:
            rate = float(parts[1])
        except ValueError as exc:
            raise LexiconError(f"{path}:{lineno}: bad rate {parts[1]!r}") from exc
        if rate <= 0:
            raise LexiconError(f"{path}:{lineno}: rate must be positive")
        rates[code] = rate
    return rates


def _parse_lexicon(text: str, rates: dict[str, float], path: str = "<lexicon>") -> list[UnitDef]:
    units: list[UnitDef] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) != 5:
            raise LexiconError(
                f"{path}:{lineno}: expected 5 tab-separated columns, got {len(parts)}"
            )
        alias_field, dim_field, scale_field, offset_field, marker_field = parts
        aliases = tuple(a.strip().lower() for a in alias_field.split(",") if a.strip())
        try:
            dimension = Dimension[dim_field.upper()]
        except KeyError as exc:
            raise LexiconError(f"{path}:{lineno}: unknown dimension {dim_field!r}") from exc
        try:
            scale = float(scale_field)
        except ValueError:
            if dimension is not Dimension.CURRENCY:
                raise LexiconError(
                    f"{path}:{lineno}: non-numeric scale {scale_field!r} outside CURRENCY"
                ) from None
            code = scale_field.upper()
            if code not in rates:
                raise LexiconError(f"{path}:{lineno}: no rate for currency {code!r}")
            scale = rates[code]
        try:
            offset = float(offset_field)
        except ValueError as exc:
            raise LexiconError(f"{path}:{lineno}: bad offset {offset_field!r}") from exc
        if marker_field not in ("0", "1"):
            raise LexiconError(f"{path}:{lineno}: requires_marker must be 0 or 1")
        try:
            units.append(
                UnitDef(
                    surface_forms=aliases,
                    dimension=dimension,
                    scale=scale,
                    offset=offset,
                    requires_marker=marker_field == "1",
                )
            )
        except LexiconError as exc:
            raise LexiconError(f"{path}:{lineno}: {exc}") from None
    return units


def load_registry(units_path=None, rates_path=None) -> UnitRegistry:
    """Build a registry from lexicon files, defaulting to the shipped ones.

    The registry version is a digest of the file contents, so tables built
    against different lexicons refuse to merge.
    """
    if units_path is None:
        units_text = resources.files("quantdist.data").joinpath("units.tsv").read_text("utf-8")
        units_name = "units.tsv"
    else:
        with open(units_path, encoding="utf-8") as fh:
            units_text = fh.read()
        units_name = str(units_path)
    if rates_path is None:
        rates_text = resources.files("quantdist.data").joinpath("currency.tsv").read_text("utf-8")
        rates_name = "currency.tsv"
    else:
        with open(rates_path, encoding="utf-8") as fh:
            rates_text = fh.read()
        rates_name = str(rates_path)

    rates = _parse_rates(rates_text, rates_name)
    units = _parse_lexicon(units_text, rates, units_name)
    digest = hashlib.sha256(
        units_text.encode("utf-8") + b"\x00" + rates_text.encode("utf-8")
    ).hexdigest()[:12]
    return UnitRegistry(units, version=digest)
