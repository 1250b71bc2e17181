"""Fish-farm sensor records.

Documents are UTF-8 JSON objects with the fields in the order listed below
and every numeric value as a decimal string, so endorsers on any platform
serialize identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from decimal import Decimal, InvalidOperation
from typing import Any, Dict, Mapping, Tuple, Type, TypeVar

from ..core.base import ValidationFailed

PUBLIC_FIELDS: Tuple[str, ...] = (
    "windspeed",
    "rainfall",
    "airpressure",
    "temperature",
    "waveheight",
    "watercurrent",
)

PRIVATE_FIELDS: Tuple[str, ...] = (
    "fdom",
    "salinity",
    "ph",
    "turbidity",
    "algae",
    "orp",
    "nitrates",
)

FIELD_UNITS: Dict[str, str] = {
    "windspeed": "m/s",
    "rainfall": "mm/h",
    "airpressure": "hPa",
    "temperature": "degC",
    "waveheight": "m",
    "watercurrent": "m/s",
    "fdom": "ppb QSE",
    "salinity": "PSU",
    "ph": "pH",
    "turbidity": "NTU",
    "algae": "ug/L",
    "orp": "mV",
    "nitrates": "mg/L",
}

R = TypeVar("R", bound="_Record")


def to_decimal(field_name: str, value: Any) -> Decimal:
    """Parse a numeric field; floats go through their shortest repr."""
    if isinstance(value, bool):
        raise ValidationFailed(f"{field_name} must be numeric, got {value!r}")
    try:
        number = Decimal(repr(value)) if isinstance(value, float) else Decimal(str(value).strip())
    except (InvalidOperation, ValueError) as e:
        raise ValidationFailed(f"{field_name} is not a decimal number: {value!r}") from e
    if not number.is_finite():
        raise ValidationFailed(f"{field_name} must be finite, got {value!r}")
    return number


@dataclass(frozen=True)
class _Record:
    name: str

    @classmethod
    def value_fields(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls) if f.name != "name")

    @classmethod
    def from_fields(cls: Type[R], name: str, values: Mapping[str, Any], validate: bool = True) -> R:
        """Build from raw values; ``validate=False`` skips range checks only."""
        missing = [f for f in cls.value_fields() if f not in values]
        if missing:
            raise ValidationFailed(f"missing fields: {', '.join(missing)}")
        record = cls(name=str(name), **{f: to_decimal(f, values[f]) for f in cls.value_fields()})
        if validate:
            record.validate()
        return record

    def validate(self) -> None:
        if not self.name or not self.name.strip():
            raise ValidationFailed("name must be non-empty")

    def to_dict(self) -> Dict[str, str]:
        doc = {"name": self.name}
        for f in self.value_fields():
            doc[f] = str(getattr(self, f))
        return doc

    def to_document(self) -> bytes:
        return json.dumps(self.to_dict(), separators=(",", ":"), ensure_ascii=False).encode("utf-8")

    @classmethod
    def from_document(cls: Type[R], document: bytes) -> R:
        try:
            data = json.loads(document.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ValidationFailed(f"document is not UTF-8 JSON: {e}") from e
        if not isinstance(data, dict):
            raise ValidationFailed("document must be a JSON object")
        extra = set(data) - {"name", *cls.value_fields()}
        if extra:
            raise ValidationFailed(f"unexpected fields: {', '.join(sorted(extra))}")
        return cls.from_fields(data.get("name", ""), data)


@dataclass(frozen=True)
class FishFarmPublicRecord(_Record):
    windspeed: Decimal = Decimal(0)
    rainfall: Decimal = Decimal(0)
    airpressure: Decimal = Decimal(0)
    temperature: Decimal = Decimal(0)
    waveheight: Decimal = Decimal(0)
    watercurrent: Decimal = Decimal(0)


@dataclass(frozen=True)
class FishFarmPrivateRecord(_Record):
    fdom: Decimal = Decimal(0)
    salinity: Decimal = Decimal(0)
    ph: Decimal = Decimal(7)
    turbidity: Decimal = Decimal(0)
    algae: Decimal = Decimal(0)
    orp: Decimal = Decimal(0)
    nitrates: Decimal = Decimal(0)

    def validate(self) -> None:
        super().validate()
        if not Decimal(0) <= self.ph <= Decimal(14):
            raise ValidationFailed(f"ph {self.ph} outside [0, 14]")
        if self.turbidity < 0:
            raise ValidationFailed(f"turbidity {self.turbidity} is negative")
        if self.nitrates < 0:
            raise ValidationFailed(f"nitrates {self.nitrates} is negative")


def split_record(
    record: Mapping[str, Any], validate: bool = True
) -> Tuple[FishFarmPublicRecord, FishFarmPrivateRecord]:
    """Split a flat 14-field record into its public and private parts."""
    name = record.get("name", "")
    return (
        FishFarmPublicRecord.from_fields(name, record, validate),
        FishFarmPrivateRecord.from_fields(name, record, validate),
    )
