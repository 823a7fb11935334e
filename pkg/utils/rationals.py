from decimal import Decimal
from fractions import Fraction
from typing import Union

DECIMAL_PLACES = 12

Number = Union[int, str, Decimal, Fraction]


def parse_rational(text: Number) -> Fraction:
    """Reads "p/q", integers or decimal literals exactly. Binary floats are refused."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, Decimal):
        if not text.is_finite():
            raise ValueError(f"not a rational: {text}")
        return Fraction(text)
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        raise ValueError(f"floating-point value {text!r}: write it as a string or p/q")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def parse_probability(text: Number) -> Fraction:
    value = parse_rational(text)
    if not 0 <= value <= 1:
        raise ValueError(f"probability {render(value)} outside [0, 1]")
    return value


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """Comma-separated rationals, e.g. "1/2,0.25"."""
    parts = [p for p in text.split(',') if p.strip()]
    if not parts:
        raise ValueError("empty vector")
    return tuple(parse_rational(p) for p in parts)


def render(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def to_decimal(value: Fraction, places: int = DECIMAL_PLACES) -> str:
    value = Fraction(value)
    sign = '-' if value < 0 else ''
    scaled = round(abs(value) * 10**places)
    whole, frac = divmod(scaled, 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"


def render_vector(values) -> str:
    return '(' + ', '.join(render(v) for v in values) + ')'
