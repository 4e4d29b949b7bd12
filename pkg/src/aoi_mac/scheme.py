"""Multiple-access scheme identifiers."""

from enum import Enum

from .errors import InvalidArgumentError


class Scheme(str, Enum):
    TDMA = "TDMA"
    FDMA = "FDMA"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise InvalidArgumentError(f"unknown scheme {value!r}; expected TDMA or FDMA") from None

    def __str__(self) -> str:
        return self.value
