"""Enumeration caps.

Defaults may be overridden through the ``PERMAFINETTI_CAPS`` environment
variable, a comma separated list of ``name=value`` pairs, e.g.
``PERMAFINETTI_CAPS="bitmask_n=20,naive_terms=1e6"``.
"""

import dataclasses
import os

from .errors import DomainError

ENV_VAR = "PERMAFINETTI_CAPS"


@dataclasses.dataclass(frozen=True)
class Caps:
    bitmask_n: int = 24
    naive_terms: int = 10**8
    measure_cells: int = 10**7
    rectangles: int = 10**7


def parse_caps(text):
    """Parse a ``name=value,...`` override string into a :class:`Caps`."""
    fields = {f.name for f in dataclasses.fields(Caps)}
    overrides = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in fields:
            raise DomainError(f"bad {ENV_VAR} entry {item!r}; known caps: {sorted(fields)}")
        number = float(value)
        if number < 0 or number != int(number):
            raise DomainError(f"cap {name} must be a nonnegative integer, got {value!r}")
        overrides[name] = int(number)
    return Caps(**overrides)


def get_caps():
    """Return the active caps (defaults merged with the environment override)."""
    text = os.environ.get(ENV_VAR, "")
    return parse_caps(text) if text.strip() else Caps()
