"""Tolerance knobs for the verification suite.

Each field can be overridden with an environment variable
``QPOLAR_TOL_<FIELD>`` (upper case), e.g. ``QPOLAR_TOL_CHANNEL=1e-9``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_PREFIX = "QPOLAR_TOL_"


@dataclass(frozen=True)
class Tolerances:
    frame: float = 1e-12
    trace: float = 1e-10
    correlation: float = 1e-10
    stokes: float = 1e-12
    channel: float = 1e-10
    commutation: float = 1e-10
    classical: float = 1e-10
    depolarizer: float = 1e-12
    positivity: float = 1e-10
    mueller: float = 1e-12

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        environ = os.environ if environ is None else environ
        overrides = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                overrides[f.name] = float(raw)
        return cls(**overrides)

    def all_set_to(self, value: float) -> "Tolerances":
        return replace(self, **{f.name: value for f in fields(self)})

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
