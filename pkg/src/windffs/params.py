"""Aggregated-system domain types and per-unit conventions.

All powers are expressed on one common base: the sum of the synchronous
generator ratings (``base_mva``).  Frequency deviations are simulated in
per-unit of ``f_nom`` and reported in Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["SystemParams", "Disturbance", "steady_state_deviation"]


@dataclass(frozen=True)
class SystemParams:
    """Aggregated grid constants of the swing-equation model.

    inertia_h    system inertia H on the common base, s
    damping_df   load frequency-damping coefficient D_f, p.u./p.u.
    droop_inv_r  aggregated governor droop 1/R, p.u./p.u.
    base_mva     common power base (sum of SG ratings), MVA
    f_nom        nominal frequency, Hz
    """

    inertia_h: float
    damping_df: float
    droop_inv_r: float
    base_mva: float = 100.0
    f_nom: float = 50.0

    def __post_init__(self):
        vals = (self.inertia_h, self.damping_df, self.droop_inv_r,
                self.base_mva, self.f_nom)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite system parameter in {vals}")
        if self.inertia_h <= 0.0:
            raise ValueError(f"inertia_h must be > 0, got {self.inertia_h}")
        if self.droop_inv_r <= 0.0:
            raise ValueError(f"droop_inv_r must be > 0, got {self.droop_inv_r}")
        if self.damping_df < 0.0:
            raise ValueError(f"damping_df must be >= 0, got {self.damping_df}")
        if self.base_mva <= 0.0 or self.f_nom <= 0.0:
            raise ValueError("base_mva and f_nom must be > 0")

    @property
    def kg(self) -> float:
        """Composite primary-regulation gain K_g = D_f + 1/R."""
        return self.damping_df + self.droop_inv_r

    def mw_to_pu(self, mw: float) -> float:
        return mw / self.base_mva

    def pu_to_mw(self, pu: float) -> float:
        return pu * self.base_mva

    def steady_state_deviation_hz(self, pd: float) -> float:
        return steady_state_deviation(self, pd)


def steady_state_deviation(params: SystemParams, pd: float) -> float:
    """Post-event settling excursion -pd/K_g, in Hz.

    Valid whenever the wind-farm support decays to zero (kinetic-energy-only
    support cannot move the settling point).
    """
    if not math.isfinite(pd):
        raise ValueError(f"power deficit must be finite, got {pd}")
    if pd < 0.0:
        raise ValueError(f"power deficit must be >= 0, got {pd}")
    return -pd / params.kg * params.f_nom


@dataclass(frozen=True)
class Disturbance:
    """Step power deficit applied at ``time`` seconds.

    ``load_surge`` adds load; ``generator_trip`` removes a generator's
    pre-trip output and, in scenario runs, silences its governor.
    """

    kind: str               # "load_surge" | "generator_trip"
    magnitude_pd: float     # p.u. on the system base
    time: float = 0.0       # s
    trip_governor: int | None = None   # index of the governor lost in a trip

    _KINDS = ("load_surge", "generator_trip")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"disturbance kind must be one of {self._KINDS}")
        if not (math.isfinite(self.magnitude_pd) and self.magnitude_pd > 0.0):
            raise ValueError(f"magnitude_pd must be > 0, got {self.magnitude_pd}")
        if not (math.isfinite(self.time) and self.time >= 0.0):
            raise ValueError(f"time must be >= 0, got {self.time}")
        if self.kind == "generator_trip" and self.trip_governor is None:
            raise ValueError("generator_trip requires trip_governor index")
