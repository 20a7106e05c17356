import os
from dataclasses import dataclass, fields, replace
from typing import Any, Mapping, Optional, Tuple


@dataclass(frozen=True)
class SolverSettings:
    """Tolerances and grid sizes shared by every stage of the pipeline"""

    # expressions
    eval_clamp: float = 1e-12
    derivative_step: float = 1e-3
    derivative_halvings: int = 4
    divergence_cap: float = 1e12

    # decomposition / validation
    scan_cells: int = 2048
    zero_tol: float = 1e-12
    dip_tol: float = 1e-9
    derivative_zero_tol: float = 1e-7
    validation_grid: int = 512

    # bounds
    grid: int = 8192
    grid_rel_tol: float = 1e-6

    # shooting
    ode_tol: float = 1e-10
    ode_method: str = "DOP853"
    stiff_ode_method: str = "LSODA"
    stiff_fallback_methods: Tuple[str, ...] = ("Radau", "BDF")
    stiff_ratio: float = 1e-4
    delta0_frac: float = 1e-6
    z_floor: float = 1e-13
    max_retries: int = 4
    tol_c: float = 1e-6
    expansion_factor: float = 1.5
    max_expansions: int = 8

    # wave
    slope_tol: float = 1e-4
    t_span_cap: float = 50.0
    profile_points: int = 160
    threads: int = 4

    @property
    def threshold_band(self) -> float:
        """Speeds within this distance of c_hat are treated as c = c_hat"""
        return max(10 * self.tol_c, 1e-5)

    @classmethod
    def from_mapping(cls, options: Optional[Mapping[str, Any]] = None) -> "SolverSettings":
        """Build settings from a problem-file [options] table plus WAVEKIT_THREADS"""
        options = dict(options or {})
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(options) - set(known))
        if unknown:
            raise ValueError(f"Unknown solver options: {', '.join(unknown)}")

        values = {}
        for name, value in options.items():
            default = getattr(cls, name)
            values[name] = type(default)(value)

        threads = os.environ.get("WAVEKIT_THREADS")
        if threads:
            values["threads"] = max(1, int(threads))

        settings = cls(**values)
        if settings.scan_cells < 64:
            raise ValueError(f"scan_cells must be at least 64, got {settings.scan_cells}")
        return settings

    def with_overrides(self, **changes: Any) -> "SolverSettings":
        return replace(self, **changes)


DEFAULT_SETTINGS = SolverSettings()
