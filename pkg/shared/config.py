"""Solver configuration shared by the command line and the library entry points."""

import os
from dataclasses import dataclass, replace
from typing import Self

from dotenv import load_dotenv

# Load .env file if present
load_dotenv()


def _float(name: str, default: float) -> float:
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


@dataclass(frozen=True)
class SolverConfig:
    """Numerical defaults. Command-line flags override these."""

    tol: float = 1e-9  # verification residual tolerance
    points: int = 32  # sample points per verification
    seed: int = 0
    lower: float = -1.0  # sampling box for base points
    upper: float = 1.0
    rtol: float = 1e-9
    atol: float = 1e-12
    dt_min: float = 1e-12
    cond_limit: float = 1e12  # fiber Hessian condition number beyond which L is singular
    monitor_tol: float = 1e-8
    workers: int = 1

    @classmethod
    def from_env(cls) -> Self:
        """Load configuration from BDCP_* environment variables."""
        d = cls()
        return cls(
            tol=_float("BDCP_TOL", d.tol),
            points=_int("BDCP_POINTS", d.points),
            seed=_int("BDCP_SEED", d.seed),
            lower=_float("BDCP_LOWER", d.lower),
            upper=_float("BDCP_UPPER", d.upper),
            rtol=_float("BDCP_RTOL", d.rtol),
            atol=_float("BDCP_ATOL", d.atol),
            dt_min=_float("BDCP_DT_MIN", d.dt_min),
            cond_limit=_float("BDCP_COND_LIMIT", d.cond_limit),
            monitor_tol=_float("BDCP_MONITOR_TOL", d.monitor_tol),
            workers=_int("BDCP_WORKERS", d.workers),
        )

    def override(self, **flags) -> Self:
        """Apply the flags that were actually given."""
        return replace(self, **{k: v for k, v in flags.items() if v is not None})

    @property
    def bounds(self) -> tuple[float, float]:
        return (self.lower, self.upper)
