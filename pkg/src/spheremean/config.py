"""Run configuration and provenance manifest."""

import hashlib
import json
import logging
import time
from dataclasses import asdict, dataclass, field, fields, replace
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from spheremean.errors import DimensionError, InputError
from spheremean.harmonics import SUPPORTED_DIMENSIONS

logger = logging.getLogger(__name__)

SCHEMA = 1

# default (angular, quadrature) resolutions per dimension, the n = 3 center
# grid grows with m_max so that its band covers every analysed degree
DEFAULT_RESOLUTIONS = {2: (256, 256), 3: (18, 32)}


def package_version() -> str:
    try:
        return version("spheremean")
    except PackageNotFoundError:
        return "0+unknown"


@dataclass(frozen=True)
class RunConfig:
    """Effective configuration of a command.

    Parameters
    ----------
    dimension
        Space dimension, 2 or 3.
    m_max
        Highest harmonic degree analysed.
    q_max
        Number of Bessel zeros tested per degree.
    eigs
        Number of Dirichlet eigenfunctions per mode.
    t_max
        Largest radius of the t-grid.
    t_samples
        Number of t-grid samples.
    r_samples
        Number of samples of recovered radial profiles.
    angular
        Resolution of the center grid, defaults per dimension.
    quad_resolution
        Resolution of the spherical mean quadrature, defaults per dimension.
    tol
        Tolerance of the orthogonality residuals.
    extension_tol
        Tolerance of the relative extension mismatches.
    sigma_factor
        Singularity threshold in units of `tol`.
    velocity_factor
        Bound of the initial velocity estimate in units of its truncation
        floor.
    vanishing_tol
        Relative floor of the vanishing diagnostic.
    moment_kmax
        Highest moment tested.
    interior_samples
        Number of seeded interior check points.
    check_centers
        Number of centers of the boundary re-trace.
    seed
        Seed of every randomized sample.

    """

    dimension: int = 2
    m_max: int = 8
    q_max: int = 10
    eigs: int = 64
    t_max: float = 2.0
    t_samples: int = 401
    r_samples: int = 201
    angular: int | None = None
    quad_resolution: int | None = None
    tol: float = 1e-5
    extension_tol: float = 1e-2
    sigma_factor: float = 10.0
    velocity_factor: float = 10.0
    vanishing_tol: float = 1e-3
    moment_kmax: int = 3
    interior_samples: int = 100
    check_centers: int = 16
    seed: int = 0

    @property
    def angular_resolution(self) -> int:
        if self.angular is not None:
            return self.angular
        resolution = DEFAULT_RESOLUTIONS[self.dimension][0]
        if self.dimension == 3:
            resolution = max(resolution, 2 * self.m_max + 2)
        return resolution

    @property
    def quad(self) -> int:
        if self.quad_resolution is not None:
            return self.quad_resolution
        return DEFAULT_RESOLUTIONS[self.dimension][1]

    def validate(self) -> "RunConfig":
        if self.dimension not in SUPPORTED_DIMENSIONS:
            raise DimensionError(f"dimension must be one of {SUPPORTED_DIMENSIONS}")
        for name in ("q_max", "eigs", "t_samples", "r_samples", "interior_samples", "check_centers"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive", name)
        for name in ("m_max", "moment_kmax", "seed"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be nonnegative", name)
        for name in ("angular", "quad_resolution"):
            value = getattr(self, name)
            if value is not None and value < 4:
                raise InputError(f"{name} must be at least 4", name)
        for name in ("tol", "extension_tol", "vanishing_tol"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise InputError(f"{name} must be in (0, 1)", name)
        if self.t_max < 2.0:
            raise InputError("t_max must be at least 2", "t_max")
        for name in ("sigma_factor", "velocity_factor"):
            if getattr(self, name) <= 0.0:
                raise InputError(f"{name} must be positive", name)
        return self

    def merge(self, **overrides) -> "RunConfig":
        """New config with every override that is not ``None``.

        Raises
        ------
        InputError
            Raised for unknown keys and for values that are not numbers of
            the field type. Integral floats are accepted for integer fields.

        """
        kinds = {f.name: f.type for f in fields(self)}
        unknown = set(overrides) - set(kinds)
        if unknown:
            raise InputError(f"unknown config keys {sorted(unknown)}")
        values = {
            name: _coerce(name, value, kinds[name])
            for name, value in overrides.items()
            if value is not None
        }
        return replace(self, **values)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        """Defaults overridden by a JSON config file."""
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError as err:
            raise InputError("config file not found", str(path)) from err
        except json.JSONDecodeError as err:
            raise InputError(f"malformed config file: {err.msg}", err.lineno) from err
        if not isinstance(data, dict):
            raise InputError("config file must hold a JSON object", str(path))
        return cls().merge(**data)

    def to_dict(self) -> dict:
        return {
            **asdict(self),
            "angular": self.angular_resolution,
            "quad_resolution": self.quad,
        }


def _coerce(name: str, value: object, kind: object) -> int | float:
    # bool is an int subclass but never a valid setting
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{name} must be a number, got {value!r}", name)
    if kind is float:
        return float(value)
    if isinstance(value, float) and not value.is_integer():
        raise InputError(f"{name} must be an integer, got {value!r}", name)
    return int(value)


def file_digest(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class Manifest:
    """Provenance of an output file.

    Parameters
    ----------
    command
        Subcommand that produced the file.
    config
        Effective configuration.
    inputs
        sha256 digests of the input files, keyed by path.

    The timestamp and wall time are grouped under ``run`` in :meth:`to_dict`,
    the only part that differs between identical runs.

    """

    command: str
    config: dict
    inputs: dict[str, str] = field(default_factory=dict)
    version: str = field(default_factory=package_version)
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
    wall_time: float = 0.0
    _start: float = field(default_factory=time.perf_counter, repr=False)

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = file_digest(path)

    def finish(self) -> "Manifest":
        self.wall_time = time.perf_counter() - self._start
        return self

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "version": self.version,
            "run": {"timestamp": self.timestamp, "wall_time": self.wall_time},
        }
