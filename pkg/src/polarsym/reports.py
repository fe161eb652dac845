"""Result records shared by the analysis modules, with JSON-ready dict views."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

SCHEMA_VERSION = "1.0"


def _plain(obj):
    """Recursively convert numpy scalars/arrays into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


@dataclass
class Witness:
    """A half-space on which the reflected differences take both strict signs.

    ``x_plus`` is a point where u(sigma x) - u(x) > tol, ``x_minus`` one where
    it is < -tol. ``severity`` is min(max positive, max negative) difference,
    the size of the two-sided violation.
    """

    normal: np.ndarray
    offset: float
    x_plus: np.ndarray
    x_minus: np.ndarray
    severity: float
    alpha: Optional[float] = None
    index: Optional[int] = None

    def to_dict(self):
        d = {
            "normal": self.normal,
            "offset": self.offset,
            "x_plus": self.x_plus,
            "x_minus": self.x_minus,
            "severity": self.severity,
        }
        if self.alpha is not None:
            d["alpha"] = self.alpha
        if self.index is not None:
            d["index"] = self.index
        return _plain(d)


@dataclass
class SeparabilityReport:
    separable: bool
    n_tested: int
    tolerance: float
    witness: Optional[Witness] = None
    # per tested half-space: +1 (u >= u o sigma), -1 (<=), 0 (equal within tol)
    branches: Optional[np.ndarray] = None

    def to_dict(self):
        return _plain({
            "kind": "separability",
            "separable": self.separable,
            "n_tested": self.n_tested,
            "tolerance": self.tolerance,
            "witness": None if self.witness is None else self.witness.to_dict(),
        })


@dataclass
class AxisReport:
    """Classification of a sampled function's symmetry.

    ``kind`` is one of ``"constant"``, ``"radial"``, ``"axial"`` or
    ``"inconsistent"``. For axial reports ``direction`` points at the maxima.
    """

    kind: str
    direction: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    profile: Optional[dict] = None
    caps: Optional[dict] = None
    residuals: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    separability: Optional[SeparabilityReport] = None

    @property
    def ok(self):
        return all(self.checks.values())

    def to_dict(self):
        d = {
            "kind": "axis_report",
            "classification": self.kind,
            "direction": self.direction,
            "center": self.center,
            "profile": self.profile,
            "caps": self.caps,
            "residuals": self.residuals,
            "checks": self.checks,
            "notes": self.notes,
        }
        if self.separability is not None:
            d["separability"] = self.separability.to_dict()
        return _plain(d)
