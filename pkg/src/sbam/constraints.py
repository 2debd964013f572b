"""Affordance-constraint representations and their weighted similarities.

Three ways to represent the displacement between two affordance-region
centers a0 and a1 (all in millimeters):

* Cartesian: componentwise difference (x, y, z) = a0 - a1.
* Cylindrical: radius rho = hypot(dx, dy), azimuth phi = atan2(dy, dx) in
  [-pi, pi], elevation z = dz. phi is defined as 0 when dx = dy = 0.
* Symbolic: one degree of satisfaction per configured spatial constraint,
  the product of a Gaussian density over rho, a von Mises density over phi,
  and a Gaussian density over z.

The weighted similarity of a current vector against a target vector is zero
exactly when the weighted representations coincide, and positive otherwise.
Per-dimension weights come from standard deviations via w = 1 / (1 + std).
"""

from __future__ import annotations

import importlib.resources
import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "ConstraintKind",
    "ConstraintVector",
    "ConstraintWeights",
    "SymbolicConstraintDef",
    "cartesian_constraint",
    "cylindrical_constraint",
    "symbolic_constraint",
    "gaussian_pdf",
    "vonmises_pdf",
    "bessel_i0",
    "weights_from_std",
    "similarity_cartesian",
    "similarity_cylindrical",
    "similarity_symbolic",
    "dimension_labels",
    "wrap_angle",
    "default_symbolic_defs",
    "parse_symbolic_defs",
    "symbolic_defs_to_payload",
    "DENSITY_FLOOR",
]

TWO_PI = 2.0 * math.pi

# Densities are floored here before taking logarithms so that deep Gaussian
# tails (which underflow float64) never produce -inf or zero values.
DENSITY_FLOOR = 1e-300
LOG_DENSITY_FLOOR = math.log(DENSITY_FLOOR)

CARTESIAN_LABELS = ("x", "y", "z")
CYLINDRICAL_LABELS = ("rho", "phi", "z")


class ConstraintKind(str, Enum):
    CARTESIAN = "cartesian"
    CYLINDRICAL = "cylindrical"
    SYMBOLIC = "symbolic"


def wrap_angle(a: float) -> float:
    """Wrap into [-pi, pi]; +pi stays +pi (atan2 convention)."""
    while a > math.pi:
        a -= TWO_PI
    while a < -math.pi:
        a += TWO_PI
    return a


@dataclass(frozen=True, eq=False)
class ConstraintVector:
    """Values of one constraint representation, with per-dimension labels."""

    kind: ConstraintKind
    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("constraint values must be a flat vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("constraint values must be finite")
        labels = tuple(self.labels)
        if len(labels) != v.shape[0]:
            raise ValueError("labels must match values length")
        if self.kind in (ConstraintKind.CARTESIAN, ConstraintKind.CYLINDRICAL):
            if v.shape[0] != 3:
                raise ValueError(f"{self.kind.value} constraint must have 3 values")
        if self.kind is ConstraintKind.CYLINDRICAL:
            if v[0] < 0:
                raise ValueError("cylindrical radius must be >= 0")
            if abs(v[1]) > math.pi + 1e-12:
                raise ValueError("cylindrical azimuth must lie in [-pi, pi]")
        if self.kind is ConstraintKind.SYMBOLIC and np.any(v <= 0):
            raise ValueError("symbolic degrees of satisfaction must be > 0")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True, eq=False)
class ConstraintWeights:
    """Per-dimension weights matching a ConstraintVector layout."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("weights must be a flat vector of non-negative reals")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SymbolicConstraintDef:
    """Parameters of one symbolic spatial constraint.

    Gaussian over rho (mean mm, variance mm^2), von Mises over phi (mean rad,
    concentration), Gaussian over z (mean mm, variance mm^2). The azimuth
    mean is wrapped into [-pi, pi] on construction.
    """

    name: str
    mu_rho: float
    var_rho: float
    mu_phi: float
    kappa_phi: float
    mu_z: float
    var_z: float

    def __post_init__(self):
        if not self.name:
            raise ValueError("constraint name must be non-empty")
        if self.var_rho <= 0 or self.var_z <= 0:
            raise ValueError(f"{self.name}: variances must be > 0")
        if self.kappa_phi <= 0:
            raise ValueError(f"{self.name}: concentration must be > 0")
        object.__setattr__(self, "mu_phi", wrap_angle(float(self.mu_phi)))


def _as_point(p, name: str) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    return a


def cartesian_constraint(a0, a1) -> ConstraintVector:
    """Componentwise distance a0 - a1 between two region centers."""
    d = _as_point(a0, "a0") - _as_point(a1, "a1")
    return ConstraintVector(ConstraintKind.CARTESIAN, d, CARTESIAN_LABELS)


def cylindrical_constraint(a0, a1) -> ConstraintVector:
    """Cylindrical (rho, phi, z) of the displacement a0 - a1."""
    d = _as_point(a0, "a0") - _as_point(a1, "a1")
    dx, dy, dz = float(d[0]), float(d[1]), float(d[2])
    rho = math.hypot(dx, dy)
    phi = 0.0 if (dx == 0.0 and dy == 0.0) else math.atan2(dy, dx)
    return ConstraintVector(
        ConstraintKind.CYLINDRICAL, np.array([rho, phi, dz]), CYLINDRICAL_LABELS
    )


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero.

    Power series sum((x/2)^(2k) / (k!)^2), accumulated until the running term
    drops below 1e-16 of the partial sum.
    """
    arr = np.asarray(x, dtype=float)
    term = np.ones_like(arr)
    total = np.ones_like(arr)
    x2 = 0.25 * arr * arr
    for k in range(1, 1000):
        term = term * x2 / (k * k)
        total = total + term
        if np.all(term <= 1e-16 * total):
            break
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(total)
    return total


def _log_gaussian_pdf(x, mu, var):
    return -0.5 * (x - mu) ** 2 / var - 0.5 * np.log(TWO_PI * var)


def _log_vonmises_pdf(phi, mu, kappa):
    return kappa * np.cos(phi - mu) - np.log(TWO_PI * bessel_i0(kappa))


def gaussian_pdf(x, mu, var):
    """Gaussian density with mean mu and variance var."""
    if np.any(np.asarray(var) <= 0):
        raise ValueError("variance must be > 0")
    out = np.exp(_log_gaussian_pdf(np.asarray(x, dtype=float), mu, var))
    return float(out) if np.ndim(out) == 0 else out


def vonmises_pdf(phi, mu, kappa):
    """von Mises density on the circle with mode mu and concentration kappa."""
    if np.any(np.asarray(kappa) <= 0):
        raise ValueError("concentration must be > 0")
    out = np.exp(_log_vonmises_pdf(np.asarray(phi, dtype=float), mu, kappa))
    return float(out) if np.ndim(out) == 0 else out


def _def_arrays(defs):
    mu_rho = np.array([d.mu_rho for d in defs])
    var_rho = np.array([d.var_rho for d in defs])
    mu_phi = np.array([d.mu_phi for d in defs])
    kappa = np.array([d.kappa_phi for d in defs])
    mu_z = np.array([d.mu_z for d in defs])
    var_z = np.array([d.var_z for d in defs])
    return mu_rho, var_rho, mu_phi, kappa, mu_z, var_z


def symbolic_log_satisfaction(a0, a1, defs) -> np.ndarray:
    """log degree of satisfaction per definition, floored at log(1e-300).

    This is the quantity the learner tracks and the optimizer compares; the
    floor keeps deep tails finite without disturbing representable values.
    """
    if not defs:
        raise ValueError("at least one symbolic constraint definition required")
    cyl = cylindrical_constraint(a0, a1)
    rho, phi, z = cyl.values
    mu_rho, var_rho, mu_phi, kappa, mu_z, var_z = _def_arrays(defs)
    log_v = (
        _log_gaussian_pdf(rho, mu_rho, var_rho)
        + _log_vonmises_pdf(phi, mu_phi, kappa)
        + _log_gaussian_pdf(z, mu_z, var_z)
    )
    return np.maximum(log_v, LOG_DENSITY_FLOOR)


def symbolic_constraint(a0, a1, defs) -> ConstraintVector:
    """Degrees of satisfaction v = P(rho) * P(phi) * P(z) for each definition."""
    log_v = symbolic_log_satisfaction(a0, a1, defs)
    v = np.maximum(np.exp(log_v), DENSITY_FLOOR)
    return ConstraintVector(ConstraintKind.SYMBOLIC, v, tuple(d.name for d in defs))


def weights_from_std(stds) -> ConstraintWeights:
    """Importance weights w = 1 / (1 + std); low spread means high weight."""
    s = np.asarray(stds, dtype=float)
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise ValueError("standard deviations must be finite and >= 0")
    return ConstraintWeights(1.0 / (1.0 + s))


def _check_pair(current: ConstraintVector, target: ConstraintVector,
                weights: ConstraintWeights, kind: ConstraintKind):
    if current.kind is not kind or target.kind is not kind:
        raise ValueError(f"expected two {kind.value} constraint vectors")
    if current.labels != target.labels:
        raise ValueError("constraint vectors have mismatched dimensions")
    if weights.values.shape != current.values.shape:
        raise ValueError("weights do not match the constraint layout")


def similarity_cartesian(current: ConstraintVector, target: ConstraintVector,
                         weights: ConstraintWeights) -> float:
    """Squared weighted Cartesian difference."""
    _check_pair(current, target, weights, ConstraintKind.CARTESIAN)
    d = weights.values * (current.values - target.values)
    return float(np.dot(d, d))


def similarity_cylindrical(current: ConstraintVector, target: ConstraintVector,
                           weights: ConstraintWeights) -> float:
    """Squared distance after mapping the weighted cylindrical triples to
    Cartesian coordinates; the azimuth weight scales the angle before the
    trigonometric map."""
    _check_pair(current, target, weights, ConstraintKind.CYLINDRICAL)
    w_rho, w_phi, w_z = weights.values
    rho1, phi1, z1 = current.values
    rho2, phi2, z2 = target.values
    x1 = math.cos(w_phi * phi1) * w_rho * rho1
    y1 = math.sin(w_phi * phi1) * w_rho * rho1
    x2 = math.cos(w_phi * phi2) * w_rho * rho2
    y2 = math.sin(w_phi * phi2) * w_rho * rho2
    return (x1 - x2) ** 2 + (y1 - y2) ** 2 + (w_z * z1 - w_z * z2) ** 2


def similarity_symbolic(current: ConstraintVector, target: ConstraintVector,
                        weights: ConstraintWeights) -> float:
    """Squared weighted difference of log degrees of satisfaction."""
    _check_pair(current, target, weights, ConstraintKind.SYMBOLIC)
    if np.any(current.values <= 0) or np.any(target.values <= 0):
        raise ValueError("symbolic similarity requires strictly positive densities")
    d = weights.values * (
        np.log(np.maximum(current.values, DENSITY_FLOOR))
        - np.log(np.maximum(target.values, DENSITY_FLOOR))
    )
    return float(np.dot(d, d))


def dimension_labels(kind: ConstraintKind, defs=None) -> tuple[str, ...]:
    """Canonical dimension labels for a constraint kind."""
    if kind is ConstraintKind.CARTESIAN:
        return CARTESIAN_LABELS
    if kind is ConstraintKind.CYLINDRICAL:
        return CYLINDRICAL_LABELS
    if defs is None:
        raise ValueError("symbolic kind needs constraint definitions")
    return tuple(d.name for d in defs)


def parse_symbolic_defs(entries) -> tuple[SymbolicConstraintDef, ...]:
    """Build definitions from a list of plain dicts (the JSON schema)."""
    defs = []
    names = set()
    for i, e in enumerate(entries):
        try:
            d = SymbolicConstraintDef(
                name=e["name"],
                mu_rho=float(e["mu_rho"]),
                var_rho=float(e["var_rho"]),
                mu_phi=float(e["mu_phi"]),
                kappa_phi=float(e["kappa_phi"]),
                mu_z=float(e["mu_z"]),
                var_z=float(e["var_z"]),
            )
        except KeyError as missing:
            raise ValueError(f"constraint entry {i}: missing field {missing}") from None
        if d.name in names:
            raise ValueError(f"duplicate constraint name {d.name!r}")
        names.add(d.name)
        defs.append(d)
    if not defs:
        raise ValueError("constraint set must not be empty")
    return tuple(defs)


def symbolic_defs_to_payload(defs) -> list[dict]:
    return [
        {
            "name": d.name,
            "mu_rho": d.mu_rho,
            "var_rho": d.var_rho,
            "mu_phi": d.mu_phi,
            "kappa_phi": d.kappa_phi,
            "mu_z": d.mu_z,
            "var_z": d.var_z,
        }
        for d in defs
    ]


def default_symbolic_defs() -> tuple[SymbolicConstraintDef, ...]:
    """The eight built-in spatial constraints shipped with the package."""
    path = importlib.resources.files("sbam").joinpath("data/spatial_constraints.json")
    payload = json.loads(path.read_text())
    return parse_symbolic_defs(payload["constraints"])
