"""Simply connected space forms of curvature b <= 0.

For b = 0 the model is R^n with its Euclidean structure.  For b < 0 it is
the hyperboloid sheet {x : <x,x>_M = 1/b, x_0 > 0} inside Minkowski
R^{n+1}, where <x,y>_M = -x_0 y_0 + sum_i x_i y_i; the induced metric has
constant curvature b.  Distances, geodesics, and radial directions are
closed-form in this model, with no boundary blow-up at large radius.

Points and tangent vectors are plain float arrays of length `dim`
(n for b = 0, n+1 for b < 0); all operations broadcast over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import ConfigError, ModelError, PoleSingularity


@dataclass(frozen=True)
class SpaceForm:
    """Ambient space of constant curvature b <= 0 and dimension n >= 3."""

    b: float
    n: int = 3
    kappa: float = field(init=False)

    def __post_init__(self):
        if self.b > 0:
            raise ConfigError(f"curvature b={self.b} > 0 is not supported")
        if self.n < 3:
            raise ConfigError(f"ambient dimension n={self.n} must be >= 3")
        object.__setattr__(self, "kappa", float(np.sqrt(-self.b)))

    @property
    def curved(self) -> bool:
        return self.b < 0

    @property
    def dim(self) -> int:
        """Coordinate length of ambient points."""
        return self.n + 1 if self.curved else self.n

    # -- ambient bilinear form -------------------------------------------

    def inner(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Ambient model metric on vectors (Minkowski form when b < 0)."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        s = np.einsum("...k,...k->...", x, y)
        if self.curved:
            s = s - 2.0 * x[..., 0] * y[..., 0]
        return s

    def norm(self, v: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(self.inner(v, v), 0.0))

    # -- model membership ------------------------------------------------

    def point_residual(self, x: np.ndarray) -> np.ndarray:
        """Scale-relative violation of the model constraint at x."""
        x = np.asarray(x, dtype=np.float64)
        if not self.curved:
            return np.zeros(x.shape[:-1])
        sumsq = np.einsum("...k,...k->...", x, x)
        raw = np.abs(self.b * self.inner(x, x) - 1.0)
        return raw / (1.0 + np.abs(self.b) * sumsq)

    def check_point(self, x: np.ndarray, tol: float = 1e-9,
                    what: str = "point") -> None:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise ModelError(
                f"{what} has {x.shape[-1]} coordinates, expected {self.dim}"
            )
        if self.curved:
            res = self.point_residual(x)
            worst = float(np.max(res))
            if worst > tol:
                raise ModelError(
                    f"{what} off the hyperboloid model: residual {worst:.3e}"
                )
            if np.any(np.asarray(x)[..., 0] <= 0):
                raise ModelError(f"{what} on the wrong hyperboloid sheet")

    def project_to_model(self, x: np.ndarray) -> np.ndarray:
        """Rescale x onto the hyperboloid sheet (identity for b = 0)."""
        x = np.asarray(x, dtype=np.float64)
        if not self.curved:
            return x
        q = self.b * self.inner(x, x)
        if np.any(q <= 0):
            raise ModelError("cannot project a non-timelike point")
        return x / np.sqrt(q)[..., None]

    # -- comparison functions --------------------------------------------

    def h(self, t):
        """Mean curvature of the geodesic t-sphere, pointed inward.

        1/t for b = 0 and kappa*coth(kappa*t) for b < 0; strictly
        decreasing in t.
        """
        t = np.asarray(t, dtype=np.float64)
        if np.any(t <= 0):
            raise ValueError("h(t) requires t > 0")
        if not self.curved:
            return 1.0 / t
        return self.kappa / np.tanh(self.kappa * t)

    def ball_area(self, t):
        """Area of the totally geodesic 2-disk of radius t."""
        t = np.asarray(t, dtype=np.float64)
        if np.any(t <= 0):
            raise ValueError("ball_area(t) requires t > 0")
        if not self.curved:
            return np.pi * t * t
        half = np.sinh(0.5 * self.kappa * t)
        return 4.0 * np.pi * half * half / (-self.b)

    def circle_length(self, t):
        """Length of the geodesic circle of radius t in that 2-disk."""
        t = np.asarray(t, dtype=np.float64)
        if np.any(t <= 0):
            raise ValueError("circle_length(t) requires t > 0")
        if not self.curved:
            return 2.0 * np.pi * t
        return 2.0 * np.pi * np.sinh(self.kappa * t) / self.kappa

    # -- distance and radial structure -----------------------------------

    def distance(self, p: np.ndarray, q: np.ndarray,
                 check: bool = True) -> np.ndarray:
        """Geodesic distance between model points, broadcasting."""
        p = np.asarray(p, dtype=np.float64)
        q = np.asarray(q, dtype=np.float64)
        if not self.curved:
            return np.linalg.norm(q - p, axis=-1)
        if check:
            self.check_point(p, what="p")
            self.check_point(q, what="q")
        delta = self.b * self.inner(p, q) - 1.0
        kern = backend.get_kernels()
        return np.asarray(kern.stable_acosh(delta)) / self.kappa

    def radial_unit(self, o: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Unit tangent at x of the geodesic from the pole o through x.

        For b < 0 the result is Minkowski-orthogonal to x (model-tangent)
        and has Minkowski norm 1.
        """
        o = np.asarray(o, dtype=np.float64)
        x = np.asarray(x, dtype=np.float64)
        if not self.curved:
            diff = x - o
            r = np.linalg.norm(diff, axis=-1)
            if np.any(r < 1e-12):
                raise PoleSingularity("radial direction undefined at the pole")
            return diff / r[..., None]
        delta = np.maximum(self.b * self.inner(o, x) - 1.0, 0.0)
        sh = np.sqrt(delta * (2.0 + delta))  # sinh(kappa * r)
        if np.any(sh < 1e-12):
            raise PoleSingularity("radial direction undefined at the pole")
        ch = 1.0 + delta
        return self.kappa * (ch[..., None] * x - o) / sh[..., None]

    def geodesic_step(self, x: np.ndarray, v: np.ndarray, s) -> np.ndarray:
        """Point at arclength s along the geodesic from x with unit tangent v."""
        x = np.asarray(x, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        s = np.asarray(s, dtype=np.float64)
        if not self.curved:
            return x + s[..., None] * v
        ks = self.kappa * s
        return (np.cosh(ks)[..., None] * x
                + (np.sinh(ks) / self.kappa)[..., None] * v)
