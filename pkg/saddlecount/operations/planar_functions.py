"""
Compactly supported functions on the plane, evaluated on arrays of holonomy
coordinates. Each one knows its support radius, its integral over R^2 and,
where it is differentiable along circles, its image under the rotation
generator: omega(psi)(v) = -d/dbeta psi(r_beta v), the counterclockwise
convention with (pi(g) f)(x) = f(g^-1 x).
"""
import math

import numpy as np
from scipy import integrate, special

from saddlecount.errors import InvalidParameter


def wrap_pi(angles: np.ndarray) -> np.ndarray:
    """Angles reduced to [-pi, pi)."""
    return np.mod(np.asarray(angles) + math.pi, 2 * math.pi) - math.pi


def smoothstep(z: np.ndarray) -> np.ndarray:
    z = np.clip(z, 0.0, 1.0)
    return z * z * (3.0 - 2.0 * z)


def smoothstep_slope(z: np.ndarray) -> np.ndarray:
    inside = (z > 0.0) & (z < 1.0)
    return np.where(inside, 6.0 * z * (1.0 - z), 0.0)


def radial_bump(r: np.ndarray, radius: float) -> np.ndarray:
    """exp(1 - 1/(1 - (r/R)^2)) on r < R, zero outside; smooth, equal to 1 at the origin."""
    s = np.asarray(r, dtype=float) / radius
    out = np.zeros_like(s)
    inside = s < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


class PlanarFunction:
    support_radius: float = 0.0
    differentiable: bool = False

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def omega(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise InvalidParameter(f"{type(self).__name__} has no rotation derivative")

    def integral(self) -> float:
        """Numerical fallback in polar coordinates."""
        radius = self.support_radius
        value, _ = integrate.dblquad(
            lambda r, beta: float(self(np.array([r * math.cos(beta)]), np.array([r * math.sin(beta)]))[0]) * r,
            0.0, 2 * math.pi, 0.0, radius, epsabs=1e-10,
        )
        return value


class ZeroFunction(PlanarFunction):
    differentiable = True

    def __init__(self, radius: float = 1.0):
        self.support_radius = radius

    def __call__(self, x, y):
        return np.zeros(np.shape(x))

    def omega(self, x, y):
        return np.zeros(np.shape(x))

    def integral(self) -> float:
        return 0.0


class BallIndicator(PlanarFunction):
    differentiable = True

    def __init__(self, radius: float):
        if radius < 0:
            raise InvalidParameter(f"ball radius must be non-negative, got {radius}")
        self.support_radius = radius

    def __call__(self, x, y):
        return (np.hypot(x, y) <= self.support_radius).astype(float)

    def omega(self, x, y):
        return np.zeros(np.shape(x))

    def integral(self) -> float:
        return math.pi * self.support_radius ** 2


class SectorIndicator(PlanarFunction):
    """Closed sector of the given radius, angles measured from `centre` within half_width."""

    def __init__(self, radius: float, half_width: float, centre: float = math.pi / 2):
        self.support_radius = radius
        self.half_width = half_width
        self.centre = centre

    def __call__(self, x, y):
        gamma = wrap_pi(np.arctan2(y, x) - self.centre)
        return ((np.hypot(x, y) <= self.support_radius) & (np.abs(gamma) <= self.half_width)).astype(float)

    def integral(self) -> float:
        return self.half_width * self.support_radius ** 2

    @classmethod
    def s1(cls, theta: float) -> "SectorIndicator":
        return cls(math.cos(theta), theta)

    @classmethod
    def s2(cls, theta: float) -> "SectorIndicator":
        return cls(1.0 / math.cos(theta), theta)


class TriangleIndicator(PlanarFunction):
    """Isosceles triangle with apex at the origin, axis along `centre`, half apex angle theta."""

    def __init__(self, theta: float, height: float, centre: float = math.pi / 2):
        if not 0 < theta < math.pi / 2:
            raise InvalidParameter(f"triangle half angle must lie in (0, pi/2), got {theta}")
        self.theta = theta
        self.height = height
        self.centre = centre
        self.support_radius = height / math.cos(theta)

    def __call__(self, x, y):
        gamma = wrap_pi(np.arctan2(y, x) - self.centre)
        rho = np.hypot(x, y)
        return ((np.abs(gamma) <= self.theta) & (rho * np.cos(gamma) <= self.height)).astype(float)

    def integral(self) -> float:
        return self.height ** 2 * math.tan(self.theta)

    @classmethod
    def w1(cls, theta: float) -> "TriangleIndicator":
        return cls(theta, math.cos(theta))

    @classmethod
    def w2(cls, theta: float) -> "TriangleIndicator":
        return cls(theta, 1.0)


class SmoothBump(PlanarFunction):
    """
    psi_- = H(beta - pi/2) on r <= cos(theta) with H = 1 on |u| <= theta - delta,
    0 on |u| >= theta. psi_+ has plateau |u| <= theta, vanishes past theta + delta
    and lives on r <= 1/cos(theta). H is a cubic smoothstep, so |H'| <= 1.5/delta.
    """
    differentiable = True

    def __init__(self, theta: float, sign: str, delta: float | None = None):
        if not 0 < theta < 1:
            raise InvalidParameter(f"bump half angle must lie in (0, 1), got {theta}")
        if sign not in ("-", "+"):
            raise InvalidParameter(f"bump sign must be '-' or '+', got {sign!r}")
        self.theta = theta
        self.sign = sign
        self.delta = theta * theta if delta is None else delta
        if not 0 < self.delta <= theta:
            raise InvalidParameter(f"delta must lie in (0, theta], got {self.delta}")
        self.edge = theta if sign == "-" else theta + self.delta
        self.support_radius = math.cos(theta) if sign == "-" else 1.0 / math.cos(theta)

    def _parts(self, x, y):
        u = wrap_pi(np.arctan2(y, x) - math.pi / 2)
        z = (self.edge - np.abs(u)) / self.delta
        inside = np.hypot(x, y) <= self.support_radius
        return u, z, inside

    def __call__(self, x, y):
        _, z, inside = self._parts(x, y)
        return np.where(inside, smoothstep(z), 0.0)

    def omega(self, x, y):
        u, z, inside = self._parts(x, y)
        return np.where(inside, smoothstep_slope(z) * np.sign(u) / self.delta, 0.0)

    def integral(self) -> float:
        angular = 2 * self.theta - self.delta if self.sign == "-" else 2 * self.theta + self.delta
        return 0.5 * self.support_radius ** 2 * angular


class AngularBump(PlanarFunction):
    """exp(kappa (cos(beta - mu) - 1)) times a smooth radial bump of radius R."""
    differentiable = True

    def __init__(self, mu: float, kappa: float, radius: float):
        self.mu = mu
        self.kappa = kappa
        self.support_radius = radius

    def _angular(self, x, y):
        return np.arctan2(y, x) - self.mu

    def __call__(self, x, y):
        phase = self._angular(x, y)
        return np.exp(self.kappa * (np.cos(phase) - 1.0)) * radial_bump(np.hypot(x, y), self.support_radius)

    def omega(self, x, y):
        phase = self._angular(x, y)
        return self.kappa * np.sin(phase) * self(x, y)

    def integral(self) -> float:
        radial, _ = integrate.quad(lambda r: float(radial_bump(np.array([r]), self.support_radius)[0]) * r,
                                   0.0, self.support_radius)
        return radial * 2 * math.pi * special.i0e(self.kappa)


class RadialBump(PlanarFunction):
    differentiable = True

    def __init__(self, radius: float):
        self.support_radius = radius

    def __call__(self, x, y):
        return radial_bump(np.hypot(x, y), self.support_radius)

    def omega(self, x, y):
        return np.zeros(np.shape(x))

    def integral(self) -> float:
        radial, _ = integrate.quad(lambda r: float(radial_bump(np.array([r]), self.support_radius)[0]) * r,
                                   0.0, self.support_radius)
        return 2 * math.pi * radial


class ScaledFunction(PlanarFunction):
    def __init__(self, base: PlanarFunction, factor: float):
        self.base = base
        self.factor = factor
        self.support_radius = base.support_radius
        self.differentiable = base.differentiable

    def __call__(self, x, y):
        return self.factor * self.base(x, y)

    def omega(self, x, y):
        return self.factor * self.base.omega(x, y)

    def integral(self) -> float:
        return self.factor * self.base.integral()


class RotatedFunction(PlanarFunction):
    """v -> base(r_theta v)."""

    def __init__(self, base: PlanarFunction, theta: float):
        self.base = base
        self.theta = theta
        self.support_radius = base.support_radius
        self.differentiable = base.differentiable

    def _rotate(self, x, y):
        cos, sin = math.cos(self.theta), math.sin(self.theta)
        return cos * x - sin * y, sin * x + cos * y

    def __call__(self, x, y):
        return self.base(*self._rotate(x, y))

    def omega(self, x, y):
        return self.base.omega(*self._rotate(x, y))

    def integral(self) -> float:
        return self.base.integral()
