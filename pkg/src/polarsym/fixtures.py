"""Named closed-form fixtures, written as the grid files the CLI reads."""
import numpy as np

from . import ball, circle, sphere, wholespace
from .gridio import write_grid


def circle_cos(n=64):
    return circle.CircleFn.from_function(lambda t: 2.0 + np.cos(t), n)


def circle_cos2(n=64):
    return circle.CircleFn.from_function(lambda t: 2.0 + np.cos(2 * t), n)


def circle_plateau(n=96):
    """3 on |t| <= pi/6, 1 on |t - pi| <= pi/6, linear in between."""
    def f(t):
        a = np.abs(np.mod(t + np.pi, 2 * np.pi) - np.pi)
        return np.interp(a, [0, np.pi / 6, 5 * np.pi / 6, np.pi], [3.0, 3.0, 1.0, 1.0])

    return circle.CircleFn.from_function(f, n)


def sphere_linear(n_lat=64, n_lon=128):
    return sphere.SphereFn.from_function(lambda x: 2.0 + x[..., 2], n_lat, n_lon)


def sphere_x1x2(n_lat=64, n_lon=128):
    return sphere.SphereFn.from_function(lambda x: 2.0 + x[..., 0] * x[..., 1], n_lat, n_lon)


def sphere_plateau(n_lat=64, n_lon=128):
    """3 on x3 >= 0.5, 1 on x3 <= -0.5, linear in x3 between."""
    return sphere.SphereFn.from_function(lambda x: np.clip(2.0 + 2.0 * x[..., 2], 1.0, 3.0), n_lat, n_lon)


def ball_radial(R=1.0, m=12, n_lat=33, n_lon=64):
    return ball.BallFn.from_function(lambda x: 3.0 - np.linalg.norm(x, axis=-1) / R, R, m, n_lat, n_lon)


def ball_x1x2(R=1.0, m=12, n_lat=33, n_lon=64):
    return ball.BallFn.from_function(lambda x: 2.0 + x[..., 0] * x[..., 1], R, m, n_lat, n_lon)


FIELDS = {
    "tanh": (wholespace.tanh_field, False),
    "gaussian": (wholespace.gaussian_sum, True),
    "two_bumps": (wholespace.two_bumps, True),
    "lorentzian": (wholespace.lorentzian((1.0, 2.0, 0.0)), True),
    "exp": (wholespace.exp_decay, True),
}

FIXTURES = {
    "circle_cos": ("circle", circle_cos),
    "circle_cos2": ("circle", circle_cos2),
    "circle_plateau": ("circle", circle_plateau),
    "sphere_linear": ("sphere", sphere_linear),
    "sphere_x1x2": ("sphere", sphere_x1x2),
    "sphere_plateau": ("sphere", sphere_plateau),
    "example21": ("ball", ball.example21),
    "ball_radial": ("ball", ball_radial),
    "ball_x1x2": ("ball", ball_x1x2),
}
FIXTURES.update({f"field_{k}": ("field", None) for k in FIELDS})


def field_fixture(name, R_max=8.0, spacing=0.25):
    """FieldFn for a named closed-form field (evaluated exactly, not sampled)."""
    f, decay = FIELDS[name]
    return wholespace.FieldFn(f, R_max=R_max, decay_hint=decay)


def sample_field(name, R_max=8.0, spacing=0.25):
    """Cartesian sample of a named field on [-R_max, R_max]^3."""
    f, _ = FIELDS[name]
    m = int(round(R_max / spacing))
    ax = spacing * np.arange(-m, m + 1)
    G = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1)
    return f(G), spacing, np.full(3, -m * spacing)


def write_fixture(name, path):
    """Write fixture ``name`` to ``path``; returns its kind."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}")
    kind, make = FIXTURES[name]
    if kind == "circle":
        circle.write_csv(make(), path)
    elif kind == "sphere":
        sphere.write_csv(make(), path)
    elif kind == "ball":
        ball.write_csv(make(), path)
    else:
        write_grid(path, *sample_field(name[len("field_"):]))
    return kind
