import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chaoscipher import julia
from chaoscipher.julia import OmegaSpec


def disc_misclassified(img):
    """Pixels with |z| <= 0.9 that escaped plus pixels with |z| >= 1.1 that stayed."""
    xs, ys = julia.pixel_axes(img.window, img.resolution)
    r = np.abs(xs[None, :] + 1j * ys[:, None])
    inner = (r <= 0.9) & ~img.members
    outer = (r >= 1.1) & img.members
    return int(inner.sum() + outer.sum())


def is_symmetric(img):
    # z -> -z is a 180 degree rotation of a centred grid
    return np.array_equal(img.escape_iter, img.escape_iter[::-1, ::-1])


def test_realize_omega():
    assert julia.realize_omega(OmegaSpec(b"s", 0.0, 50)) == [0j] * 50
    a = julia.realize_omega(OmegaSpec(b"s", 1.3, 200))
    assert a == julia.realize_omega(OmegaSpec(b"s", 1.3, 200))
    assert a != julia.realize_omega(OmegaSpec(b"t", 1.3, 200))
    with pytest.raises(ValueError):
        julia.realize_omega(OmegaSpec(b"s", 1.0, 0))


def test_realize_omega_fills_disc():
    cs = julia.realize_omega(OmegaSpec(b"fill", 2.0, 10_000))
    m = max(abs(c) for c in cs)
    assert 1.9 < m <= 2.0


def test_escape_time_examples():
    zeros = [0j] * 100
    assert julia.escape_time(0.5, zeros, max_iter=100, delta=0.0) == 100
    assert julia.escape_time(1.5, zeros, max_iter=100, delta=0.0) < 100
    omega = julia.realize_omega(OmegaSpec(b"x", 3.5, 100))
    assert julia.escape_time(0j, omega, max_iter=100, delta=3.5) == 100
    assert julia.escape_time(0j, omega, family="quadratic", max_iter=100, delta=3.5) < 100
    with pytest.raises(ValueError):
        julia.escape_time(0j, omega[:10], max_iter=100)


def test_first_cubic_iterate():
    assert julia._step(1.5, 0.0, 0.0, 0.0, True) == (3.375, 0.0)


@given(st.floats(0, 4), st.floats(0, 2 * math.pi), st.floats(1.0, 10.0), st.floats(0, 2 * math.pi),
       st.floats(0, 1))
def test_escape_radius_is_sound(delta, arg_z, scale, arg_c, frac_c):
    r = julia.escape_radius("cubic", delta) * scale
    z = r * complex(math.cos(arg_z), math.sin(arg_z))
    c = frac_c * delta * complex(math.cos(arg_c), math.sin(arg_c))
    assert abs(z ** 3 + c * z) >= 2 * abs(z) * (1 - 1e-12)
    rq = julia.escape_radius("quadratic", delta) * scale * 1.0001
    zq = rq * complex(math.cos(arg_z), math.sin(arg_z))
    assert abs(zq * zq + c) > abs(zq)


@pytest.mark.parametrize("family", julia.FAMILIES)
def test_delta_zero_is_unit_disc(family):
    img = julia.render(OmegaSpec(b"\x00", 0.0, 100), (-1.5, -1.5, 1.5, 1.5), (64, 64), 100, family)
    assert img.escape_iter.shape == (64, 64)
    assert disc_misclassified(img) == 0


@pytest.mark.parametrize("delta, family", [(0.5, "cubic"), (3.5, "cubic"), (0.7, "quadratic"), (2.5, "quadratic")])
def test_render_symmetric(delta, family):
    img = julia.render(OmegaSpec(b"sym", delta, 64), resolution=(48, 40), max_iter=64, family=family)
    assert is_symmetric(img)
    assert img.escape_iter.min() >= 0 and img.escape_iter.max() <= 64


def test_members_shrink_with_max_iter():
    a = julia.render(OmegaSpec(b"m", 0.6, 60), resolution=(40, 40), max_iter=30)
    b = julia.render(OmegaSpec(b"m", 0.6, 60), resolution=(40, 40), max_iter=60)
    assert not (b.members & ~a.members).any()


def test_render_matches_pointwise_escape_time():
    spec = OmegaSpec(b"pt", 0.8, 40)
    img = julia.render(spec, resolution=(9, 7), max_iter=40)
    omega = julia.realize_omega(spec)
    xs, ys = julia.pixel_axes(img.window, img.resolution)
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            assert img.escape_iter[j, i] == julia.escape_time(complex(x, y), omega, max_iter=40, delta=0.8)


def test_threads_do_not_change_output():
    spec = OmegaSpec(b"th", 0.5, 80)
    one = julia.render(spec, resolution=(50, 37), max_iter=80, threads=1)
    many = julia.render(spec, resolution=(50, 37), max_iter=80, threads=5)
    assert np.array_equal(one.escape_iter, many.escape_iter)


def test_pgm_and_json():
    img = julia.render(OmegaSpec(b"p", 0.5, 20), resolution=(16, 8), max_iter=20)
    pgm = img.to_pgm()
    assert pgm.startswith(b"P5 16 8 255\n")
    assert len(pgm) == len(b"P5 16 8 255\n") + 16 * 8
    d = json.loads(img.to_json())
    assert len(d["escape_iter"]) == 8 and len(d["escape_iter"][0]) == 16


def test_boundary():
    img = julia.render(OmegaSpec(b"\x00", 0.0, 50), (-1.5, -1.5, 1.5, 1.5), (32, 32), 50)
    edge = img.boundary()
    assert edge.any()
    assert not (edge & ~img.members).any()
    xs, ys = julia.pixel_axes(img.window, img.resolution)
    r = np.abs(xs[None, :] + 1j * ys[:, None])
    assert (r[edge] > 0.8).all()


def test_render_validation():
    spec = OmegaSpec(b"v", 0.5, 10)
    with pytest.raises(ValueError):
        julia.render(spec, resolution=(1, 5), max_iter=10)
    with pytest.raises(ValueError):
        julia.render(spec, window=(1, 0, 0, 1), max_iter=10)
    with pytest.raises(ValueError):
        julia.render(spec, family="quartic", max_iter=10)


def test_stability_distance_examples():
    kw = dict(resolution=(32, 32), max_iter=50)
    assert julia.stability_distance(0.5, b"a", b"a", **kw) == 0.0
    assert julia.stability_distance(0.0, b"a", b"b", **kw) == 0.0
    d = julia.stability_distance(0.5, b"a", b"b", **kw)
    assert 0.0 <= d <= 1.0


def test_stability_probe_shape():
    out = julia.stability_probe(0.0, 3, resolution=(16, 16), max_iter=20)
    assert out["mean_distance"] == 0.0 and out["stdev"] == 0.0
    assert out["trials"] == 3 and len(out["distances"]) == 3
    with pytest.raises(ValueError):
        julia.stability_probe(0.5, 1)
