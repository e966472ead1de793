"""Shared builders for the test suite.

Scenario builders return (chart, phi, psi) triples; refinement helpers
assert the O(h^2) two-grid ratio window used throughout.
"""

import numpy as np
import pytest

import diracharmonic as dh

RATIO_LO, RATIO_HI = 3.4, 4.6


def assert_second_order(coarse, fine, lo=RATIO_LO, hi=RATIO_HI):
    ratio = coarse / fine
    assert lo <= ratio <= hi, f"refinement ratio {ratio:.3f} outside [{lo}, {hi}]"
    return ratio


def torus_deg1_pair(n, psi1=(0.2, -0.1j), window=0.5):
    """Degree-1 pushforward pair sampled on a windowed torus chart."""
    chart = dh.DomainChart.torus(n, side=1.0, window=window)
    phi = dh.conformal_map_field(dh.RationalMap([0, 1]), chart)
    psi = dh.twistor_pushforward(phi, dh.spinor(1, 0), dh.spinor(*psi1))
    return chart, phi, psi


def disk_twistor_pair(n, psi1=(0.2, -0.1j)):
    chart = dh.DomainChart.disk(n, side=2.2)
    phi = dh.conformal_map_field(dh.RationalMap([0, 1]), chart)
    psi = dh.twistor_pushforward(phi, dh.spinor(1, 0), dh.spinor(*psi1))
    return chart, phi, psi


def elliptic_pair(n, scale=0.7, psi0=(1.0, 0.5j)):
    """Periodic exact pair on the whole torus (no window)."""
    chart = dh.DomainChart.torus(n, side=1.0)
    phi = dh.elliptic_conformal_field(chart, scale=scale)
    psi = dh.twistor_pushforward(phi, dh.spinor(*psi0), dh.spinor(0, 0))
    return chart, phi, psi


def random_sphere_pair(n, seed=3, amp=0.6, kmax=2, spin_amp=1.0, side=1.0):
    """Smooth random non-solution pair on the torus."""
    chart = dh.DomainChart.torus(n, side=side)
    rng = np.random.default_rng(seed)
    sphere = dh.Sphere(2)
    base = np.zeros(chart.shape + (3,))
    base[..., 2] = 1.0
    dev = dh.bandlimited_field(chart, rng, components=(3,), kmax=kmax, amplitude=amp)
    phi = dh.MapField(chart, sphere, sphere.project_point(base + dev))
    raw = (dh.bandlimited_field(chart, rng, components=(3, 2), kmax=kmax, amplitude=spin_amp)
           + 1j * dh.bandlimited_field(chart, rng, components=(3, 2), kmax=kmax,
                                       amplitude=spin_amp))
    psi = dh.project_spinor(phi, raw)
    return chart, phi, psi


def fd5_derivative(samples, h):
    """Independent derivative oracle: fourth-order five-point stencil at the
    center of a 5-sample window."""
    m2, m1, _, p1, p2 = samples
    return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
