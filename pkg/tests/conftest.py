"""Shared fixtures: material data, slip sets and a finite-difference Jacobian."""

import json

import numpy as np
import pytest

from gradplast.core.config import config_from_dict
from gradplast.material.bulk import BulkMaterialParams
from gradplast.material.kinematics import ElasticLaw, SlipSet, build_slip_systems

FD_STEP = 1e-7


def central_difference(fun, x, h=FD_STEP):
    """Jacobian d fun / d x by central differences, shape fun(x).shape + x.shape."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(fun(x))
    J = np.zeros(f0.shape + x.shape)
    for i in np.ndindex(x.shape):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        J[(Ellipsis,) + i] = (np.asarray(fun(xp)) - np.asarray(fun(xm))) / (2.0 * h)
    return J


def assert_tangent(analytic, numeric, rtol=1e-5):
    """Entry-wise comparison with an absolute floor relative to the largest entry."""
    numeric = np.asarray(numeric)
    scale = max(float(np.abs(numeric).max()), 1e-30)
    np.testing.assert_allclose(analytic, numeric, rtol=rtol, atol=rtol * scale)


@pytest.fixture
def fd():
    return central_difference


@pytest.fixture
def check_tangent():
    return assert_tangent


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def elastic():
    return ElasticLaw(260000.0, 0.3)


@pytest.fixture
def table1_params(elastic):
    """Table-1 constants with hardening, latent interaction and recovery switched on."""
    return BulkMaterialParams(elastic=elastic, S0=50.0, d0_dot=0.02, m_rate=0.05,
                              Lstar=1.0, zeta=100.0, h_self=10.0, q_latent=1.4)


@pytest.fixture
def double_slip():
    return SlipSet(build_slip_systems([60.0, -60.0]))


@pytest.fixture
def single_slip():
    return SlipSet(build_slip_systems([30.0]))


@pytest.fixture
def minimal_config():
    """Smallest valid document; defaults fill in the rest."""
    return {"case": {"kind": "shear_layer"}, "loading": {"kind": "monotonic"}}


@pytest.fixture
def make_config(minimal_config):
    def _make(**sections):
        data = json.loads(json.dumps(minimal_config))
        for name, values in sections.items():
            data.setdefault(name, {}).update(values)
        return config_from_dict(data)
    return _make


@pytest.fixture
def config_file(tmp_path):
    def _write(data, name="case.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)
    return _write
