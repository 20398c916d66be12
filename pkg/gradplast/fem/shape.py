"""
Shape functions and quadrature rules.

Q8 node order (corner-first)::

    3 -- 6 -- 2
    |         |
    7         5
    |         |
    0 -- 4 -- 1

Line elements use three nodes ordered (end, middle, end).
"""

import numpy as np

Q8_NODES = np.array([
    (-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0),
    (0.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0),
])

# Local (corner, midside, corner) triples of the four element edges
Q8_EDGES = ((0, 4, 1), (1, 5, 2), (2, 6, 3), (3, 7, 0))


def q8_shape(xi, eta):
    """
    Serendipity shape functions and their natural derivatives.

    Args:
        xi, eta: Natural coordinates, scalars or arrays of equal shape

    Returns:
        tuple: N with shape (..., 8) and dN with shape (..., 8, 2)
    """
    xi = np.asarray(xi, dtype=float)[..., None]
    eta = np.asarray(eta, dtype=float)[..., None]
    xi_i, eta_i = Q8_NODES[:, 0], Q8_NODES[:, 1]
    corner = np.arange(8) < 4
    mid_x = (~corner) & (xi_i == 0.0)

    a = 1.0 + xi * xi_i
    b = 1.0 + eta * eta_i
    N_corner = 0.25 * a * b * (xi * xi_i + eta * eta_i - 1.0)
    dNx_corner = 0.25 * xi_i * b * (2.0 * xi * xi_i + eta * eta_i)
    dNe_corner = 0.25 * eta_i * a * (xi * xi_i + 2.0 * eta * eta_i)

    # midside nodes on eta = +-1 (xi_i = 0) and on xi = +-1 (eta_i = 0)
    N_mx = 0.5 * (1.0 - xi * xi) * b
    dNx_mx = -xi * b
    dNe_mx = 0.5 * (1.0 - xi * xi) * eta_i
    N_my = 0.5 * a * (1.0 - eta * eta)
    dNx_my = 0.5 * xi_i * (1.0 - eta * eta)
    dNe_my = -eta * a

    N = np.where(corner, N_corner, np.where(mid_x, N_mx, N_my))
    dNx = np.where(corner, dNx_corner, np.where(mid_x, dNx_mx, dNx_my))
    dNe = np.where(corner, dNe_corner, np.where(mid_x, dNe_mx, dNe_my))
    return N, np.stack([dNx, dNe], axis=-1)


def gauss_legendre(n: int):
    """Points and weights of the n-point rule on [-1, 1]."""
    return np.polynomial.legendre.leggauss(n)


def gauss_3x3():
    """Tensor-product 3x3 rule: points (9, 2) and weights (9,)."""
    x, w = gauss_legendre(3)
    X, Y = np.meshgrid(x, x, indexing='ij')
    W = np.outer(w, w)
    return np.column_stack([X.ravel(), Y.ravel()]), W.ravel()


def line3_shape(xi):
    """Quadratic line shape functions (..., 3) and derivatives (..., 3)."""
    xi = np.asarray(xi, dtype=float)
    N = np.stack([0.5 * xi * (xi - 1.0), 1.0 - xi * xi, 0.5 * xi * (xi + 1.0)], axis=-1)
    dN = np.stack([xi - 0.5, -2.0 * xi, xi + 0.5], axis=-1)
    return N, dN
