"""
Dirichlet conditions and affine ties, eliminated by a leader-follower map.

Every constraint is affine in the load factor ``lam``:

- Dirichlet  ``d[i] = base + scale * lam``
- tie        ``d[f] = d[l] + base + scale * lam``

Ties are merged with a weighted union-find, so chains and cycles of ties
(periodic corners, duplicated interface nodes on periodic edges) resolve to a
single free unknown. A redundant tie is accepted when it agrees with the ones
already present and rejected otherwise.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import scipy.sparse as sp

from ..core.errorhandler import ConfigError, ErrorCode

_TOL = 1e-12


def _close(a: Tuple[float, float], b: Tuple[float, float]) -> bool:
    return all(abs(x - y) <= _TOL * (1.0 + abs(x) + abs(y)) for x, y in zip(a, b))


@dataclass
class ConstraintMap:
    """
    ``d_full = T @ d_free + const_base + const_scale * lam``.

    Attributes:
        free_col: (n,) column of each dof in ``d_free``, -1 for prescribed dofs
        const_base, const_scale: (n,) affine parts
        T: (n, n_free) sparse selection matrix
        rep: (n_free,) one representative dof per free column
    """
    n_dofs: int
    n_free: int
    free_col: np.ndarray
    const_base: np.ndarray
    const_scale: np.ndarray
    T: sp.csr_matrix
    rep: np.ndarray

    @property
    def prescribed(self) -> np.ndarray:
        return np.flatnonzero(self.free_col < 0)

    def expand(self, d_free: np.ndarray, lam: float) -> np.ndarray:
        return self.T @ d_free + self.const_base + self.const_scale * lam

    def restrict(self, d_full: np.ndarray) -> np.ndarray:
        return np.asarray(d_full)[self.rep].copy()

    def reduce_vector(self, r: np.ndarray) -> np.ndarray:
        return self.T.T @ r

    def reduce_matrix(self, K) -> sp.csc_matrix:
        return (self.T.T @ K @ self.T).tocsc()


class ConstraintSet:
    """Mutable collection of constraints for one mesh."""

    def __init__(self, n_dofs: int):
        self.n_dofs = int(n_dofs)
        self.dirichlet: List[Tuple[int, float, float]] = []
        self.ties: List[Tuple[int, int, float, float]] = []

    def add_dirichlet(self, dofs, base=0.0, scale=0.0) -> None:
        dofs = np.atleast_1d(np.asarray(dofs, dtype=int))
        base = np.broadcast_to(np.asarray(base, dtype=float), dofs.shape)
        scale = np.broadcast_to(np.asarray(scale, dtype=float), dofs.shape)
        self._check_range(dofs)
        self.dirichlet.extend(zip(dofs.tolist(), base.tolist(), scale.tolist()))

    def add_tie(self, followers, leaders, base=0.0, scale=0.0) -> None:
        followers = np.atleast_1d(np.asarray(followers, dtype=int))
        leaders = np.atleast_1d(np.asarray(leaders, dtype=int))
        if followers.shape != leaders.shape:
            raise ConfigError(ErrorCode.CFG_CONFLICTING_CONSTRAINTS,
                              "Tie follower and leader lists differ in length")
        base = np.broadcast_to(np.asarray(base, dtype=float), followers.shape)
        scale = np.broadcast_to(np.asarray(scale, dtype=float), followers.shape)
        self._check_range(followers)
        self._check_range(leaders)
        self.ties.extend(zip(followers.tolist(), leaders.tolist(), base.tolist(), scale.tolist()))

    def hold(self, dofs, values) -> None:
        """Freeze ``dofs`` at their current ``values`` for the rest of the run."""
        self.add_dirichlet(dofs, base=values, scale=0.0)

    def _check_range(self, dofs: np.ndarray) -> None:
        if dofs.size and (dofs.min() < 0 or dofs.max() >= self.n_dofs):
            raise ConfigError(ErrorCode.CFG_CONFLICTING_CONSTRAINTS,
                              "Constraint refers to a dof outside the mesh")

    def build(self) -> ConstraintMap:
        """
        Resolve all constraints.

        Raises:
            ConfigError: Contradicting ties or Dirichlet values
        """
        n = self.n_dofs
        parent = np.arange(n)
        off_b = np.zeros(n)
        off_s = np.zeros(n)

        def find(i):
            # returns root and the offset d_i = d_root + offset
            path = []
            while parent[i] != i:
                path.append(i)
                i = parent[i]
            root = i
            acc_b = acc_s = 0.0
            for j in reversed(path):
                acc_b += off_b[j]
                acc_s += off_s[j]
                off_b[j], off_s[j] = acc_b, acc_s
                parent[j] = root
            return root

        for f, l, b, s in self.ties:
            rf, rl = find(f), find(l)
            of = (off_b[f] if f != rf else 0.0, off_s[f] if f != rf else 0.0)
            ol = (off_b[l] if l != rl else 0.0, off_s[l] if l != rl else 0.0)
            if rf == rl:
                if not _close(of, (ol[0] + b, ol[1] + s)):
                    raise ConfigError(
                        ErrorCode.CFG_CONFLICTING_CONSTRAINTS,
                        f"Tie between dofs {f} and {l} contradicts existing ties"
                    )
                continue
            parent[rf] = rl
            off_b[rf] = ol[0] + b - of[0]
            off_s[rf] = ol[1] + s - of[1]

        roots = np.array([find(i) for i in range(n)])
        off_b[roots == np.arange(n)] = 0.0
        off_s[roots == np.arange(n)] = 0.0

        fixed = {}
        for i, b, s in self.dirichlet:
            r = roots[i]
            value = (b - off_b[i], s - off_s[i])
            if r in fixed and not _close(fixed[r], value):
                raise ConfigError(
                    ErrorCode.CFG_CONFLICTING_CONSTRAINTS,
                    f"Dirichlet value on dof {i} contradicts another condition"
                )
            fixed[r] = value

        root_ids = np.unique(roots)
        free_roots = np.array([r for r in root_ids if r not in fixed], dtype=int)
        col_of_root = -np.ones(n, dtype=int)
        col_of_root[free_roots] = np.arange(len(free_roots))

        free_col = col_of_root[roots]
        root_b = np.zeros(n)
        root_s = np.zeros(n)
        for r, (b, s) in fixed.items():
            root_b[r], root_s[r] = b, s
        const_base = off_b + root_b[roots]
        const_scale = off_s + root_s[roots]

        rows = np.flatnonzero(free_col >= 0)
        T = sp.csr_matrix((np.ones(len(rows)), (rows, free_col[rows])), shape=(n, len(free_roots)))
        return ConstraintMap(n_dofs=n, n_free=len(free_roots), free_col=free_col,
                             const_base=const_base, const_scale=const_scale, T=T, rep=free_roots)

    def describe(self) -> List[str]:
        """Plain-text listing for mesh dumps."""
        lines = [f"dirichlet {i} {b:.17g} {s:.17g}" for i, b, s in self.dirichlet]
        lines += [f"tie {f} {l} {b:.17g} {s:.17g}" for f, l, b, s in self.ties]
        return lines
