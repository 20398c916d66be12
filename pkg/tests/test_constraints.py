"""Dirichlet conditions and affine ties resolved by the leader-follower map."""

import numpy as np
import pytest
import scipy.sparse as sp

from gradplast.core.errorhandler import ConfigError, ErrorCode
from gradplast.fem.constraints import ConstraintSet


class TestBuild:
    def test_unconstrained_is_identity(self):
        cmap = ConstraintSet(4).build()
        assert cmap.n_free == 4
        d = np.arange(4.0)
        np.testing.assert_allclose(cmap.expand(d, 1.0), d)
        np.testing.assert_array_equal(cmap.restrict(d), d)

    def test_dirichlet_scales_with_load(self):
        cs = ConstraintSet(3)
        cs.add_dirichlet(1, base=0.5, scale=2.0)
        cmap = cs.build()
        assert cmap.n_free == 2
        np.testing.assert_array_equal(cmap.prescribed, [1])
        np.testing.assert_allclose(cmap.expand(np.array([7.0, 9.0]), 0.25), [7.0, 1.0, 9.0])

    def test_affine_tie(self):
        cs = ConstraintSet(2)
        cs.add_tie(1, 0, base=0.1, scale=3.0)
        cmap = cs.build()
        assert cmap.n_free == 1
        d = cmap.expand(np.array([2.0]), 0.5)
        np.testing.assert_allclose(d, [2.0, 2.0 + 0.1 + 1.5])

    def test_chained_ties_accumulate_offsets(self):
        cs = ConstraintSet(3)
        cs.add_tie(1, 0, base=1.0)
        cs.add_tie(2, 1, base=2.0)
        d = cs.build().expand(np.array([5.0]), 0.0)
        np.testing.assert_allclose(d, [5.0, 6.0, 8.0])

    def test_consistent_cycle_accepted(self):
        cs = ConstraintSet(3)
        cs.add_tie(1, 0, base=1.0)
        cs.add_tie(2, 1, base=2.0)
        cs.add_tie(2, 0, base=3.0)
        assert cs.build().n_free == 1

    def test_contradicting_cycle_rejected(self):
        cs = ConstraintSet(3)
        cs.add_tie(1, 0, base=1.0)
        cs.add_tie(2, 1, base=2.0)
        cs.add_tie(2, 0, base=4.0)
        with pytest.raises(ConfigError) as exc:
            cs.build()
        assert exc.value.error_code == ErrorCode.CFG_CONFLICTING_CONSTRAINTS

    def test_dirichlet_on_follower_fixes_group(self):
        cs = ConstraintSet(3)
        cs.add_tie(1, 0, base=1.0)
        cs.add_tie(2, 1, base=2.0)
        cs.add_dirichlet(2, base=5.0)
        cmap = cs.build()
        assert cmap.n_free == 0
        np.testing.assert_allclose(cmap.expand(np.zeros(0), 0.0), [2.0, 3.0, 5.0])

    def test_conflicting_dirichlet_values(self):
        cs = ConstraintSet(2)
        cs.add_tie(1, 0)
        cs.add_dirichlet(0, base=1.0)
        cs.add_dirichlet(1, base=2.0)
        with pytest.raises(ConfigError):
            cs.build()

    def test_repeated_dirichlet_agrees(self):
        cs = ConstraintSet(2)
        cs.add_dirichlet([0, 0], base=1.0)
        assert cs.build().n_free == 1

    def test_out_of_range(self):
        cs = ConstraintSet(2)
        with pytest.raises(ConfigError):
            cs.add_dirichlet(2)
        with pytest.raises(ConfigError):
            cs.add_tie([0, 1], [1])

    def test_hold_freezes_values(self):
        cs = ConstraintSet(3)
        cs.hold([0, 2], np.array([0.3, -0.1]))
        cmap = cs.build()
        np.testing.assert_allclose(cmap.expand(np.array([4.0]), 10.0), [0.3, 4.0, -0.1])


class TestReduction:
    def test_reduced_operators(self, rng):
        cs = ConstraintSet(4)
        cs.add_tie(3, 1)
        cs.add_dirichlet(0)
        cmap = cs.build()
        A = rng.normal(size=(4, 4))
        r = rng.normal(size=4)
        T = cmap.T.toarray()
        np.testing.assert_allclose(T, [[0, 0], [1, 0], [0, 1], [1, 0]])
        np.testing.assert_allclose(cmap.reduce_matrix(sp.csr_matrix(A)).toarray(), T.T @ A @ T)
        np.testing.assert_allclose(cmap.reduce_vector(r), [r[1] + r[3], r[2]])

    def test_restrict_expand(self):
        cs = ConstraintSet(4)
        cs.add_tie(3, 1, base=0.5)
        cs.add_dirichlet(0, scale=1.0)
        cmap = cs.build()
        d = cmap.expand(np.array([1.0, 2.0]), 3.0)
        np.testing.assert_allclose(d, [3.0, 1.0, 2.0, 1.5])
        np.testing.assert_allclose(cmap.restrict(d), [1.0, 2.0])


def test_describe_lists_everything():
    cs = ConstraintSet(3)
    cs.add_dirichlet(0, base=0.0, scale=1.0)
    cs.add_tie(2, 1, base=0.5)
    assert cs.describe() == ["dirichlet 0 0 1", "tie 2 1 0.5 0"]
