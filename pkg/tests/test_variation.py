"""
Unit Tests for Variation Measures
=================================
Hand-evaluated examples, the collapse chain TV = DV = IDV = CDV on
undirected graphs, the embedding identity for CDV and finite-difference
checks of the gradients.
"""

import numpy as np
import pytest

from digft import (
    AsymmetryError,
    Graph,
    VariationKind,
    WeightClassError,
    cdv_gradient,
    complex_dv,
    complex_dv_expanded,
    complex_embed,
    dc_vector,
    directed_variation,
    embed_signal,
    idv_gradient,
    indefinite_dv,
    total_variation,
    variation,
    variation_columns,
)
from digft.graph import WeightClass
from digft.spectral import laplacian
from digft.variation import VariationOperator, neg_part, pos_part, variation_gradient_columns


def central_difference(f, u: np.ndarray, h: float = 1e-6) -> np.ndarray:
    grad = np.zeros_like(u, dtype=float)
    for k in range(u.shape[0]):
        step = np.zeros_like(u, dtype=float)
        step[k] = h
        grad[k] = (f(u + step) - f(u - step)) / (2 * h)
    return grad


def min_clip_margin(u: np.ndarray) -> float:
    d = np.abs(u[:, None] - u[None, :])
    return float(np.min(d[~np.eye(u.shape[0], dtype=bool)]))


class TestClipping:
    """Test [s]_+ and [s]_-."""

    @pytest.mark.parametrize("s,pos,neg", [(2.5, 2.5, 0.0), (-3.0, 0.0, 3.0), (0.0, 0.0, 0.0)])
    def test_examples(self, s, pos, neg):
        assert pos_part(s) == pos
        assert neg_part(s) == neg
        assert pos_part(s) - neg_part(s) == s


class TestMeasures:
    """Test the four measures on hand-evaluated examples."""

    def test_tv_two_node(self):
        g = Graph.from_matrix([[0, 1], [1, 0]])
        assert total_variation(g, np.array([1.0, 0.0])) == pytest.approx(1.0)

    def test_tv_constant_signal(self, make_graph):
        g = make_graph(6, "symmetric")
        assert total_variation(g, np.ones(6)) == pytest.approx(0.0)

    def test_tv_matches_quadratic_form(self, make_graph, rng):
        g = make_graph(8, "symmetric")
        x = rng.standard_normal(8)
        assert total_variation(g, x) == pytest.approx(x @ laplacian(g) @ x, abs=1e-9)

    def test_tv_rejects_directed_graph(self, two_node_directed):
        with pytest.raises(AsymmetryError):
            total_variation(two_node_directed, np.array([1.0, 0.0]))

    def test_dv_weighted_edge(self):
        g = Graph.from_matrix([[0, 2], [0, 0]])
        assert directed_variation(g, np.array([3.0, 1.0])) == pytest.approx(8.0)

    def test_dv_against_edge_is_zero(self, two_node_directed):
        assert directed_variation(two_node_directed, np.array([0.0, 1.0])) == 0.0

    def test_dv_asymmetric_in_sign(self, two_node_directed):
        x = np.array([1.0, 0.0])
        assert directed_variation(two_node_directed, x) != directed_variation(two_node_directed, -x)

    def test_dv_rejects_negative_weights(self):
        with pytest.raises(WeightClassError):
            directed_variation(Graph.from_matrix([[0, -1], [0, 0]]), np.array([1.0, 0.0]))

    def test_idv_negative_edge(self):
        g = Graph.from_matrix([[0, -1], [0, 0]])
        assert indefinite_dv(g, np.array([0.0, 1.0])) == pytest.approx(1.0)
        assert indefinite_dv(g, np.array([1.0, 0.0])) == 0.0

    def test_idv_equals_dv_on_nonnegative(self, make_graph, rng):
        g = make_graph(7, "nonnegative")
        x = rng.standard_normal(7)
        assert indefinite_dv(g, x) == pytest.approx(directed_variation(g, x), rel=1e-12)

    def test_idv_rejects_complex_graph(self):
        with pytest.raises(WeightClassError):
            indefinite_dv(Graph.from_matrix([[0, 1j], [0, 0]]), np.array([1.0, 0.0]))

    def test_idv_rejects_complex_signal(self, two_node_directed):
        with pytest.raises(WeightClassError):
            indefinite_dv(two_node_directed, np.array([1j, 0.0]))

    def test_cdv_imaginary_edge(self):
        g = Graph.from_matrix([[0, 1j], [0, 0]])
        assert complex_dv(g, np.array([1j, 0.0])) == pytest.approx(1.0)

    def test_cdv_equals_idv_for_real_inputs(self, make_graph, rng):
        g = make_graph(7, "indefinite")
        x = rng.standard_normal(7)
        assert complex_dv(g, x) == pytest.approx(indefinite_dv(g, x), rel=1e-12)

    def test_cdv_splits_on_real_graph(self, make_graph, rng):
        g = make_graph(6, "indefinite")
        x = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        expected = indefinite_dv(g, x.real) + indefinite_dv(g, x.imag)
        assert complex_dv(g, x) == pytest.approx(expected, rel=1e-12)

    def test_dispatch(self, two_node_directed):
        x = np.array([1.0, 0.0])
        assert variation(VariationKind.IDV, two_node_directed, x) == directed_variation(two_node_directed, x)
        with pytest.raises(AsymmetryError):
            variation(VariationKind.TV, two_node_directed, x)


class TestCollapseChain:
    """TV = DV = IDV = CDV on undirected nonnegative graphs."""

    def test_random_undirected_graphs(self, make_graph, rng):
        for _ in range(100):
            g = make_graph(16, "symmetric", p=0.3)
            x = rng.standard_normal(16)
            tv = total_variation(g, x)
            for value in (directed_variation(g, x), indefinite_dv(g, x), complex_dv(g, x)):
                assert value == pytest.approx(tv, abs=1e-9, rel=1e-12)

    def test_column_kernel_matches(self, make_graph, rng):
        g = make_graph(10, "symmetric")
        u = rng.standard_normal((10, 4))
        tv = variation_columns(VariationKind.TV, g, u)
        idv = variation_columns(VariationKind.IDV, g, u)
        assert np.allclose(tv, idv, atol=1e-9)


class TestProperties:
    """Nonnegativity and scaling."""

    @pytest.mark.parametrize("weights,kind", [
        ("nonnegative", VariationKind.DV),
        ("indefinite", VariationKind.IDV),
        ("complex", VariationKind.CDV),
    ])
    def test_nonnegative_and_scale(self, make_graph, rng, weights, kind):
        g = make_graph(8, weights)
        for _ in range(20):
            x = rng.standard_normal(8)
            if kind == VariationKind.CDV:
                x = x + 1j * rng.standard_normal(8)
            value = variation(kind, g, x)
            assert value >= 0
            assert variation(kind, g, 2.5 * x) == pytest.approx(6.25 * value, rel=1e-12, abs=1e-12)


class TestEmbedding:
    """Test the real embedding of complex graphs and signals."""

    def test_real_graph_block_diagonal(self, make_graph):
        g = make_graph(4, "indefinite")
        a = complex_embed(g).a_tilde
        assert np.array_equal(a[:4, :4], g.real_adj)
        assert np.array_equal(a[4:, 4:], g.real_adj)
        assert not a[:4, 4:].any() and not a[4:, :4].any()

    def test_imaginary_edge_entries(self):
        a = complex_embed(Graph.from_matrix([[0, 1j], [0, 0]])).a_tilde
        expected = np.zeros((4, 4))
        expected[0, 3] = -1
        expected[2, 1] = 1
        assert np.array_equal(a, expected)

    def test_embed_signal(self):
        assert np.array_equal(embed_signal(np.array([1j, 0])), [0, 0, 1, 0])

    def test_matrix_vector_product(self, make_graph, rng):
        g = make_graph(6, "complex")
        x = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        y = complex_embed(g).a_tilde @ embed_signal(x)
        assert np.allclose(g.adj @ x, y[:6] + 1j * y[6:], atol=1e-12)

    def test_embedding_preserves_norm(self, rng):
        x = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        x /= np.linalg.norm(x)
        assert np.linalg.norm(embed_signal(x)) == pytest.approx(1.0)

    def test_expanded_formula_matches_embedding(self, make_graph, rng):
        """The eight-term CDV sum equals IDV of the embedding."""
        for _ in range(200):
            g = make_graph(16, "complex", p=0.3)
            x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
            assert complex_dv_expanded(g, x) == pytest.approx(complex_dv(g, x), rel=1e-12, abs=1e-12)


class TestDcVector:
    """The zero-variation unit vector."""

    def test_real_constant_for_idv(self, make_graph):
        g = make_graph(6, "indefinite")
        u = dc_vector(6, VariationKind.IDV)
        assert np.linalg.norm(u) == pytest.approx(1.0)
        assert indefinite_dv(g, u) == pytest.approx(0.0, abs=1e-15)

    def test_real_constant_not_zero_cdv_on_imaginary_edge(self):
        g = Graph.from_matrix([[0, -1j], [0, 0]])
        assert complex_dv(g, np.ones(2) / np.sqrt(2)) == pytest.approx(1.0)

    def test_rotated_constant_zero_cdv(self, make_graph):
        g = make_graph(6, "complex")
        assert complex_dv(g, dc_vector(6, VariationKind.CDV)) == pytest.approx(0.0, abs=1e-12)


class TestGradients:
    """Analytic gradients against central differences."""

    def test_idv_single_edge(self, two_node_directed):
        assert np.allclose(idv_gradient(two_node_directed, np.array([1.0, 0.0])), [2.0, -2.0])

    def test_idv_constant_point(self, make_graph):
        g = make_graph(5, "indefinite")
        assert np.allclose(idv_gradient(g, np.ones(5)), 0.0)

    def test_idv_undirected_is_twice_laplacian(self, make_graph, rng):
        g = make_graph(6, "symmetric")
        u = rng.standard_normal(6)
        assert np.allclose(idv_gradient(g, u), 2 * laplacian(g) @ u, atol=1e-10)

    def test_idv_finite_differences(self, make_graph, rng):
        for _ in range(50):
            g = make_graph(8, "indefinite")
            u = rng.standard_normal(8)
            if min_clip_margin(u) < 1e-3:
                continue
            fd = central_difference(lambda v: indefinite_dv(g, v), u)
            analytic = idv_gradient(g, u)
            assert np.allclose(analytic, fd, rtol=1e-5, atol=1e-6)

    def test_cdv_imaginary_edge(self):
        g = Graph.from_matrix([[0, 1j], [0, 0]])
        assert np.allclose(cdv_gradient(g, np.array([1j, 0.0])), [2j, -2.0])

    def test_cdv_real_inputs(self, make_graph, rng):
        g = make_graph(6, "indefinite")
        u = rng.standard_normal(6)
        grad = cdv_gradient(g, u)
        assert np.allclose(grad.imag, 0.0)
        assert np.allclose(grad.real, idv_gradient(g, u))

    def test_cdv_zero_graph(self):
        g = Graph.from_matrix(np.zeros((3, 3)))
        assert np.allclose(cdv_gradient(g, np.array([1, 1j, -1])), 0.0)

    def test_cdv_finite_differences(self, make_graph, rng):
        for _ in range(30):
            g = make_graph(6, "complex")
            u = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            if min_clip_margin(np.concatenate([u.real, u.imag])) < 1e-3:
                continue
            re = central_difference(lambda v: complex_dv(g, v + 1j * u.imag), u.real)
            im = central_difference(lambda v: complex_dv(g, u.real + 1j * v), u.imag)
            grad = cdv_gradient(g, u)
            assert np.allclose(grad.real, re, rtol=1e-5, atol=1e-6)
            assert np.allclose(grad.imag, im, rtol=1e-5, atol=1e-6)

    def test_column_gradients_match_single(self, make_graph, rng):
        g = make_graph(6, "complex")
        op = VariationOperator(VariationKind.CDV, g)
        u = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
        grads = op.gradients(u)
        for k in range(3):
            assert np.allclose(grads[:, k], cdv_gradient(g, u[:, k]))

    def test_dv_columns_on_undirected_graph(self, make_graph, rng):
        """On a symmetric nonnegative graph each column gradient is 2 L u."""
        g = make_graph(6, "symmetric")
        u = rng.standard_normal((6, 4))
        grads = variation_gradient_columns(VariationKind.DV, g, u)
        assert np.allclose(grads, 2 * laplacian(g) @ u, atol=1e-10)


class TestKindCompatibility:
    """Test graph-class requirements per measure."""

    def test_weight_class_names(self, make_graph):
        assert make_graph(5, "complex").weight_class == WeightClass.COMPLEX
