import numpy as np
import pytest

from geopulse.embedding import _bucket_sign, _tokens, embed_default, l2_normalize, reduce
from geopulse.errors import DegenerateCovariance, EmptyCorpus


def cosine(u, v):
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(u @ v / (nu * nv))


def test_identical_texts_identical_vectors():
    V = embed_default(["stay home stay safe", "stay home stay safe"], dim=64)
    assert np.array_equal(V[0], V[1])
    assert cosine(V[0], V[1]) == pytest.approx(1.0)


def test_token_disjoint_texts_orthogonal_without_collisions():
    t1 = "alpha beta gamma"
    t2 = "delta epsilon zeta"
    dim = 4096
    buckets1 = {_bucket_sign(tok, dim)[0] for tok in _tokens(t1)}
    buckets2 = {_bucket_sign(tok, dim)[0] for tok in _tokens(t2)}
    assert not buckets1 & buckets2  # no collisions at this dim
    V = embed_default([t1, t2], dim=dim)
    assert cosine(V[0], V[1]) == 0.0


def test_single_document_corpus_norm_one():
    V = embed_default(["one single document here"], dim=128)
    assert np.linalg.norm(V[0]) == pytest.approx(1.0, abs=1e-9)


def test_unigrams_and_bigrams_present():
    toks = _tokens("a b c")
    assert toks == ["a", "b", "c", "a b", "b c"]


def test_empty_corpus_raises():
    with pytest.raises(EmptyCorpus):
        embed_default([], dim=16)


def test_all_whitespace_text_gives_zero_vector():
    V = embed_default(["real words here", "   "], dim=32)
    assert np.linalg.norm(V[1]) == 0.0


def test_determinism_across_calls():
    texts = ["covid cases rising", "footy is back", "vaccine rollout starts"]
    a = embed_default(texts, dim=256)
    b = embed_default(list(texts), dim=256)
    assert np.array_equal(a, b)


def test_l2_normalize_keeps_zero_rows():
    M = np.array([[3.0, 4.0], [0.0, 0.0]])
    N = l2_normalize(M)
    assert np.allclose(N[0], [0.6, 0.8])
    assert np.array_equal(N[1], [0.0, 0.0])


def test_reduce_exact_subspace_reconstruction():
    rng = np.random.default_rng(0)
    basis = rng.standard_normal((2, 5))
    coords = rng.standard_normal((40, 2))
    X = coords @ basis
    Y = reduce(X, 2)
    # distances in the plane are preserved: reconstruction error of the
    # projection is zero because the data is exactly 2-D
    centered = X - X.mean(axis=0)
    gram_x = centered @ centered.T
    gram_y = Y @ Y.T
    assert np.max(np.abs(gram_x - gram_y)) < 1e-9


def test_reduce_identical_points_degenerate():
    X = np.ones((10, 4))
    with pytest.raises(DegenerateCovariance):
        reduce(X, 2)


def test_reduce_variances_match_eigendecomposition_oracle():
    rng = np.random.default_rng(42)
    X = rng.standard_normal((50, 16)) * rng.uniform(0.5, 3.0, size=16)
    Y = reduce(X, 5)
    centered = X - X.mean(axis=0)
    # brute-force oracle: svd-based eigenvalues of the covariance
    s = np.linalg.svd(centered, compute_uv=False)
    eig = (s ** 2) / (X.shape[0] - 1)
    proj_var = Y.var(axis=0, ddof=1)
    assert np.allclose(proj_var, eig[:5], atol=1e-8)
    # projected components are uncorrelated
    cov = np.cov(Y.T)
    off = cov - np.diag(np.diag(cov))
    assert np.max(np.abs(off)) < 1e-8


def test_reduce_sign_convention_deterministic():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((30, 8))
    a = reduce(X, 3)
    b = reduce(X.copy(), 3)
    assert np.array_equal(a, b)


def test_reduce_bad_target_dim():
    X = np.zeros((5, 4))
    with pytest.raises(ValueError):
        reduce(X, 4)
    with pytest.raises(ValueError):
        reduce(X, 0)
