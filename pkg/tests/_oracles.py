"""Independent brute-force oracles used only by the tests.

These deliberately avoid the search and eigenvalue paths they are checking:
extremal sizes come from full 2^p subset enumeration (vectorised popcount
identities), and the restricted-isometry oracle evaluates the defining
quadratic form directly on unit vectors.
"""

import numpy as np


def _chunked_subsets(p, chunk=1 << 20):
    total = 1 << p
    for lo in range(0, total, chunk):
        yield np.arange(lo, min(lo + chunk, total), dtype=np.uint64)


def brute_max_transitive_size(tournament) -> int:
    """Max transitive subset size by checking, for every S in 2^p, that the
    number of transitive triples equals C(|S|, 3) (no directed 3-cycle)."""
    p = tournament.p
    out = [np.uint64(m) for m in tournament.out_masks]
    best = 0
    for masks in _chunked_subsets(p):
        sizes = np.bitwise_count(masks).astype(np.int64)
        transitive_triples = np.zeros(masks.shape, dtype=np.int64)
        for v in range(p):
            member = ((masks >> np.uint64(v)) & np.uint64(1)).astype(np.int64)
            deg = np.bitwise_count(masks & out[v]).astype(np.int64)
            transitive_triples += member * (deg * (deg - 1) // 2)
        ok = transitive_triples == sizes * (sizes - 1) * (sizes - 2) // 6
        if ok.any():
            best = max(best, int(sizes[ok].max()))
    return best


def brute_max_clique_size(graph) -> int:
    """Clique number by checking sum of within-subset degrees = |S|(|S|-1)."""
    p = graph.p
    adj = [np.uint64(m) for m in graph.adj]
    best = 0
    for masks in _chunked_subsets(p):
        sizes = np.bitwise_count(masks).astype(np.int64)
        degree_sum = np.zeros(masks.shape, dtype=np.int64)
        for v in range(p):
            member = ((masks >> np.uint64(v)) & np.uint64(1)).astype(np.int64)
            deg = np.bitwise_count(masks & adj[v]).astype(np.int64)
            degree_sum += member * deg
        ok = degree_sum == sizes * (sizes - 1)
        if ok.any():
            best = max(best, int(sizes[ok].max()))
    return best


def _mask_to_set(mask):
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def brute_extremal_sets(masks_ok_fn, p, size):
    """All subsets of a given size passing the predicate, as sorted tuples."""
    found = []
    for masks in _chunked_subsets(p):
        sizes = np.bitwise_count(masks).astype(np.int64)
        ok = masks_ok_fn(masks) & (sizes == size)
        for m in masks[ok]:
            found.append(_mask_to_set(int(m)))
    return found


def brute_transitive_sets(tournament, size):
    p = tournament.p
    out = [np.uint64(m) for m in tournament.out_masks]

    def ok(masks):
        sizes = np.bitwise_count(masks).astype(np.int64)
        triples = np.zeros(masks.shape, dtype=np.int64)
        for v in range(p):
            member = ((masks >> np.uint64(v)) & np.uint64(1)).astype(np.int64)
            deg = np.bitwise_count(masks & out[v]).astype(np.int64)
            triples += member * (deg * (deg - 1) // 2)
        return triples == sizes * (sizes - 1) * (sizes - 2) // 6

    return brute_extremal_sets(ok, p, size)


def brute_clique_sets(graph, size):
    p = graph.p
    adj = [np.uint64(m) for m in graph.adj]

    def ok(masks):
        sizes = np.bitwise_count(masks).astype(np.int64)
        dsum = np.zeros(masks.shape, dtype=np.int64)
        for v in range(p):
            member = ((masks >> np.uint64(v)) & np.uint64(1)).astype(np.int64)
            deg = np.bitwise_count(masks & adj[v]).astype(np.int64)
            dsum += member * deg
        return dsum == sizes * (sizes - 1)

    return brute_extremal_sets(ok, p, size)


def rip_direct_oracle(entries, support, n_samples=10_000, seed=0, iters=200):
    """Max | ||M x||^2 - 1 | over unit vectors on a support, evaluated directly.

    Seeded random complex unit vectors plus Rayleigh ascent/descent built
    from products with the matrix itself (no eigendecomposition), so the
    value is a certified lower bound on the spectral deviation.
    """
    cols = entries[:, list(support)]
    k = cols.shape[1]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n_samples, k)) + 1j * rng.standard_normal((n_samples, k))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    energies = np.linalg.norm(x @ cols.T, axis=1) ** 2
    best = float(np.abs(energies - 1.0).max())

    def quad(v):
        image = cols @ v
        return float(np.real(np.vdot(image, image)))

    # toward lambda_max: v <- normalize(M^H M v)
    v = x[int(energies.argmax())].copy()
    for _ in range(iters):
        w = np.conj(cols.T) @ (cols @ v)
        norm = np.linalg.norm(w)
        if norm == 0:
            break
        v = w / norm
        best = max(best, abs(quad(v) - 1.0))
    # toward lambda_min: v <- normalize(sigma v - M^H M v), sigma > lambda_max
    sigma = k + 2.0
    v = x[int(energies.argmin())].copy()
    for _ in range(iters):
        w = sigma * v - np.conj(cols.T) @ (cols @ v)
        norm = np.linalg.norm(w)
        if norm == 0:
            break
        v = w / norm
        best = max(best, abs(quad(v) - 1.0))
    return best
