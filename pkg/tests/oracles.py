"""Independent reference computations, deliberately naive."""

import numpy as np


def gauss_solve(A, B):
    """Solve A X = B by Gaussian elimination with partial pivoting (pure Python loops)."""
    A = [list(map(float, row)) for row in np.asarray(A)]
    B = np.asarray(B, dtype=float)
    B = [list(map(float, row)) for row in (B.reshape(len(A), -1))]
    n = len(A)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r][col]))
        A[col], A[piv] = A[piv], A[col]
        B[col], B[piv] = B[piv], B[col]
        for r in range(col + 1, n):
            f = A[r][col] / A[col][col]
            for c in range(col, n):
                A[r][c] -= f * A[col][c]
            for c in range(len(B[r])):
                B[r][c] -= f * B[col][c]
    X = [[0.0] * len(B[0]) for _ in range(n)]
    for r in range(n - 1, -1, -1):
        for c in range(len(B[0])):
            s = B[r][c] - sum(A[r][k] * X[k][c] for k in range(r + 1, n))
            X[r][c] = s / A[r][r]
    return np.array(X)


def pinv_by_columns(M):
    """W with column i solving (M^T M) w_i = M^T e_i."""
    M = np.asarray(M, dtype=float)
    gram = M.T @ M
    cols = []
    for i in range(M.shape[0]):
        e = np.zeros(M.shape[0])
        e[i] = 1.0
        cols.append(gauss_solve(gram, (M.T @ e)[:, None])[:, 0])
    return np.column_stack(cols)


def energy_fd_gradient(M, X, Y, h=1e-5):
    """Central difference gradient of ||X - M Y||^2."""
    def E(y):
        r = X - M @ y
        return float(r @ r)

    g = np.zeros_like(Y)
    for i in range(len(Y)):
        up, dn = Y.copy(), Y.copy()
        up[i] += h
        dn[i] -= h
        g[i] = (E(up) - E(dn)) / (2 * h)
    return g


def similarity_loops(a, b):
    mins = sum(min(x, y) for x, y in zip(a, b))
    maxs = sum(max(x, y) for x, y in zip(a, b))
    return mins / maxs


def kappa_eig(M):
    ev = np.linalg.eigvalsh(np.asarray(M, float).T @ np.asarray(M, float))
    return float(np.sqrt(ev[-1] / ev[0]))


def random_instance(rng, n_max=64, h_max=16, n_min=None):
    """Full-column-rank nonnegative M (N x H, N >= H) and a positive y* in [0.1, 1]."""
    h = int(rng.integers(1, h_max + 1))
    n = int(rng.integers(max(h, n_min or h), n_max + 1))
    while True:
        M = rng.uniform(0.0, 1.0, size=(n, h))
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] > 1e-10 * s[0]:
            break
    y_star = rng.uniform(0.1, 1.0, size=h)
    return M, y_star
