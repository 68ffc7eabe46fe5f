"""Exact linear algebra over the integers and prime fields.

Arbitrary-precision Python integers throughout; no floating point.  Sizes are
desk scale (chain bases of at most a few thousand columns), so dense
elimination is adequate.
"""

from __future__ import annotations

__all__ = [
    "columns_to_dense",
    "smith_diagonal",
    "integer_rank",
    "rank_mod_p",
    "rank_over_field",
]


def columns_to_dense(columns, n_rows):
    """Sparse columns ({row: coeff}) to a dense list-of-rows integer matrix."""
    M = [[0] * len(columns) for _ in range(n_rows)]
    for j, col in enumerate(columns):
        for i, v in col.items():
            M[i][j] = int(v)
    return M


def _find_pivot(M, s, m, n):
    best = None
    best_val = None
    for i in range(s, m):
        row = M[i]
        for j in range(s, n):
            v = row[j]
            if v != 0 and (best_val is None or abs(v) < best_val):
                best = (i, j)
                best_val = abs(v)
                if best_val == 1:
                    return best
    return best


def smith_diagonal(M):
    """Diagonal of the Smith normal form of an integer matrix.

    Returns the list of non-negative diagonal entries d_1 | d_2 | ... with
    zeros trimmed; the number of nonzero entries is the rank.
    """
    M = [list(map(int, row)) for row in M]
    m = len(M)
    n = len(M[0]) if m else 0
    diag = []
    s = 0
    while s < min(m, n):
        piv = _find_pivot(M, s, m, n)
        if piv is None:
            break
        pi, pj = piv
        if pi != s:
            M[s], M[pi] = M[pi], M[s]
        if pj != s:
            for row in M:
                row[s], row[pj] = row[pj], row[s]
        # clear row and column s; restart if a remainder pops up
        while True:
            pivot = M[s][s]
            done = True
            for i in range(s + 1, m):
                if M[i][s] != 0:
                    q = M[i][s] // pivot
                    if q:
                        row_i, row_s = M[i], M[s]
                        for j in range(s, n):
                            row_i[j] -= q * row_s[j]
                    if M[i][s] != 0:
                        M[s], M[i] = M[i], M[s]
                        done = False
                        break
            if not done:
                continue
            for j in range(s + 1, n):
                if M[s][j] != 0:
                    q = M[s][j] // pivot
                    if q:
                        for i in range(s, m):
                            M[i][j] -= q * M[i][s]
                    if M[s][j] != 0:
                        for i in range(s, m):
                            M[i][s], M[i][j] = M[i][j], M[i][s]
                        done = False
                        break
            if done:
                break
        pivot = M[s][s]
        # enforce divisibility of later entries by the current pivot
        fixed = False
        for i in range(s + 1, m):
            if fixed:
                break
            for j in range(s + 1, n):
                if M[i][j] % pivot != 0:
                    row_s, row_i = M[s], M[i]
                    for jj in range(s, n):
                        row_s[jj] += row_i[jj]
                    fixed = True
                    break
        if fixed:
            continue
        diag.append(abs(pivot))
        s += 1
    return diag


def integer_rank(M):
    """Rank over Q of an integer matrix via fraction-free (Bareiss) elimination."""
    M = [list(map(int, row)) for row in M]
    m = len(M)
    n = len(M[0]) if m else 0
    rank = 0
    prev = 1
    r = 0
    for c in range(n):
        if r >= m:
            break
        piv = None
        for i in range(r, m):
            if M[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            M[r], M[piv] = M[piv], M[r]
        pivot = M[r][c]
        for i in range(r + 1, m):
            row_i, row_r = M[i], M[r]
            f = row_i[c]
            for j in range(c, n):
                row_i[j] = (row_i[j] * pivot - f * row_r[j]) // prev
        prev = pivot
        r += 1
        rank += 1
    return rank


def rank_mod_p(M, p):
    """Rank of an integer matrix over the prime field Z/p."""
    M = [[int(v) % p for v in row] for row in M]
    m = len(M)
    n = len(M[0]) if m else 0
    rank = 0
    r = 0
    for c in range(n):
        if r >= m:
            break
        piv = None
        for i in range(r, m):
            if M[i][c] % p != 0:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [(v * inv) % p for v in M[r]]
        for i in range(m):
            if i != r and M[i][c] % p != 0:
                f = M[i][c]
                row_i, row_r = M[i], M[r]
                for j in range(c, n):
                    row_i[j] = (row_i[j] - f * row_r[j]) % p
        r += 1
        rank += 1
    return rank


def rank_over_field(M, prime=None):
    """Rank over Q (default) or over Z/prime."""
    if prime is None:
        return integer_rank(M)
    return rank_mod_p(M, prime)
