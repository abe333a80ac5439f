"""Exact linear algebra over the Scalar field.

Pivots must be invertible Scalars, i.e. free of jets and trig atoms.
Every system arising from the bundled models admits such pivots; if one
does not, :class:`NoInvertiblePivot` is raised instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .scalar import ZERO, ONE, Scalar


class NoInvertiblePivot(ArithmeticError):
    pass


class SingularMatrix(ArithmeticError):
    pass


@dataclass
class LinearSolution:
    unknowns: list
    particular: dict | None  # None when inconsistent
    kernel: list = field(default_factory=list)
    inconsistent: list = field(default_factory=list)  # (tag, c) for rows reading 0 = c

    @property
    def consistent(self) -> bool:
        return self.particular is not None


def solve(rows: list, unknowns: list, tags: list | None = None) -> LinearSolution:
    """Solve ``Σ_u row[u] * x_u = row['rhs']`` for every row.

    Free variables are set to zero in the particular solution; the kernel
    is returned as a list of ``{unknown: Scalar}`` basis vectors.
    Rows are dicts keyed by unknowns plus the key ``'rhs'``.  With ``tags``
    the inconsistent rows are reported as ``(tag, residual)`` pairs.
    """
    work = [dict((k, v) for k, v in r.items() if v) for r in rows]
    row_tags = list(tags) if tags is not None else list(range(len(rows)))
    pivots: list = []  # (unknown, row)
    remaining = list(unknowns)
    while True:
        # first unknown (in the given order) owning an invertible entry
        choice = None
        for u in remaining:
            for idx, r in enumerate(work):
                c = r.get(u)
                if c is not None and c.is_jet_free:
                    choice = (u, idx)
                    break
            if choice:
                break
        if choice is None:
            stuck = [u for u in remaining if any(u in r for r in work)]
            if stuck:
                raise NoInvertiblePivot(f"no invertible pivot for unknowns {stuck}")
            break
        u, idx = choice
        remaining.remove(u)
        prow = work.pop(idx)
        row_tags.pop(idx)
        inv = ONE / prow[u]
        prow = {k: v * inv for k, v in prow.items()}
        for r in work:
            _eliminate(r, prow, u)
        for _, r in pivots:
            _eliminate(r, prow, u)
        pivots.append((u, prow))
    bad = [(t, r.get("rhs", ZERO)) for t, r in zip(row_tags, work) if r]
    if bad:
        return LinearSolution(list(unknowns), None, [], bad)
    pivot_set = {u for u, _ in pivots}
    part = {u: r.get("rhs", ZERO) for u, r in pivots}
    kernel = []
    for f in unknowns:
        if f in pivot_set:
            continue
        vec = {f: ONE}
        for u, r in pivots:
            c = r.get(f)
            if c:
                vec[u] = -c
        kernel.append(vec)
    return LinearSolution(list(unknowns), part, kernel)


def _eliminate(r: dict, prow: dict, u):
    c = r.get(u)
    if not c:
        return
    for k, v in prow.items():
        nv = r.get(k, ZERO) - c * v
        if nv:
            r[k] = nv
        else:
            r.pop(k, None)


def inverse(mat: list) -> list:
    """Inverse of a square list-of-lists Scalar matrix."""
    n = len(mat)
    aug = [[Scalar.of(x) for x in row] + [ONE if i == j else ZERO for j in range(n)]
           for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] and aug[r][col].is_jet_free), None)
        if piv is None:
            if any(aug[r][col] for r in range(col, n)):
                raise NoInvertiblePivot(f"column {col} has no invertible pivot")
            raise SingularMatrix("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = ONE / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def matmul(a: list, b: list) -> list:
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            s = ZERO
            for k in range(m):
                if a[i][k] and b[k][j]:
                    s = s + a[i][k] * b[k][j]
            row.append(s)
        out.append(row)
    return out


def is_identity(a: list) -> bool:
    return all((a[i][j] == (ONE if i == j else ZERO)) for i in range(len(a)) for j in range(len(a)))
