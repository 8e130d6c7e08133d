"""Knuth's Algorithm X over a dict-of-sets incidence structure."""
from __future__ import annotations

from .errors import BudgetExceeded


def exact_cover(universe, subsets: list, budget: int | None = None):
    """First exact cover of ``universe`` by members of ``subsets``, or ``None``.

    ``subsets`` is an ordered list of iterables; the answer lists their indices
    in the order they were chosen.  Ties in the column heuristic are broken by
    the smallest element, so the result depends only on the input order.
    ``budget`` caps the number of search nodes visited.
    """
    X = {e: set() for e in universe}
    Y = {}
    for i, s in enumerate(subsets):
        s = list(s)
        if any(e not in X for e in s):
            continue
        Y[i] = s
        for e in s:
            X[e].add(i)

    visited = 0
    solution: list[int] = []

    def select(i):
        cols = []
        for e in Y[i]:
            for k in X[e]:
                for f in Y[k]:
                    if f != e:
                        X[f].discard(k)
            cols.append(X.pop(e))
        return cols

    def deselect(i, cols):
        for e in reversed(Y[i]):
            X[e] = cols.pop()
            for k in X[e]:
                for f in Y[k]:
                    if f != e:
                        X[f].add(k)

    def search():
        nonlocal visited
        if not X:
            return True
        visited += 1
        if budget is not None and visited > budget:
            raise BudgetExceeded(f"exact-cover search exceeded {budget} nodes")
        col = min(X, key=lambda e: (len(X[e]), e))
        for i in sorted(X[col]):
            cols = select(i)
            solution.append(i)
            if search():
                return True
            solution.pop()
            deselect(i, cols)
        return False

    return list(solution) if search() else None
