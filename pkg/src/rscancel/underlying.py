"""Underlying graphs: 8-regular graphs given by four permutations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from . import _kernels


class GenerationError(RuntimeError):
    def __init__(self, msg, best_girth=None):
        super().__init__(msg)
        self.best_girth = best_girth


class UnderlyingFormatError(ValueError):
    pass


def moore_bound(degree: int, girth: int) -> int:
    """Fewest vertices a degree-regular graph of the given girth can have."""
    d = degree
    if girth % 2:
        r = (girth - 1) // 2
        return 1 + d * sum((d - 1) ** i for i in range(r))
    r = girth // 2
    return 2 * sum((d - 1) ** i for i in range(r))


@dataclass(frozen=True)
class UnderlyingGraph:
    """Vertex i has out-edges i -> perms[j][i] for j = 0..3 (0-based ids)."""

    n: int
    perms: Tuple[Tuple[int, ...], ...]
    _girth: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        if len(self.perms) != 4:
            raise ValueError(f"expected 4 permutations, got {len(self.perms)}")
        for j, p in enumerate(self.perms):
            if len(p) != self.n or sorted(p) != list(range(self.n)):
                raise ValueError(f"perms[{j}] is not a permutation of 0..{self.n - 1}")

    def edges(self) -> List[Tuple[int, int, int]]:
        """(i, j, k) for the edge i -> k given by permutation j (0-based)."""
        return [(i, j, self.perms[j][i]) for i in range(self.n) for j in range(4)]

    def csr(self):
        adj = [[] for _ in range(self.n)]
        for eid, (i, _, k) in enumerate(self.edges()):
            adj[i].append((k, eid))
            if k != i:
                adj[k].append((i, eid))
            else:
                adj[i].append((i, eid))
        start = np.zeros(self.n + 1, np.int64)
        for i in range(self.n):
            start[i + 1] = start[i] + len(adj[i])
        nbr = np.array([k for lst in adj for k, _ in lst], np.int64)
        eid = np.array([e for lst in adj for _, e in lst], np.int64)
        return start, nbr, eid

    @property
    def girth(self) -> int:
        if not self._girth:
            start, nbr, eid = self.csr()
            self._girth.append(int(_kernels.multigraph_girth(self.n, start, nbr, eid, 0)))
        return self._girth[0]

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "perms": [list(p) for p in self.perms]}) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "UnderlyingGraph":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UnderlyingFormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
        if not isinstance(d, dict) or "n" not in d or "perms" not in d:
            raise UnderlyingFormatError("underlying graph JSON needs keys 'n' and 'perms'")
        try:
            return cls(int(d["n"]), tuple(tuple(int(x) for x in p) for p in d["perms"]))
        except (TypeError, ValueError) as exc:
            raise UnderlyingFormatError(str(exc))


def _random_attempt(n, rng):
    return tuple(tuple(int(x) for x in rng.permutation(n)) for _ in range(4))


def _greedy_attempt(n, girth, rng):
    """Assign permutation values one at a time, never closing a cycle
    shorter than `girth`. Returns None when it gets stuck."""
    adj = [[] for _ in range(n)]
    perms = []
    for j in range(4):
        perm = [-1] * n
        free = set(range(n))
        for i in (int(x) for x in rng.permutation(n)):
            # vertices within distance girth-2 of i are forbidden targets
            near = {i}
            frontier = [i]
            for _ in range(girth - 2):
                nxt = []
                for u in frontier:
                    for w in adj[u]:
                        if w not in near:
                            near.add(w)
                            nxt.append(w)
                frontier = nxt
            cands = sorted(free - near)
            if not cands:
                return None
            k = cands[int(rng.integers(len(cands)))]
            perm[i] = k
            free.discard(k)
            adj[i].append(k)
            adj[k].append(i)
        perms.append(tuple(perm))
    return tuple(perms)


def gen_underlying(n: int, girth_target: int, seed=None, attempts: int = 200,
                   method: str = "random") -> UnderlyingGraph:
    """Sample four permutations until the girth reaches girth_target.

    method "random" draws uniform permutations; "greedy" builds them while
    avoiding short cycles, which reaches larger girth at a given n.
    """
    if girth_target < 1:
        raise ValueError("girth_target must be positive")
    rng = np.random.default_rng(seed)
    best = -1
    for _ in range(attempts):
        if method == "random":
            perms = _random_attempt(n, rng)
        elif method == "greedy":
            perms = _greedy_attempt(n, girth_target, rng)
            if perms is None:
                continue
        else:
            raise ValueError(f"unknown method {method!r}")
        phi = UnderlyingGraph(n, perms)
        if phi.girth >= girth_target:
            return phi
        if phi.girth > best:
            best = phi.girth
    moore = moore_bound(8, girth_target)
    hint = f" (an 8-regular graph of girth {girth_target} needs at least {moore} vertices)" if n < moore else ""
    raise GenerationError(f"no graph of girth >= {girth_target} on {n} vertices after {attempts} attempts; "
                          f"best girth found {best}{hint}", best_girth=best)


def singer_difference_set(q: int) -> List[int]:
    """A perfect difference set of size q+1 modulo q^2+q+1 (small q, by search)."""
    m = q * q + q + 1
    k = q + 1
    chosen = [0, 1]
    diffs = {1, m - 1}

    def extend(start):
        if len(chosen) == k:
            return True
        for x in range(start, m):
            new = set()
            ok = True
            for y in chosen:
                for d in ((x - y) % m, (y - x) % m):
                    if d in diffs or d in new:
                        ok = False
                        break
                    new.add(d)
                if not ok:
                    break
            if ok:
                chosen.append(x)
                diffs.update(new)
                if extend(x + 1):
                    return True
                chosen.pop()
                diffs.difference_update(new)
        return False

    if not extend(2):
        raise ValueError(f"no difference set found for q={q}")
    return chosen


def difference_underlying(m: int, D: Sequence[int]) -> UnderlyingGraph:
    """Bipartite graph on points 0..m-1 and lines m..2m-1, point p on line l
    iff p - l lies in D (eight distinct residues mod m).

    The eight matchings p <-> p - d are split into four permutations, each
    sending points to lines through one element of D and lines back to
    points through another.
    """
    D = [d % m for d in D]
    if len(D) != 8 or len(set(D)) != 8:
        raise ValueError("need eight distinct residues")
    perms = []
    for j in range(4):
        d_out, d_back = D[2 * j], D[2 * j + 1]
        perm = [0] * (2 * m)
        for p in range(m):
            perm[p] = m + (p - d_out) % m
        for l in range(m):
            perm[m + l] = (l + d_back) % m
        perms.append(tuple(perm))
    return UnderlyingGraph(2 * m, tuple(perms))


def projective_underlying(q: int = 7) -> UnderlyingGraph:
    """Point-line incidence graph of the projective plane of order q = 7:
    8-regular, bipartite, girth 6 on 114 vertices, meeting the Moore bound."""
    if q + 1 != 8:
        raise ValueError("need q + 1 = 8 for four permutations")
    return difference_underlying(q * q + q + 1, singer_difference_set(q))
