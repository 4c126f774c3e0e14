"""Coefficient tables (I, O, C) for a-lines and the Rips-Segev condition."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

JSON_SAFE = 2 ** 53


class CoefficientFormatError(ValueError):
    pass


@dataclass(frozen=True)
class CoefficientLine:
    """Positions on one a-line of length C.

    I holds the positions where b-edges from line ends arrive, O the
    interior positions whose b-edges lead to line ends. The usual case has
    two of each; other widths are accepted by the condition checker.
    """

    I: Tuple[int, ...]
    O: Tuple[int, ...]
    C: int

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError(f"C must be positive, got {self.C}")
        for x in self.I:
            if not 0 <= x <= self.C:
                raise ValueError(f"I position {x} outside [0, {self.C}]")
        for x in self.O:
            if not 0 < x < self.C:
                raise ValueError(f"O position {x} outside (0, {self.C})")

    @classmethod
    def standard(cls, I1, I2, O1, O2, C) -> "CoefficientLine":
        return cls((int(I1), int(I2)), (int(O1), int(O2)), int(C))

    @property
    def is_standard(self) -> bool:
        return len(self.I) == 2 and len(self.O) == 2

    @property
    def I1(self):
        return self.I[0]

    @property
    def I2(self):
        return self.I[1]

    @property
    def O1(self):
        return self.O[0]

    @property
    def O2(self):
        return self.O[1]

    def marks(self) -> List[Tuple[str, int]]:
        out = [(f"I{k + 1}", v) for k, v in enumerate(self.I)]
        out += [(f"O{k + 1}", v) for k, v in enumerate(self.O)]
        out.append(("C", self.C))
        return out

    def distances(self) -> List[Tuple[str, int]]:
        """Every mark and every pairwise gap between marks.

        For the standard width this is the 15-entry list I1, I2, O1, O2, C,
        |C-O2|, |C-O1|, |C-I2|, |C-I1|, |O2-O1|, |O2-I2|, |O2-I1|, |O1-I2|,
        |O1-I1|, |I2-I1|.
        """
        m = self.marks()
        out = list(m)
        for j in reversed(range(len(m))):
            for i in reversed(range(j)):
                out.append((f"|{m[j][0]}-{m[i][0]}|", abs(m[j][1] - m[i][1])))
        return out

    def as_list(self) -> list:
        if self.is_standard:
            return [self.I1, self.I2, self.O1, self.O2, self.C]
        return {"I": list(self.I), "O": list(self.O), "C": self.C}


@dataclass(frozen=True)
class CoefficientTable:
    lines: Tuple[CoefficientLine, ...]

    def __len__(self):
        return len(self.lines)

    def __getitem__(self, i) -> CoefficientLine:
        return self.lines[i]

    def distance_list(self) -> List[Tuple[int, str, int]]:
        return [(i, name, v) for i, line in enumerate(self.lines) for name, v in line.distances()]

    def merged(self, other: "CoefficientTable") -> "CoefficientTable":
        return CoefficientTable(self.lines + other.lines)

    def to_json(self) -> str:
        def enc(v):
            return str(v) if abs(v) >= JSON_SAFE else v

        rows = []
        for line in self.lines:
            x = line.as_list()
            if isinstance(x, list):
                rows.append([enc(v) for v in x])
            else:
                rows.append({"I": [enc(v) for v in x["I"]], "O": [enc(v) for v in x["O"]], "C": enc(x["C"])})
        return json.dumps(rows, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CoefficientTable":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CoefficientFormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
        return cls.from_data(data)

    @classmethod
    def from_data(cls, data) -> "CoefficientTable":
        if not isinstance(data, list):
            raise CoefficientFormatError("coefficient table must be a JSON array of lines")
        lines = []
        for i, row in enumerate(data):
            where = f"line {i}"
            try:
                if isinstance(row, list):
                    if len(row) != 5:
                        raise CoefficientFormatError(f"{where}: expected 5 entries [I1, I2, O1, O2, C], got {len(row)}")
                    vals = [_int(v, f"{where}, entry {k}") for k, v in enumerate(row)]
                    lines.append(CoefficientLine.standard(*vals))
                elif isinstance(row, dict):
                    I = tuple(_int(v, f"{where}, I[{k}]") for k, v in enumerate(row.get("I", [])))
                    O = tuple(_int(v, f"{where}, O[{k}]") for k, v in enumerate(row.get("O", [])))
                    lines.append(CoefficientLine(I, O, _int(row.get("C"), f"{where}, C")))
                else:
                    raise CoefficientFormatError(f"{where}: expected an array or object")
            except CoefficientFormatError:
                raise
            except ValueError as exc:
                raise CoefficientFormatError(f"{where}: {exc}")
        return cls(tuple(lines))


def _int(v, where) -> int:
    if isinstance(v, bool):
        raise CoefficientFormatError(f"{where}: expected an integer, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str) and v.strip().lstrip("-").isdigit():
        return int(v.strip())
    raise CoefficientFormatError(f"{where}: expected an integer or a decimal string, got {v!r}")


@dataclass
class RSCheck:
    passed: bool
    coincidences: int                       # the M of the relaxed condition
    zero_entries: List[Tuple[int, str]]
    collisions: List[Tuple[Tuple[int, str], Tuple[int, str], int]]
    entries: int

    @property
    def piece_bound(self) -> int:
        return 2 * self.coincidences + 3

    def message(self) -> str:
        if self.passed and not self.coincidences:
            return f"pass: {self.entries} values, all nonzero and distinct"
        parts = []
        for line, name in self.zero_entries[:3]:
            parts.append(f"{name} of line {line} is zero")
        for (l1, n1), (l2, n2), v in self.collisions[:3]:
            parts.append(f"{n1} of line {l1} = {n2} of line {l2} = {v}")
        verdict = "pass (relaxed)" if self.passed else "fail"
        return f"{verdict}: M = {self.coincidences}; " + "; ".join(parts)

    def to_json(self):
        return {
            "passed": self.passed,
            "M": self.coincidences,
            "piece_bound": self.piece_bound,
            "message": self.message(),
            "zero_entries": [list(z) for z in self.zero_entries],
            "collisions": [[list(a), list(b), str(v)] for a, b, v in self.collisions],
        }


def check_rs_condition(table: CoefficientTable, max_coincidences: int = 0) -> RSCheck:
    """All listed values nonzero and pairwise distinct across all lines.

    M counts zero entries plus repeated values; the table passes when
    M <= max_coincidences (0 is the strict condition).
    """
    seen = {}
    zeros, collisions = [], []
    entries = 0
    for i, name, v in table.distance_list():
        entries += 1
        if v == 0:
            zeros.append((i, name))
            continue
        if v in seen:
            collisions.append((seen[v], (i, name), v))
        else:
            seen[v] = (i, name)
    m = len(zeros) + len(collisions)
    return RSCheck(m <= max_coincidences, m, zeros, collisions, entries)


def power_line(p: int) -> CoefficientLine:
    return CoefficientLine.standard(*(10 ** (5 * p - 4 + k) for k in range(5)))


def gen_power_coefficients(k: int, phi: Optional[Sequence[int]] = None) -> CoefficientTable:
    """Line i gets (10^(5p-4), ..., 10^(5p)) with p = phi(i); phi injective."""
    if phi is None:
        phi = range(1, k + 1)
    phi = [int(p) for p in phi]
    if len(phi) != k:
        raise ValueError(f"phi has {len(phi)} values for {k} lines")
    if len(set(phi)) != k:
        raise ValueError("phi must be injective")
    if any(p < 1 for p in phi):
        raise ValueError("phi values must be positive")
    t = CoefficientTable(tuple(power_line(p) for p in phi))
    assert check_rs_condition(t).passed
    return t


def gen_ruler_coefficients(k: int, seed: int = 0, start: int = 1) -> CoefficientTable:
    """Small coefficients satisfying the condition, found by random search.

    Each line is a 6-mark ruler 0 < marks < C whose gaps avoid every value
    already used. Handy for tests that need explicit enumeration.
    """
    rng = random.Random(seed)
    used = set()
    lines = []
    span = 40
    while len(lines) < k:
        ok = False
        for _ in range(400):
            C = rng.randint(start + 15, start + span)
            inner = sorted(rng.sample(range(1, C), 4))
            line = CoefficientLine.standard(*inner, C)
            vals = [v for _, v in line.distances()]
            if 0 in vals or len(set(vals)) != len(vals) or used.intersection(vals):
                continue
            used.update(vals)
            lines.append(line)
            ok = True
            break
        if not ok:
            span = int(span * 1.5) + 10
    return CoefficientTable(tuple(lines))
