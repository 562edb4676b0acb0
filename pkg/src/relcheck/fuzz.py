"""Bounded differential testing of two programs on random invocation sequences.

Each sequence is some paired updates followed by one paired query, all
with arguments from a small value pool, so that collisions (equal keys,
repeated inserts) are common.  Sequence ``i`` draws from its own generator
seeded by ``(seed, i)``; results never depend on how sequences are scheduled.
"""

from __future__ import annotations

import dataclasses
import itertools
import random
from dataclasses import dataclass
from typing import Optional

from . import interp
from .interp import Invocation
from .ir import ast as A
from .pairing import Pairing, TxnPair, pair_programs

INT_POOL = (0, 1, 2, 100)
STR_POOL = ("", "a", "Alice")


def literals(prog: A.Program) -> tuple[tuple[int, ...], tuple[str, ...]]:
    ints: set[int] = set()
    strs: set[str] = set()

    def go(n):
        if isinstance(n, A.IntLit):
            ints.add(n.value)
        elif isinstance(n, A.StrLit):
            strs.add(n.value)
        elif dataclasses.is_dataclass(n):
            for f in dataclasses.fields(n):
                go(getattr(n, f.name))
        elif isinstance(n, tuple):
            for x in n:
                go(x)

    go(prog)
    return tuple(sorted(ints)), tuple(sorted(strs))


@dataclass(frozen=True)
class Counterexample:
    old_trace: tuple[Invocation, ...]
    new_trace: tuple[Invocation, ...]
    old_result: list
    new_result: list
    index: int

    def as_dict(self) -> dict:
        def steps(tr):
            return [{"txn": s.txn, "args": dict(s.args)} for s in tr]
        return {"sequence": self.index, "length": len(self.old_trace),
                "old_trace": steps(self.old_trace), "new_trace": steps(self.new_trace),
                "old_result": self.old_result, "new_result": self.new_result}


@dataclass(frozen=True)
class FuzzResult:
    tried: int
    counterexample: Optional[Counterexample]

    @property
    def found(self) -> bool:
        return self.counterexample is not None


class Fuzzer:
    def __init__(self, pairing: Pairing, mode: str = "equiv", seed: int = 0):
        self.pairing = pairing
        self.mode = mode
        self.seed = seed
        i1, s1 = literals(pairing.old)
        i2, s2 = literals(pairing.new)
        self.ints = tuple(sorted(set(INT_POOL) | set(i1) | set(i2)))
        self.strs = tuple(sorted(set(STR_POOL) | set(s1) | set(s2)))

    def _value(self, rng: random.Random, type_: str):
        return rng.choice(self.ints if type_ == A.INT else self.strs)

    def _args(self, rng, pair: TxnPair):
        old = {p.name: self._value(rng, p.type) for p in pair.old.params}
        new = {}
        for k, p in enumerate(pair.new.params):
            new[p.name] = old[pair.old.params[k].name] if k < pair.shared else self._value(rng, p.type)
        return old, new

    def sequence(self, i: int, max_len: int):
        rng = random.Random(f"{self.seed}:{i}")
        ups, qs = self.pairing.updates, self.pairing.queries
        n = rng.randint(0, max(0, max_len - 1)) if ups else 0
        old, new = [], []
        for _ in range(n):
            pair = rng.choice(ups)
            a, b = self._args(rng, pair)
            old.append(Invocation(pair.old.name, a))
            new.append(Invocation(pair.new.name, b))
        pair = rng.choice(qs)
        a, b = self._args(rng, pair)
        old.append(Invocation(pair.old.name, a))
        new.append(Invocation(pair.new.name, b))
        return tuple(old), tuple(new)

    def agree(self, r_old: list, r_new: list) -> bool:
        if self.mode == "equiv":
            return r_old == r_new
        # Refinement: some column selection of the new rows gives the old rows.
        if len(r_old) != len(r_new):
            return False
        if not r_old:
            return True
        k, k2 = len(r_old[0]), len(r_new[0])
        for cols in itertools.permutations(range(k2), k):
            if all([row[c] for c in cols] == o for row, o in zip(r_new, r_old)):
                return True
        return False

    def run(self, seqs: int, max_len: int) -> FuzzResult:
        if not self.pairing.queries:
            return FuzzResult(0, None)
        for i in range(seqs):
            old, new = self.sequence(i, max_len)
            r1 = interp.eval_program(self.pairing.old, old)
            r2 = interp.eval_program(self.pairing.new, new)
            if not self.agree(r1, r2):
                return FuzzResult(i + 1, self._shrink(Counterexample(old, new, r1, r2, i)))
        return FuzzResult(seqs, None)

    def _shrink(self, cx: Counterexample) -> Counterexample:
        """Drop update steps one at a time while the sequences still disagree."""
        old, new = list(cx.old_trace), list(cx.new_trace)
        k = 0
        while k < len(old) - 1:
            o2, n2 = old[:k] + old[k + 1:], new[:k] + new[k + 1:]
            r1 = interp.eval_program(self.pairing.old, o2)
            r2 = interp.eval_program(self.pairing.new, n2)
            if not self.agree(r1, r2):
                old, new = o2, n2
            else:
                k += 1
        r1 = interp.eval_program(self.pairing.old, old)
        r2 = interp.eval_program(self.pairing.new, new)
        return Counterexample(tuple(old), tuple(new), r1, r2, cx.index)


def fuzz(old: A.Program, new: A.Program, seqs: int = 1000, max_len: int = 5, seed: int = 0,
         mode: str = "equiv", mapping=None, pairing: Optional[Pairing] = None) -> FuzzResult:
    """First distinguishing sequence among ``seqs`` random ones, or none."""
    pairing = pairing or pair_programs(old, new, mode, mapping)
    return Fuzzer(pairing, mode, seed).run(seqs, max_len)
