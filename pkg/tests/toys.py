"""Random finite-state modules plus their brute-force ground truth."""
from __future__ import annotations

import random
from dataclasses import dataclass

from repinv.frontend.elaborate import load_source

from .oracles import reachable, sufficient_subsets


@dataclass
class Toy:
    source: str
    k: int
    consts: list
    unary: list
    binary: list
    good: set

    def ground_truth(self):
        reach = reachable(self.consts, self.unary, self.binary, self.k)
        subsets = sufficient_subsets(self.consts, self.unary, self.binary, self.good, self.k)
        return reach, subsets

    def elaborate(self, name="toy"):
        return load_source(self.source, name=name)


def _arms(values, scrut, k):
    return " ".join(f"| K{i} -> {values[i]}" for i in range(k))


def random_toy(rng: random.Random, max_k: int = 6) -> Toy:
    k = rng.randint(1, max_k)
    consts = [rng.randrange(k) for _ in range(rng.randint(1, 2))]
    unary = [[rng.randrange(k) for _ in range(k)] for _ in range(rng.randint(0, 2))]
    binary = [[[rng.randrange(k) for _ in range(k)] for _ in range(k)] for _ in range(rng.randint(0, 1))]
    p_good = rng.choice([0.6, 0.85, 1.0])
    good = {i for i in range(k) if rng.random() < p_good}
    sig, defs = [], []
    for j, c in enumerate(consts):
        sig.append(f"  val c{j} : t")
        defs.append(f"  let c{j} : t = K{c}")
    for j, tab in enumerate(unary):
        sig.append(f"  val u{j} : t -> t")
        defs.append(f"  let u{j} (x : t) : t = match x with {_arms([f'K{v}' for v in tab], 'x', k)}")
    for j, tab in enumerate(binary):
        sig.append(f"  val b{j} : t -> t -> t")
        rows = [f"(match y with {_arms([f'K{v}' for v in row], 'y', k)})" for row in tab]
        defs.append(f"  let b{j} (x : t) (y : t) : t = match x with {_arms(rows, 'x', k)}")
    sig.append("  val good : t -> bool")
    defs.append(f"  let good (x : t) : bool = match x with {_arms(['true' if i in good else 'false' for i in range(k)], 'x', k)}")
    src = "\n".join(
        [
            "type c = " + " | ".join(f"K{i}" for i in range(k)),
            "module type T = sig",
            "  type t",
            *sig,
            "end",
            "module M : T = struct",
            "  type t = c",
            *defs,
            "end",
            "spec forall (x : t) . good x",
        ]
    )
    return Toy(src, k, consts, unary, binary, good)
