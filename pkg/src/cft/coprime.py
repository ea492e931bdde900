"""Recursive construction of pairwise-coprime denominators.

Given nonnegative integers N_1..N_l, set M_i = 1 + N_i * prod(M_k, k < i)
with the empty product equal to 1.  Then M_i >= 1 + N_i, gcd(M_i, N_i) = 1
and the M_i are pairwise coprime; all three are checked on construction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

# M_i grows doubly exponentially with i; warn when a table gets this big.
DEFAULT_DIGIT_WARN = 10 ** 6


@dataclass(frozen=True)
class CoprimeSeq:
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        for n, m in zip(self.inputs, self.outputs):
            if m < 1 + n:
                raise AssertionError("M_i >= 1 + N_i violated")
            if math.gcd(m, n) != 1:
                raise AssertionError("gcd(M_i, N_i) = 1 violated")
        outs = self.outputs
        for i in range(len(outs)):
            for j in range(i + 1, len(outs)):
                if math.gcd(outs[i], outs[j]) != 1:
                    raise AssertionError("pairwise coprimality violated")

    def to_json(self) -> dict:
        return {
            "inputs": [str(n) for n in self.inputs],
            "outputs": [str(m) for m in self.outputs],
        }


def coprime_seq(n_list: Sequence[int], digit_warn: int = DEFAULT_DIGIT_WARN) -> CoprimeSeq:
    """Build the recursive sequence M_i = 1 + N_i * prod of earlier M's."""
    if not n_list:
        raise ValueError("need at least one input")
    for n in n_list:
        if n < 0:
            raise ValueError("inputs must be nonnegative")
    outputs = []
    running = 1
    warned = False
    for n in n_list:
        m = 1 + n * running
        if not warned and m.bit_length() > digit_warn * 4:  # ~3.32 bits/digit
            warnings.warn(
                "coprime denominator exceeds %d digits; downstream exact "
                "arithmetic will be slow" % digit_warn,
                stacklevel=2,
            )
            warned = True
        outputs.append(m)
        running *= m
    return CoprimeSeq(tuple(int(n) for n in n_list), tuple(outputs))
