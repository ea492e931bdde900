import math
import random

import pytest

from cft.coprime import coprime_seq


def test_examples():
    assert coprime_seq([2, 3]).outputs == (3, 10)
    assert coprime_seq([0]).outputs == (1,)
    assert coprime_seq([1, 1, 1]).outputs == (2, 3, 7)


def test_empty_rejected():
    with pytest.raises(ValueError):
        coprime_seq([])


def test_negative_rejected():
    with pytest.raises(ValueError):
        coprime_seq([3, -1])


def test_properties_random():
    rng = random.Random(2021)
    for _ in range(1000):
        n_list = [rng.randrange(10 ** 6) for _ in range(rng.randint(1, 8))]
        seq = coprime_seq(n_list)
        for n, m in zip(seq.inputs, seq.outputs):
            assert m >= 1 + n
            assert math.gcd(m, n) == 1
        for i in range(len(seq.outputs)):
            for j in range(i + 1, len(seq.outputs)):
                assert math.gcd(seq.outputs[i], seq.outputs[j]) == 1
        if all(n > 0 for n in n_list):
            assert all(m >= 2 for m in seq.outputs)


def test_zero_inputs_give_unit_denominators():
    seq = coprime_seq([0, 5, 0, 7])
    assert seq.outputs[0] == 1 and seq.outputs[2] == 1


def test_size_warning():
    with pytest.warns(UserWarning):
        coprime_seq([10 ** 6] * 4, digit_warn=5)
