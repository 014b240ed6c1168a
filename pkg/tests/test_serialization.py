import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loninv import __version__
from loninv.fock import FockState
from loninv.serialization import (
    canonical_json,
    complex_matrix_from_json,
    complex_matrix_to_json,
    config_hash,
    dumps,
    fock_state_to_json,
    manifest,
    round_sig,
)


@settings(max_examples=30, deadline=None, derandomize=True)
@given(seed=st.integers(0, 2**32 - 1), shape=st.sampled_from([(3,), (2, 2), (3, 4)]))
def test_complex_matrix_roundtrip(seed, shape):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    text = json.dumps(complex_matrix_to_json(A))
    np.testing.assert_array_equal(complex_matrix_from_json(json.loads(text)), A)


def test_complex_matrix_rejects_bad_pairs():
    with pytest.raises(ValueError):
        complex_matrix_from_json([[1, 2, 3]])


def test_fock_state_json():
    assert fock_state_to_json(FockState((2, 0, 1))) == [2, 0, 1]
    assert fock_state_to_json((np.int64(1), 1)) == [1, 1]


@pytest.mark.parametrize("x,expected", [
    (0.0, 0.0), (1 / 3, 0.333333333333), (123456789.123456789, 123456789.123), (-2e-20 / 3, -6.66666666667e-21),
])
def test_round_sig(x, expected):
    assert round_sig(x) == expected


def test_config_hash_is_order_independent():
    a = {"seed": 1, "shots": [10, 20], "format": "csv"}
    b = {"format": "csv", "shots": [10, 20], "seed": 1}
    assert canonical_json(a) == canonical_json(b)
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash({**a, "seed": 2})


def test_manifest_fields():
    man = manifest({"seed": 0})
    assert man["library"] == "loninv"
    assert man["version"] == __version__
    assert len(man["config_hash"]) == 64
    assert dumps(man).endswith("\n")
    assert json.loads(dumps(man)) == man
