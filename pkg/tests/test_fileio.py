import math

import numpy as np
import pytest

from symheun.core import CanonicalParams, FuchsianParams, SymmetricHeunParams
from symheun.fileio import (
    InputError,
    VALUE_HEADER,
    dec,
    params_from_dict,
    params_to_dict,
    read_points,
    write_csv,
)
from symheun.transform import StandardHeunParams

RECORDS = [
    CanonicalParams(0.7 + 0.01j, (0.1, 0.2j, 0.3, 1.0), 0.1 / 3),
    SymmetricHeunParams((1.0, -1.0 + 0.3j, 2j, 0.5 - 1j), (0.4, 0.5, 0.6, 0.7), math.pi),
    FuchsianParams((1 + 0.5j, -1.2 + 0.3j, -0.4 - 1.1j, 1.3 - 0.9j), (1.6, .3, .2, .05), (-.4, .1, .1, .05),
                   0.7 - 0.2j),
    StandardHeunParams.from_exponents(3.0, 0.6 + 0.1j, 0.7, 0.4, 1.1 - 0.2j, 0.3),
]


@pytest.mark.parametrize("p", RECORDS, ids=lambda p: type(p).__name__)
def test_params_round_trip(p):
    assert params_from_dict(params_to_dict(p)) == p


def test_standard_without_epsilon_uses_fuchs_relation():
    d = params_to_dict(RECORDS[3])
    del d["epsilon"]
    assert params_from_dict(d) == RECORDS[3]


@pytest.mark.parametrize("bad", [
    {"phi": 0.5},
    {"kind": "canonical", "phi": 0.5, "chi": [0, 0, 0]},
    {"kind": "canonical", "phi": "x", "chi": [0, 0, 0, 0]},
    {"kind": "symmetric", "points": [0, 1, 2, 3], "chi": [0, 0, 0, 0]},
    {"kind": "other"},
])
def test_bad_records(bad):
    with pytest.raises(InputError):
        params_from_dict(bad)


def test_dec():
    assert dec(2) == 2 and dec([1.5, -2]) == 1.5 - 2j
    with pytest.raises(InputError):
        dec([1, 2, 3])


def test_points_and_values_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    pts = rng.normal(size=7) + 1j * rng.normal(size=7)
    rows = [[z.real, z.imag] for z in pts]
    path = tmp_path / "p.csv"
    write_csv(path, ["re", "im"], rows)
    assert np.array_equal(read_points(path), pts)
    text = write_csv(None, VALUE_HEADER, [[1.0, 2.0] + [math.nan] * 6])
    assert text.splitlines()[1].endswith("nan,nan")


def test_points_errors(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("x,y\n1,2\n")
    with pytest.raises(InputError):
        read_points(p)
    p.write_text("re,im\n1,zz\n")
    with pytest.raises(InputError, match=":2:"):
        read_points(p)
    with pytest.raises(InputError):
        read_points(tmp_path / "missing.csv")
