import json
import math
from pathlib import Path

import numpy as np
import pytest

from symheun.core import CanonicalParams
from symheun.errors import BranchAmbiguity, ReturnsFewer
from symheun.spectral import (
    Contour,
    Disk,
    EndpointData,
    Interval,
    find_eigenvalues,
    golden_problem,
    orthogonality_integral,
    overlap_ratio,
    real_line_frame,
    scan_defect,
    scaled_defect,
    shoot_defect,
)

GOLDEN = json.loads((Path(__file__).parent / "golden" / "spectral.json").read_text())
GOLD_LAM = [complex(*e["lam"]) for e in GOLDEN["eigenvalues"]]


@pytest.fixture(scope="module")
def golden():
    params, contour, ends = golden_problem()
    return params, contour, ends, real_line_frame(params, contour)


@pytest.fixture(scope="module")
def eigen(golden):
    params, contour, ends, frame = golden
    return find_eigenvalues(params, contour, ends, Interval(0.0, 30.0, frame), 2)


def test_endpoint_data():
    with pytest.raises(ValueError):
        EndpointData(0)
    with pytest.raises(ValueError):
        EndpointData(1, offset=0.1)
    with pytest.raises(ValueError):
        EndpointData(1, exponent_choice="gamma")
    p = CanonicalParams(0.7, (1.5j, 0.3, 0.3, 0.3), 0)
    assert EndpointData(1).exponent(p).real > 2
    with pytest.raises(ValueError):
        EndpointData(1, exponent_choice="beta").exponent(p)
    assert EndpointData(2, offset=1e-4).halved().offset == 1e-4


def test_frame(golden):
    frame = golden[3]
    assert abs(frame.scale - complex(*GOLDEN["frame"]["scale"])) < 1e-10
    assert abs(frame.shift - complex(*GOLDEN["frame"]["shift"])) < GOLDEN["frame"]["shift_tol"]
    assert abs(frame.lam(frame.mu(1 + 2j)) - (1 + 2j)) < 1e-14


def test_contour_geometry(golden):
    params, contour, _, _ = golden
    z = params.points.z
    assert (contour.i, contour.j) == (4, 1)
    assert abs(contour.at(0.0) - z[3]) < 1e-15 and abs(contour.at(contour.length) - z[0]) < 1e-15
    assert contour.clearance > 0.5
    with pytest.raises(BranchAmbiguity):
        orthogonality_integral(params, 0.0, 0.0, (z[3], z[1], z[0]), (EndpointData(4), EndpointData(1)))


def test_matching_point_independence(golden):
    params, contour, ends, _ = golden
    for lam in (0.3, -2.0 + 0.5j):
        d = [shoot_defect(params, lam, contour, ends, match=m) for m in (0.3, 0.5, 0.7)]
        assert max(abs(v - d[1]) for v in d) <= 1e-8 * abs(d[1])


def test_defect_linearity(golden):
    params, contour, ends, _ = golden
    c = 2.5 - 1j
    a = shoot_defect(params, 0.7, contour, ends)
    b = shoot_defect(params, 0.7, contour, ends, scale=(c, 1.0))
    assert abs(b - c * a) <= 1e-12 * abs(b)


def test_bracket_near_first_eigenvalue(golden):
    params, contour, ends, frame = golden
    _, _, _, brackets = scan_defect(params, contour, ends, Interval(5.5, 5.7, frame), step=0.01)
    assert [tuple(round(v, 2) for v in b) for b in brackets] == [tuple(b) for b in GOLDEN["brackets_mu_0_20"]]


def test_coarse_scan_0_20(golden):
    # only one sign change in mu in [0, 20]; a coarse grid suffices to see it
    params, contour, ends, frame = golden
    _, _, _, brackets = scan_defect(params, contour, ends, Interval(0.0, 20.0, frame), step=0.1)
    assert len(brackets) == 1 and brackets[0][0] <= 5.585 <= brackets[0][1]
    with pytest.raises(ReturnsFewer):
        find_eigenvalues(params, contour, ends, Interval(0.0, 20.0, frame), 2, check_offset=False)


def test_golden_eigenvalues(eigen):
    for r, lam, g in zip(eigen, GOLD_LAM, GOLDEN["eigenvalues"]):
        assert abs(r.lam - lam) <= 1e-10 * abs(lam)
        assert abs(r.mu - g["mu"]) <= 1e-9
        assert r.defect <= 1e-8
        assert r.eps_shift <= 1e-6
        assert abs(r.branch - math.sqrt(3)) < 1e-12


def test_disk_region(golden):
    params, contour, ends, _ = golden
    res = find_eigenvalues(params, contour, ends, Disk(-4.0, 4.0), 2, check_offset=False)
    got = sorted((r.lam for r in res), key=lambda v: v.real, reverse=True)
    assert np.allclose(got, GOLD_LAM, rtol=1e-10)


def test_count_stable_under_offset_halving(golden):
    params, contour, _, frame = golden
    halved = (EndpointData(4, offset=5e-4), EndpointData(1, offset=5e-4))
    _, _, _, b1 = scan_defect(params, contour, golden[2], Interval(0.0, 30.0, frame), step=0.1)
    _, _, _, b2 = scan_defect(params, contour, halved, Interval(0.0, 30.0, frame), step=0.1)
    assert len(b1) == len(b2) == 2


def test_orthogonality(golden, eigen):
    params, contour, ends, _ = golden
    assert overlap_ratio(params, eigen[0], eigen[1], contour, ends) <= 1e-6
    norm, info = orthogonality_integral(params, eigen[0], eigen[0], contour, ends, return_info=True)
    assert abs(norm) > 1e-3
    assert info["change"] <= 1e-9
    assert info["matched"] == (True, True)


def test_generic_lambda_not_orthogonal(golden, eigen):
    params, contour, ends, _ = golden
    assert overlap_ratio(params, eigen[0], 0.4 + 0.1j, contour, ends) > 1e-3


def test_scaled_defect_at_eigenvalue(golden, eigen):
    params, contour, ends, _ = golden
    assert scaled_defect(params, eigen[0].lam, contour, ends) <= 1e-8
    assert scaled_defect(params, eigen[0].lam + 0.1, contour, ends) > 1e-4
