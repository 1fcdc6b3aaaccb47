import math
import os
import struct
from pathlib import Path

import numpy as np
import pytest

import stringed_haptic as sh

DATA = Path(os.environ.get("SHW_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def test_mid_tension_at_center():
    rig = sh.default_rig()
    a = sh.structure_matrix(rig, np.zeros(3))
    r = sh.solve_tensions(a, np.zeros(6))
    assert r["status"] == "Optimal"
    assert np.allclose(r["tensions"], rig.tension.mid, atol=1e-12)


def test_reaction_identity():
    rig = sh.default_rig()
    a = sh.structure_matrix(rig, [0.05, -0.02, 0.03], [math.cos(0.1), 0.0, math.sin(0.1), 0.0])
    w = np.array([2.0, -1.0, 3.0, 0.05, 0.0, -0.02])
    r = sh.solve_tensions(a, w)
    assert r["status"] == "Optimal"
    assert np.max(np.abs(a @ r["tensions"] - w)) <= 1e-7


def test_huge_wrench_infeasible():
    a = sh.structure_matrix(sh.default_rig(), np.zeros(3))
    assert sh.solve_tensions(a, np.array([1e4, 0, 0, 0, 0, 0]))["status"] == "Infeasible"


def test_pose_round_trip():
    rig = sh.default_rig()
    q = [math.cos(0.05), math.sin(0.05), 0.0, 0.0]
    lengths = sh.string_lengths(rig, [0.1, 0.05, -0.04], q)
    p, qe, rms, _ = sh.estimate_pose(rig, lengths)
    assert np.allclose(p, [0.1, 0.05, -0.04], atol=1e-8)
    assert rms < 1e-9
    assert abs(abs(np.dot(qe, q)) - 1.0) < 1e-12


def test_zero_diameter_is_rank_deficient():
    rig = sh.default_rig().with_diameter(0.0)
    with pytest.raises(sh.RankDeficient):
        sh.estimate_pose(rig, sh.string_lengths(rig, np.zeros(3)))


def test_diameter_sweep_monotone():
    rows = sh.diameter_sweep(sh.default_rig(), [0.0, 0.1, 0.2, 0.3])
    caps = [r[2] for r in rows]
    assert caps[0] == 0.0
    assert all(b > a for a, b in zip(caps, caps[1:]))
    assert math.isinf(rows[0][1])


def test_workspace_small_grid():
    frac, cells = sh.workspace(sh.default_rig(), [-0.1, -0.1, -0.1], [0.1, 0.1, 0.1], [2, 2, 2])
    assert len(cells) == 8
    assert frac == 1.0


def test_command_packet_layout():
    b = sh.encode_command(7, [0.1, 0.2, 0.3], [1, 0, 0, 0], True)
    assert len(b) == 66
    assert b[:5] == b"SHW1\x01"
    assert struct.unpack_from("<I3d4d", b, 5) == (7, 0.1, 0.2, 0.3, 1.0, 0.0, 0.0, 0.0)
    assert b[65] == 1
    seq, pos, q, trig = sh.decode_command(b)
    assert (seq, trig) == (7, True)
    assert sh.decode_command(b[:-1]) is None


def test_invalid_rig_json():
    with pytest.raises(sh.ParseError):
        sh.parse_rig_json("{")


def test_seam_replay():
    s = sh.replay(DATA / "scripts" / "seam_follow.txt", DATA / "service.json")
    assert s["coverage"] >= 0.99
    assert s["slip_events"] == 0
    assert len(s["digest"]) == 64
    again = sh.replay(DATA / "scripts" / "seam_follow.txt", DATA / "service.json")
    assert again["digest"] == s["digest"]
