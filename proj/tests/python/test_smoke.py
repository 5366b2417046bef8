import json

import pytest

import mlsteg


def test_sequence_matching():
    assert mlsteg.match_seq(51, "10") == 54
    assert mlsteg.match_seq(65534, "00") == 0
    assert mlsteg.low_bits(54, 2) == "10"
    assert mlsteg.decode_bits(mlsteg.match_seq(1000, "101"), 3) == "101"
    with pytest.raises(ValueError):
        mlsteg.low_bits(1, 0)


def test_md5_and_cipher():
    assert mlsteg.md5(bytes(144)) == "45971d4e3a47775bb5a7260bb5ea3c36"
    key = "".join(format(b, "08b") for b in range(16))
    ct = mlsteg.encipher(b"multi-level steganography", key)
    assert ct.hex() == "ee9a58456c58e906e544d7ff5e7aeaffc00cba079dbc2e02b2"
    assert mlsteg.decipher(ct, key) == b"multi-level steganography"


def test_split_merge():
    upper, lower = mlsteg.split_steg("011010011", 2)
    assert lower == "101"
    assert mlsteg.merge_steg(upper, lower, 2) == "011010011"
    assert mlsteg.split_steg("1101", mlsteg.UPPER_ONLY) == ("1101", "")


def test_frames():
    bits = mlsteg.serialize_frame(2, "00000000" + "0000100000110001")
    assert bits == "0100000000011000000000000000100000110001"
    parsed = mlsteg.parse_frames(bits + "1010")
    assert parsed["frames"] == [(2, "000000000000100000110001")]
    assert parsed["terminated"]


def test_planner_and_ci():
    plan = {
        "levels": [[{"bandwidth": 0}], [{"bandwidth": 1827.41}], [{"bandwidth": 3.16}]],
        "costs": [{"n": 1, "o": 0, "m": 0, "p": 0, "value": 0.7}],
        "threshold": 1.0,
    }
    assert mlsteg.total_bandwidth(json.dumps(plan)) == pytest.approx(1830.57)
    assert mlsteg.total_cost(json.dumps(plan)) == (pytest.approx(0.7), False)
    mean, half = mlsteg.ci95([1, 2, 3, 4, 5])
    assert mean == 3.0
    assert half == pytest.approx(1.9632431614775607, abs=1e-12)


def test_experiment():
    rows = mlsteg.run_experiment(json.dumps({"mode": "MLS-2", "duration_s": 60, "reps": 2}))
    by_metric = {r["metric"]: r for r in rows}
    assert set(by_metric) >= {"P_LACK", "B_SU", "B_SL", "loss_rate", "plc_count"}
    assert by_metric["upper_recovered"]["average"] == 1.0
    assert by_metric["B_SL"]["ci95"] is not None
    with pytest.raises(ValueError):
        mlsteg.run_experiment(json.dumps({"bogus": 1}))
