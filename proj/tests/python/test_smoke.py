"""Smoke tests for the python bindings."""

import tshuffle


def test_exact_three_card_values():
    assert tshuffle.s3_square_check()
    assert tshuffle.s3_tv(0) == "5/6"
    assert tshuffle.s3_tv(2) == "5/54"


def test_mixing_time():
    assert tshuffle.mixing_time(3, 0.25) == 2
    assert tshuffle.mixing_time(3, 0.05) == 3


def test_couple_record_and_determinism():
    rec = tshuffle.couple(24, eps=0.2, kappa=0.5, seed=7, strategy="superfast")
    assert rec.coupling_time > 0.0
    assert rec.maps_created == rec.maps_expired
    assert rec.events_total > 0
    again = tshuffle.couple(24, eps=0.2, kappa=0.5, seed=7, strategy="superfast")
    assert rec.serialize() == again.serialize()


def test_scaling_csv_shape():
    csv = tshuffle.scaling_csv("qp", [8, 16], 5, 0.2, 0.5, 11)
    lines = csv.strip().splitlines()
    header = (
        "strategy,n,eps,kappa,master_seed,rep,coupling_time,"
        "events_total,maps_created,maps_non_reusable"
    )
    assert lines[0] == header
    assert len(lines) == 1 + 2 * 5
    assert lines[1].startswith("qp,8,")
