# tests/test_monte_carlo.py
import numpy as np
import pytest

from app.core.errors import ConfigError
from app.core.run_config import build_sim_config
from app.infra.random_streams import frame_stream, snr_key
from app.services.ber_analysis import binomial_sigma
from app.services.monte_carlo import run_point, run_sweep, simulate_frame
from app.worker.frame_pool import FramePool


def _cfg(**flags):
    base = {"code": "ill", "n": 2, "nr": 2, "detector": "bp", "seed": 7}
    base.update(flags)
    return build_sim_config(flag_values=base)


def test_frame_streams_are_keyed_by_seed_snr_and_frame():
    a = frame_stream(1, 4.0, 3).random(4)
    assert np.array_equal(a, frame_stream(1, 4.0, 3).random(4))
    assert not np.array_equal(a, frame_stream(1, 4.0, 4).random(4))
    assert not np.array_equal(a, frame_stream(1, 6.0, 3).random(4))
    assert not np.array_equal(a, frame_stream(2, 4.0, 3).random(4))
    assert snr_key(0.0) != snr_key(-0.0)


def test_noiseless_ml_makes_no_errors():
    cfg = _cfg(detector="ml", noiseless=True, frames=100)
    record = run_point(cfg, 10.0, FramePool(1))
    assert record.frames == 100
    assert record.bits == 100 * 4
    assert record.bit_errors == 0
    assert record.ber == 0.0


def test_noiseless_bp_still_makes_some_errors():
    flags = {"code": "fdill", "n": 4, "nr": 4, "frames": 100, "target_errors": 10_000}
    cfg = _cfg(noiseless=True, **flags)
    record = run_point(cfg, 10.0, FramePool(1))
    assert record.bits == 100 * 16
    assert 0 < record.bit_errors < 0.1 * record.bits


@pytest.mark.parametrize("detector", ["bp", "mf", "mmse", "ml"])
def test_every_detector_runs(detector):
    cfg = _cfg(detector=detector, frames=50, target_errors=10_000)
    record = run_point(cfg, 0.0, FramePool(1))
    assert record.frames == 50
    assert 0 < record.bit_errors < record.bits


def test_point_stops_on_exact_frame_reaching_target():
    cfg = _cfg(frames=500, target_errors=1)
    first = next(
        f for f in range(500) if simulate_frame(cfg, -4.0, f).bit_errors > 0
    )
    for batch in (1, 3, 64):
        record = run_point(cfg, -4.0, FramePool(1), frame_batch=batch)
        assert record.frames == first + 1
        assert record.bit_errors == simulate_frame(cfg, -4.0, first).bit_errors


def test_results_do_not_depend_on_batching_or_workers():
    cfg = _cfg(frames=40, target_errors=15)
    serial = run_point(cfg, 0.0, FramePool(1), frame_batch=64)
    rebatched = run_point(cfg, 0.0, FramePool(1), frame_batch=5)
    with FramePool(2) as pool:
        parallel = run_point(cfg, 0.0, pool, frame_batch=7)
    key = lambda r: (r.frames, r.bits, r.bit_errors)  # noqa: E731
    assert key(serial) == key(rebatched) == key(parallel)


def test_sweep_yields_one_record_per_point_in_order():
    cfg = _cfg(snr="0:2:4", frames=10)
    records = run_sweep(cfg, workers=1)
    assert [r.snr_db for r in records] == [0.0, 2.0, 4.0]
    assert all(r.frames == 10 for r in records)


def test_ber_does_not_rise_with_snr():
    records = run_sweep(_cfg(snr="0:4:8", target_errors=100, frames=20_000), workers=1)
    for lo, hi in zip(records, records[1:]):
        slack = 3 * (binomial_sigma(lo) + binomial_sigma(hi))
        assert hi.ber <= lo.ber + slack


def test_empty_grid_gives_no_records():
    assert run_sweep(_cfg(snr="4:1:0"), workers=1) == []


def test_vblast_scheme():
    cfg = _cfg(code="vblast", n=4, nr=4, detector="mmse", frames=30)
    record = run_point(cfg, 20.0, FramePool(1))
    assert record.bits == 30 * 4


def test_kronecker_channel_runs():
    cfg = _cfg(channel="kron", corr_r=0.5, frames=10)
    assert run_point(cfg, 6.0, FramePool(1)).frames == 10


def test_ml_over_large_code_is_refused():
    with pytest.raises(ConfigError):
        _cfg(n=5, detector="ml")
