# tests/test_results_writer.py
import json

import pytest

from app.core.errors import ConfigError, ResultsIOError
from app.core.run_config import build_sim_config
from app.infra.results_writer import (
    ResultsWriter,
    code_parameters,
    emit_results,
    format_row,
    load_manifest,
    manifest_path_for,
)
from app.models.ber_record import BerRecord
from app.services.monte_carlo import run_sweep


def _cfg(**flags):
    base = {"code": "fdill", "n": 2, "nr": 2, "seed": 11, "snr": "0:2:2", "frames": 8}
    base.update(flags)
    return build_sim_config(flag_values=base)


def test_single_record_gives_header_and_one_row(tmp_path):
    record = BerRecord(snr_db=6.0, frames=3, bits=12, bit_errors=1, wall_time_s=0.25)
    csv_path, manifest = emit_results([record], _cfg(), tmp_path / "out.csv", "RUN_x")
    lines = csv_path.read_text().splitlines()
    assert lines == [
        "snr_db,frames,bits,bit_errors,ber,wall_time_s",
        "6.0,3,12,1,0.08333333333333333,0.250000",
    ]
    assert manifest == tmp_path / "out.manifest.json"


def test_manifest_records_the_run(tmp_path):
    cfg = _cfg()
    _, manifest = emit_results([], cfg, tmp_path / "run.csv", "RUN_abc")
    payload = json.loads(manifest.read_text())
    assert payload["run_id"] == "RUN_abc"
    assert payload["seed"] == 11
    assert payload["records_file"] == "run.csv"
    assert payload["code"]["k"] == 4
    assert load_manifest(manifest) == cfg
    assert (tmp_path / "run.csv").read_text() == (
        "snr_db,frames,bits,bit_errors,ber,wall_time_s\n"
    )


def test_code_parameters():
    params = code_parameters(_cfg(code="ill", n=4))
    assert params["delta"] == [1.0, 0.0]
    assert params["t"] == [1.0, 0.0]
    assert params["omega_n"] == pytest.approx([0.0, 1.0], abs=1e-15)
    assert code_parameters(_cfg(code="vblast", n=3)) == {
        "family": "vblast",
        "n_t": 3,
        "k": 3,
    }


def test_reruns_differ_only_in_wall_time():
    cfg = _cfg()
    first = [format_row(r)[:-1] for r in run_sweep(cfg, workers=1)]
    second = [format_row(r)[:-1] for r in run_sweep(cfg, workers=1)]
    assert first == second


def test_unwritable_path_raises(tmp_path):
    with pytest.raises(ResultsIOError) as exc:
        with ResultsWriter(tmp_path):
            pass
    assert exc.value.exit_code == 3
    assert exc.value.path == str(tmp_path)


def test_broken_manifest(tmp_path):
    path = manifest_path_for(tmp_path / "x.csv")
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_manifest(path)
    path.write_text("{}")
    with pytest.raises(ConfigError):
        load_manifest(path)
    with pytest.raises(ResultsIOError):
        load_manifest(tmp_path / "missing.manifest.json")


def test_manifest_is_written_before_rows_are_streamed(tmp_path):
    path = tmp_path / "stream.csv"
    seen = []

    def records():
        for i, snr in enumerate((0.0, 2.0)):
            assert manifest_path_for(path).exists()
            # header plus every earlier row is already on disk
            seen.append(len(path.read_text().splitlines()))
            yield BerRecord(snr_db=snr, frames=1, bits=4, bit_errors=i)

    emit_results(records(), _cfg(), path, "RUN_stream")
    assert seen == [1, 2]
    assert len(path.read_text().splitlines()) == 3
