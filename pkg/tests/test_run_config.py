# tests/test_run_config.py
import pytest

from app.core.config import Settings
from app.core.errors import ConfigError
from app.core.run_config import build_sim_config, load_config_file, parse_snr_grid
from app.models.channel_config import ChannelModel
from app.models.sim_config import CodeFamily, DetectorKind, SimConfig, SnrSweep
from app.services.bp_detector import PsiForm


@pytest.mark.parametrize(
    "text,grid",
    [
        ("0:2:4", [0.0, 2.0, 4.0]),
        ("4:1:10", [4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]),
        ("0:0.1:0.3", [0.0, 0.1, 0.2, 0.3]),
        ("5", [5.0]),
        ("4:1:0", []),
    ],
)
def test_parse_snr_grid(text, grid):
    assert parse_snr_grid(text).grid() == grid


@pytest.mark.parametrize("text", ["0:2", "a:b:c", "0:0:4", "0:-1:4"])
def test_parse_snr_grid_rejects_garbage(text):
    with pytest.raises(ConfigError):
        parse_snr_grid(text)


def test_defaults_come_from_settings():
    cfg = build_sim_config(source=Settings(target_bit_errors=123, max_frames=77))
    assert cfg.stopping.target_bit_errors == 123
    assert cfg.stopping.max_frames == 77
    assert cfg.detector.iters == 5
    assert cfg.detector.psi_form is PsiForm.AS_PRINTED


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "code=ill\nn=8\nnr=9\ncorr-r=0.12\nchannel=kron\nsnr=0:2:10\n"
        "target_errors=50\nnoiseless=yes\n"
    )
    file_values = load_config_file(path)
    cfg = build_sim_config(file_values, {"n": 4, "nr": None, "detector": "mmse"})
    assert cfg.code.family is CodeFamily.ILL
    assert cfg.code.n == 4
    assert cfg.n_r == 9
    assert cfg.channel.model is ChannelModel.KRONECKER
    assert cfg.channel.r == pytest.approx(0.12)
    assert cfg.snr_sweep == SnrSweep(start_db=0.0, stop_db=10.0, step_db=2.0)
    assert cfg.stopping.target_bit_errors == 50
    assert cfg.noiseless is True
    assert cfg.detector.kind is DetectorKind.MMSE


def test_unknown_config_key_is_rejected(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("bogus=1\n")
    with pytest.raises(ConfigError, match="bogus"):
        load_config_file(path)
    with pytest.raises(ConfigError):
        build_sim_config(flag_values={"bogus": 1})


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "absent.cfg")


@pytest.mark.parametrize(
    "flags",
    [
        {"damping": 1.0},
        {"corr_r": 1.0},
        {"frames": 0},
        {"target_errors": 0},
        {"code": "perfect"},
        {"noiseless": "maybe"},
        # 5x5 code has K=25, beyond the ML search guard
        {"code": "ill", "n": 5, "detector": "ml"},
    ],
)
def test_inconsistent_configs_raise_config_error(flags):
    with pytest.raises(ConfigError) as exc:
        build_sim_config(flag_values=flags)
    assert exc.value.exit_code == 2


def test_vblast_k_is_antenna_count():
    cfg = build_sim_config(flag_values={"code": "vblast", "n": 24, "detector": "ml"})
    assert cfg.code.k == 24
    assert isinstance(cfg, SimConfig)


def test_ml_guard_comes_from_the_given_settings():
    flags = {"code": "ill", "n": 3, "detector": "ml"}
    assert build_sim_config(flag_values=flags).code.k == 9
    with pytest.raises(ConfigError, match="K=9"):
        build_sim_config(flag_values=flags, source=Settings(ml_max_k=8))
