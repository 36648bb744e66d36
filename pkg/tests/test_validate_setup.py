import validate_setup
from debug_utils import setup_logger


def test_log_dir_comes_from_settings(monkeypatch, tmp_path):
    monkeypatch.setattr(validate_setup, "get_settings",
                        lambda quiet=False: {"log_dir": str(tmp_path / "logs")})
    log_dir = validate_setup.configured_log_dir()
    assert log_dir == str(tmp_path / "logs")
    log = setup_logger("validate_setup", log_dir=log_dir)
    assert log.log_file.parent == tmp_path / "logs"


def test_unreadable_settings_use_default_log_dir(monkeypatch):
    def broken(quiet=False):
        raise ValueError("bad settings")
    monkeypatch.setattr(validate_setup, "get_settings", broken)
    assert validate_setup.configured_log_dir() is None
