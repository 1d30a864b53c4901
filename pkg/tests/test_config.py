import pytest

from config import SwarmConfig, threads_from_env


@pytest.fixture(autouse=True)
def no_dotenv(monkeypatch):
    monkeypatch.setattr("config.load_dotenv", lambda: False)


def test_threads_from_env(monkeypatch):
    monkeypatch.setenv(SwarmConfig.THREADS_ENV, "4")
    assert threads_from_env() == 4


def test_threads_fall_back_to_default(monkeypatch):
    monkeypatch.delenv(SwarmConfig.THREADS_ENV, raising=False)
    assert threads_from_env() == SwarmConfig.THREADS
    monkeypatch.setenv(SwarmConfig.THREADS_ENV, "many")
    assert threads_from_env() == SwarmConfig.THREADS
    monkeypatch.setenv(SwarmConfig.THREADS_ENV, "0")
    assert threads_from_env() == 1
