"""Shared fixtures: the bundled zinc scenario and its session-scoped runs."""

import warnings
from dataclasses import replace

import pytest

from stefanlab.cli import bundled_config, parse_config
from stefanlab.runner import simulate


def run_quiet(cfg, p):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return simulate(cfg, p)


@pytest.fixture(scope="session")
def zinc():
    """(PhysicalParams, ScenarioConfig) from the bundled zinc config."""
    return parse_config(bundled_config("zinc"))


@pytest.fixture(scope="session")
def zinc_run(zinc):
    """Full output-feedback zinc run (the acceptance scenario)."""
    p, cfg = zinc
    res = run_quiet(cfg, p)
    assert res.completed, res.failure
    return res


@pytest.fixture(scope="session")
def conservation_pair(zinc):
    """Base and (2N, dt/2)-refined runs over a transient-dominated horizon."""
    p, cfg = zinc
    base_cfg = replace(cfg, t_end=1000.0, checkpoint_every=10**9)
    fine_cfg = replace(
        cfg, t_end=1000.0, grid_n=2 * cfg.grid_n, dt=0.5 * cfg.dt, checkpoint_every=10**9
    )
    return run_quiet(base_cfg, p), run_quiet(fine_cfg, p), base_cfg, fine_cfg


@pytest.fixture(scope="session")
def equivalence_runs(zinc):
    """Output- and state-feedback runs with Hhat = H and zero observer gain."""
    p, cfg = zinc
    degenerate = replace(cfg, Hhat=cfg.H, lam=0.0, t_end=200.0, checkpoint_every=10**9)
    out = run_quiet(degenerate, p)
    state = run_quiet(replace(degenerate, mode="state_feedback"), p)
    return out, state
