"""Tests for the independent shooting oracle: angular eigenvalues,
non-rotating ringdown frequencies, and the oracle's own convergence
properties.  The oracle shares no Heun machinery with the main pipeline,
so these tests exercise direct numerical integration only."""

import json
import pathlib

import pytest

from heunspectra import (
    PhysicalConfig,
    angular_eigenvalue,
    schwarzschild_qnm_modes,
)
from heunspectra.oracle import _angular_mismatch, _qnm_mismatch

FIXTURE = pathlib.Path(__file__).parent / "fixtures" / "schwarzschild_qnm.json"
M = 0.5


class TestAngularEigenvalue:
    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_nonrotating_anchor(self, l):
        cfg = PhysicalConfig(M=M, a=0.0, s=-1, l=l, m=0)
        E = angular_eigenvalue(cfg, omega=0.5 - 0.2j)
        assert abs(E - l * (l + 1)) < 1e-10

    def test_nonrotating_omega_independence(self):
        cfg = PhysicalConfig(M=M, a=0.0, s=-1, l=2, m=1)
        E1 = angular_eigenvalue(cfg, omega=0.5 - 0.2j)
        E2 = angular_eigenvalue(cfg, omega=1.5 + 0.8j)
        assert abs(E1 - E2) < 1e-10

    def test_rotating_eigenvalue_is_root_of_mismatch(self):
        cfg = PhysicalConfig(M=M, a=0.4, s=-1, l=1, m=0)
        omega = 0.5 + 0.2j
        E = angular_eigenvalue(cfg, omega)
        assert abs(E - 2.0) < 1.0  # perturbation of the a=0 value
        assert abs(_angular_mismatch(cfg.a, cfg.s, cfg.m, omega, E)) < 1e-9

    def test_matchpoint_insensitivity(self):
        cfg = PhysicalConfig(M=M, a=0.3, s=-1, l=1, m=1)
        omega = 0.6 + 0.15j
        E = angular_eigenvalue(cfg, omega)
        for u_match in (0.2, 0.4):
            assert abs(_angular_mismatch(cfg.a, cfg.s, cfg.m, omega, E,
                                         u_match=u_match)) < 1e-8

    def test_endpoint_offset_insensitivity(self):
        cfg = PhysicalConfig(M=M, a=0.3, s=-1, l=1, m=0)
        omega = 0.6 + 0.15j
        E = angular_eigenvalue(cfg, omega)
        ref = _angular_mismatch(cfg.a, cfg.s, cfg.m, omega, E)
        for eps in (1e-4, 1e-5):
            moved = _angular_mismatch(cfg.a, cfg.s, cfg.m, omega, E, eps=eps)
            assert abs(moved - ref) < 1e-7


class TestSchwarzschildQnm:
    def test_fundamental_matches_fixture(self):
        fix = json.loads(FIXTURE.read_text())
        om = schwarzschild_qnm_modes(M=M, s=-1, l=1, n_modes=1,
                                     seeds=[0.5 + 0.2j])[0]
        ref = complex(*fix["modes"]["1"][0])
        assert abs(om - ref) < 1e-8
        # reference value in 2M = 1 units: 0.4965 damping 0.1850
        assert om.real == pytest.approx(0.4965, abs=2e-4)
        assert abs(om.imag) == pytest.approx(0.1850, abs=2e-4)

    def test_overtone_ordering(self):
        fix = json.loads(FIXTURE.read_text())
        for l in (1, 2):
            oms = [complex(*v) for v in fix["modes"][str(l)]]
            assert abs(oms[1].imag) > abs(oms[0].imag)

    def test_l2_less_damped_relative(self):
        fix = json.loads(FIXTURE.read_text())
        om1 = complex(*fix["modes"]["1"][0])
        om2 = complex(*fix["modes"]["2"][0])
        assert abs(om2.imag) / abs(om2.real) < abs(om1.imag) / abs(om1.real)

    def test_fixture_roots_zero_the_mismatch(self):
        fix = json.loads(FIXTURE.read_text())
        for l, pairs in fix["modes"].items():
            E = int(l) * (int(l) + 1)
            for re, im in pairs:
                assert abs(_qnm_mismatch(M, -1, complex(re, im), E)) < 1e-8

    def test_halfstep_self_consistency(self):
        fix = json.loads(FIXTURE.read_text())
        om = complex(*fix["modes"]["1"][0])
        base = _qnm_mismatch(M, -1, om, 2.0)
        finer = _qnm_mismatch(M, -1, om, 2.0, r_match=8.0 * M,
                              r_far=120.0 * M)
        assert abs(base - finer) < 1e-6
