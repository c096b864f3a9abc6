import numpy as np
import pytest

from chemostokes.verification import (CONVERGENCE_PRESETS, barenblatt_profile,
                                      barenblatt_study, heat_mode_study,
                                      rotation_advection_study,
                                      run_convergence,
                                      stokes_manufactured_study)


class TestBarenblattProfile:
    def test_mass_is_prescribed(self):
        x = np.linspace(-4, 4, 400001)  # support widens as m -> 1
        for m in (1.5, 2.0, 3.0):
            n = barenblatt_profile(x, 1.0, m, 0.25)
            assert np.trapezoid(n, x) == pytest.approx(0.25, rel=1e-6)

    def test_self_similar_mass_invariance(self):
        x = np.linspace(-2, 2, 200001)
        a = np.trapezoid(barenblatt_profile(x, 1.0, 2.0, 0.3), x)
        b = np.trapezoid(barenblatt_profile(x, 2.0, 2.0, 0.3), x)
        assert a == pytest.approx(b, rel=1e-6)

    def test_compact_support(self):
        x = np.linspace(-2, 2, 1001)
        n = barenblatt_profile(x, 1.0, 2.0, 0.25)
        assert n[0] == 0.0 and n[-1] == 0.0
        assert np.max(n) > 0.0


class TestStudies:
    def test_heat_mode(self):
        res = heat_mode_study()
        assert res.order >= 1.5
        assert res.errors[-1] <= 0.02  # 64-cell rate error within 2%
        assert res.passed

    def test_barenblatt(self):
        res = barenblatt_study(resolutions=(32, 64))
        assert res.order >= 0.8
        assert res.passed

    def test_stokes_manufactured(self):
        res = stokes_manufactured_study(resolutions=(16, 32))
        assert res.order >= 1.5
        assert res.passed

    @pytest.mark.slow
    def test_rotation_advection(self):
        res = rotation_advection_study(resolutions=(32, 64))
        assert all(e < 1e-12 for e in res.extra["mass_errors"])
        assert res.passed

    def test_unknown_preset_rejected(self):
        with pytest.raises(ValueError):
            run_convergence("spectral-magic")

    def test_table_output(self):
        res = heat_mode_study(resolutions=(16, 32))
        table = res.table()
        assert "preset=heat-mode" in table
        assert "resolution,error" in table

    def test_all_presets_registered(self):
        assert set(CONVERGENCE_PRESETS) == {
            "heat-mode", "barenblatt", "stokes-manufactured",
            "rotation-advection"}
