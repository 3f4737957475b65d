import numpy as np
import pytest

from tva import GridSpec, record_fixings, sample_ig_increment, simulate, simulate_lhw, simulate_vasicek


class TestGrid:
    def test_times(self):
        g = GridSpec(10.0, 200)
        assert g.h == pytest.approx(0.05)
        assert g.times[0] == 0.0 and g.times[-1] == pytest.approx(10.0)
        assert g.index_of(3.0) == 60

    def test_off_grid_date(self):
        with pytest.raises(ValueError):
            GridSpec(10.0, 7).index_of(1.0)

    @pytest.mark.parametrize("horizon,steps", [(0.0, 10), (1.0, 0)])
    def test_invalid(self, horizon, steps):
        with pytest.raises(ValueError):
            GridSpec(horizon, steps)


class TestIgIncrement:
    def test_moments(self, rng):
        h, vs = 0.5, 2.0
        x = sample_ig_increment(h, vs, rng, size=400_000)
        mean, var = h / vs, h / vs**3  # IG(h/vs, h^2)
        assert x.min() > 0
        assert x.mean() == pytest.approx(mean, abs=4 * np.sqrt(var / x.size))
        assert x.var() == pytest.approx(var, rel=0.02)

    def test_laplace_transform(self, rng):
        from tva import ig_cumulant

        h, vs = 0.05, 17.57
        x = sample_ig_increment(h, vs, rng, size=400_000)
        for z in (-50.0, -5.0):
            emp = np.exp(z * x)
            assert emp.mean() == pytest.approx(np.exp(h * ig_cumulant(z, vs)), abs=4 * emp.std() / np.sqrt(x.size))

    def test_scalar_draw(self, rng):
        assert np.ndim(sample_ig_increment(0.1, 3.0, rng)) == 0

    def test_rejects_bad_arguments(self, rng):
        with pytest.raises(ValueError):
            sample_ig_increment(0.0, 3.0, rng)


class TestVasicekPaths:
    def test_terminal_moments(self, vparams):
        p = vparams
        paths = simulate_vasicek(p, GridSpec(5.0, 500), 20_000, 1)
        rT = paths.rates[:, -1]
        T = 5.0
        mean = p.k + (p.r0 - p.k) * np.exp(-p.a * T)
        var = p.sigma**2 / (2 * p.a) * (1 - np.exp(-2 * p.a * T))
        assert rT.mean() == pytest.approx(mean, abs=4 * np.sqrt(var / rT.size))
        assert rT.var() == pytest.approx(var, rel=0.05)

    def test_starts_at_r0(self, vasicek_paths):
        assert np.all(vasicek_paths.rates[:, 0] == 0.02)


@pytest.mark.parametrize("name", ["vasicek", "lhw"])
def test_discount_factors_fit_initial_curve(name, vasicek, lhw):
    model = vasicek if name == "vasicek" else lhw
    paths = simulate(model, GridSpec(10.0, 200), 20_000, 3)
    D = paths.discount_factors()
    for i in (40, 100, 200):
        t = paths.times[i]
        se = D[:, i].std() / np.sqrt(D.shape[0])
        # left-endpoint discounting on an increasing curve carries an O(h) bias
        bias = 0.5 * paths.h * t * 0.01
        assert D[:, i].mean() == pytest.approx(vasicek.curve.discount(t), abs=4 * se + bias)


@pytest.mark.parametrize("name", ["vasicek", "lhw"])
def test_discounted_bond_is_martingale(name, vasicek, lhw):
    model = vasicek if name == "vasicek" else lhw
    paths = simulate(model, GridSpec(4.0, 200), 20_000, 5)
    t, T = 4.0, 9.0
    x = paths.discount_factors()[:, -1] * model.bond(t, T, paths.rates[:, -1])
    se = x.std() / np.sqrt(x.size)
    assert x.mean() == pytest.approx(vasicek.curve.discount(T), abs=4 * se + 0.5 * paths.h * t * 0.01)


class TestLhwPaths:
    def test_upward_jumps_only(self, lhw):
        paths = simulate_lhw(lhw, GridSpec(10.0, 200), 200, 9)
        kappa = lhw.kappa(paths.times[:-1])
        drift = lhw.params.alpha * (kappa[None, :] - paths.rates[:, :-1]) * paths.h
        jumps = np.diff(paths.rates, axis=1) - drift
        assert np.all(jumps > 0)

    def test_requires_model(self):
        with pytest.raises(TypeError):
            simulate(object(), GridSpec(), 10, 0)


class TestDeterminism:
    def test_same_seed_same_paths(self, lhw):
        a = simulate(lhw, GridSpec(2.0, 40), 50, 42).rates
        b = simulate(lhw, GridSpec(2.0, 40), 50, 42).rates
        np.testing.assert_array_equal(a, b)

    def test_prefix_stable(self, vasicek):
        small = simulate(vasicek, GridSpec(2.0, 40), 10, 42).rates
        large = simulate(vasicek, GridSpec(2.0, 40), 30, 42).rates
        np.testing.assert_array_equal(small, large[:10])

    def test_seeds_differ(self, vasicek):
        a = simulate(vasicek, GridSpec(2.0, 40), 5, 1).rates
        b = simulate(vasicek, GridSpec(2.0, 40), 5, 2).rates
        assert not np.array_equal(a, b)


class TestFixingsAndExport:
    def test_fixings(self, vasicek_paths, vasicek):
        fx = vasicek_paths.fixings
        assert fx.shape == (vasicek_paths.n_paths, 10)
        np.testing.assert_allclose(fx[:, 0], 1.0 / vasicek.curve.discount(1.0))
        i = vasicek_paths.grid.index_of(4.0)
        np.testing.assert_allclose(fx[:, 4], 1.0 / vasicek.bond(4.0, 5.0, vasicek_paths.rates[:, i]))

    def test_fixings_need_grid_dates(self, vasicek, par_swap):
        paths = simulate(vasicek, GridSpec(10.0, 7), 5, 0)
        with pytest.raises(ValueError):
            record_fixings(paths, par_swap)

    def test_csv(self, vasicek_paths, tmp_path):
        f = tmp_path / "paths.csv"
        vasicek_paths.to_csv(f, max_paths=2)
        lines = f.read_text().splitlines()
        assert lines[0] == "path,step,time,rate"
        assert len(lines) == 1 + 2 * 201


def test_ig_increment_on_study_grid(rng):
    h, vs = 0.05, 17.570728
    x = sample_ig_increment(h, vs, rng, size=1_000_000)
    assert h / vs == pytest.approx(2.8457e-3, rel=1e-4)
    assert x.mean() == pytest.approx(h / vs, abs=3 * np.sqrt(h / vs**3 / x.size))
    assert x.var() == pytest.approx(h / vs**3, rel=0.05)


def test_zero_volatility_path(vparams, par_swap):
    from dataclasses import replace

    from tva import VasicekModel

    p = replace(vparams, sigma=0.0)
    paths = record_fixings(simulate(VasicekModel(p), GridSpec(10.0, 2000), 3, 0), par_swap)
    t = paths.times
    exact = p.r0 * np.exp(-p.a * t) + p.k * (1 - np.exp(-p.a * t))
    np.testing.assert_allclose(paths.rates[0], exact, atol=2e-5)
    assert np.ptp(paths.fixings, axis=0).max() == 0.0


def test_first_fixing_is_deterministic(lhw_paths, vasicek):
    assert np.ptp(lhw_paths.fixings[:, 0]) == 0.0
    assert lhw_paths.fixings[0, 0] == pytest.approx(1 / vasicek.curve.discount(1.0))


@pytest.mark.parametrize("name", ["vasicek", "lhw"])
def test_grid_refinement(name, vasicek, lhw):
    model = vasicek if name == "vasicek" else lhw
    coarse = simulate(model, GridSpec(10.0, 200), 10_000, 21).discount_factors()[:, -1]
    fine = simulate(model, GridSpec(10.0, 400), 10_000, 22).discount_factors()[:, -1]
    se = np.hypot(coarse.std(), fine.std()) / np.sqrt(10_000)
    # the O(h) bias of left-endpoint discounting halves with the step
    bias = 0.25 * 0.05 * 10 * 0.01
    assert abs(coarse.mean() - fine.mean()) <= 2 * se + bias
