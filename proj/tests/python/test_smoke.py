import math
import os
import random
import tempfile

import pytest

import realized_risk as rr


def test_version():
    assert rr.__version__


def test_subordinate_clock():
    prices = [0.001 * j for j in range(391)]
    tau, returns, fallback = rr.subordinate(prices, kind="clock", c=39)
    assert len(tau) == 40 and len(returns) == 39
    assert tau[0] == 0 and tau[-1] == 390
    assert all(abs(r - 0.01) < 1e-12 for r in returns)
    assert not fallback


def test_bad_day_raises_value_error():
    with pytest.raises(ValueError):
        rr.subordinate([0.0] * 10)


def test_fit_and_scale():
    days = rr.generate(family="t", dependence="iid", c=39, phi=0.0, nu=4.0, daily_sd=0.01, n_days=40, seed=3)
    returns = [r for day in days for r in day]
    model = rr.fit_iid_t(returns)
    assert model.sigma > 0 and model.nu > 2
    daily = rr.TailModel(model.mu, model.sigma, model.nu, c=39)
    cf = rr.cf_risk_pair(daily, 0.05)
    mc = rr.mc_risk_pair(daily, 0.05, batch_size=200000, seed=1)
    assert cf.es < cf.var < 0
    assert abs(cf.var - mc.var) < 0.05 * abs(cf.var)
    dh = rr.dh_risk_pair(days[0], 0.05)
    assert dh.es < dh.var


def test_cf_cdf_monotone():
    model = rr.TailModel(0.0, 0.001, 5.0, phi=-0.1, c=39)
    values = rr.cf_cdf(model, [-0.02, -0.005, 0.0, 0.005, 0.02])
    assert values == sorted(values)
    assert abs(values[2] - 0.5) < 1e-6


def test_losses_and_backtest():
    assert rr.pinball_loss(-1.0, 0.0, 0.05) == pytest.approx(0.05)
    rng = random.Random(4)
    y = [rng.gauss(0.0, 1.0) for _ in range(500)]
    q = [-1.6448536] * 500
    e = [-2.0627128] * 500
    assert math.isfinite(rr.joint_loss(q[0], e[0], y[0], 0.05))
    out = rr.as_tests(y, q, e, 0.05, n_boot=200, seed=1)
    assert 0.0 <= out["as1_p"] <= 1.0 and 0.0 <= out["as2_p"] <= 1.0


def test_structure_function_brownian():
    rng = random.Random(7)
    paths = []
    for _ in range(200):
        s = [0.0]
        for _ in range(39):
            s.append(s[-1] + rng.gauss(0.0, 1.0))
        paths.append(s)
    out = rr.structure_function(paths)
    assert len(out["q"]) == len(out["H"]) == 40
    q2 = min(range(40), key=lambda i: abs(out["q"][i] - 2.0))
    assert abs(out["H"][q2] / out["q"][q2] - 0.5) < 0.05


def test_scaling_bias_and_drift():
    biased, truth = rr.scaling_bias(0.0004, 0.01, 39, 0.05)
    # positive drift shrinks by sqrt(c) instead of growing with c
    assert biased < truth
    assert truth == pytest.approx(0.0004 - 1.6448536 * 0.01, abs=1e-7)
    drift = rr.ema_drift([0.01] * 30, beta=21, init_window=5)
    assert all(math.isnan(d) for d in drift[:5])
    assert drift[-1] == pytest.approx(0.01)


def test_run_estimate_roundtrip():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "bars.csv")
        rng = random.Random(2)
        with open(path, "w") as f:
            f.write("timestamp,price,volume\n")
            for day in ("2021-03-01", "2021-03-02", "2021-03-03"):
                price = 100.0
                for minute in range(391):
                    hh, mm = divmod(9 * 60 + 30 + minute, 60)
                    f.write(f"{day} {hh:02d}:{mm:02d}:00,{price:.6f},{rng.randint(1, 100)}\n")
                    price *= math.exp(rng.gauss(0.0, 0.001))
        written = rr.run_estimate(f"input = {path}\nmethod = cf\noutput_dir = {tmp}/out\n")
        assert len(written) == 1
        with open(written[0]) as f:
            rows = f.read().strip().splitlines()
        assert len(rows) == 1 + 3 * 3
