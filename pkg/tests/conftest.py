"""Shared test machinery: finite-difference gradient checks and synthetic
dataset builders."""

import datetime

import numpy as np
import pytest

FD_EPS = 1e-5
FD_TOL = 1e-4


def numeric_grad(loss_fn, arr, eps=FD_EPS):
    """Central finite differences of a scalar loss with respect to ``arr``
    (perturbed in place and restored)."""
    grad = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        old = arr[idx]
        arr[idx] = old + eps
        fp = loss_fn()
        arr[idx] = old - eps
        fm = loss_fn()
        arr[idx] = old
        grad[idx] = (fp - fm) / (2 * eps)
    return grad


def max_rel_err(a, b):
    """Elementwise |a-b| / max(1, |a|, |b|), reduced to the maximum."""
    a = np.asarray(a)
    b = np.asarray(b)
    denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / denom))


def nudge_biases(layers, rng, scale=0.1):
    """Move bias vectors off zero so no ReLU kink or pooling tie sits exactly
    at the finite-difference evaluation point (exact zeros otherwise occur
    downstream of ReLU layers with freshly zeroed biases)."""
    for lyr in layers:
        for name, p in zip(lyr.param_names(), lyr.params()):
            if name == "b":
                p += rng.normal(scale=scale, size=p.shape)


def check_layer_gradients(layer, x, rng, training=False, tol=FD_TOL):
    """Assert analytic input/parameter gradients match central differences."""
    y = layer.forward(x, training=training)
    upstream = rng.normal(size=y.shape)
    dx = layer.backward(upstream)
    analytic = [g.copy() for g in layer.grads()]

    def loss():
        return float(np.sum(layer.forward(x, training=training) * upstream))

    errs = [max_rel_err(dx, numeric_grad(loss, x))]
    for p, ag in zip(layer.params(), analytic):
        errs.append(max_rel_err(ag, numeric_grad(loss, p)))
    worst = max(errs)
    assert worst <= tol, f"{layer.name}: max relative error {worst:.3e}"
    return worst


def check_model_gradients(model, x, rng, tol=FD_TOL):
    nudge_biases(model.layers, rng)
    y = model.forward(x)
    upstream = rng.normal(size=y.shape)
    dx = model.backward(upstream)
    analytic = [g.copy() for g in model.grads()]

    def loss():
        return float(np.sum(model.forward(x) * upstream))

    errs = [max_rel_err(dx, numeric_grad(loss, x))]
    for p, ag in zip(model.params(), analytic):
        errs.append(max_rel_err(ag, numeric_grad(loss, p)))
    worst = max(errs)
    assert worst <= tol, f"composed model: max relative error {worst:.3e}"
    return worst


def lagged_mixture_values(n=500, noise=0.05, seed=11):
    """Four-channel synthetic series: channel 0 is a lagged linear mixture of
    the three smooth driver channels plus Gaussian noise.

    The drivers are slow sinusoid blends (periods >= 59 steps), so adjacent
    samples stay close and the target remains recoverable through max
    pooling.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(n + 3, dtype=np.float64)
    c1 = np.sin(2 * np.pi * t / 97) + 0.5 * np.sin(2 * np.pi * t / 223 + 1.0)
    c2 = np.cos(2 * np.pi * t / 149) + 0.5 * np.sin(2 * np.pi * t / 59 + 0.3)
    c3 = np.sin(2 * np.pi * t / 193 + 2.0) + 0.4 * np.cos(2 * np.pi * t / 109)
    eps = rng.normal(scale=noise, size=n + 3)
    c0 = np.empty(n + 3)
    c0[:3] = 0.0
    for i in range(3, n + 3):
        c0[i] = 0.9 * c1[i - 1] - 0.6 * c2[i - 2] + 0.8 * c3[i - 1] + eps[i]
    return np.column_stack([c0, c1, c2, c3])[3:]


def synthetic_table(n=500, noise=0.05, seed=11, order=None):
    from hyperts.data import SeriesTable

    order = order or ["T0", "T1", "T2", "T3"]
    values = lagged_mixture_values(n=n, noise=noise, seed=seed)
    start = datetime.date(2015, 1, 1)
    dates = [start + datetime.timedelta(days=i) for i in range(n)]
    return SeriesTable(dates=dates, order=list(order), values=values)


def market_like_csvs(tmp_path, n_rows=2008, rho=0.9483, seed=2015):
    """Four price-like CSV exports over 2015+ weekdays whose aligned
    intersection has exactly ``n_rows`` rows and whose first two columns have
    Pearson correlation ``rho`` by construction (up to sampling error well
    inside 0.01 at this length).

    Each ticker is missing a few distinct dates (disjoint drop sets of sizes
    2/3/3/2), so the inner join removes exactly 10 of the 2018 base rows.
    """
    import json

    n_base = n_rows + 10
    rng = np.random.default_rng(seed)
    day = datetime.date(2015, 1, 1)
    dates = []
    while len(dates) < n_base:
        if day.weekday() < 5:
            dates.append(day)
        day += datetime.timedelta(days=1)
    z, w, u, v = rng.normal(size=(4, n_base))
    col0 = 50.0 + 5.0 * z
    col1 = 30.0 + 4.0 * (rho * z + np.sqrt(1.0 - rho ** 2) * w)
    col2 = 60.0 + 6.0 * (0.8 * z + 0.6 * u)
    col3 = 700.0 + 40.0 * (0.4 * z + 0.9 * v)
    values = np.column_stack([col0, col1, col2, col3])
    order = ["Copper", "FCX", "SCCO", "CLP"]
    drops = {"Copper": {100, 1500}, "FCX": {5, 900, 1700},
             "SCCO": {250, 1000, 1990}, "CLP": {40, 1234}}
    paths = {}
    for j, name in enumerate(order):
        path = tmp_path / f"{name}.csv"
        with open(path, "w") as fh:
            fh.write("Date,Open,High,Low,Close,Adj Close,Volume\n")
            for i, d in enumerate(dates):
                if i in drops[name]:
                    continue
                px = values[i, j]
                fh.write(f"{d.isoformat()},{px},{px},{px},{px},{px},1\n")
        paths[name] = str(path)
    manifest = tmp_path / "manifest.json"
    with open(manifest, "w") as fh:
        json.dump({"tickers": paths, "order": order, "target": "Copper"}, fh)
    return manifest


def write_ticker_csvs(tmp_path, table, drop=None):
    """Write one Yahoo!-style CSV per column; ``drop`` maps ticker -> set of
    row indices to omit (for alignment tests). Returns a manifest path."""
    import json

    drop = drop or {}
    paths = {}
    for j, name in enumerate(table.order):
        path = tmp_path / f"{name}.csv"
        skip = drop.get(name, set())
        with open(path, "w") as fh:
            fh.write("Date,Open,High,Low,Close,Adj Close,Volume\n")
            for i, (day, row) in enumerate(zip(table.dates, table.values)):
                if i in skip:
                    continue
                v = row[j]
                fh.write(f"{day.isoformat()},{v},{v},{v},{v},{v},1000\n")
        paths[name] = str(path)
    manifest = tmp_path / "manifest.json"
    with open(manifest, "w") as fh:
        json.dump({"tickers": paths, "order": table.order,
                   "target": table.order[0]}, fh)
    return manifest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
