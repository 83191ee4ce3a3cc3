"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``python tests/test_acceptance.py`` or ``pytest tests/test_acceptance.py -s``.
"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

from conftest import mc_bound, random_measure, random_probes
from etstable.charfn import (EtsParams, SubordinatorParams, TidParams, ets_cf, subordinator_cf,
                             symmetric_tid_cf, tid_cf)
from etstable.cli import main as cli_main
from etstable.density import GridSpec, invert_cf, ks_distance
from etstable.dispersion import cholesky, transform_law
from etstable.fpde import GeneratorSymbol, closed_form, density_at_time, grid_for_symbol, relative_error, solve
from etstable.measures import SpectralMeasure, symmetrize
from etstable.sampling import RngState, empirical_cf, sample_ets, sample_tempered_subordinator, transform_samples
from etstable.series import METHODS, partial_sum, remainder_bound, series_density

ALPHAS = (0.3, 0.8, 1.2, 1.7)


@pytest.fixture
def report(capsys):
    def emit(number, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{name} {'ok' if passed else 'FAILED'}" for name, passed in checks)
        with capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        failed = [name for name, passed in checks if not passed]
        assert not failed, f"criterion {number} failed: {failed}"
    return emit


def _cf_bounds(cf, u, tol=1e-12):
    at_zero = np.all(cf(np.zeros((1, u.shape[1]))) == 1.0)
    vals, mirror = cf(u), cf(-u)
    bounded = np.all(np.abs(vals) <= 1.0 + tol)
    hermitian = np.max(np.abs(mirror - np.conj(vals))) <= tol
    return bool(at_zero and bounded and hermitian)


def test_criterion_1_cf_normalisation(report):
    rng = np.random.default_rng(101)
    u = random_probes(rng, 1000, radius=10.0)
    checks = []
    for alpha in ALPHAS:
        r = random_measure(rng)
        tid = TidParams(alpha, r, rng.normal(size=2))
        checks.append((f"tid a={alpha}", _cf_bounds(lambda v: tid_cf(tid, v), u)))
        if alpha < 1:
            checks.append((f"tid0 a={alpha}", _cf_bounds(lambda v: tid_cf(tid, v, alternative=True), u)))
        checks.append((f"sym a={alpha}", _cf_bounds(lambda v: symmetric_tid_cf(r, alpha, v), u)))
        ets = EtsParams(alpha, 0.7, [0.4, -0.2], [[1.0, 0.3], [0.3, 0.8]])
        checks.append((f"ets a={alpha}", _cf_bounds(lambda v: ets_cf(ets, v), u)))
        sub = SubordinatorParams(alpha, 1.3)
        checks.append((f"sub a={alpha}", _cf_bounds(lambda v: subordinator_cf(sub, v[..., 0]), u[:, :1])))
    report(1, checks)


def test_criterion_2_symmetric_reality(report):
    rng = np.random.default_rng(202)
    u = random_probes(rng, 500, radius=10.0)
    real, agree, residue = True, True, True
    for alpha in ALPHAS:
        r = random_measure(rng)
        sym = np.asarray(symmetric_tid_cf(r, alpha, u))
        general = tid_cf(TidParams(alpha, symmetrize(r)), u)
        real &= not np.iscomplexobj(sym)
        agree &= np.max(np.abs(sym - general)) <= 1e-10
        residue &= np.max(np.abs(general.imag)) <= 1e-12
    report(2, [("real-valued", real), ("agrees with tid_cf", agree), ("imaginary residue", residue)])


def test_criterion_3_gaussian_limit(report):
    axis = np.linspace(-6.0, 6.0, 61)
    u = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
    gauss = np.exp(-0.5 * np.sum(u * u, axis=1))
    checks = []
    for alpha in ALPHAS:
        p = EtsParams(alpha, 1e8, [0.0, 0.0], np.eye(2))
        checks.append((f"a={alpha}", np.max(np.abs(ets_cf(p, u) - gauss)) <= 1e-6))
    report(3, checks)


def test_criterion_4_subordinator(report):
    n = 1_000_000
    probes = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
    checks = []
    for seed, (alpha, theta) in enumerate([(0.5, 1.0), (1.0, 1.0), (1.5, 2.0)]):
        p = SubordinatorParams(alpha, theta)
        t = sample_tempered_subordinator(RngState(400 + seed), p, n)
        se = t.std() / np.sqrt(n)
        checks.append((f"mean ({alpha},{theta})", abs(t.mean() - 1.0) <= 3 * se))
        err = np.abs(empirical_cf(t, probes) - subordinator_cf(p, probes))
        checks.append((f"cf ({alpha},{theta})", bool(np.all(err <= mc_bound(n)))))
    report(4, checks)


def test_criterion_5_ets_sampler(report):
    p = EtsParams(1.3, 1.2, [0.5, -1.0], [[1.0, 0.5], [0.5, 2.0]])
    n = 100_000
    b = sample_ets(RngState(501), p, n)
    u = np.random.default_rng(502).normal(scale=1.5, size=(20, 2))
    cf_ok = bool(np.all(np.abs(empirical_cf(b.values, u) - ets_cf(p, u)) <= mc_bound(n)))
    big = sample_ets(RngState(503), p, 1_000_000)
    cov = np.cov(big.values.T)
    cov_ok = np.linalg.norm(cov - p.sigma) <= 0.05 * np.linalg.norm(p.sigma)
    report(5, [("empirical cf", cf_ok), ("covariance", cov_ok)])


def test_criterion_6_density_inversion(report):
    g = GridSpec([0.0], [8.0], [4096])
    d = invert_cf(lambda u: np.exp(-0.5 * np.sum(u * u, axis=-1)), g)
    x = g.x_axes()[0]
    gauss_ok = np.max(np.abs(d.values - np.exp(-0.5 * x * x) / np.sqrt(2 * np.pi))) <= 1e-6
    law = EtsParams(1.5, 1.0, [0.0], [[1.0]])
    ets = invert_cf(lambda u: ets_cf(law, u), GridSpec([0.0], [40.0], [8192]))
    n = 100_000
    stat = ks_distance(sample_ets(RngState(601), law, n), ets)
    report(6, [("gaussian", gauss_ok), ("mass", abs(ets.mass - 1.0) <= 1e-3),
               ("min value", ets.min_value >= -1e-6), ("ks", stat < 1.63 / np.sqrt(n))])


def test_criterion_7_evolution_equation(report):
    tid = TidParams(1.3, SpectralMeasure([[1.0], [-0.5], [2.0], [-1.5]], [0.6, 0.8, 0.3, 0.4]), [0.2])
    symbols = {"tid": GeneratorSymbol("tid_psi", tid),
               "ets": GeneratorSymbol("ets", EtsParams(1.5, 1.0, [0.3], [[1.0]]))}
    grid = GridSpec([0.0], [40.0], [64])
    checks = []
    for name, g in symbols.items():
        exact = closed_form(g, grid, 1.0)
        checks.append((f"{name} dt=1e-3", relative_error(solve(g, grid, 1.0, 1e-3), exact) <= 1e-8))
        ratio = (relative_error(solve(g, grid, 1.0, 0.02), exact)
                 / relative_error(solve(g, grid, 1.0, 0.01), exact))
        checks.append((f"{name} halving ratio {ratio:.1f}", 12 <= ratio <= 20))
    report(7, checks)


def test_criterion_8_series_methods(report):
    g = GeneratorSymbol("ets", EtsParams(1.5, 1.0, [0.0], [[1.0]]))
    tid = GeneratorSymbol("tid_psi", TidParams(0.7, SpectralMeasure([[1.0], [-0.6]], [0.8, 0.5]), [0.1]))
    agree = True
    for sym in (g, tid):
        grid = grid_for_symbol(sym, 256)
        states = [partial_sum(sym, grid, 1.0, 20, m) for m in METHODS]
        for i, j in [(0, 1), (0, 2), (1, 2)]:
            for a, b in zip(states[i].terms, states[j].terms):
                scale = np.maximum(np.abs(b.values), 1e-300)
                agree &= np.max(np.abs(a.values - b.values) / scale) <= 1e-14

    grid = grid_for_symbol(g, 256, log_floor=-5.5)
    st = partial_sum(g, grid, 1.0, 20)
    z = st.symbol_values
    inside = np.abs(z) <= 5.0
    taylor_err = np.max(np.abs(st.partial_sum.values - np.exp(z))[inside])

    dgrid = grid_for_symbol(g, 1024, log_floor=-18.6)
    long = partial_sum(g, dgrid, 1.0, 64)
    series = series_density(g, dgrid, 1.0, 64)
    fpde = density_at_time(g, dgrid, 1.0)
    density_ok = np.max(np.abs(series.values - fpde.values)) <= 1e-6 + np.max(remainder_bound(long))
    report(8, [("terms agree", bool(agree)),
               (f"N=20 vs exp on |t Lambda| <= 5, err {taylor_err:.1e}", taylor_err <= 1e-10),
               ("series density vs fpde", density_ok)])


def test_criterion_9_dispersion(report):
    target = np.array([[2.0, 0.6, -0.3], [0.6, 1.0, 0.2], [-0.3, 0.2, 0.5]])
    base = EtsParams.standard(1.4, 0.9, 3)
    delta = cholesky(target)
    law = transform_law(base, delta)
    u = np.random.default_rng(901).normal(size=(20, 3))
    cf_ok = np.max(np.abs(ets_cf(law, u) - ets_cf(EtsParams(1.4, 0.9, np.zeros(3), target), u))) <= 1e-12
    batch = transform_samples(sample_ets(RngState(902), base, 100_000), delta)
    mc_ok = bool(np.all(np.abs(empirical_cf(batch.values, u) - ets_cf(law, u)) <= mc_bound(batch.count)))
    report(9, [("transformed cf", cf_ok), ("transformed samples", mc_ok)])


def _run_all(tmp: Path, out: str) -> dict:
    ets = {"family": "ets", "alpha": 1.5, "lambda": 1.0, "mu": [0.0], "sigma": [[1.0]]}
    tid = {"family": "tid", "alpha": 1.3, "m": [0.2],
           "measure": {"dim": 1, "atoms": [{"x": [1.0], "w": 0.6}, {"x": [-0.5], "w": 0.8}]}}
    runs = {
        "cf": ("cf", {"law": tid, "probes": [[0.0], [0.5], [3.0]]}),
        "sample": ("sample", {"law": ets, "count": 20_000, "seed": 5}),
        "pdf_invert": ("pdf", {"law": ets, "grid": {"n": 8192, "half_width": [40.0]}}),
        "pdf_fpde": ("pdf", {"law": tid, "grid": {"n": 512}, "method": "fpde"}),
        "pdf_series": ("pdf", {"law": ets, "grid": {"n": 1024, "log_floor": -18.6}, "method": "series",
                               "n_terms": 64}),
        "pde": ("pde", {"law": tid, "grid": {"n": 64, "half_width": [40.0]}, "t_end": 1.0, "dt": 1e-2}),
        "series": ("series", {"law": ets, "grid": {"n": 128, "log_floor": -3.0}, "n_terms": 20}),
        # both runs test the first run's artifacts so the ks config is identical too
        "ks": ("ks", {"samples": "a/sample/sample.csv", "density": "a/pdf_invert/pdf.csv"}),
    }
    codes, files = {}, {}
    for key, (command, config) in runs.items():
        path = tmp / f"{key}.json"
        path.write_text(json.dumps(config))
        codes[key] = cli_main([command, "--config", str(path), "--out", str(tmp / out / key)])
        for f in sorted((tmp / out / key).iterdir()):
            files[f"{key}/{f.name}"] = f.read_bytes()
    return {"codes": codes, "files": files}


def test_criterion_10_determinism(report, tmp_path):
    first = _run_all(tmp_path, "a")
    second = _run_all(tmp_path, "b")
    codes_ok = all(c == 0 for c in first["codes"].values()) and first["codes"] == second["codes"]
    complete = len(first["files"]) == 15
    identical = first["files"] == second["files"]
    report(10, [("exit codes", codes_ok), ("all artifacts written", complete),
                ("byte-identical outputs", identical)])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider", *sys.argv[1:]]))
