"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are
written straight to the terminal.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest
import scipy.linalg as sla

from conftest import random_spd, random_sym
from lielpp.analysis import (
    laplacian_dominance_check,
    random_weight_pair,
    rank_one_equivalence_check,
    reduction_error_compare,
)
from lielpp.cli import main
from lielpp.errors import NotPositiveDefinite
from lielpp.evaluation import loo_knn_eval
from lielpp.graph import heat_weights, knn_graph
from lielpp.reducers import (
    ProjectionMap,
    lie_lpp_energy,
    lie_lpp_fit,
    lie_lpp_transform,
    lie_lpp_transform_set,
    pencil_matrices,
)
from lielpp.spd import (
    SpdMatrix,
    exp_sym,
    group_inverse,
    group_op,
    lem_distance,
    log_spd,
)
from lielpp.symlin import frechet_exp, frechet_log, gen_eig_sym_def
from lielpp.synth import synth_spd_clusters

DATA = Path(__file__).parent / "data"


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail

    return emit


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_c01_round_trips(verdict):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for D in (2, 5, 10, 30):
        for _ in range(100):
            S = random_spd(rng, D, spread=2.0)
            err = np.linalg.norm(exp_sym(log_spd(S)).entries - S) / (1 + np.linalg.norm(S))
            worst = max(worst, err)
    elapsed = time.perf_counter() - start
    verdict(1, worst <= 1e-10 and elapsed < 5.0,
            f"400 round trips, worst scaled error {worst:.2e} (<= 1e-10), {elapsed:.2f} s (< 5 s)")


def test_c02_frechet_gradients(verdict):
    rng = np.random.default_rng(2)
    h = 1e-5
    worst_log = worst_exp = 0.0
    for _ in range(50):
        S, T = random_spd(rng, 5), random_sym(rng, 5)
        fd = (log_spd(S + h * T).entries - log_spd(S - h * T).entries) / (2 * h)
        worst_log = max(worst_log, rel(frechet_log(S, T), fd))
    for _ in range(50):
        X, T = random_sym(rng, 5), random_sym(rng, 5)
        fd = (sla.expm(X + h * T) - sla.expm(X - h * T)) / (2 * h)
        worst_exp = max(worst_exp, rel(frechet_exp(X, T), fd))
    ok = worst_log <= 1e-6 and worst_exp <= 1e-6
    verdict(2, ok, f"worst relative error log {worst_log:.2e}, exp {worst_exp:.2e} (<= 1e-6)")


def test_c03_geometry(verdict):
    rng = np.random.default_rng(3)
    bad = []
    for _ in range(200):
        D = int(rng.integers(2, 7))
        a, b, c = (SpdMatrix(random_spd(rng, D, spread=2.0)) for _ in range(3))
        dab, dbc, dac = lem_distance(a, b), lem_distance(b, c), lem_distance(a, c)
        if dab < 0 or abs(dab - lem_distance(b, a)) > 1e-10 or lem_distance(a, a) > 1e-10:
            bad.append("metric")
        if dac > dab + dbc + 1e-9:
            bad.append("triangle")
        if abs(lem_distance(group_op(c, a), group_op(c, b)) - dab) > 1e-9:
            bad.append("bi-invariance")
        m = exp_sym(0.5 * (log_spd(a) + log_spd(b)))
        if max(abs(lem_distance(a, m) - dab / 2), abs(lem_distance(m, b) - dab / 2)) > 1e-9:
            bad.append("midpoint")
        I = np.eye(D)
        errs = [
            group_op(group_op(a, b), c).entries - group_op(a, group_op(b, c)).entries,
            group_op(a, b).entries - group_op(b, a).entries,
            group_op(a, I).entries - a.entries,
            group_op(a, group_inverse(a)).entries - I,
        ]
        if max(np.abs(e).max() for e in errs) > 1e-9:
            bad.append("group")
    verdict(3, not bad, f"200 triples, violations: {sorted(set(bad)) or 'none'}")


def test_c04_laplacian(verdict):
    rng = np.random.default_rng(4)
    bad = 0
    for _ in range(50):
        n = int(rng.integers(3, 25))
        X = rng.standard_normal((n, 3))
        wg = heat_weights(knn_graph(X, int(rng.integers(1, n)), "em"))
        W, L = wg.W, wg.L
        ok = np.abs(L.sum(axis=1)).max() <= 1e-12 * max(wg.D.max(), 1.0)
        lam = np.linalg.eigvalsh(L)
        ok &= lam[0] >= -1e-9 * lam[-1]
        for _ in range(20):
            x = rng.standard_normal(n)
            quad = 0.5 * np.sum(W * (x[:, None] - x[None, :]) ** 2)
            ok &= abs(x @ L @ x - quad) <= 1e-10 * quad
        bad += not ok
    verdict(4, bad == 0, f"50 graphs, {bad} failing (quadratic form, row sums, PSD)")


def weight_pairs(seed):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        n = int(rng.integers(2, 16))
        yield n, *random_weight_pair(rng, n)


def test_c05_laplacian_dominance(verdict):
    held = sum(laplacian_dominance_check(W, Wt).holds for _, W, Wt in weight_pairs(5))
    verdict(5, held == 200, f"dominance holds in {held}/200 random pairs")


def test_c06_reduction_error(verdict):
    held = 0
    for n, W, Wt in weight_pairs(5):
        held += all(
            reduction_error_compare(W, Wt, d).holds for d in sorted({1, -(-n // 2), n})
        )
    verdict(6, held == 200, f"error-sum ordering holds in {held}/200 pairs, d in {{1, ceil(n/2), n}}")


def test_c07_rank_one(verdict):
    rng = np.random.default_rng(7)
    held, worst = 0, 0.0
    for _ in range(100):
        N, D = int(rng.integers(1, 13)), int(rng.integers(1, 9))
        xs = rng.standard_normal((N, D))
        Wt = np.triu(rng.random((N, N)), 1)
        res = rank_one_equivalence_check(xs, Wt + Wt.T)
        held += res.holds
        worst = max(worst, res.max_residual)
    verdict(7, held == 100, f"identity holds in {held}/100, worst residual {worst:.2e}")


def test_c08_pencil(verdict):
    rng = np.random.default_rng(8)
    worst_r = worst_o = worst_i = 0.0
    for _ in range(50):
        D = int(rng.integers(2, 12))
        G = rng.standard_normal((D, int(rng.integers(1, D + 1))))
        H = rng.standard_normal((D, D))
        M, B = G @ G.T, H @ H.T
        d = int(rng.integers(1, D + 1))
        res = gen_eig_sym_def(M, B, d)
        Br = B + res.regularization_applied * np.trace(B) / D * np.eye(D)
        A, lam = res.basis, res.eigenvalues
        r = np.linalg.norm(M @ A - Br @ A * lam, axis=0).max() / np.linalg.norm(M)
        worst_r = max(worst_r, r)
        worst_o = max(worst_o, np.abs(A.T @ Br @ A - np.eye(d)).max())
        eye = gen_eig_sym_def(M, np.eye(D), D, reg=0).eigenvalues
        worst_i = max(worst_i, np.abs(eye - np.linalg.eigvalsh(M)).max())
    ok = worst_r <= 1e-8 and worst_o <= 1e-10 and worst_i <= 1e-10
    verdict(8, ok, f"50 pencils: residual {worst_r:.1e} (<= 1e-8 |M|), "
                   f"B-orthonormality {worst_o:.1e}, B=I mismatch {worst_i:.1e} (<= 1e-10)")


def test_c09_rayleigh_optimality(verdict):
    rng = np.random.default_rng(9)
    worst = np.inf
    for s in range(10):
        data = synth_spd_clusters(3, 8, 6, 2.0, seed=100 + s)
        pmap = lie_lpp_fit(data, k=5, d=3)
        wg = heat_weights(knn_graph(data, 5, "lem"), pmap.t)
        _, B = pencil_matrices(data.logs(), wg)
        B = B + pmap.regularization_applied * np.trace(B) / 6 * np.eye(6)
        root = np.real(sla.sqrtm(np.linalg.inv(B)))
        fit = lie_lpp_energy(pmap.A, data, wg)
        for _ in range(100):
            Q, _ = np.linalg.qr(rng.standard_normal((6, 3)))
            other = lie_lpp_energy(root @ Q, data, wg)
            worst = min(worst, other - fit + 1e-9 * max(fit, other))
    verdict(9, worst >= 0, f"10 datasets x 100 feasible competitors, smallest margin {worst:.3e}")


def test_c10_recognition(verdict):
    start = time.perf_counter()
    data = synth_spd_clusters(4, 15, 10, 4.0, seed=7)
    reduced = lie_lpp_transform_set(lie_lpp_fit(data, k=5, d=3), data)
    red = loo_knn_eval(reduced, "lem")
    # fresh copy so that cached logarithms from the fit do not help the baseline
    full = loo_knn_eval(synth_spd_clusters(4, 15, 10, 4.0, seed=7), "lem")
    total = time.perf_counter() - start
    ok = (
        red.accuracy >= 0.95
        and full.accuracy <= red.accuracy + 0.05
        and red.wall_time_eval < full.wall_time_eval
        and total < 30
    )
    verdict(10, ok, f"reduced 3x3 accuracy {red.accuracy:.4f} (>= 0.95), unreduced "
                    f"{full.accuracy:.4f}; eval time {red.wall_time_eval:.4f} s vs "
                    f"{full.wall_time_eval:.4f} s; total {total:.2f} s (< 30 s)")


def test_c11_em_vs_lem(verdict):
    data = synth_spd_clusters(4, 15, 10, 4.0, seed=7)
    acc = {}
    for metric in ("lem", "em"):
        reduced = lie_lpp_transform_set(lie_lpp_fit(data, k=5, d=3, metric=metric), data)
        acc[metric] = loo_knn_eval(reduced, metric).accuracy
    verdict(11, acc["lem"] >= acc["em"], f"Lie-LPP-LEM {acc['lem']:.4f} >= Lie-LPP-EM {acc['em']:.4f}")


def test_c12_transform_algebra(verdict):
    rng = np.random.default_rng(12)
    bad, worst = 0, 0.0
    for _ in range(200):
        D = int(rng.integers(2, 9))
        d = int(rng.integers(1, D))
        # unit spectral norm keeps the spectrum of A^T log(S) A inside that of
        # log(S); an unbounded A can push exp() past float64 conditioning
        A = rng.standard_normal((D, d))
        A /= np.linalg.norm(A, 2)
        pmap = ProjectionMap(A, np.zeros(d), "lem", 1, 1.0, 0.0)
        S1, S2 = random_spd(rng, D, spread=2.0), random_spd(rng, D, spread=2.0)
        try:
            out = lie_lpp_transform(pmap, group_op(S1, S2))
            SpdMatrix(out.entries)
        except NotPositiveDefinite:
            bad += 1
            continue
        other = group_op(lie_lpp_transform(pmap, S1), lie_lpp_transform(pmap, S2)).entries
        err = np.abs(out.entries - other).max()
        worst = max(worst, err)
    verdict(12, bad == 0 and worst <= 1e-9,
            f"200 pairs: {bad} invalid outputs, homomorphism error {worst:.1e} (<= 1e-9)")


def test_c13_cli_reproducibility(verdict, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "synthetic": {"classes": 4, "per_class": 15, "D": 10, "separation": 4.0},
        "dim": 3, "seed": 7,
    }))
    bodies = []
    for _ in range(2):
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "run")]) == 0
        body = json.loads((tmp_path / "run" / "report.json").read_text())
        for key in ("wall_time_fit", "wall_time_eval"):
            body.pop(key)
        bodies.append(json.dumps(body, indent=2, sort_keys=True).encode())
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"input": str(DATA / "bad_manifest.json"), "dim": 2}))
    capsys.readouterr()
    code = main(["run", "--config", str(bad), "--out", str(tmp_path / "c")])
    err = capsys.readouterr().err
    ok = bodies[0] == bodies[1] and code == 2 and "bad.csv:2" in err
    ok &= not (tmp_path / "c").exists()
    verdict(13, ok, f"canonical reports identical: {bodies[0] == bodies[1]}; "
                    f"malformed CSV exit {code}, diagnostic {err.strip()!r}")
