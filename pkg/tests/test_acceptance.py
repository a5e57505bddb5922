"""Acceptance gate: nine end-to-end checks, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
complete.  Each check is also a regular assertion, so plain ``pytest``
enforces the same gate.
"""

import sys
import time
import tracemalloc

import numpy as np
import pytest

from clusterreg.cli import main
from clusterreg.clustering import kmeans_elkan, kmeans_lloyd_reference
from clusterreg.core import PointSet, RegistrationConfig, normalize
from clusterreg.harness import run_grid
from clusterreg.kernels import KernelSpec, gram_matrix
from clusterreg.lowrank import (
    approximation_error,
    audit_bound,
    build_nystrom,
    landmark_count,
    random_landmarks,
    regularized_solve,
)
from clusterreg.metrics import identity_pairs, rmse, synthetic_warp
from clusterreg.pointio import write_points
from clusterreg.shapes import ring, sphere
from clusterreg.solver import register, update_alpha, update_membership, update_sigma2

LAP = KernelSpec("laplacian", 2.0)


def _report(num: int, title: str, ok: bool, detail: str) -> bool:
    verdict = "PASS" if ok else "FAIL"
    print(f"[criterion {num}] {title}: {verdict} ({detail})", file=sys.stderr, flush=True)
    return ok


def test_criterion_1_closed_form_oracles():
    rng = np.random.default_rng(0)
    worst = 0.0
    cases = 0
    for _ in range(100):
        M = int(rng.integers(2, 21))
        C = int(rng.integers(2, 21))
        n = int(rng.integers(1, 4))
        X = rng.normal(size=(M, n))
        T = rng.normal(size=(C, n))
        sigma2 = float(rng.uniform(0.1, 2.0))
        lam = float(rng.uniform(0.1, 2.0))
        alpha = rng.uniform(0.05, 1.0, size=C)
        alpha /= alpha.sum()
        U = update_membership(X, T, sigma2, alpha, lam)

        U_ref = np.empty((M, C))
        for i in range(M):
            logits = np.array(
                [
                    -np.sum((X[i] - T[j]) ** 2) / (sigma2 * lam) + np.log(alpha[j])
                    for j in range(C)
                ]
            )
            e = np.exp(logits - logits.max())
            U_ref[i] = e / e.sum()
        worst = max(worst, float(np.abs(U - U_ref).max() / np.abs(U_ref).max()))

        a_ref = np.array([sum(U[i, j] for i in range(M)) / M for j in range(C)])
        worst = max(worst, float(np.abs(update_alpha(U) - a_ref).max() / np.abs(a_ref).max()))

        s_ref = (
            sum(U[i, j] * np.sum((X[i] - T[j]) ** 2) for i in range(M) for j in range(C))
            / (n * M)
        )
        worst = max(worst, abs(update_sigma2(X, T, U) - s_ref) / s_ref)

        K = min(M, C)
        pairs = identity_pairs(K)
        r_ref = np.sqrt(sum(np.sum((X[k] - T[k]) ** 2) for k in range(K)) / K)
        r = rmse(PointSet(X[:K]), PointSet(T[:K]), pairs)
        worst = max(worst, abs(r - r_ref) / r_ref)
        cases += 1

    ok = cases >= 100 and worst < 1e-10
    assert _report(
        1, "closed-form updates match brute-force oracles", ok,
        f"{cases} cases, worst relative deviation {worst:.2e}",
    )


def test_criterion_2_linear_system_correctness():
    rng = np.random.default_rng(1)
    worst_res = 0.0
    worst_gap = 0.0
    for _ in range(20):
        C = int(rng.integers(10, 201))
        n = int(rng.integers(2, 4))
        Y = PointSet(rng.normal(size=(C, n)))
        L = gram_matrix(LAP, Y)
        d = rng.uniform(0.01, 1.0, size=C)
        B = rng.normal(size=(C, n))
        c = regularized_solve(L, d, B)
        res = np.linalg.norm((L + np.diag(d)) @ c - B) / np.linalg.norm(B)
        worst_res = max(worst_res, res)

        factor = build_nystrom(LAP, Y, 1.0, seed=0)
        assert factor.kmeans.quantization_error == 0.0
        c_low = regularized_solve(factor, d, B)
        worst_gap = max(worst_gap, np.linalg.norm(c_low - c) / np.linalg.norm(c))

    ok = worst_res < 1e-8 and worst_gap < 1e-6
    assert _report(
        2, "dense solve residual and full-rank low-rank parity", ok,
        f"worst residual {worst_res:.2e}, worst dense/low-rank gap {worst_gap:.2e}",
    )


def test_criterion_3_approximation_bound_audit():
    rng = np.random.default_rng(2)
    violations = 0
    cases = 0
    min_slack = np.inf
    while cases < 50:
        C = int(rng.integers(50, 501))
        n = int(rng.integers(2, 4))
        ratio = float(rng.uniform(0.02, 0.4))
        pts = PointSet(rng.uniform(0, 1, size=(C, n)))
        report = audit_bound(LAP, pts, ratio, seed=cases)
        min_slack = min(min_slack, report.slack)
        if report.slack < 0:
            violations += 1
        cases += 1
    ok = violations == 0
    assert _report(
        3, "exact low-rank error within analytic bound", ok,
        f"{cases} audits, {violations} violations, min slack {min_slack:.3e}",
    )


def test_criterion_4_clustered_landmarks_beat_random():
    rng = np.random.default_rng(3)
    pts = PointSet(rng.uniform(0, 1, size=(500, 2)))
    details = []
    ok = True
    for ratio in (0.02, 0.1, 0.2, 0.4):
        count = landmark_count(ratio, 500)
        clustered, random = [], []
        for seed in range(10):
            km = kmeans_elkan(pts, count, seed=seed)
            clustered.append(approximation_error(LAP, pts, km.centroids))
            random.append(approximation_error(LAP, pts, random_landmarks(pts, count, seed=seed)))
        mc, mr = float(np.median(clustered)), float(np.median(random))
        ok = ok and mc <= mr
        details.append(f"ratio {ratio:g}: {mc:.3g} vs {mr:.3g}")
    assert _report(4, "clustered landmarks cut median approximation error", ok, "; ".join(details))


def test_criterion_5_elkan_exactness_and_savings():
    rng = np.random.default_rng(4)
    mismatches = 0
    cheaper = 0
    for trial in range(50):
        P = int(rng.integers(20, 1001))
        k = int(rng.integers(1, min(50, P) + 1))
        n = int(rng.integers(1, 4))
        pts = rng.normal(size=(P, n))
        e = kmeans_elkan(pts, k, seed=trial)
        l = kmeans_lloyd_reference(pts, k, seed=trial)
        if not np.array_equal(e.assignment, l.assignment):
            mismatches += 1
        if e.distance_evals < l.distance_evals:
            cheaper += 1
    ok = mismatches == 0 and cheaper >= 45
    assert _report(
        5, "accelerated k-means is exact and cheaper", ok,
        f"50 cases, {mismatches} assignment mismatches, fewer distance evals in {cheaper}/50",
    )


def test_criterion_6_registration_recovery():
    runs = []
    for shape in (ring(500), sphere(1000)):
        scale = normalize(shape).norm.scale
        for seed in range(5):
            target, pairs = synthetic_warp(shape, 0.3, seed=seed)
            pre = rmse(shape, target, pairs) / scale
            result = register(shape, target)
            post = rmse(result.deformed, target, pairs) / scale
            runs.append((pre, post))
    all_reduced = all(post < 0.2 * pre for pre, post in runs)
    tight = sum(post < 0.05 for _, post in runs)
    ok = all_reduced and tight >= 8
    worst_ratio = max(post / pre for pre, post in runs)
    assert _report(
        6, "synthetic warps recovered end to end", ok,
        f"10 runs, worst post/pre {worst_ratio:.3f}, post<0.05 in {tight}/10",
    )


def test_criterion_7_heavy_tailed_kernel_ablation():
    cfg = RegistrationConfig()
    rows = run_grid(
        shape="ring",
        n_points=500,
        kernels=("laplacian", "gaussian"),
        gammas=(1.0, 2.0, 3.0),
        noise_sigmas=(0.0, 0.02, 0.04, 0.06),
        occlusions=(0.0,),
        seeds=(0,),
        magnitude=0.3,
        bandwidth=1.5,
        cfg=cfg,
    )
    lap = np.mean([r.rmse_post for r in rows if r.kernel == "laplacian"])
    gau = np.mean([r.rmse_post for r in rows if r.kernel == "gaussian"])
    ok = lap <= gau
    assert _report(
        7, "heavy-tailed kernel at least matches squared-exponential", ok,
        f"mean rmse_post {lap:.4f} vs {gau:.4f} over {len(rows)} runs",
    )


def test_criterion_8_scale_and_memory():
    base = sphere(3000)
    target, _ = synthetic_warp(base, 0.3, seed=0)
    cfg = RegistrationConfig(approx_ratio=0.3)

    # structural memory contract: the low-rank path only materializes the
    # (C, C') cross-Gram and (C', C') landmark block, never a C x C Gram
    factor = build_nystrom(cfg.kernel, normalize(base).points, cfg.approx_ratio, seed=cfg.seed)
    cprime = landmark_count(cfg.approx_ratio, 3000)
    structural = factor.E.shape == (3000, cprime) and factor.W.shape == (cprime, cprime)

    tracemalloc.start()
    t0 = time.perf_counter()
    result = register(base, target, cfg)
    elapsed = time.perf_counter() - t0
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()

    ok = structural and elapsed < 120.0 and peak < 1024**3 and result.iterations >= 1
    assert _report(
        8, "3000-vs-3000 registration within time/memory budget", ok,
        f"{elapsed:.1f}s, peak {peak / 1e6:.0f} MB, factor {factor.E.shape}",
    )


def test_criterion_9_cli_determinism(tmp_path, capsys):
    src = tmp_path / "src.xyz"
    write_points(ring(200), str(src))
    blobs = {}
    for run in ("a", "b"):
        reg_out = tmp_path / f"reg_{run}.xyz"
        syn_src = tmp_path / f"syn_src_{run}.xyz"
        syn_tgt = tmp_path / f"syn_tgt_{run}.xyz"
        syn_pairs = tmp_path / f"syn_pairs_{run}.txt"
        cent_out = tmp_path / f"cent_{run}.xyz"
        assert main(["register", str(src), str(src), str(reg_out), "--max-iters", "10"]) == 0
        assert main([
            "synth", "--n-points", "150", "--seed", "3",
            "--source-out", str(syn_src), "--target-out", str(syn_tgt),
            "--pairs-out", str(syn_pairs),
        ]) == 0
        assert main(["kmeans", str(src), "--k", "12", "--centroids-out", str(cent_out)]) == 0
        blobs[run] = [
            p.read_bytes() for p in (reg_out, syn_src, syn_tgt, syn_pairs, cent_out)
        ]
    capsys.readouterr()
    ok = blobs["a"] == blobs["b"]
    assert _report(
        9, "CLI reruns produce byte-identical output files", ok,
        "register/synth/kmeans outputs compared across two invocations",
    )
