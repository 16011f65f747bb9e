"""Acceptance scorecard against the published reference values.

Each test prints one line "CRITERION k: PASS/FAIL - detail" before asserting,
so a verbose pytest run documents the whole scorecard.  One sub-check is
expected to fail: the published (4,3,6) cell volume reference 0.507471
disagrees with the closed form, the Monte Carlo oracle, and the published
optimal density of the same tiling by a factor of ten (see README); the
criterion is asserted as stated and stays red.
"""

from __future__ import annotations

import math
import time
from functools import lru_cache

import numpy as np

from horopack.coxeter import build_cell, build_orthoscheme, vertex_distance
from horopack.horoball import (
    cell_volume_oracle,
    cone_sector_volume,
    pencil_value,
    polar_point,
    vertex_sector_volume,
)
from horopack.lorentz import (
    Hyperplane,
    PointClass,
    ProjectivePoint,
    bilinear_form,
    distance,
    reflect,
)
from horopack.packing import (
    admissible_interval,
    ball_gap,
    catalog,
    certify_optimum,
    configuration,
    density,
    families,
    family,
    sweep,
    validate_packing,
    volume_function,
)
from horopack.volume import bf_constant

SUPPORTED = ((3, 3, 6), (3, 4, 4), (4, 3, 6), (5, 3, 6))


def report(criterion: int, ok: bool, detail: str) -> None:
    print(f"CRITERION {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


def find_vertex(cell, chart) -> int:
    for v in range(cell.n_vertices):
        if np.allclose(cell.vertices[v].chart(), chart, atol=1e-9):
            return v
    raise AssertionError(f"no cell vertex at chart {chart}")


@lru_cache(maxsize=None)
def family_sweep_densities(weights, name):
    """Density profile of one family on a grid of about 1e-3 resolution
    (at least 201 points); shared between the property criteria."""
    fam = family(weights, name)
    lo, hi = fam.s_range
    n = max(201, int(math.ceil((hi - lo) / 1e-3)) + 1)
    reports = sweep(weights, fam, np.linspace(lo, hi, n))
    return tuple(r.density for r in reports)


def test_criterion_1_bound_constant():
    t0 = time.perf_counter()
    value = bf_constant.__wrapped__()
    elapsed = time.perf_counter() - t0
    err = abs(value - 0.85327609)
    ok = err <= 1e-7 and elapsed < 1.0
    report(1, ok, f"bf = {value:.10f}, |err| = {err:.2e}, {elapsed:.3f} s")
    assert err <= 1e-7
    assert elapsed < 1.0


def test_criterion_2_optimal_densities():
    targets = [
        ((3, 3, 6), 0.853276, 1e-5),
        ((3, 4, 4), 0.818808, 1e-5),
        ((4, 3, 6), 0.853276, 1e-4),
        ((5, 3, 6), 0.787251, 1e-4),
    ]
    t0 = time.perf_counter()
    results = []
    for weights, target, tol in targets:
        best = max(r.density for r in certify_optimum(weights))
        results.append((weights, best, target, tol, abs(best - target)))
    elapsed = time.perf_counter() - t0
    ok = elapsed < 60.0 and all(err <= tol for _, _, _, tol, err in results)
    detail = "; ".join(
        f"{w}: {best:.6f} vs {target:g}" for w, best, target, _, _ in results
    )
    report(2, ok, f"{detail}; {elapsed:.1f} s")
    for weights, best, target, tol, err in results:
        assert err <= tol, f"{weights}: {best} vs {target} (tol {tol})"
    assert elapsed < 60.0


def test_criterion_3_cell_volumes():
    references = [((3, 4, 4), 3.66384), ((4, 3, 6), 0.507471), ((5, 3, 6), 20.580199)]
    rows = []
    for weights, reference in references:
        cell = build_cell(weights)
        rel = abs(cell.volume - reference) / reference
        t0 = time.perf_counter()
        mc = cell_volume_oracle(cell, 10_000_000, seed=20240816)
        elapsed = time.perf_counter() - t0
        sigmas = abs(mc.value - cell.volume) / mc.stderr
        rows.append((weights, cell.volume, reference, rel, sigmas, elapsed))
    ok = all(rel <= 1e-4 and sig <= 3.0 and dt < 120.0 for *_, rel, sig, dt in rows)
    parts = []
    for weights, closed, reference, rel, sigmas, elapsed in rows:
        note = ""
        if rel > 1e-4 and abs(closed - 10.0 * reference) / closed < 1e-4:
            note = " [reference low by a factor of ten]"
        parts.append(
            f"{weights}: closed {closed:.6f} vs ref {reference:g} "
            f"(rel {rel:.2e}), MC {sigmas:.2f} sigma, {elapsed:.1f} s{note}"
        )
    report(3, ok, "; ".join(parts))
    for weights, closed, reference, rel, sigmas, elapsed in rows:
        assert sigmas <= 3.0, f"{weights}: Monte Carlo {sigmas:.2f} sigma"
        assert elapsed < 120.0
        assert rel <= 1e-4, (
            f"{weights}: closed form {closed} vs reference {reference} "
            f"(rel {rel:.3g})"
        )


def test_criterion_4_octahedral_sectors():
    configs = catalog((3, 4, 4))
    cell = configs[0].cell
    tol = 1e-6

    # arrangement 1: six congruent balls, half a unit each
    vols1 = [
        vertex_sector_volume(configs[0].horoball(v), cell, v)
        for v in range(cell.n_vertices)
    ]
    ok1 = all(abs(v - 0.5) <= tol for v in vols1)

    # arrangement 2: two full units at the poles, quarters at the equator
    vols2 = sorted(
        vertex_sector_volume(configs[1].horoball(v), cell, v)
        for v in range(cell.n_vertices)
    )
    expect2 = sorted([1.0, 1.0, 0.25, 0.25, 0.25, 0.25])
    ok2 = all(abs(a - b) <= tol for a, b in zip(vols2, expect2))

    # arrangement 3: per-orthoscheme cone sectors of the three ball types
    config3 = configs[2]
    apex = find_vertex(cell, (0.0, 0.0, 1.0))
    anti = find_vertex(cell, (0.0, 0.0, -1.0))
    equator = find_vertex(cell, (0.0, 1.0, 0.0))
    mid = ProjectivePoint.from_chart((0.5, 0.5, 0.0))
    center = ProjectivePoint((1.0, 0.0, 0.0, 0.0))
    apex_pt = ProjectivePoint.from_chart((0.0, 0.0, 1.0))
    eq_pt = ProjectivePoint.from_chart((0.0, 1.0, 0.0))
    cones = (
        cone_sector_volume(config3.horoball(apex), [eq_pt, mid, center]),
        cone_sector_volume(config3.horoball(anti), [eq_pt, mid, center]),
        cone_sector_volume(config3.horoball(equator), [mid, center, apex_pt]),
    )
    expect3 = (0.25, 0.0625, 0.03125)
    equator_levels = [
        config3.levels[v]
        for v in range(cell.n_vertices)
        if v not in (apex, anti)
    ]
    ok3 = all(abs(a - b) <= tol for a, b in zip(cones, expect3)) and np.allclose(
        equator_levels, equator_levels[0], atol=1e-12
    )

    ok = ok1 and ok2 and ok3
    report(
        4,
        ok,
        f"arr1 {vols1[0]:.7f} x6; arr2 {[f'{v:.7f}' for v in vols2]}; "
        f"arr3 cones {[f'{v:.7f}' for v in cones]} (smallest x4)",
    )
    assert ok1 and ok2 and ok3


def test_criterion_5_cubic_cell_densities():
    configs = catalog((4, 3, 6))
    d1 = density(configs[0]).density
    d2 = density(configs[1]).density
    ok = abs(d1 - 0.682621) <= 1e-4 and abs(d2 - 0.682621) <= 1e-4
    report(5, ok, f"B1 = {d1:.6f}, B2 = {d2:.6f}, target 0.682621 +- 1e-4")
    assert abs(d1 - 0.682621) <= 1e-4
    assert abs(d2 - 0.682621) <= 1e-4


def test_criterion_6_dodecahedral_densities():
    targets = [0.550841, 0.70309, 0.78725, 0.78481, 0.71246]
    configs = catalog((5, 3, 6))
    computed = [density(c).density for c in configs]
    errs = [abs(c - t) for c, t in zip(computed, targets)]
    ok = all(err <= 1e-3 for err in errs)
    pairs = "; ".join(
        f"{cfg.label} {c:.6f} vs {t:g}"
        for cfg, c, t in zip(configs, computed, targets)
    )
    note = ""
    if errs[3] > 1e-4:
        note = (
            "; note: labels match in catalog order (no permutation applied); "
            f"the B4 reference {targets[3]:g} differs from the computed "
            f"{computed[3]:.6f} in transposed digits and matches at 1e-3"
        )
    report(6, ok, pairs + note)
    for label_idx, err in enumerate(errs):
        assert err <= 1e-3, f"B{label_idx + 1}: err {err:.3g}"


def test_criterion_7_cosh_law_and_endpoint_maxima():
    worst_resid = 0.0
    pair_count = 0
    for weights in SUPPORTED:
        for config in catalog(weights):
            cell = config.cell
            for edge in cell.edges:
                if abs(ball_gap(cell, config.levels, *edge)) > 1e-9:
                    continue
                lo, hi = admissible_interval(cell, edge)
                v0 = volume_function(config, edge, 0.0)
                for x in np.linspace(lo, hi, 21):
                    resid = abs(
                        volume_function(config, edge, float(x)) / v0
                        - math.cosh(2.0 * x)
                    )
                    worst_resid = max(worst_resid, resid)
                pair_count += 1

    worst_gap = 0.0
    family_count = 0
    for weights in SUPPORTED:
        for fam in families(weights):
            dens = family_sweep_densities(weights, fam.name)
            gap = max(dens) - max(dens[0], dens[-1])
            worst_gap = max(worst_gap, gap)
            family_count += 1

    ok = worst_resid <= 1e-9 and worst_gap <= 1e-9
    report(
        7,
        ok,
        f"cosh-law residual {worst_resid:.2e} over {pair_count} tangent pairs "
        f"x 21 points; interior-vs-endpoint excess {worst_gap:.2e} over "
        f"{family_count} families",
    )
    assert worst_resid <= 1e-9
    assert worst_gap <= 1e-9


def test_criterion_8_consistency_suite():
    # distances from explicit coordinates vs the inverse Gram matrix
    worst_dist = 0.0
    for weights in ((3, 6, 3), (4, 4, 4), (4, 3, 6), (5, 3, 6)):
        ortho = build_orthoscheme(weights)
        finite = [
            i
            for i in range(4)
            if ortho.vertices[i].classify() is PointClass.INTERIOR
        ]
        for a in range(len(finite)):
            for b in range(a + 1, len(finite)):
                i, j = finite[a], finite[b]
                worst_dist = max(
                    worst_dist,
                    abs(
                        distance(ortho.vertices[i], ortho.vertices[j])
                        - vertex_distance(ortho.matrix, i, j)
                    ),
                )

    # horosphere parametrization stays on the quadric
    worst_surface = 0.0
    for weights in SUPPORTED:
        config = catalog(weights)[0]
        for v in range(config.cell.n_vertices):
            ball = config.horoball(v)
            for theta in (0.0, 0.7, 1.9, 3.0):
                for phi in (0.0, 2.1, 4.4):
                    point = polar_point(ball, theta, phi)
                    worst_surface = max(
                        worst_surface, abs(pencil_value(ball, point.coords))
                    )

    # reflections preserve the bilinear form and the density report
    rng = np.random.default_rng(20240816)
    worst_form = 0.0
    worst_density = 0.0
    for weights in SUPPORTED:
        config = catalog(weights)[-1]
        cell = config.cell
        i, j = cell.edges[0]
        mirror = Hyperplane(cell.vertices[i].coords - cell.vertices[j].coords)
        for _ in range(10):
            x = np.concatenate(([1.0], 0.9 * rng.random(3) - 0.45))
            y = np.concatenate(([1.0], 0.9 * rng.random(3) - 0.45))
            worst_form = max(
                worst_form,
                abs(
                    bilinear_form(reflect(mirror, x), reflect(mirror, y))
                    - bilinear_form(x, y)
                ),
            )
        perm = []
        for v in range(cell.n_vertices):
            image = reflect(mirror, cell.vertices[v]).chart()
            perm.append(find_vertex(cell, image))
        assert sorted(perm) == list(range(cell.n_vertices))
        permuted = [0.0] * cell.n_vertices
        for v in range(cell.n_vertices):
            permuted[perm[v]] = config.levels[v]
        mirrored = configuration(weights, permuted)
        assert validate_packing(mirrored) is None
        worst_density = max(
            worst_density,
            abs(density(mirrored).density - density(config).density),
        )

    ok = (
        worst_dist <= 1e-9
        and worst_surface <= 1e-12
        and worst_form <= 1e-12
        and worst_density <= 1e-9
    )
    report(
        8,
        ok,
        f"distance agreement {worst_dist:.2e}; surface residual "
        f"{worst_surface:.2e}; form residual {worst_form:.2e}; "
        f"mirrored-density shift {worst_density:.2e}",
    )
    assert worst_dist <= 1e-9
    assert worst_surface <= 1e-12
    assert worst_form <= 1e-12
    assert worst_density <= 1e-9


def test_criterion_9_universal_bound():
    bound = bf_constant() + 1e-6
    worst = -math.inf
    counts = []
    for weights in SUPPORTED:
        for fam in families(weights):
            dens = family_sweep_densities(weights, fam.name)
            counts.append(len(dens))
            worst = max(worst, max(dens))
    ok = worst <= bound and min(counts) >= 201
    report(
        9,
        ok,
        f"max sweep density {worst:.9f} <= {bound:.9f} over {len(counts)} "
        f"families (grid sizes {min(counts)}..{max(counts)})",
    )
    assert min(counts) >= 201
    assert worst <= bound
