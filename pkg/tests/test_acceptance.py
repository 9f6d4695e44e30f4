"""Acceptance suite: every criterion at its stated sample size and tolerance.

Each test prints one summary line so a verbose run reads as a checklist.
"""

import math
import time

import pytest

from disconn import (
    HopfBundle,
    SampleConfig,
    TrivialBundle,
    base_geodesic,
    check_axioms,
    circle_distance,
    compare_forms,
    counterexample_sweep,
    decompose_pair,
    hopf_closed_form,
    horizontal_lift_path,
    lift_from_form,
    lmw_form,
    make_c_function,
    reconstruct_pair,
    reduce_pair,
    riemannian_form,
    slice_probe,
    tangent_split_check,
    trivial_form_from_C,
)
from disconn.rng import substream

from conftest import J_POINT, ONE

HOPF = HopfBundle()
LINE = TrivialBundle(1)
PLANE = TrivialBundle(2)


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")


def sample_in_domain(bundle, form, stream, i, box=2.0):
    rng = substream(stream, i)
    while True:
        q0 = bundle.sample_point(rng, box=box)
        q1 = bundle.sample_point(rng, box=box)
        if form.in_domain(q0, q1):
            return q0, q1, rng


def test_criterion_1_closed_form_vs_geodesic_construction():
    start = time.time()
    cmp = compare_forms(riemannian_form(256), hopf_closed_form(),
                        SampleConfig(seed=42, n_samples=1000))
    elapsed = time.time() - start
    ok = cmp.max_deviation <= 1e-6 and elapsed <= 60.0
    report("criterion 1", ok,
           f"max deviation {cmp.max_deviation:.3e} over {cmp.n_samples} pairs "
           f"at 256 steps in {elapsed:.1f}s")
    assert cmp.n_samples == 1000
    assert cmp.max_deviation <= 1e-6
    assert elapsed <= 60.0


@pytest.mark.parametrize("label,form_factory", [
    ("hopf closed", hopf_closed_form),
    ("trivial constant", lambda: trivial_form_from_C(
        LINE, make_c_function("constant"))),
    ("trivial linear", lambda: trivial_form_from_C(
        LINE, make_c_function("linear", (1.0,), 1))),
])
def test_criterion_2_axiom_suite(label, form_factory):
    rep = check_axioms(form_factory(), SampleConfig(seed=42, n_samples=10_000))
    worst = max(a.max_violation for a in rep.axioms)
    ok = rep.verdict == "pass" and worst <= 1e-9
    report("criterion 2", ok,
           f"{label}: verdict {rep.verdict} at 10^4 samples, "
           f"worst violation {worst:.3e}")
    assert rep.verdict == "pass"
    assert worst <= 1e-9


def test_criterion_3_counterexample_reproduction():
    sweep = counterexample_sweep([math.pi / 8.0], steps=256)
    row = sweep.rows[0]
    formula_gap = abs(row.lmw_angle - row.beta_formula)
    derivative_gap = abs(sweep.derivative_at_zero - math.pi / 4.0)

    rep = check_axioms(lmw_form(256), SampleConfig(seed=42, n_samples=1000))
    eq = rep.axiom("equivariance")

    ok = (formula_gap <= 1e-4 and derivative_gap <= 1e-3
          and rep.verdict == "fail" and eq.max_violation > 0.05)
    report("criterion 3", ok,
           f"variant angle at pi/8 matches its formula within {formula_gap:.2e} "
           f"(value {row.lmw_angle:.6f}); slope at 0 within {derivative_gap:.2e} "
           f"of pi/4; axiom verdict {rep.verdict} with max equivariance "
           f"violation {eq.max_violation:.3f}")
    assert formula_gap <= 1e-4
    assert derivative_gap <= 1e-3
    assert rep.verdict == "fail"
    assert eq.failures > 0
    assert eq.max_violation > 0.05


def test_criterion_4_decomposition_uniqueness_closed_forms():
    cases = [
        ("hopf closed", HOPF, hopf_closed_form()),
        ("trivial constant", LINE,
         trivial_form_from_C(LINE, make_c_function("constant"))),
        ("trivial linear", LINE,
         trivial_form_from_C(LINE, make_c_function("linear", (1.0,), 1))),
    ]
    for label, bundle, form in cases:
        worst_recon = 0.0
        worst_horiz = 0.0
        for i in range(10_000):
            q0, q1, _ = sample_in_domain(bundle, form, 9_000, i)
            dec = decompose_pair(form, q0, q1)
            worst_recon = max(worst_recon,
                              bundle.distance(bundle.act(dec.g, dec.h1), q1))
            worst_horiz = max(worst_horiz, abs(form.evaluate(q0, dec.h1).angle))
        ok = worst_recon <= 1e-9 and worst_horiz <= 1e-9
        report("criterion 4", ok,
               f"{label}: 10^4 decompositions, reconstruction {worst_recon:.2e}, "
               f"horizontality {worst_horiz:.2e}")
        assert worst_recon <= 1e-9
        assert worst_horiz <= 1e-9


def test_criterion_4_decomposition_uniqueness_geodesic_form():
    form = riemannian_form(256)
    pairs = [sample_in_domain(HOPF, form, 9_100, i)[:2] for i in range(10_000)]
    gs = form.evaluate_many(pairs)
    h1s = [HOPF.act(HOPF.group_inverse(g), q1) for g, (_, q1) in zip(gs, pairs)]
    worst_recon = max(
        HOPF.distance(HOPF.act(g, h1), q1)
        for g, h1, (_, q1) in zip(gs, h1s, pairs))
    horiz = form.evaluate_many(
        [(q0, h1) for (q0, _), h1 in zip(pairs, h1s)])
    worst_horiz = max(abs(g.angle) for g in horiz)

    # the batch path and the one-pair operation agree
    spot = max(
        circle_distance(decompose_pair(form, q0, q1).g, g)
        for (q0, q1), g in list(zip(pairs, gs))[:10])

    ok = worst_recon <= 1e-6 and worst_horiz <= 1e-6 and spot <= 1e-12
    report("criterion 4", ok,
           f"geodesic form: 10^4 decompositions, reconstruction "
           f"{worst_recon:.2e}, horizontality {worst_horiz:.2e}, "
           f"single-pair agreement {spot:.1e}")
    assert worst_recon <= 1e-6
    assert worst_horiz <= 1e-6
    assert spot <= 1e-12


def test_criterion_5_slice_and_transversality_probes():
    form = hopf_closed_form()
    worst_sep = math.inf
    for i in range(100):
        q = HOPF.sample_point(substream(9_200, i))
        probe = slice_probe(form, q, 32, seed=1_000 + i)
        worst_sep = min(worst_sep, probe.min_separation)
        assert probe.passed, f"point {i}: separation {probe.min_separation}"
        assert tangent_split_check(form, q), f"point {i}: rank defect"

    trivial_checked = 0
    for bundle, weights in ((LINE, (1.0,)), (PLANE, (0.7, -0.4))):
        tform = trivial_form_from_C(
            bundle, make_c_function("linear", weights, bundle.dim))
        for i in range(50):
            q = bundle.sample_point(substream(9_300 + bundle.dim, i))
            assert tangent_split_check(tform, q)
            trivial_checked += 1

    ok = worst_sep > 1e-2
    report("criterion 5", ok,
           f"100 slice probes (min separation {worst_sep:.3f}) and rank checks "
           f"passed; {trivial_checked} trivial-bundle rank checks passed")
    assert worst_sep > 1e-2


@pytest.mark.parametrize("label,bundle,form_factory", [
    ("hopf", HOPF, hopf_closed_form),
    ("trivial", LINE, lambda: trivial_form_from_C(
        LINE, make_c_function("linear", (0.5,), 1))),
])
def test_criterion_6_reduced_space_roundtrip(label, bundle, form_factory):
    form = form_factory()
    count = 0
    worst = 0.0
    i = 0
    while count < 1000:
        q0, q1, _ = sample_in_domain(bundle, form, 9_400, i)
        i += 1
        r0 = bundle.project(q0)
        if not bundle.section_defined(r0):
            continue
        h = bundle.fiber_translation(q0, bundle.local_section(r0))
        c0, c1 = bundle.act(h, q0), bundle.act(h, q1)
        if not form.in_domain(c0, c1):
            continue
        rp = reduce_pair(form, c0, c1)
        out0, out1 = reconstruct_pair(form, rp)
        worst = max(worst, bundle.distance(out0, c0), bundle.distance(out1, c1))
        count += 1
    ok = worst <= 1e-9
    report("criterion 6", ok,
           f"{label}: canonical round trip worst error {worst:.2e} over 10^3 pairs")
    assert worst <= 1e-9


def test_criterion_7_convergence_order():
    closed_lift = lift_from_form(hopf_closed_form())
    closed = hopf_closed_form()
    pairs = []
    i = 0
    while len(pairs) < 5:
        q0, q1, _ = sample_in_domain(HOPF, closed, 9_500, i)
        i += 1
        arc = math.acos(max(-1.0, min(1.0,
              HOPF.project(q0).dot(HOPF.project(q1)))))
        if 1.0 <= arc <= 2.8 and HOPF.section_defined(HOPF.project(q1)):
            pairs.append((q0, q1))
    worst_ratio = math.inf
    for q0, q1 in pairs:
        target = closed_lift.lift(q0, HOPF.project(q1))
        seg = base_geodesic(HOPF.project(q0), HOPF.project(q1))
        errs = [HOPF.distance(horizontal_lift_path(seg, q0, n).endpoint, target)
                for n in (32, 64, 128, 256)]
        for coarse, fine in zip(errs, errs[1:]):
            worst_ratio = min(worst_ratio, coarse / fine)
    ok = worst_ratio >= 8.0
    report("criterion 7", ok,
           f"endpoint error shrinks by >= {worst_ratio:.1f}x per step halving "
           f"(order >= 3) across 32..256 steps on 5 pairs")
    assert worst_ratio >= 8.0


def test_criterion_8_domain_properness_witness():
    closed = hopf_closed_form()
    geodesic = riemannian_form(64)
    witness_rejected = (not closed.in_domain(ONE, J_POINT)
                        and not geodesic.in_domain(ONE, J_POINT))
    rep = check_axioms(closed, SampleConfig(seed=42, n_samples=100))
    ok = witness_rejected and rep.resampled_out_of_domain >= 1
    report("criterion 8", ok,
           f"witness pair rejected by both connection forms; report counted "
           f"{rep.resampled_out_of_domain} resampled out-of-domain draws")
    assert witness_rejected
    assert rep.resampled_out_of_domain >= 1
    assert rep.verdict == "pass"
