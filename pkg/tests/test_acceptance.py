"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines; every tolerance is pinned here.
"""

import math
import time

import numpy as np
import pytest

from trotter_scope import linalg
from trotter_scope.bounds import (
    accumulated_entanglement,
    accumulated_scrambling,
    entanglement_bound,
    exact_error,
    haar_average,
    heisenberg,
    scrambling_bound,
    vector_norm_bound,
    worst_case_bound,
    worst_case_state,
)
from trotter_scope.entanglement import entropy_trace, middle_cut
from trotter_scope.experiments import run_scenario
from trotter_scope.formula import leading_error_sum, make_spec, segment
from trotter_scope.hamiltonians import qimf, xx_corr, zz_corr
from trotter_scope.pauli import commutator, nested_commutator

from conftest import expected_aab, expected_ab, expected_bab, random_pauli_sum
from test_experiments import SCENARIO_SMOKE, make_cfg


def report(num: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def normalized_hamiltonian(h):
    d = h.total.to_dense()
    return d / linalg.spectral_norm(d)


def test_criterion_1_worst_case_commutator_values():
    """Fig. 2 caption values: ||[O(dt), m]|| for PF2, dt=0.1, O=H/||H||."""
    t0 = time.time()
    targets = {"typical": (0.809, 0.9045, 1.0, 3.3254e-3),
               "atypical": (0.0, 0.9045, 0.4, 1.0912e-3)}

    def values_at(n):
        out = {}
        for name, (hx, hy, J, target) in targets.items():
            h = qimf(n, hx, hy, J)
            seg = segment(h, make_spec(2, 2), 0.1)
            od = normalized_hamiltonian(h)
            val = worst_case_bound(heisenberg(od, seg.u0), seg.m)
            out[name] = (val, target, abs(val - target) / target)
        return out

    res = values_at(10)
    ok = all(dev <= 0.01 for _, _, dev in res.values())
    matched_n = 10
    if not ok:  # fall back to the size scan the criterion allows
        for n in (8, 12):
            res = values_at(n)
            if all(dev <= 0.01 for _, _, dev in res.values()):
                ok, matched_n = True, n
                break
    elapsed = time.time() - t0
    detail = (
        f"N={matched_n}: "
        + ", ".join(
            f"{k}={v:.6e} (target {t:.4e}, dev {d:.3%})"
            for k, (v, t, d) in res.items()
        )
        + f"; runtime {elapsed:.1f}s < 60s"
    )
    report(1, ok and elapsed < 60.0, detail)


def test_criterion_2_strong_weak_scaling():
    """Initial worst-case PF1 error ratio ~ 1.9585; late ratio smaller."""
    t0 = time.time()
    n = 8
    h1 = qimf(n, 0.8, 0.9, 1.0)
    from trotter_scope.hamiltonians import scale

    h2 = scale(h1, 1.4)
    o = xx_corr(n)
    od = o.to_dense() / linalg.spectral_norm(o.to_dense())
    spec = make_spec(1, 2)
    times = np.arange(0, 51) * 0.1
    traces = []
    for h in (h1, h2):
        seg = segment(h, spec, 0.1)
        psi0 = worst_case_state(od, seg)
        from trotter_scope.formula import split_eigs

        w, v = split_eigs(h)["total"]
        states = linalg.phase_apply(w, v, times, psi0[:, None])
        traces.append(
            np.array([exact_error(states[:, k], od, seg, 1) for k in range(len(times))])
        )
    ratio = traces[1] / traces[0]
    initial_dev = abs(ratio[0] - 1.9585) / 1.9585
    late = ratio[-10:].mean()
    elapsed = time.time() - t0
    ok = initial_dev <= 0.05 and late < ratio[0] and elapsed < 120.0
    report(
        2,
        ok,
        f"initial ratio {ratio[0]:.4f} (dev {initial_dev:.2%} of 1.9585), "
        f"late ratio {late:.4f} < initial; runtime {elapsed:.1f}s < 120s",
    )


def test_criterion_3_symbolic_oracle_match():
    """Engine reproduces the printed QIMF commutator expansions exactly."""
    ok = True
    details = []
    for n, hx, hy, J in ((6, 0.809, 0.9045, 1.0), (5, 0.31, 0.77, 1.3)):
        h = qimf(n, hx, hy, J)
        a, b = h.terms
        cases = {
            "[A,B]": (commutator(a, b), expected_ab(n, hx, hy, J)),
            "[A,[A,B]]": (nested_commutator([a, a, b]), expected_aab(n, hx, hy, J)),
            "[B,[A,B]]": (nested_commutator([b, a, b]), expected_bab(n, hx, hy, J)),
        }
        for name, (got, want) in cases.items():
            same_strings = got.strings() == want.strings()
            close = got.isclose(want, tol=1e-12)
            ok = ok and same_strings and close
            if not (same_strings and close):
                details.append(f"{name} mismatch at n={n}")
    report(3, ok, "printed [A,B], [A,[A,B]], [B,[A,B]] match" if ok else "; ".join(details))


def test_criterion_4_bound_chain_property_suite():
    """exact <= scrambling <= worst, exact <= vecnorm/entanglement,
    exact(r) <= accumulated(r) for r in {5, 30}; 200 random cases."""
    t0 = time.time()
    rng = np.random.default_rng(2718281828)
    n_cases = 200
    violations = []
    for case in range(n_cases):
        n = int(rng.integers(4, 9))
        h = qimf(n, *rng.uniform(0.3, 1.2, 3))
        p = int(rng.choice([1, 2]))
        dt = float(rng.choice([0.05, 0.1, 0.2]))
        spec = make_spec(p, 2)
        seg = segment(h, spec, dt)
        o_sym = random_pauli_sum(rng, n, int(rng.integers(1, 5)), hermitian=True)
        o_sym = (1.0 / linalg.spectral_norm(o_sym.to_dense())) * o_sym
        od = o_sym.to_dense()
        psi = (
            linalg.haar_state(n, rng)
            if case % 2
            else linalg.random_product_state(n, rng)
        )
        o_dt = heisenberg(od, seg.u0)
        ex = exact_error(psi, od, seg, 1)
        sc = scrambling_bound(psi, o_dt, seg.m)
        wc = worst_case_bound(o_dt, seg.m)
        vec = vector_norm_bound(psi, od, seg)
        ent = entanglement_bound(psi, o_sym, seg, leading_error_sum(h, p))
        checks = [
            ("exact<=scrambling", ex <= sc + 1e-9),
            ("scrambling<=worst", sc <= wc + 1e-9),
            ("exact<=vecnorm", ex <= vec + 1e-9),
            ("exact<=entanglement", ex <= ent + 1e-9),
        ]
        for r_seg in (5, 30):
            ex_r = exact_error(psi, od, seg, r_seg)
            acc = accumulated_scrambling(psi, od, h, spec, dt, r_seg)
            checks.append((f"exact<=accumulated(r={r_seg})", ex_r <= acc + 1e-9))
        for name, passed in checks:
            if not passed:
                violations.append(f"case {case}: {name}")
    elapsed = time.time() - t0
    ok = not violations and elapsed < 600.0
    report(
        4,
        ok,
        f"{n_cases} cases, {len(violations)} violations; runtime {elapsed:.1f}s < 600s"
        + ("" if not violations else "; " + "; ".join(violations[:5])),
    )


def test_criterion_5_order_of_accuracy():
    """log-log slope of ||m(dt)|| is p+1 +- 0.15; residual slope p+2 +- 0.2."""
    h = qimf(4, 0.809, 0.9045, 1.0)
    details = []
    ok = True
    dts = np.logspace(-0.5, -1.5, 6)
    for p in (1, 2, 4):
        norms = [
            linalg.spectral_norm(segment(h, make_spec(p, 2), dt).m) for dt in dts
        ]
        slope = np.polyfit(np.log(dts), np.log(norms), 1)[0]
        ok = ok and abs(slope - (p + 1)) <= 0.15
        details.append(f"p={p}: ||m|| slope {slope:.3f}")
    for p in (1, 2):
        lead = leading_error_sum(h, p).to_dense()
        vals = [
            linalg.spectral_norm(
                segment(h, make_spec(p, 2), dt).m - lead * dt ** (p + 1)
            )
            for dt in dts
        ]
        slope = np.polyfit(np.log(dts), np.log(vals), 1)[0]
        ok = ok and abs(slope - (p + 2)) <= 0.2
        details.append(f"p={p}: residual slope {slope:.3f}")
    report(5, ok, "; ".join(details))


def test_criterion_6_haar_bound():
    """MC over 500 Haar states at N=6 versus the 1-/2-design bounds."""
    n = 6
    h = qimf(n, 0.809, 0.9045, 1.0)
    seg = segment(h, make_spec(2, 2), 0.1)
    od = normalized_hamiltonian(h)
    o_dt = heisenberg(od, seg.u0)
    mean_bound, var_bound = haar_average(o_dt, seg.m)
    rng = np.random.default_rng(31415926)
    eps = np.array(
        [exact_error(linalg.haar_state(n, rng), od, seg, 1) for _ in range(500)]
    )
    sem = eps.std(ddof=1) / math.sqrt(len(eps))
    mean_ok = eps.mean() <= mean_bound + 3 * sem
    second_ok = float(np.mean(eps**2)) <= var_bound
    report(
        6,
        mean_ok and second_ok,
        f"MC mean {eps.mean():.3e} <= {mean_bound:.3e} (+3sem {3 * sem:.1e}); "
        f"second moment {np.mean(eps**2):.3e} <= {var_bound:.3e}",
    )


def test_criterion_7_observation_diagnostic():
    """v(O, psi~_{r_k}) concentrates near ||O||_F for the entangled input;
    the weak input's v(m, psi_k)/||m|| departs from ||m||_F/||m||."""
    t0 = time.time()
    n, r, dt = 10, 1000, 0.1
    h = qimf(n, 0.809, 0.9045, 1.0)
    spec = make_spec(1, 2)
    seg = segment(h, spec, dt)
    o = xx_corr(n)
    o_sym = (1.0 / linalg.spectral_norm(o.to_dense())) * o
    of = o_sym.frobenius_norm()
    m_norm = linalg.spectral_norm(seg.m)
    m_frob = linalg.normalized_frobenius(seg.m)

    dim = 1 << n
    entangled = np.zeros(dim, dtype=complex)
    entangled[0] = 1.0
    weak = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)

    acc_e = accumulated_entanglement(entangled, o_sym, h, spec, dt, r)
    acc_w = accumulated_entanglement(weak, o_sym, h, spec, dt, r)

    spread = acc_e.v_o.std() / acc_e.v_o.mean()
    mean_dev = abs(acc_e.v_o.mean() - of) / of
    dep_e = float(np.mean(np.abs(acc_e.v_m - m_frob)) / m_norm)
    dep_w = float(np.mean(np.abs(acc_w.v_m - m_frob)) / m_norm)
    elapsed = time.time() - t0
    ok = spread < 0.15 and mean_dev < 0.20 and dep_w > 2 * dep_e and elapsed < 900.0
    report(
        7,
        ok,
        f"entangled spread {spread:.2%} < 15%, mean dev {mean_dev:.2%} < 20%, "
        f"weak departure {dep_w:.4f} > 2x entangled {dep_e:.4f}; "
        f"runtime {elapsed:.1f}s < 900s",
    )


def test_criterion_8_induced_entanglement():
    """Induced entropies dominate the state entropy in the low-entanglement
    benchmark regime."""
    n, r, dt = 10, 100, 0.1
    from trotter_scope.hamiltonians import fig1_hamiltonian

    h = fig1_hamiltonian(n)
    o = zz_corr(n)
    od = o.to_dense() / linalg.spectral_norm(o.to_dense())
    psi0 = np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=complex)
    cut = middle_cut(n)
    tr = entropy_trace(h, make_spec(1, 2), psi0, od, cut, dt, r)
    frac_o = float(np.mean(tr.s_induced_o >= 2.0 * tr.s_state))
    frac_m = float(np.mean(tr.s_induced_m >= 2.0 * tr.s_state))
    cap = 0.5 * math.log(2 ** len(cut))
    state_ok = bool(np.max(tr.s_state) < cap)
    ok = frac_o >= 0.7 and frac_m >= 0.7 and state_ok
    report(
        8,
        ok,
        f"induced>=2x state on {frac_o:.0%} (O) / {frac_m:.0%} (m) of grid, "
        f"max s_state {np.max(tr.s_state):.3f} < {cap:.3f}",
    )


@pytest.mark.parametrize("scenario", sorted(SCENARIO_SMOKE))
def test_criterion_9_determinism(tmp_path, scenario):
    """Identical config + seed re-runs produce byte-identical CSVs."""
    kw = SCENARIO_SMOKE[scenario]
    p1 = run_scenario(make_cfg(scenario, **kw), out_dir=tmp_path / "a")
    p2 = run_scenario(make_cfg(scenario, **kw), out_dir=tmp_path / "b")
    ok = p1.read_bytes() == p2.read_bytes()
    report(9, ok, f"{scenario}: re-run byte-identical")
