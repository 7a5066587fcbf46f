"""Acceptance criteria, each at its stated tolerance.

Every experiment runs once per session with the default configuration (n = 1); the
checks read the report rows directly rather than trusting the runner's own verdicts.
A summary line per criterion is printed at the end of the pytest run.
"""
import math

import numpy as np
import pytest

from focklab.blocks import BumpProfile, a1_l2_norm, block_envelope
from focklab.harness import parse_config
from focklab.harness.cli import main
from focklab.harness.experiments import run

PHI = BumpProfile(1)
C0 = block_envelope(PHI)
_CACHE = {}


def report(name):
    if name not in _CACHE:
        _CACHE[name] = run(parse_config({}, experiment=name))
    return _CACHE[name]


def rows(name, **match):
    return [r for r in report(name).rows if all(r.get(k) == v for k, v in match.items())]


def test_c01_hs_identity(verdict):
    rs = rows("hs-identity")
    names = list(dict.fromkeys(r["symbol"] for r in rs))
    finest, improving = [], True
    for name in names:
        errs = [r["rel_err"] for r in rs if r["symbol"] == name]
        finest.append(errs[-1])
        improving &= all(b <= max(a, 1e-12) for a, b in zip(errs, errs[1:]))
    have_blocks = {f"a_{R}" for R in (1, 2, 4, 8)} <= set(names)
    ok = len(names) >= 6 and have_blocks and max(finest) <= 1e-3 and improving
    verdict(1, "hs", ok, f"{len(names)} symbols, worst finest error {max(finest):.2e}, improving={improving}")
    assert ok


def test_c02_block_envelope(verdict):
    tp = rows("block-decay", side="toeplitz")
    wy = rows("block-decay", side="weyl")
    assert {r["R"] for r in tp} == {1, 2, 4, 8} and {r["N"] for r in tp} == {16, 32, 48}
    assert max(r["R"] for r in wy) == 64
    env_t = max(r["norm_times_R"] for r in tp)
    env_w = max(r["norm_times_R"] for r in wy)
    mono = all(
        all(b >= a - 1e-12 for a, b in zip(seq, seq[1:]))
        for R in (1, 2, 4, 8)
        for seq in [[r["norm"] for r in sorted((r for r in tp if r["R"] == R), key=lambda r: r["N"])]])
    ok = env_t <= C0 + 1e-6 and env_w <= C0 + 1e-6 and mono
    verdict(2, "envelope", ok, f"max R*norm toeplitz {env_t:.4f}, weyl {env_w:.4f} vs {C0:.4f}, monotone={mono}")
    assert ok


def test_c03_bridge(verdict):
    gaps = {}
    for R in (1, 2, 4, 8):
        t = [r for r in rows("bridge", R=R, side="toeplitz")][-1]["norm"]
        w = [r for r in rows("bridge", R=R, side="weyl")][-1]["norm"]
        gaps[R] = abs(t - w) / max(t, w)
    ok = max(gaps.values()) <= 0.05
    verdict(3, "bridge", ok, f"worst relative gap {max(gaps.values()):.2e}")
    assert ok


def test_c04_round_trip(verdict):
    rt = rows("invariants", check="round trip")
    worst = {R: max(r["error"] for r in rt if r["R"] == R) for R in (1.0, 2.0, 4.0)}
    counts = {R: sum(r["R"] == R for r in rt) for R in worst}
    anchors = rows("invariants", check="a_R anchors")
    at0 = max(abs(r["value"] - 1.0) for r in anchors)
    sup = max(r["sup"] for r in anchors)
    ok = min(counts.values()) >= 9 and max(worst.values()) <= 1e-6 and at0 <= 1e-9 and sup <= 1 + 1e-8
    verdict(4, "round trip", ok, f"sup error {max(worst.values()):.1e}, |a_R(0)-1| {at0:.1e}, sup|a_R| {sup:.12f}")
    assert ok


def test_c05_berezin(verdict):
    rs = rows("berezin")
    assert len({r["symbol"] for r in rs}) == 4
    assert all(math.hypot(r["a_re"], r["a_im"]) <= 2.0 + 1e-12 for r in rs)
    worst = max(r["rel_gap"] for r in rs)
    dominated = all(math.hypot(r["via_matrix_re"], r["via_matrix_im"]) <= r["compression_norm"] + 1e-12
                    for r in rs)
    ok = worst <= 1e-4 and dominated
    verdict(5, "berezin", ok, f"{len(rs)} pairs at N=48, worst relative gap {worst:.1e}, dominated={dominated}")
    assert ok


def test_c06_quarter_bound(verdict):
    rs = rows("invariants", check="quarter bound")
    margin = min(r["rhs"] - r["lhs"] for r in rs)
    ok = len(rs) >= 20 and margin > 0
    verdict(6, "quarter", ok, f"{len(rs)} pairs, smallest margin {margin:.3e}")
    assert ok


def test_c07_peaks(verdict):
    rs = rows("invariants", check="peak")
    worst = max(r["error"] for r in rs)
    ok = [r["m"] for r in rs] == [1, 2, 3, 4, 5] and worst <= 1e-6
    verdict(7, "peaks", ok, f"worst |g_m^(1/4)(a_m) - m| {worst:.1e}")
    assert ok


def test_c08_offdiag(verdict):
    rs = rows("offdiag")
    top = max(r["offdiag"] for r in rs)
    dec = all(r["offdiag_2s"] < r["offdiag"] for r in rs)
    ok = len(rs) == 5 and top <= 0.5 and dec
    verdict(8, "offdiag", ok, f"max sum {top:.3e}, decreases on doubling={dec}")
    assert ok


def test_c09_star_ratios(verdict):
    """Tame ratios past m = 2 should fall below 1e-3; at defaults they do not."""
    tame = sorted(rows("star", mode="tame"), key=lambda r: r["m"])
    ratios = [r["ratio"] for r in tame if r["m"] >= 3]
    ok = max(ratios) <= 1e-3
    verdict(9, "a tame ratios", ok, "ratios m>=3: " + ", ".join(f"{x:.3g}" for x in ratios))
    assert ok


def test_c09_star_symbolic(verdict):
    paper = sorted(rows("star", mode="paper"), key=lambda r: r["m"])
    logs = [r["log_bound_sq"] for r in paper]
    neg = all(v < 0 for v in logs)
    dec = all(b < a for a, b in zip(logs, logs[1:]))
    lead_dec = all(b["leading_exponent"] < a["leading_exponent"] for a, b in zip(paper, paper[1:]))
    ok = len(paper) >= 2 and all(r["symbolic"] for r in paper) and neg and dec and lead_dec
    verdict(9, "b symbolic rows", ok, f"{len(paper)} rows, negative={neg}, decreasing={dec}")
    assert ok


def test_c10_counterexample(verdict):
    rs = sorted(rows("counterexample"), key=lambda r: r["M"])
    peak = rs[-1]["peak_direct"]
    nsum = max(r["norm_sum"] for r in rs)
    ratios = [r["ratio"] for r in rs if r["M"] >= 2]
    inc = all(b > a for a, b in zip(ratios, ratios[1:]))
    bound = 2.0 * a1_l2_norm(PHI) / math.sqrt(2.0 * math.pi)
    ok = rs[-1]["M"] == 5 and peak >= 4.5 and nsum <= bound and inc
    verdict(10, "counterexample", ok, f"peak {peak:.6f}, norm sum {nsum:.4f} <= {bound:.4f}, "
                                      "ratios " + ", ".join(f"{x:.4f}" for x in ratios))
    assert ok


def test_c11_moment_ledger(verdict):
    rs = rows("bounds-ledger", kind="moment")
    cheb = all(r["tail"] <= r["chebyshev"] for r in rs)
    excess = max(r["excess_over_calibration"] for r in rs)
    ok = {r["R"] for r in rs} == {1, 2, 4} and cheb and excess <= 0.5
    verdict(11, "moments", ok, f"{len(rs)} (R, rho, N) rows, chebyshev={cheb}, "
                               f"max log excess over envelope {excess:.3f}")
    assert ok


@pytest.mark.parametrize("experiment", ["offdiag", "berezin", "invariants"])
def test_c12_determinism(experiment, tmp_path, verdict):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{}")
    outs = [tmp_path / "first", tmp_path / "second"]
    codes = [main([experiment, "--config", str(cfg), "--out", str(o)]) for o in outs]
    same = all((outs[0] / f"{experiment}.{ext}").read_bytes() == (outs[1] / f"{experiment}.{ext}").read_bytes()
               for ext in ("csv", "json"))
    verdict(12, experiment, same, f"exit {codes[0]}")
    assert same and codes[0] == codes[1]
