"""Acceptance suite: one test per criterion, each reporting a single PASS/FAIL line.

The lines are printed at the end of the pytest run (see ``conftest.py``) and
also when the module is executed directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import ACCEPTANCE_GROUPS, GROUP_GENERATORS, group  # noqa: E402
from ncinv import groups as groups_mod  # noqa: E402
from ncinv.algebras import EnvelopingAlgebra, RelFreeContext, dim_F, dim_U, omega  # noqa: E402
from ncinv.cli import main as cli_main  # noqa: E402
from ncinv.groups import (  # noqa: E402
    EnvelopingDegree,
    RelFreeDegree,
    SymmetricMultidegree,
    TensorDegree,
    close,
    induced_action,
    invariant_dimension,
    invariant_echelon,
)
from ncinv.commutative import alphas_of_degree, monomials_alpha  # noqa: E402
from ncinv.lie import free_nilpotent_lie, lyndon_words, witt  # noqa: E402
from ncinv.linalg import SparseEchelon  # noqa: E402
from ncinv.pipeline import (  # noqa: E402
    construct_invariants_F,
    construct_invariants_U,
    gamma_images,
    same_subalgebra,
)
from ncinv.polarize import verify_polarization  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
MAX_DEGREE = 6
P_VALUES = (1, 2, 3)

# criterion number -> (ok, detail); filled in by the tests below
RESULTS: dict[int, tuple[bool, str]] = {}

_F_CACHE: dict = {}

# oracle counters when this module starts; criterion 7 counts only what it triggers
_ORACLE_BASELINE: dict = {}


@pytest.fixture(scope="module", autouse=True)
def _oracle_baseline():
    _ORACLE_BASELINE.update(groups_mod.oracle_stats)


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    assert ok, f"criterion {n}: {detail}"


def result_line(n: int) -> str:
    ok, detail = RESULTS.get(n, (False, "not run"))
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"


def f_result(name: str, p: int):
    key = (name, p)
    if key not in _F_CACHE:
        _F_CACHE[key] = construct_invariants_F(group(name), 2, p, max_degree=MAX_DEGREE,
                                               verify_degree=MAX_DEGREE)
    return _F_CACHE[key]


def test_criterion_1_relfree_generation():
    start = time.perf_counter()
    failures = []
    for name in ACCEPTANCE_GROUPS:
        for p in P_VALUES:
            rep = f_result(name, p).verification
            if not rep.passed:
                failures.append(f"{name} p={p} first failure at degree {rep.first_failure().degree}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 300
    detail = (f"F(N_p, K^2)^G generated through degree {MAX_DEGREE} for "
              f"{len(ACCEPTANCE_GROUPS)} groups and p in {list(P_VALUES)} in {elapsed:.1f}s")
    record(1, ok, detail if ok else "; ".join(failures) or f"took {elapsed:.1f}s")


def test_criterion_2_enveloping_generation_and_gamma():
    failures = []
    for name in ACCEPTANCE_GROUPS:
        for p in P_VALUES:
            lie = free_nilpotent_lie(2, p)
            res_U = construct_invariants_U(lie, group(name), max_degree=MAX_DEGREE, verify_degree=MAX_DEGREE)
            if not res_U.verification.passed:
                failures.append(f"{name} p={p}: U check failed")
                continue
            res_F = f_result(name, p)
            images = gamma_images(res_F.arena, res_U)
            eq = same_subalgebra(res_F.arena, images, res_F.nc_generators(), MAX_DEGREE)
            if not all(eq):
                failures.append(f"{name} p={p}: gamma images differ at degree {eq.index(False) + 1}")
    record(2, not failures, "U(L_p)^G generated and gamma images match the F subalgebra through degree "
           f"{MAX_DEGREE}" if not failures else "; ".join(failures))


def test_criterion_3_degree_bounds():
    failures = []
    for name in ACCEPTANCE_GROUPS:
        for p in P_VALUES:
            b = f_result(name, p).bounds
            if not (b.inequality_pbeta and b.inequality_noether):
                failures.append(f"{name} p={p}: beta_nc={b.beta_nc} beta_comm={b.beta_comm} |G|={b.group_order}")
    pm = f_result("minus_identity", 2).bounds
    if (pm.beta_nc, pm.p * pm.beta_comm) != (2, 4):
        failures.append(f"+-I p=2: beta_nc={pm.beta_nc}, bound {pm.p * pm.beta_comm}")
    record(3, not failures, "beta_nc <= p*beta_comm and beta_nc <= p*|G| everywhere; +-I, p=2 gives "
           f"beta_nc={pm.beta_nc} against {pm.p * pm.beta_comm}" if not failures else "; ".join(failures))


def test_criterion_4_structural_checks():
    failures = []
    for n in (1, 2, 3):
        for d in range(1, 7):
            if len(lyndon_words(n, d)) != witt(n, d):
                failures.append(f"lyndon count n={n} d={d}")
        for p in (1, 2, 3):
            rf = RelFreeContext(n, p, 3)
            for d in range(p + 1):
                if dim_F(rf, d) != n ** d:
                    failures.append(f"dim_F n={n} p={p} d={d}")
    if dim_F(RelFreeContext(2, 2), 3) != 6:
        failures.append("dim_F(N_2, 2, 3) != 6")
    if dim_U(EnvelopingAlgebra(free_nilpotent_lie(2, 2)), 3) != 6:
        failures.append("dim_U(L_2(K^2), 3) != 6")
    for n, p in ((2, 2), (2, 3), (3, 2)):
        env = EnvelopingAlgebra(free_nilpotent_lie(n, p))
        for d in range(1, 5):
            monos = list(itertools.combinations_with_replacement(range(env.lie.dim), d))
            images = SparseEchelon()
            for m in monos:
                images.add(omega(env, {m: 1}).terms)
            if images.rank != len(monos):
                failures.append(f"omega not injective on S^{d}(L_{p}(K^{n}))")
    record(4, not failures, "Lyndon counts, dimension identities and omega injectivity hold"
           if not failures else "; ".join(failures))


WEYL_GROUPS = [("sign", close([[[-1]]])), ("trivial1", close([], n=1))] + [
    (name, group(name)) for name in GROUP_GENERATORS if len(group(name)) <= 8]


def test_criterion_5_weyl_polarization():
    failures = []
    runs = 0
    for name, G in WEYL_GROUPS:
        for m in (1, 2, 3):
            rep = verify_polarization(G, G.n, 1, 1, m, 4)
            runs += 1
            if not rep.passed:
                failures.append(f"{name} m={m}")
    # p >= 2 with a guessed Capelli height is data, reported but not asserted
    report = verify_polarization(close([[[-1]]]), 1, 2, 2, 3, 4)
    extra = f"; report-only p=2 h=2 sign run: {'PASS' if report.passed else 'FAIL'}"
    record(5, not failures, f"p=1 polarization verified in {runs} runs through degree 4{extra}"
           if not failures else "; ".join(failures))


def test_criterion_6_deterministic_output(tmp_path, capsys):
    configs = sorted(p for p in (ROOT / "configs").glob("*.json") if p.name != "klein_external.json")
    differing = []
    for cfg in configs:
        blobs = []
        for k in range(2):
            out = tmp_path / f"{cfg.stem}.{k}.json"
            code = cli_main(["run", "--config", str(cfg), "--out", str(out), "--quiet"])
            if code != 0:
                differing.append(f"{cfg.name} exit {code}")
            blobs.append(out.read_bytes() if out.exists() else b"")
        if blobs[0] != blobs[1]:
            differing.append(cfg.name)
    capsys.readouterr()
    record(6, not differing, f"{len(configs)} sample configs give byte-identical result files"
           if not differing else "; ".join(differing))


def _oracle_actions():
    for name in ACCEPTANCE_GROUPS:
        G = group(name)
        for d in range(5):
            yield induced_action(G, TensorDegree(2, d))
        for p in P_VALUES:
            rf = RelFreeContext(2, p, MAX_DEGREE)
            env = EnvelopingAlgebra(free_nilpotent_lie(2, p))
            for d in range(MAX_DEGREE + 1):
                yield induced_action(G, RelFreeDegree(rf, d))
                yield induced_action(G, EnvelopingDegree(env, d))
            for d in range(1, 5):
                for alpha in alphas_of_degree(p, d):
                    if monomials_alpha(env.lie, alpha):
                        yield induced_action(G, SymmetricMultidegree(env.lie, alpha))


def test_criterion_7_trace_oracle():
    disagreements = 0
    count = 0
    for act in _oracle_actions():
        count += 1
        if invariant_echelon(act).rank != invariant_dimension(act):
            disagreements += 1
    # the counters also cover every action invariant_echelon saw during criteria 1-5
    checked = groups_mod.oracle_stats["checked"] - _ORACLE_BASELINE["checked"]
    mismatches = groups_mod.oracle_stats["mismatches"] - _ORACLE_BASELINE["mismatches"]
    ok = disagreements == 0 and mismatches == 0 and count > 0
    record(7, ok, f"trace average equals Reynolds rank on {count} graded actions here and on all "
           f"{checked} oracle checks made by criteria 1-7"
           if ok else f"{disagreements} disagreements, {mismatches} oracle mismatches")


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
