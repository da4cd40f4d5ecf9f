from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from asicpovm import constructions as cons
from asicpovm.certify import (
    InvalidStateError,
    NotInformationallyCompleteError,
    born_probabilities,
    check_completeness,
    check_informational_completeness,
    check_unbiasedness,
    cross_basis_scan,
    extended_tomography_round_trip,
    frame_bounds,
    hermitian_basis,
    informational_completeness,
    overlap_stats,
    pairwise_traces,
    reconstruct_state,
    scan_pairs,
    special_bound,
    tomography_round_trip,
)
from asicpovm.report import certify, certify_named, reattach_hp_builder
from asicpovm.systems import VectorSystem, dumps, loads, raw_povm, symmetrize_to_povm


def _intro():
    return cons.build("intro")


# --- completeness and rank -------------------------------------------------------------


def test_completeness_examples():
    assert check_completeness(_intro()) <= 1e-12
    assert check_completeness(cons.asic_pruned(5)) <= 1e-10
    # the unsymmetrized perturbed projectors do not resolve the identity
    assert check_completeness(raw_povm(cons.perturbed_system(5))) > 1e-3


def test_informational_completeness():
    assert check_informational_completeness(_intro()) == (4, True)
    assert informational_completeness(cons.asic_pruned(3)).complete


def test_duplicated_projectors_lose_rank():
    v = cons.intro_example().vectors
    dup = VectorSystem(n=2, vectors=np.array([v[0], v[1], v[2], v[0]]), labels=[(i,) for i in range(4)])
    rank, ok = check_informational_completeness(raw_povm(dup, weight=0.5))
    assert rank < 4 and not ok


def test_perturbed_rank_needs_extended_precision():
    cert = informational_completeness(cons.asic_perturbed(5))
    assert cert.float_rank < 25
    assert cert.method == "extended" and cert.rank == 25 and cert.complete
    assert 0 < cert.smallest_pivot


# --- overlaps ------------------------------------------------------------------------


def test_intro_pairwise_traces():
    e = _intro().elements
    direct = [np.trace(e[i] @ e[j]).real for i in range(4) for j in range(i + 1, 4)]
    assert np.allclose(pairwise_traces(_intro()), direct, atol=1e-15)


def test_overlap_stats_orthonormal():
    st = overlap_stats(np.eye(3))
    assert st.max_sq == 0 and st.scan.count == 3
    assert st.histogram.sum() == 3


def test_sampled_scan_is_deterministic():
    v = cons.approx_sic_vectors(12).vectors
    a = scan_pairs(v, exhaustive_cap=10, samples=5000, seed=7)
    b = scan_pairs(v, exhaustive_cap=10, samples=5000, seed=7)
    assert a.mode == "sampled" and a.scan_mode == {"mode": "sampled", "pairs": 5000, "seed": 7}
    assert a.max_abs == b.max_abs and np.array_equal(a.histogram, b.histogram)
    full = scan_pairs(v)
    assert full.mode == "exhaustive" and a.max_abs <= full.max_abs


def test_amub_char_unbiasedness_bound():
    s = cons.amub_character(6, 1)
    bound = cons.character_bound(6, 1, s.provenance["p"])
    assert cross_basis_scan(s).max_abs <= bound + 1e-12
    # deviation is two-sided: overlaps can fall below n^{-1/2} as well
    assert check_unbiasedness(s) <= max(bound - 6**-0.5, 6**-0.5) + 1e-12


def test_unbiasedness_of_mubs():
    assert check_unbiasedness(cons.mub_prime_power(7)) <= 1e-10


# --- bounds and frames ------------------------------------------------------------


def test_special_bound():
    assert special_bound(4, 0) == 4
    assert special_bound(2, Fraction(1, 4)) == 3
    assert special_bound(3, 0.1) == pytest.approx(3 * 0.9 / 0.7)
    with pytest.raises(ValueError):
        special_bound(4, Fraction(1, 4))


def test_frame_bounds():
    assert frame_bounds(np.eye(3)) == pytest.approx((1, 1))
    two = np.concatenate([np.eye(2), np.array([[1, 1], [1, -1]]) / math.sqrt(2)])
    assert frame_bounds(two) == pytest.approx((2, 2))
    assert frame_bounds(cons.mub_prime_power(3)) == pytest.approx((4, 4))


# --- tomography ---------------------------------------------------------------------


def test_born_examples():
    probs = born_probabilities(_intro(), np.eye(2) / 2)
    assert np.allclose(probs, 0.25)
    assert probs.sum() == pytest.approx(1)
    with pytest.raises(InvalidStateError):
        born_probabilities(_intro(), np.eye(2))
    with pytest.raises(InvalidStateError):
        born_probabilities(_intro(), np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        born_probabilities(raw_povm(cons.perturbed_system(3)), np.eye(3) / 3)


def test_hermitian_basis_orthonormal():
    b = hermitian_basis(3)
    gram = np.einsum("iab,jba->ij", b, b).real
    assert np.allclose(gram, np.eye(9))


def test_reconstruct_exact_and_residual():
    povm = cons.asic_pruned(3)
    rng = np.random.default_rng(0)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    probs = born_probabilities(povm, rho)
    rho_hat, res = reconstruct_state(povm, probs, full_output=True)
    assert np.linalg.norm(rho_hat - rho) <= 1e-10 and res <= 1e-12
    # overcomplete POVM: an inconsistent perturbation leaves a least-squares residual
    mubs = symmetrize_to_povm(cons.mub_prime_power(3))
    bumped = born_probabilities(mubs, rho)
    bumped[0] += 1e-3
    rho_ls, res = reconstruct_state(mubs, bumped, full_output=True)
    assert res > 1e-5
    assert np.linalg.norm(rho_ls - rho) < 1e-2


def test_reconstruct_needs_ic():
    v = cons.intro_example().vectors
    dup = VectorSystem(n=2, vectors=np.array([v[0], v[1], v[2], v[0]]), labels=[(i,) for i in range(4)])
    with pytest.raises(NotInformationallyCompleteError):
        reconstruct_state(raw_povm(dup, weight=0.5), np.full(4, 0.25))


def test_tomography_round_trip():
    assert tomography_round_trip(cons.asic_pruned(5)) <= 1e-8
    assert tomography_round_trip(_intro()) <= 1e-12


def test_extended_tomography_for_perturbed():
    assert extended_tomography_round_trip(cons.asic_perturbed(5), trials=3) <= 1e-8


# --- full reports ---------------------------------------------------------------------


@pytest.mark.parametrize("name,kw", [
    ("intro", {}), ("mub", {"q": 5}), ("asic1", {"q": 7}), ("asic2", {"p": 5}),
    ("amub-poly", {"n": 6}), ("asic-approx", {"n": 8}), ("amub-char", {"n": 6, "d": 2}),
])
def test_reports_pass(name, kw):
    rep = certify_named(name, **kw)
    assert rep.passed, rep.failures


def test_report_asic1_soft_bound():
    rep = certify_named("asic1", q=7)
    checks = {c.name: c for c in rep.checks}
    assert checks["overlap_bound"].passed and checks["overlap_bound"].hard
    soft = [c for c in rep.checks if not c.hard]
    assert soft and rep.passed


def test_report_non_faithful_fails():
    rep = certify_named("amub-char", n=8)
    assert not rep.passed and "basis_orthonormality" in rep.failures


def test_report_json_and_csv():
    rep = certify_named("mub", q=3)
    doc = json.loads(json.dumps(rep.to_dict()))
    assert doc["schema_version"] == 1 and doc["type"] == "certification_report"
    assert "wall_time" in doc and "wall_time" not in rep.to_dict(timing=False)
    assert rep.csv_row()["construction"] == "mub"


def test_tampered_vectors_fail_unit_norm():
    s = cons.mub_prime_power(3)
    s2 = VectorSystem(n=3, vectors=s.vectors * 1.01, labels=s.labels, basis_groups=s.basis_groups,
                      provenance=s.provenance)
    rep = certify(s2)
    assert not rep.passed and "unit_norm" in rep.failures


def test_hp_builder_reattached_only_for_identical_vectors():
    povm = loads(dumps(cons.asic_perturbed(5)))
    reattach_hp_builder(povm)
    assert povm.source.hp_builder is not None
    tampered = loads(dumps(cons.asic_perturbed(5)))
    tampered.source.vectors[0, 0] += 1e-9
    reattach_hp_builder(tampered)
    assert tampered.source.hp_builder is None
