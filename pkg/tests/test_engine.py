"""Axioms, self-compatibility, structure constants, antipode, duality."""

import pytest

from species_forge.catalog import (
    make_E, make_E_C, make_L, make_Perm, make_Pi, make_S,
)
from species_forge.core import (
    EMPTY, GroundSet, LinearOrderElt, SetPartitionElt, TensorVec, Vec,
    decompositions,
)
from species_forge.controls import perturbed_systems
from species_forge.engine import (
    AXIOMS, FatalInconsistency, check_antipode_convolution, check_axiom,
    check_delta_nabla_identity, check_dual_tables, check_fsd,
    check_preorder_rectangle, check_self_compatible, coproduct_table,
    dual_transpose, hopf_from, iterate_delta, iterate_nabla, product_table,
    takeuchi_antipode,
)


@pytest.fixture(scope="module")
def entries():
    return {e.key: e for e in (make_E(), make_E_C(2), make_Perm(), make_Pi(), make_L())}


# ---------------------------------------------------------------------------
# the seven axioms

@pytest.mark.parametrize("key", ["E", "E_C:2", "Perm", "Pi"])
def test_all_axioms_pass(entries, key):
    h = hopf_from(entries[key], "mu", "pi")
    for axiom in AXIOMS:
        assert check_axiom(h, axiom, 3).ok, (key, axiom)


def test_L_fails_exactly_commutativity(entries):
    h = hopf_from(entries["L"], "mu", "pi")
    rep = check_axiom(h, "commutative", 3)
    assert rep.status == "fail" and rep.n == 2
    assert rep.witness["inputs"] == ["(1)", "(2)"]
    assert rep.witness["lhs"] == "(1,2)" and rep.witness["rhs"] == "(2,1)"
    for axiom in AXIOMS:
        if axiom != "commutative":
            assert check_axiom(h, axiom, 3).ok, axiom


def test_delta_mu_unitality(entries):
    pi = entries["Pi"]
    h = hopf_from(pi, "mu", "mu")
    I = GroundSet.first(2)
    lam = SetPartitionElt.of([[1, 2]])
    got = h.delta(EMPTY, I, Vec.basis(lam))
    unit = pi.species.unit_element()
    assert got == TensorVec.basis((unit, lam))


def test_delta_mu_fibers(entries):
    h = hopf_from(entries["Pi"], "mu", "mu")
    S, T = GroundSet.of([1]), GroundSet.of([2])
    split = SetPartitionElt.of([[1], [2]])
    joined = SetPartitionElt.of([[1, 2]])
    assert h.coproduct.on_basis(S, T, split) == TensorVec.basis(
        (SetPartitionElt.of([[1]]), SetPartitionElt.of([[2]])))
    assert h.coproduct.on_basis(S, T, joined).is_zero()


def test_nabla_pi_fiber_sum(entries):
    h = hopf_from(entries["Pi"], "pi", "mu")
    S, T = GroundSet.of([1]), GroundSet.of([2])
    got = h.product.on_basis(S, T, SetPartitionElt.of([[1]]), SetPartitionElt.of([[2]]))
    assert got == Vec(GroundSet.first(2), [
        (SetPartitionElt.of([[1], [2]]), 1), (SetPartitionElt.of([[1, 2]]), 1)])


def test_nabla_pi_equals_nabla_mu_on_bijective_restriction(entries):
    ec = entries["E_C:2"]
    hm = hopf_from(ec, "mu", "pi")
    hp = hopf_from(ec, "pi", "pi")
    for n in range(4):
        I = GroundSet.first(n)
        for S, T in decompositions(I, 2):
            for x in ec.species.elements(S):
                for y in ec.species.elements(T):
                    assert hm.product.on_basis(S, T, x, y) == \
                        hp.product.on_basis(S, T, x, y)


@pytest.mark.parametrize("key", ["E", "E_C:2", "Perm", "Pi", "L"])
def test_delta_nabla_identity(entries, key):
    assert check_delta_nabla_identity(hopf_from(entries[key], "mu", "pi"), 4).ok


def test_delta_nabla_identity_other_variants(entries):
    for key in ("Pi", "Perm", "E_C:2"):
        assert check_delta_nabla_identity(hopf_from(entries[key], "mu", "mu"), 3).ok
        assert check_delta_nabla_identity(hopf_from(entries[key], "pi", "mu"), 3).ok


# ---------------------------------------------------------------------------
# iterated maps

def test_iterate_identity_for_single_part(entries):
    h = hopf_from(entries["Pi"], "mu", "pi")
    I = GroundSet.first(2)
    lam = SetPartitionElt.of([[1, 2]])
    v, w = iterate_nabla(h, (I,), TensorVec.basis((lam,)))
    assert v == Vec.basis(lam) and w is None
    t, w = iterate_delta(h, (I,), Vec.basis(lam))
    assert t == TensorVec.basis((lam,)) and w is None


def test_iterate_nabla_singletons(entries):
    h = hopf_from(entries["Pi"], "mu", "pi")
    parts = tuple(GroundSet.of([i]) for i in (1, 2, 3))
    t = TensorVec.basis(tuple(SetPartitionElt.of([[i]]) for i in (1, 2, 3)))
    v, witness = iterate_nabla(h, parts, t, all_orders=True)
    assert witness is None
    assert v == Vec.basis(SetPartitionElt.of([[1], [2], [3]]))


def test_iterate_all_orders_agree_when_associative(entries):
    h = hopf_from(entries["L"], "mu", "pi")
    parts = tuple(GroundSet.of([i]) for i in (1, 2, 3))
    t = TensorVec.basis(tuple(LinearOrderElt.of([i]) for i in (1, 2, 3)))
    v, witness = iterate_nabla(h, parts, t, all_orders=True)
    assert witness is None   # associative, despite not commutative
    assert v == Vec.basis(LinearOrderElt.of([1, 2, 3]))


def test_permuted_parts_witness_noncommutativity(entries):
    h = hopf_from(entries["L"], "mu", "pi")
    a = TensorVec.basis((LinearOrderElt.of([1]), LinearOrderElt.of([2])))
    b = TensorVec.basis((LinearOrderElt.of([2]), LinearOrderElt.of([1])))
    v1, _ = iterate_nabla(h, a.parts, a)
    v2, _ = iterate_nabla(h, b.parts, b)
    assert v1 != v2


def test_iterate_delta_orders(entries):
    h = hopf_from(entries["Pi"], "mu", "pi")
    I = GroundSet.first(3)
    parts = tuple(GroundSet.of([i]) for i in (1, 2, 3))
    for lam in entries["Pi"].species.elements(I):
        t, witness = iterate_delta(h, parts, Vec.basis(lam), all_orders=True)
        assert witness is None


# ---------------------------------------------------------------------------
# self-compatibility

@pytest.mark.parametrize("key,ok", [("E", True), ("E_C:2", True), ("Perm", True),
                                    ("Pi", True), ("L", False)])
def test_selfcompat_catalog(entries, key, ok):
    rep = check_self_compatible(entries[key].mu, "both", 3, species_key=key)
    assert (rep.status == "pass") is ok


def test_selfcompat_modes_agree_on_perturbed_systems():
    systems = perturbed_systems(seed=0, count=50)
    assert len(systems) >= 50
    seen = set()
    for ps in systems:
        rep = check_self_compatible(ps.mu, "both", 3, species_key=ps.key)
        assert rep.status == "fail", ps.key
        local = rep.witness["local"] if "local" in rep.witness else rep.witness
        assert local["condition"] == {"commutative": "commutative",
                                      "injective": "injective",
                                      "image": "image"}[ps.breaks], ps.key
        seen.add(ps.breaks)
    assert seen == {"commutative", "injective", "image"}


def test_selfcompat_seeded_variation():
    a = [ps.key for ps in perturbed_systems(seed=1, count=50)]
    b = [ps.key for ps in perturbed_systems(seed=1, count=50)]
    assert a == b  # deterministic for a fixed seed


def test_S_union_is_self_compatible():
    entry = make_S(make_E_C(2))
    assert check_self_compatible(entry.mu, "both", 3, species_key=entry.key).ok


def test_S_union_ssd_triple_is_fsd():
    entry = make_S(make_E_C(2))
    assert check_fsd(hopf_from(entry, "mu", "mu"), 3).ok


def test_selfcompat_precondition_reported():
    # a product that is not even associative is skipped with the reason
    from species_forge.catalog import MultSystem
    from species_forge.core import LinearOrderElt, SetSpecies
    import itertools as it

    def elements(I):
        return [LinearOrderElt(I, seq) for seq in it.permutations(I.labels)]

    def transport(sigma, l):
        return LinearOrderElt(sigma.target, tuple(sigma.apply(x) for x in l.seq))

    sp = SetSpecies("interleave", elements, transport)

    def rule(S, T, x, y):
        # alternate elements of the two sequences: associativity fails
        seq, a, b = [], list(x.seq), list(y.seq)
        while a or b:
            if a:
                seq.append(a.pop(0))
            if b:
                seq.append(b.pop(0))
        return LinearOrderElt(S.union(T), tuple(seq))

    rep = check_self_compatible(MultSystem(sp, rule), "both", 3,
                                species_key="interleave")
    assert rep.status == "skip"
    assert rep.witness["precondition"]["axiom"] == "associative"


def test_mode_disagreement_is_fatal(monkeypatch, entries):
    from species_forge import engine as eng

    monkeypatch.setattr(eng, "_selfcompat_local", lambda mu, max_n: (False, {"forced": True}))
    with pytest.raises(FatalInconsistency):
        eng.check_self_compatible(entries["Pi"].mu, "both", 2, species_key="Pi")


# ---------------------------------------------------------------------------
# structure constants and FSD

def test_fsd_pi_ssd_triple(entries):
    assert check_fsd(hopf_from(entries["Pi"], "mu", "mu"), 3).ok


def test_fsd_constants_zero_one(entries):
    h = hopf_from(entries["Pi"], "mu", "mu")
    I = GroundSet.first(3)
    for S, T in decompositions(I, 2):
        for table in (product_table(h, S, T), coproduct_table(h, S, T)):
            assert set(table.values()) <= {1}


def test_fsd_fails_for_mixed_Pi(entries):
    rep = check_fsd(hopf_from(entries["Pi"], "mu", "pi"), 2)
    assert rep.status == "fail"
    # splitting the one-block partition: coproduct constant with no product mate
    assert rep.witness["coproduct_constant"] == "1"
    assert rep.witness["product_constant"] == "0"


def test_fsd_mixed_E_C(entries):
    assert check_fsd(hopf_from(entries["E_C:2"], "mu", "pi"), 3).ok


def test_fsd_requires_hopf_compatibility(entries):
    rep = check_fsd(hopf_from(entries["L"], "mu", "mu"), 2)
    assert rep.status == "fail"
    assert rep.witness["reason"] == "not hopf compatible"


def test_fsd_implies_coco(entries):
    for key in ("E", "E_C:2", "Perm", "Pi", "L"):
        entry = entries[key]
        for p, c in (("mu", "mu"), ("mu", "pi"), ("pi", "mu"), ("pi", "pi")):
            h = hopf_from(entry, p, c)
            if check_fsd(h, 3).ok:
                assert check_axiom(h, "commutative", 3).ok, (key, p, c)
                assert check_axiom(h, "cocommutative", 3).ok, (key, p, c)


# ---------------------------------------------------------------------------
# the elementary SSD characterization

def test_ssd_conditions_commutative_entries(entries):
    from species_forge.engine import check_ssd_conditions
    for key in ("E", "E_C:2", "Perm", "Pi"):
        assert check_ssd_conditions(hopf_from(entries[key], "mu", "mu"), 3).ok, key
    entry = make_S(make_E_C(2))
    assert check_ssd_conditions(hopf_from(entry, "mu", "mu"), 3).ok


def test_ssd_conditions_fail_b_for_mixed_Pi(entries):
    from species_forge.engine import check_ssd_conditions
    rep = check_ssd_conditions(hopf_from(entries["Pi"], "mu", "pi"), 2)
    assert rep.status == "fail" and rep.witness["condition"] == "b"
    assert rep.witness["element"] == "{1,2}"  # straddles, yet the coproduct keeps it


def test_ssd_conditions_fail_a_for_fiber_product(entries):
    from species_forge.engine import check_ssd_conditions
    rep = check_ssd_conditions(hopf_from(entries["Pi"], "pi", "mu"), 2)
    assert rep.status == "fail" and rep.witness["condition"] == "a"


# ---------------------------------------------------------------------------
# Takeuchi's antipode

def test_takeuchi_on_singleton_is_negation(entries):
    for key in ("Pi", "Perm", "E_C:2"):
        h = hopf_from(entries[key], "mu", "mu")
        I = GroundSet.first(1)
        for lam in entries[key].species.elements(I):
            assert takeuchi_antipode(h, I, Vec.basis(lam)) == Vec.basis(lam).scale(-1)


def test_takeuchi_empty_set_is_identity(entries):
    h = hopf_from(entries["Pi"], "mu", "mu")
    unit = entries["Pi"].species.unit_element()
    assert takeuchi_antipode(h, EMPTY, Vec.basis(unit)) == Vec.basis(unit)


@pytest.mark.parametrize("n", range(5))
def test_takeuchi_Pi_closed_form(entries, n):
    h = hopf_from(entries["Pi"], "mu", "mu")
    I = GroundSet.first(n)
    for lam in entries["Pi"].species.elements(I):
        got = takeuchi_antipode(h, I, Vec.basis(lam))
        assert got == Vec.basis(lam).scale((-1) ** len(lam.blocks))


@pytest.mark.parametrize("key", ["Pi", "E_C:2", "Perm"])
def test_antipode_convolution(entries, key):
    assert check_antipode_convolution(hopf_from(entries[key], "mu", "mu"), 3).ok


def test_antipode_convolution_mixed_triple(entries):
    assert check_antipode_convolution(hopf_from(entries["Pi"], "mu", "pi"), 3).ok


# ---------------------------------------------------------------------------
# duality

@pytest.mark.parametrize("key", ["E", "E_C:2", "Perm", "Pi"])
def test_dual_transpose_tables(entries, key):
    h = hopf_from(entries[key], "mu", "pi")
    assert check_dual_tables(h, 3).ok
    hd = dual_transpose(h)
    h2 = hopf_from(entries[key], "pi", "mu")
    I = GroundSet.first(3)
    for S, T in decompositions(I, 2):
        assert product_table(hd, S, T) == product_table(h2, S, T)
        assert coproduct_table(hd, S, T) == coproduct_table(h2, S, T)


def test_dual_transpose_involution(entries):
    h = hopf_from(entries["Pi"], "mu", "pi")
    hdd = dual_transpose(dual_transpose(h))
    I = GroundSet.first(3)
    for S, T in decompositions(I, 2):
        assert product_table(hdd, S, T) == product_table(h, S, T)
        assert coproduct_table(hdd, S, T) == coproduct_table(h, S, T)


def test_dual_of_fsd_equals_itself(entries):
    h = hopf_from(entries["Pi"], "mu", "mu")
    hd = dual_transpose(h)
    I = GroundSet.first(3)
    for S, T in decompositions(I, 2):
        assert product_table(hd, S, T) == product_table(h, S, T)


# ---------------------------------------------------------------------------
# the rectangle behind the order

def test_preorder_rectangle_Pi_n4(entries):
    assert check_preorder_rectangle(entries["Pi"], 4, 3).ok


def test_preorder_rectangle_Perm_n4(entries):
    assert check_preorder_rectangle(entries["Perm"], 4, 3).ok
