"""Primitive elements and the classification isomorphisms.

Primitives are computed two independent ways (exact kernel intersection of
all proper coproduct components, and the set-level complement of proper
product images) and the spans must coincide.  On top of them sit the
classification maps: the labeled-partition isomorphism attached to any
commutative, injective, image-closed product, the maps-to-colors isomorphism
attached to any bijective cocommutative coproduct, and the block-product
decomposition of the whole space with its direct-sum certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .catalog import (CatalogEntry, ComultSystem, MultSystem, labeled_partition_species,
                      make_E_C)
from .core import (
    Bijection, CheckReport, Element, GroundSet, LabeledPartitionElt,
    MapTo, SetSpecies, TensorVec, Vec, decompositions, set_partitions,
)
from .engine import (
    DEFAULT_MAX_N, FatalInconsistency, LinearizedHopf, check_axiom,
    check_self_compatible, guard_max_n, hopf_from, iterate_nabla,
    takeuchi_antipode,
)


# ---------------------------------------------------------------------------
# coordinates

def _coords(v: Vec, index: dict) -> list[Fraction]:
    row = [Fraction(0)] * len(index)
    for e, c in v.terms.items():
        row[index[e]] = c
    return row


def _elem_index(basis: SetSpecies, I: GroundSet) -> dict:
    return {e: i for i, e in enumerate(basis.elements(I))}


def _vec_from_coords(basis: SetSpecies, I: GroundSet, coords) -> Vec:
    els = basis.elements(I)
    return Vec(I, [(els[i], c) for i, c in enumerate(coords) if c != 0])


# ---------------------------------------------------------------------------
# primitive elements

def primitives(h: LinearizedHopf, I: GroundSet) -> list[Vec]:
    """An exact basis of the intersection of ker Delta_{S,T} over proper
    decompositions of I; deterministic via the fixed elimination pivoting."""
    if len(I) == 0:
        return []
    els = h.basis.elements(I)
    index = {e: i for i, e in enumerate(els)}
    rows = []
    for S, T in decompositions(I, 2, nonempty=True):
        pairs = [(a, b) for a in h.basis.elements(S) for b in h.basis.elements(T)]
        pair_index = {p: i for i, p in enumerate(pairs)}
        block = [[Fraction(0)] * len(els) for _ in pairs]
        for e in els:
            t = h.coproduct.on_basis(S, T, e)
            for key, c in t.terms.items():
                block[pair_index[key]][index[e]] = c
        rows.extend(block)
    if not rows:
        rows = [[Fraction(0)] * len(els)]
    return [_vec_from_coords(h.basis, I, v) for v in linalg.kernel_basis(rows, len(els))]


def primitive_dims(h: LinearizedHopf, max_n: int) -> list[int]:
    guard_max_n(max_n)
    return [len(primitives(h, GroundSet.first(n))) for n in range(1, max_n + 1)]


def primitive_basis_elements(mu: MultSystem, I: GroundSet) -> tuple[Element, ...]:
    """Basis elements of P[I] lying in no proper product image."""
    if len(I) == 0:
        return ()
    reached: set[Element] = set()
    for S, T in decompositions(I, 2, nonempty=True):
        reached |= mu.image(S, T)
    return tuple(x for x in mu.species.elements(I) if x not in reached)


def primitive_basis_species(mu: MultSystem) -> SetSpecies:
    sp = mu.species
    return SetSpecies(
        f"Prim({sp.name})",
        lambda I: primitive_basis_elements(mu, I),
        sp.transport_fn,
    )


def check_primitives_match(entry: CatalogEntry, max_n: int = DEFAULT_MAX_N) -> CheckReport:
    """span(primitive basis) equals the kernel-intersection primitives."""
    guard_max_n(max_n)
    if entry.mu is None:
        return CheckReport("primitives_match", entry.key, max_n, "skip",
                           {"reason": "no multiplicative system"})
    h = hopf_from(entry, "mu", "mu")
    for n in range(1, max_n + 1):
        I = GroundSet.first(n)
        index = _elem_index(entry.species, I)
        kernel = [_coords(v, index) for v in primitives(h, I)]
        setp = [_coords(Vec.basis(e), index) for e in primitive_basis_elements(entry.mu, I)]
        if len(kernel) != len(setp) or not linalg.spans_equal(kernel, setp, len(index)):
            return CheckReport(
                "primitives_match", entry.key, n, "fail",
                {"kernel_dim": len(kernel), "set_basis_dim": len(setp)})
    return CheckReport("primitives_match", entry.key, max_n, "pass")


# ---------------------------------------------------------------------------
# the labeled-partition isomorphism f^mu

@dataclass
class FMu:
    """The multiplicative-system isomorphism from labeled partitions onto P.

    Component tables are built on demand per ground set; building one also
    asserts bijectivity there, which cannot fail for a self-compatible
    product short of an implementation bug.
    """

    mu: MultSystem
    q: SetSpecies
    sq: SetSpecies
    forward: dict      # GroundSet -> {labeled partition -> element}
    inverse: dict      # GroundSet -> {element -> labeled partition}
    key: str = ""

    def table(self, I: GroundSet) -> dict:
        if I not in self.forward:
            fwd = _fmu_component(self.mu, self.sq, I, self.key)
            self.forward[I] = fwd
            self.inverse[I] = {el: X for X, el in fwd.items()}
        return self.forward[I]

    def apply(self, X: LabeledPartitionElt) -> Element:
        return self.table(X.ground)[X]

    def invert(self, el: Element) -> LabeledPartitionElt:
        self.table(el.ground)
        return self.inverse[el.ground][el]

    def shape(self, el: Element):
        return self.invert(el).shape()


def _multiply_blocks(mu: MultSystem, X: LabeledPartitionElt, reverse: bool = False) -> Element:
    blocks = X.blocks[::-1] if reverse else X.blocks
    if not blocks:
        return mu.species.unit_element()
    parts = tuple(b for b, _ in blocks)
    labels = tuple(lab for _, lab in blocks)
    return mu.fold(parts, labels)


def _fmu_component(mu: MultSystem, sq: SetSpecies, I: GroundSet, key: str) -> dict:
    fwd = {}
    for X in sq.elements(I):
        el = _multiply_blocks(mu, X)
        fwd[X] = el
        if _multiply_blocks(mu, X, reverse=True) != el:
            raise FatalInconsistency(
                f"f_mu block product for {key} depends on the block order",
                witness={"X": str(X)})
    targets = set(fwd.values())
    if len(targets) != len(fwd) or targets != set(mu.species.elements(I)):
        raise FatalInconsistency(
            f"f_mu is not a bijection for {key} over {I}",
            witness={"labeled": len(fwd), "hit": len(targets),
                     "dim": mu.species.dim(I)})
    return fwd


def f_mu(mu: MultSystem, max_n: int = DEFAULT_MAX_N, *, check_preconditions: bool = True,
         species_key: str | None = None) -> FMu:
    """Build the block-product map from Q-labeled partitions onto P and verify
    it is a bijection intertwining disjoint union with the product.

    Non-bijectivity on any checked component is fatal: for an associative,
    unital, Hopf self-compatible product this cannot happen.
    """
    guard_max_n(max_n)
    key = species_key or mu.species.name
    if check_preconditions:
        rep = check_self_compatible(mu, "both", min(max_n, 3), species_key=key)
        if rep.status != "pass":
            raise ValueError(f"f_mu preconditions fail for {key}: {rep.status} {rep.witness}")
    q = primitive_basis_species(mu)
    sq = labeled_partition_species(q, f"S({q.name})")
    fm = FMu(mu, q, sq, {}, {}, key)
    for n in range(max_n + 1):
        fm.table(GroundSet.first(n))
    return fm


def check_fmu_intertwines(fm: FMu, max_n: int = DEFAULT_MAX_N,
                          species_key: str | None = None) -> CheckReport:
    """f(X u Y) = mu(f X, f Y) and transport-equivariance, exhaustively."""
    guard_max_n(max_n)
    key = species_key or fm.mu.species.name
    sq, mu = fm.sq, fm.mu
    for n in range(max_n + 1):
        I = GroundSet.first(n)
        for S, T in decompositions(I, 2):
            for X in sq.elements(S):
                for Y in sq.elements(T):
                    union = LabeledPartitionElt(I, X.blocks + Y.blocks)
                    if fm.table(I)[union] != mu(S, T, fm.apply(X), fm.apply(Y)):
                        return CheckReport(
                            "fmu_intertwines", key, n, "fail",
                            {"law": "product", "X": str(X), "Y": str(Y)})
        for sigma in Bijection.all_endo(I):
            for X in sq.elements(I):
                if fm.table(I)[sq.transport(sigma, X)] != \
                        mu.species.transport(sigma, fm.apply(X)):
                    return CheckReport(
                        "fmu_intertwines", key, n, "fail",
                        {"law": "transport", "sigma": list(sigma.images), "X": str(X)})
    return CheckReport("fmu_intertwines", key, max_n, "pass")


# ---------------------------------------------------------------------------
# the maps-to-colors isomorphism f^pi

@dataclass
class FPi:
    """The comultiplicative-system isomorphism from maps-to-colors onto P.

    Component tables are built on demand; building one asserts bijectivity.
    """

    pi: ComultSystem
    colors: tuple[Element, ...]   # the component over {1}, fixing the color order
    e_c: CatalogEntry
    forward: dict                 # GroundSet -> {map element -> element}
    inverse: dict
    _build: object = None

    def table(self, I: GroundSet) -> dict:
        if I not in self.forward:
            fwd = self._build(I)
            self.forward[I] = fwd
            self.inverse[I] = {el: f for f, el in fwd.items()}
        return self.forward[I]

    def apply(self, f: MapTo) -> Element:
        return self.table(f.ground)[f]

    def invert(self, el: Element) -> MapTo:
        self.table(el.ground)
        return self.inverse[el.ground][el]


def _inverted_mu(pi: ComultSystem) -> MultSystem:
    def rule(S, T, x, y):
        fiber = pi.fiber(S, T, (x, y))
        if len(fiber) != 1:
            raise ValueError(
                f"coproduct is not bijective on ({S},{T}): fiber size {len(fiber)}")
        return fiber[0]
    return MultSystem(pi.species, rule)


def f_pi(pi: ComultSystem, max_n: int = 3, *, check_preconditions: bool = True,
         species_key: str | None = None) -> FPi:
    """Build the unique isomorphism from maps-to-colors onto (P, pi) with the
    singleton normalization f(1 -> c) = c.

    Constructed as the composite of the labeled-partition isomorphism for the
    inverted coproduct, the relabeling along the singleton identification,
    and the inverse of the same isomorphism on the maps side.
    """
    guard_max_n(max_n)
    key = species_key or pi.species.name
    sp = pi.species
    if check_preconditions:
        entry = CatalogEntry(key, sp, None, pi)
        h = hopf_from(entry, "pi", "pi")
        for axiom in ("coassociative", "counital", "cocommutative"):
            rep = check_axiom(h, axiom, min(max_n, 3))
            if not rep.ok:
                raise ValueError(f"f_pi precondition {axiom} fails for {key}: {rep.witness}")
        for n in range(max_n + 1):
            I = GroundSet.first(n)
            for S, T in decompositions(I, 2):
                if not pi.is_bijective_on(S, T):
                    raise ValueError(f"f_pi precondition fails: {key} coproduct is "
                                     f"not bijective on ({S},{T})")

    mu = _inverted_mu(pi)
    colors = tuple(sp.elements(GroundSet.of([1])))
    c = len(colors)
    e_c = make_E_C(c)
    nu = e_c.mu

    fm_p = f_mu(mu, max_n, check_preconditions=False, species_key=key)
    fm_e = f_mu(nu, max_n, check_preconditions=False, species_key=e_c.key)

    one = GroundSet.of([1])

    def g(block: GroundSet, label: MapTo) -> Element:
        # the singleton identification R -> Q, forced by naturality from
        # g(1 -> c) = c
        sigma = Bijection(one, block, (block.labels[0],))
        color = colors[label.color_of(block.labels[0])]
        return sp.transport(sigma, color)

    def build(I: GroundSet) -> dict:
        fwd = {}
        for f in e_c.species.elements(I):
            X = fm_e.invert(f)
            relabeled = LabeledPartitionElt(
                I, tuple((b, g(b, lab)) for b, lab in X.blocks))
            fwd[f] = fm_p.table(I)[relabeled]
        hit = set(fwd.values())
        if len(hit) != len(fwd) or hit != set(sp.elements(I)):
            raise FatalInconsistency(
                f"f_pi is not a bijection for {key} over {I}",
                witness={"maps": len(fwd), "hit": len(hit), "dim": sp.dim(I)})
        return fwd

    fp = FPi(pi, colors, e_c, {}, {}, build)
    for n in range(max_n + 1):
        fp.table(GroundSet.first(n))
    return fp


def check_fpi_intertwines(fp: FPi, max_n: int = 3,
                          species_key: str | None = None) -> CheckReport:
    """(f x f) o rho = pi o f on every component, plus the normalization."""
    guard_max_n(max_n)
    key = species_key or fp.pi.species.name
    rho = fp.e_c.pi
    one = GroundSet.of([1])
    for idx, f in enumerate(fp.e_c.species.elements(one)):
        if fp.apply(f) != fp.colors[idx]:
            return CheckReport("fpi_intertwines", key, 1, "fail",
                               {"law": "normalization", "input": str(f)})
    for n in range(max_n + 1):
        I = GroundSet.first(n)
        for S, T in decompositions(I, 2):
            for f in fp.e_c.species.elements(I):
                fa, fb = rho(S, T, f)
                if (fp.table(S)[fa], fp.table(T)[fb]) != fp.pi(S, T, fp.apply(f)):
                    return CheckReport(
                        "fpi_intertwines", key, n, "fail",
                        {"law": "coproduct", "S": list(S), "T": list(T), "input": str(f)})
    return CheckReport("fpi_intertwines", key, max_n, "pass")


# ---------------------------------------------------------------------------
# the block-product decomposition of p[I]

@dataclass
class NablaXDecomposition:
    """Spanning data for each block-product subspace, plus the certificates."""

    I: GroundSet
    components: list        # (blocks, [Vec, ...])
    total_dim: int
    certified: dict

    def to_json(self) -> dict:
        return {
            "I": list(self.I),
            "components": [
                {"blocks": [list(b) for b in blocks], "dim": len(vecs)}
                for blocks, vecs in self.components],
            "total_dim": self.total_dim,
            "certified": self.certified,
        }


def nabla_X_decompose(h: LinearizedHopf, I: GroundSet,
                      species_key: str | None = None) -> NablaXDecomposition:
    """Split p[I] into block products of primitives, one summand per set
    partition, and certify the direct sum, the inverse-isomorphism property,
    and the straddling-block description of coproduct kernels.

    Any failed certificate is fatal for commutative input: each one is a
    theorem at this scale.
    """
    key = species_key or h.basis.name
    rep = check_axiom(h, "commutative", len(I))
    if not rep.ok:
        raise ValueError(f"nabla_X_decompose needs a commutative product: {rep.witness}")

    prim_cache: dict[GroundSet, list[Vec]] = {}

    def prim(B: GroundSet) -> list[Vec]:
        if B not in prim_cache:
            prim_cache[B] = primitives(h, B)
        return prim_cache[B]

    index = _elem_index(h.basis, I)
    dim = len(index)

    # hypothesis p = 1 + q + r: primitives and proper product images fill p[I]
    if len(I) > 0:
        q_rows = [_coords(v, index) for v in prim(I)]
        r_rows = []
        for S, T in decompositions(I, 2, nonempty=True):
            for x in h.basis.elements(S):
                for y in h.basis.elements(T):
                    r_rows.append(_coords(h.product.on_basis(S, T, x, y), index))
        r_rank = linalg.rank(r_rows, dim)
        if len(q_rows) + r_rank != dim or linalg.rank(q_rows + r_rows, dim) != dim:
            raise FatalInconsistency(
                f"p != 1 + q + r for {key} over {I}",
                witness={"q_dim": len(q_rows), "r_rank": r_rank, "dim": dim})

    components: list = []
    spans: dict[tuple, list[Vec]] = {}
    all_rows = []
    for blocks in set_partitions(I):
        vecs = []
        pools = [prim(b) for b in blocks]
        for combo in itertools.product(*pools):
            if combo:
                t = TensorVec.tensor(*combo)
                v, _ = iterate_nabla(h, blocks, t)
            else:
                v = Vec.basis(h.unit())
            vecs.append(v)
        components.append((blocks, vecs))
        spans[blocks] = vecs
        all_rows.extend(_coords(v, index) for v in vecs)

    total = sum(len(vecs) for _, vecs in components)
    direct_sum = total == dim and linalg.rank(all_rows, dim) == dim
    if not direct_sum:
        raise FatalInconsistency(
            f"block-product subspaces do not sum directly for {key} over {I}",
            witness={"total_span": total, "rank": linalg.rank(all_rows, dim), "dim": dim})

    # (b): nabla/Delta restrict to inverse isomorphisms between summands
    inverse_iso = True
    for S, T in decompositions(I, 2, nonempty=True):
        for X in set_partitions(S):
            for Y in set_partitions(T):
                target_rows = [_coords(v, index) for v in spans[
                    tuple(sorted(X + Y, key=lambda b: b.labels))]]
                for u in spans_on(h, S, X, prim):
                    for w in spans_on(h, T, Y, prim):
                        prod = h.nabla(S, T, TensorVec.tensor(u, w))
                        if not linalg.in_span(target_rows, dim, _coords(prod, index)):
                            inverse_iso = False
                        if h.delta(S, T, prod) != TensorVec.tensor(u, w):
                            inverse_iso = False
    if not inverse_iso:
        raise FatalInconsistency(f"inverse-isomorphism certificate failed for {key} over {I}")

    # (c): ker Delta_{S,T} is the sum over partitions with a straddling block
    kernel_ok = True
    for S, T in decompositions(I, 2, nonempty=True):
        pairs = [(a, b) for a in h.basis.elements(S) for b in h.basis.elements(T)]
        pair_index = {p: i for i, p in enumerate(pairs)}
        rows = [[Fraction(0)] * dim for _ in pairs]
        for e in h.basis.elements(I):
            for kkey, c in h.coproduct.on_basis(S, T, e).terms.items():
                rows[pair_index[kkey]][index[e]] = c
        ker_dim = len(linalg.kernel_basis(rows, dim))
        straddle_dim = 0
        for blocks, vecs in components:
            if any(not (b.issubset(S) or b.issubset(T)) for b in blocks):
                straddle_dim += len(vecs)
                for v in vecs:
                    if not h.delta(S, T, v).is_zero():
                        kernel_ok = False
        if straddle_dim != ker_dim:
            kernel_ok = False
    if not kernel_ok:
        raise FatalInconsistency(f"kernel certificate failed for {key} over {I}")

    return NablaXDecomposition(
        I, components, total,
        {"direct_sum": direct_sum, "inverse_isomorphisms": inverse_iso,
         "kernel_straddle": kernel_ok})


def spans_on(h: LinearizedHopf, S: GroundSet, X: tuple, prim) -> list[Vec]:
    vecs = []
    pools = [prim(b) for b in X]
    for combo in itertools.product(*pools):
        if combo:
            v, _ = iterate_nabla(h, X, TensorVec.tensor(*combo))
        else:
            v = Vec.basis(h.unit())
        vecs.append(v)
    return vecs


# ---------------------------------------------------------------------------
# the antipode in closed form

def check_takeuchi_closed_form(entry: CatalogEntry, max_n: int = DEFAULT_MAX_N) -> CheckReport:
    """On the self-dual triple, Takeuchi's sum acts on a basis element as the
    sign (-1)^k, k the number of blocks of its labeled-partition preimage."""
    guard_max_n(max_n)
    if entry.mu is None:
        return CheckReport("takeuchi_closed_form", entry.key, max_n, "skip",
                           {"reason": "no multiplicative system"})
    h = hopf_from(entry, "mu", "mu")
    fm = f_mu(entry.mu, max_n, check_preconditions=False, species_key=entry.key)
    for n in range(max_n + 1):
        I = GroundSet.first(n)
        for lam in entry.species.elements(I):
            k = len(fm.invert(lam).blocks)
            got = takeuchi_antipode(h, I, Vec.basis(lam))
            want = Vec.basis(lam).scale((-1) ** k)
            if got != want:
                return CheckReport(
                    "takeuchi_closed_form", entry.key, n, "fail",
                    {"input": str(lam), "blocks": k, "got": str(got), "want": str(want)})
    return CheckReport("takeuchi_closed_form", entry.key, max_n, "pass")
