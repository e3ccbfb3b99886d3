"""Batch front end.

Select a species, run certification suites, and emit reports, dimension
tables, structure-constant dumps, antipode tables, and Hasse diagrams.
Output on stdout is byte-stable for a fixed (command, config, seed):
timings are zeroed unless explicitly requested, and every enumeration is
deterministic.

Exit codes: 0 when everything passed or failed only where the species
declares it should; 1 on an unexpected failure; 2 on a fatal inconsistency
(a desk-scale contradiction of a theorem, with a serialized witness).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import classify, controls, engine, order as order_mod
from .catalog import CatalogEntry, parse_species, with_derived_pi
from .core import CheckReport, GroundSet, Bijection, transport_check
from .engine import FatalInconsistency

SUITES = ("axioms", "ssd", "lsd", "order", "bases", "full")
VARIANTS = ("mu-pi", "mu-mu", "pi-mu", "pi-pi")


# ---------------------------------------------------------------------------
# suite machinery

class Runner:
    def __init__(self, entry: CatalogEntry, max_n: int, seed: int, fail_fast: bool):
        self.entry = entry
        self.max_n = max_n
        self.seed = seed
        self.fail_fast = fail_fast
        self.reports: list[CheckReport] = []
        self.stopped = False

    def run(self, expected_fail: bool, fn, *args, **kwargs) -> CheckReport | None:
        if self.stopped:
            return None
        t0 = time.perf_counter()
        try:
            rep = fn(*args, **kwargs)
        except FatalInconsistency as exc:
            rep = CheckReport(getattr(fn, "__name__", "check"), self.entry.key,
                              self.max_n, "fatal",
                              {"message": str(exc), "witness": exc.witness})
        rep.elapsed_ms = int((time.perf_counter() - t0) * 1000)
        if rep.status == "fail":
            rep.expected = expected_fail
        self.reports.append(rep)
        if self.fail_fast and (rep.status == "fatal"
                               or (rep.status == "fail" and not rep.expected)):
            self.stopped = True
        return rep

    def summary(self) -> dict:
        counts = {"pass": 0, "fail_expected": 0, "fail_unexpected": 0,
                  "fatal": 0, "skip": 0}
        for r in self.reports:
            if r.status == "pass":
                counts["pass"] += 1
            elif r.status == "skip":
                counts["skip"] += 1
            elif r.status == "fatal":
                counts["fatal"] += 1
            elif r.expected:
                counts["fail_expected"] += 1
            else:
                counts["fail_unexpected"] += 1
        return counts

    def exit_code(self) -> int:
        counts = self.summary()
        if counts["fatal"]:
            return 2
        if counts["fail_unexpected"]:
            return 1
        return 0


def _canonical_variant(entry: CatalogEntry) -> tuple[str, str]:
    if entry.mu is not None and entry.pi is not None:
        return "mu", "pi"
    if entry.mu is not None:
        return "mu", "mu"
    return "pi", "pi"


def _maybe_derive_pi(entry: CatalogEntry, max_n: int) -> CatalogEntry:
    if entry.pi is not None or entry.mu is None:
        return entry
    try:
        return with_derived_pi(entry, max_n)
    except ValueError:
        return entry


def _expect(entry: CatalogEntry, flag: str, side: str = "mu") -> bool:
    flags = entry.mu_flags if side == "mu" else entry.pi_flags
    return flag in flags


def _skip(name: str, entry: CatalogEntry, max_n: int, reason: str) -> CheckReport:
    return CheckReport(name, entry.key, max_n, "skip", {"reason": reason})


def _run_axioms(r: Runner) -> None:
    entry, n = r.entry, r.max_n
    for m in range(n + 1):
        rep = transport_check(entry.species, GroundSet.first(m))
        rep.species = entry.key
        r.reports.append(rep)
        if rep.status != "pass":
            break
    r.run(False, engine.check_naturality, entry, n)
    p, c = _canonical_variant(entry)
    h = engine.hopf_from(entry, p, c)
    for axiom in engine.AXIOMS:
        expected_fail = False
        if axiom == "commutative":
            expected_fail = not _expect(entry, "commutative")
        r.run(expected_fail, engine.check_axiom, h, axiom, n)
    r.run(False, engine.check_delta_nabla_identity, h, n)


def _run_ssd(r: Runner) -> None:
    entry, n = r.entry, r.max_n
    if entry.mu is None:
        r.reports.append(_skip("self_compatible", entry, n, "no multiplicative system"))
        return
    exp = not _expect(entry, "commutative")
    r.run(exp, engine.check_self_compatible, entry.mu, "direct", n, species_key=entry.key)
    r.run(exp, engine.check_self_compatible, entry.mu, "local", n, species_key=entry.key)
    r.run(exp, engine.check_self_compatible, entry.mu, "both", n, species_key=entry.key)
    r.run(False, _controls_check, entry, r.seed)
    h_ssd = engine.hopf_from(entry, "mu", "mu")
    r.run(exp, engine.check_fsd, h_ssd, n)
    r.run(False, _coco_consequence, entry, n)
    if _expect(entry, "commutative"):
        r.run(False, engine.check_ssd_conditions, h_ssd, n)
        r.run(False, classify.check_takeuchi_closed_form, entry, n)
        r.run(False, classify.check_primitives_match, entry, n)
        r.run(False, _fmu_check, entry, n)
    else:
        r.reports.append(_skip("ssd_conditions", entry, n,
                               "characterizes Hopf triples only"))
        r.reports.append(_skip("takeuchi_closed_form", entry, n, "product not commutative"))
        r.reports.append(_skip("fmu_intertwines", entry, n, "product not commutative"))


def _controls_check(entry: CatalogEntry, seed: int) -> CheckReport:
    """Both self-compatibility modes agree on every seeded perturbed system."""
    systems = controls.perturbed_systems(seed=seed, count=50)
    detected: dict[str, int] = {}
    for ps in systems:
        rep = engine.check_self_compatible(ps.mu, "both", 3, species_key=ps.key)
        if rep.status != "fail":
            return CheckReport("selfcompat_controls", entry.key, 3, "fail",
                               {"system": ps.key, "status": rep.status,
                                "witness": rep.witness})
        detected[ps.breaks] = detected.get(ps.breaks, 0) + 1
    return CheckReport("selfcompat_controls", entry.key, 3, "pass",
                       {"systems": len(systems), "broken_condition_counts": detected})


def _coco_consequence(entry: CatalogEntry, max_n: int) -> CheckReport:
    """Every available triple that passes the self-duality check is also
    commutative and cocommutative."""
    variants = []
    if entry.mu is not None:
        variants.append(("mu", "mu"))
    if entry.pi is not None:
        variants.append(("pi", "pi"))
    if entry.mu is not None and entry.pi is not None:
        variants += [("mu", "pi"), ("pi", "mu")]
    checked = []
    for p, c in variants:
        h = engine.hopf_from(entry, p, c)
        if engine.check_fsd(h, max_n).ok:
            for axiom in ("commutative", "cocommutative"):
                rep = engine.check_axiom(h, axiom, max_n)
                if not rep.ok:
                    return CheckReport("fsd_coco_consequence", entry.key, max_n, "fail",
                                       {"variant": f"{p},{c}", "axiom": axiom,
                                        "witness": rep.witness})
            checked.append(f"{p},{c}")
    return CheckReport("fsd_coco_consequence", entry.key, max_n, "pass",
                       {"fsd_variants": checked})


def _fmu_check(entry: CatalogEntry, max_n: int) -> CheckReport:
    fm = classify.f_mu(entry.mu, max_n, species_key=entry.key)
    return classify.check_fmu_intertwines(fm, max_n, species_key=entry.key)


def _run_lsd(r: Runner) -> None:
    entry, n = r.entry, r.max_n
    if entry.pi is None:
        r.reports.append(_skip("lsd", entry, n, "no comultiplicative system"))
        return
    exp_bij = not _expect(entry, "bijective", "pi")
    r.run(exp_bij, _pi_bijective, entry, n)
    h = engine.hopf_from(entry, "pi", "pi")
    r.run(False, engine.check_axiom, h, "cocommutative", n)
    h_mixed = engine.hopf_from(entry, "mu", "pi") if entry.mu is not None else None
    if h_mixed is not None:
        r.run(exp_bij, engine.check_fsd, h_mixed, n)
    if not exp_bij:
        r.run(False, _fpi_check, entry, min(n, 3))
        r.run(False, _lsd_primitive_profile, entry, min(n, 3))
    else:
        r.reports.append(_skip("fpi_intertwines", entry, n, "coproduct not bijective"))


def _pi_bijective(entry: CatalogEntry, max_n: int) -> CheckReport:
    from .core import decompositions
    for m in range(max_n + 1):
        I = GroundSet.first(m)
        for S, T in decompositions(I, 2):
            if not entry.pi.is_bijective_on(S, T):
                return CheckReport("pi_bijective", entry.key, m, "fail",
                                   {"S": list(S), "T": list(T)})
    return CheckReport("pi_bijective", entry.key, max_n, "pass")


def _fpi_check(entry: CatalogEntry, max_n: int) -> CheckReport:
    fp = classify.f_pi(entry.pi, max_n, species_key=entry.key)
    return classify.check_fpi_intertwines(fp, max_n, species_key=entry.key)


def _lsd_primitive_profile(entry: CatalogEntry, max_n: int) -> CheckReport:
    """A linearly self-dual structure concentrates its primitives in degree one."""
    h = engine.hopf_from(entry, "pi", "pi")
    dims = classify.primitive_dims(h, max_n)
    if any(d != 0 for d in dims[1:]):
        return CheckReport("lsd_primitive_profile", entry.key, max_n, "fail",
                           {"dims": dims})
    return CheckReport("lsd_primitive_profile", entry.key, max_n, "pass",
                       {"dims": dims})


def _run_order(r: Runner) -> None:
    entry, n = r.entry, r.max_n
    entry = _maybe_derive_pi(entry, n)
    if entry.mu is None or entry.pi is None or not _expect(entry, "commutative"):
        r.reports.append(_skip("order", r.entry, n,
                               "order needs a commutative product and a coproduct"))
        return
    so = order_mod.SpeciesOrder(entry.mu, entry.pi, entry.key)
    r.run(False, _order_valid, so, n)
    r.run(False, order_mod.check_order_transport, so, n)
    r.run(False, order_mod.check_all_lower_lattices, entry, n)
    r.run(False, order_mod.check_AB, so, entry.mu, n)
    r.run(False, order_mod.check_reconstruct_roundtrip, entry, n)


def _order_valid(so: order_mod.SpeciesOrder, max_n: int) -> CheckReport:
    sizes = []
    for m in range(max_n + 1):
        sl = so.slice(GroundSet.first(m))
        sizes.append(len(sl.strict))
    return CheckReport("order_valid", so.key, max_n, "pass", {"strict_pairs": sizes})


def _run_bases(r: Runner) -> None:
    entry, n = r.entry, r.max_n
    entry = _maybe_derive_pi(entry, n)
    if entry.mu is None or entry.pi is None or not _expect(entry, "commutative"):
        r.reports.append(_skip("bases", r.entry, n,
                               "bases need a commutative product and a coproduct"))
        return
    so = order_mod.SpeciesOrder(entry.mu, entry.pi, entry.key)
    r.run(False, order_mod.check_pq_unitriangular, so, n)
    r.run(False, order_mod.check_basis_theorem, entry, n)
    r.run(False, order_mod.check_basis_change_matrices, entry, min(n, 3))


def _run_full_extras(r: Runner) -> None:
    entry, n = r.entry, r.max_n
    p, c = _canonical_variant(entry)
    h = engine.hopf_from(entry, p, c)
    r.run(False, engine.check_antipode_convolution, h, min(n, 3))
    if entry.mu is not None and entry.pi is not None:
        h_mixed = engine.hopf_from(entry, "mu", "pi")
        r.run(False, engine.check_dual_tables, h_mixed, n)
        r.run(False, engine.check_preorder_rectangle, entry, n, 3)
    if entry.mu is not None and _expect(entry, "commutative"):
        r.run(False, _nabla_x_check, entry, min(n, 3))


def _nabla_x_check(entry: CatalogEntry, max_n: int) -> CheckReport:
    h = engine.hopf_from(entry, "mu", "mu")
    dims = []
    for m in range(max_n + 1):
        dec = classify.nabla_X_decompose(h, GroundSet.first(m), species_key=entry.key)
        dims.append(dec.total_dim)
    return CheckReport("nabla_x_decomposition", entry.key, max_n, "pass",
                       {"total_dims": dims})


_SUITE_STEPS = {
    "axioms": (_run_axioms,),
    "ssd": (_run_ssd,),
    "lsd": (_run_lsd,),
    "order": (_run_order,),
    "bases": (_run_bases,),
    "full": (_run_axioms, _run_ssd, _run_lsd, _run_order, _run_bases, _run_full_extras),
}


# ---------------------------------------------------------------------------
# commands

def cmd_check(args) -> int:
    entry = parse_species(args.species)
    if entry.mu is None and entry.pi is None:
        print(f"species {entry.key} carries no systems to check", file=sys.stderr)
        return 1
    runner = Runner(entry, args.max_n, args.seed, args.fail_fast)
    for step in _SUITE_STEPS[args.suite]:
        if runner.stopped:
            break
        step(runner)
    payload = {
        "command": "check",
        "species": entry.key,
        "suite": args.suite,
        "max_n": args.max_n,
        "seed": args.seed,
        "checks": [rep.to_json(args.timings) for rep in runner.reports],
        "summary": runner.summary(),
        "exit_code": runner.exit_code(),
    }
    if args.output == "md":
        _print_check_md(payload)
    else:
        print(json.dumps(payload, indent=2, default=str))
    return runner.exit_code()


def _print_check_md(payload: dict) -> None:
    print(f"# {payload['species']} / suite {payload['suite']} / n <= {payload['max_n']}")
    print()
    print("| check | status | expected |")
    print("|---|---|---|")
    for c in payload["checks"]:
        exp = "" if "expected" not in c else ("yes" if c["expected"] else "NO")
        print(f"| {c['check']} | {c['status']} | {exp} |")
    print()
    s = payload["summary"]
    print(f"pass {s['pass']}, expected failures {s['fail_expected']}, "
          f"unexpected failures {s['fail_unexpected']}, fatal {s['fatal']}, "
          f"skipped {s['skip']}; exit {payload['exit_code']}")


def cmd_table(args) -> int:
    entry = parse_species(args.species)
    rows = []
    for m in range(args.max_n + 1):
        I = GroundSet.first(m)
        dim = entry.species.dim(I)
        rows.append({"n": m, "dim": dim, "orbits": _orbit_count(entry, I)})
    payload = {"command": "table", "species": entry.key, "max_n": args.max_n,
               "dims": rows}
    if args.constants:
        if entry.mu is None and entry.pi is None:
            print(f"species {entry.key} has no systems; no constants", file=sys.stderr)
            return 1
        p, c = _canonical_variant(entry)
        h = engine.hopf_from(entry, p, c)
        payload["variant"] = f"nabla^{p},Delta^{c}"
        payload["constants"] = _constants_dump(entry, h, args.max_n)
    if args.output == "md":
        print(f"# dimensions of {entry.key}")
        print()
        print("| n | dim p[n] | orbits |")
        print("|---|---|---|")
        for row in rows:
            print(f"| {row['n']} | {row['dim']} | {row['orbits']} |")
        if args.constants:
            for block in payload["constants"]:
                print()
                print(f"## ({block['S']}, {block['T']})")
                for line in block["entries"]:
                    print(f"- {line}")
    else:
        print(json.dumps(payload, indent=2, default=str))
    return 0


def _orbit_count(entry: CatalogEntry, I: GroundSet) -> int:
    elems = entry.species.elements(I)
    seen: set = set()
    orbits = 0
    for e in elems:
        if e in seen:
            continue
        orbits += 1
        for sigma in Bijection.all_endo(I):
            seen.add(entry.species.transport(sigma, e))
    return orbits


def _constants_dump(entry: CatalogEntry, h, max_n: int) -> list[dict]:
    from .core import decompositions
    out = []
    for m in range(max_n + 1):
        I = GroundSet.first(m)
        for S, T in decompositions(I, 2):
            sc = engine.structure_constants(h, S, T)
            entries = []
            for (x, y, z), v in sorted(
                    sc.product.items(),
                    key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key(),
                                    kv[0][2].sort_key())):
                entries.append(f"a[{x},{y};{z}] = {v}")
            for (x, y, z), v in sorted(
                    sc.coproduct.items(),
                    key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key(),
                                    kv[0][2].sort_key())):
                entries.append(f"b[{x},{y};{z}] = {v}")
            out.append({"S": str(S), "T": str(T), "entries": entries})
    return out


def cmd_hasse(args) -> int:
    entry = _maybe_derive_pi(parse_species(args.species), args.max_n)
    if entry.mu is None or entry.pi is None:
        print(f"order undefined for {entry.key}: needs both systems", file=sys.stderr)
        return 1
    if not engine.check_axiom(engine.hopf_from(entry, "mu", "mu"),
                              "commutative", min(args.max_n, 2)).ok:
        print(f"order undefined for {entry.key}: product is not commutative",
              file=sys.stderr)
        return 1
    so = order_mod.SpeciesOrder(entry.mu, entry.pi, entry.key)
    sys.stdout.write(order_mod.hasse_dot(so, GroundSet.first(args.max_n), entry.key))
    return 0


def cmd_antipode(args) -> int:
    entry = parse_species(args.species)
    p, c = (args.variant.split("-") if args.variant
            else _canonical_variant(entry))
    h = engine.hopf_from(entry, p, c)
    payload = {"command": "antipode", "species": entry.key,
               "variant": f"nabla^{p},Delta^{c}", "tables": []}
    for m in range(args.max_n + 1):
        I = GroundSet.first(m)
        table = engine.antipode_table(h, I)
        payload["tables"].append({
            "n": m,
            "entries": [f"S({z}) = {v}" for z, v in sorted(
                table.items(), key=lambda kv: kv[0].sort_key())],
        })
    if args.output == "md":
        print(f"# Takeuchi antipode of {entry.key} ({payload['variant']})")
        for block in payload["tables"]:
            print()
            print(f"## n = {block['n']}")
            for line in block["entries"]:
                print(f"- {line}")
    else:
        print(json.dumps(payload, indent=2, default=str))
    return 0


def cmd_primitives(args) -> int:
    entry = parse_species(args.species)
    p, c = _canonical_variant(entry)
    if entry.mu is not None:
        p, c = "mu", "mu"
    h = engine.hopf_from(entry, p, c)
    payload = {"command": "primitives", "species": entry.key,
               "variant": f"nabla^{p},Delta^{c}", "components": []}
    for m in range(1, args.max_n + 1):
        basis = classify.primitives(h, GroundSet.first(m))
        payload["components"].append(
            {"n": m, "dim": len(basis), "basis": [str(v) for v in basis]})
    if args.output == "md":
        print(f"# primitives of {entry.key}")
        for block in payload["components"]:
            print(f"- n={block['n']}: dim {block['dim']}: " + "; ".join(block["basis"]))
    else:
        print(json.dumps(payload, indent=2, default=str))
    return 0


def cmd_fmu(args) -> int:
    entry = parse_species(args.species)
    if entry.mu is None:
        print(f"species {entry.key} has no product", file=sys.stderr)
        return 1
    fm = classify.f_mu(entry.mu, args.max_n, species_key=entry.key)
    rep = classify.check_fmu_intertwines(fm, args.max_n, species_key=entry.key)
    payload = {"command": "fmu", "species": entry.key, "max_n": args.max_n,
               "intertwines": rep.to_json(args.timings), "maps": []}
    for m in range(args.max_n + 1):
        I = GroundSet.first(m)
        payload["maps"].append({
            "n": m,
            "entries": [f"{X} -> {el}" for X, el in sorted(
                fm.table(I).items(), key=lambda kv: kv[0].sort_key())],
        })
    print(json.dumps(payload, indent=2, default=str))
    return 0 if rep.ok else 1


def cmd_fpi(args) -> int:
    entry = _maybe_derive_pi(parse_species(args.species), args.max_n)
    if entry.pi is None:
        print(f"species {entry.key} has no coproduct (and none derivable)",
              file=sys.stderr)
        return 1
    try:
        fp = classify.f_pi(entry.pi, args.max_n, species_key=entry.key)
    except ValueError as exc:
        print(f"f_pi preconditions fail: {exc}", file=sys.stderr)
        return 1
    rep = classify.check_fpi_intertwines(fp, args.max_n, species_key=entry.key)
    payload = {"command": "fpi", "species": entry.key, "max_n": args.max_n,
               "colors": [str(c) for c in fp.colors],
               "intertwines": rep.to_json(args.timings), "maps": []}
    for m in range(args.max_n + 1):
        I = GroundSet.first(m)
        payload["maps"].append({
            "n": m,
            "entries": [f"{f} -> {el}" for f, el in sorted(
                fp.table(I).items(), key=lambda kv: kv[0].sort_key())],
        })
    print(json.dumps(payload, indent=2, default=str))
    return 0 if rep.ok else 1


def cmd_reconstruct_pi(args) -> int:
    entry = _maybe_derive_pi(parse_species(args.species), args.max_n)
    if entry.mu is None or entry.pi is None:
        print(f"reconstruction needs both systems on {entry.key}", file=sys.stderr)
        return 1
    rep = order_mod.check_reconstruct_roundtrip(entry, args.max_n)
    payload = {"command": "reconstruct-pi", "species": entry.key,
               "max_n": args.max_n, "roundtrip": rep.to_json(args.timings)}
    print(json.dumps(payload, indent=2, default=str))
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(sp, with_suite=False):
    sp.add_argument("--species", required=True, help="species spec, e.g. Pi or S(E_C:2)")
    sp.add_argument("--max-n", type=int, default=4, dest="max_n")
    sp.add_argument("--output", choices=("json", "md", "dot"), default="json")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--fail-fast", action="store_true", dest="fail_fast")
    sp.add_argument("--timings", action="store_true",
                    help="include wall-clock times (breaks byte-stable output)")
    if with_suite:
        sp.add_argument("--suite", choices=SUITES, default="full")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="species-forge",
        description="exact desk-scale certification of Hopf structures on species")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run a certification suite")
    _add_common(p, with_suite=True)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("table", help="graded dimensions and structure constants")
    _add_common(p)
    p.add_argument("--constants", action="store_true")
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("hasse", help="DOT Hasse diagram of the order at n = max-n")
    _add_common(p)
    p.set_defaults(fn=cmd_hasse)

    p = sub.add_parser("antipode", help="Takeuchi antipode tables")
    _add_common(p)
    p.add_argument("--variant", choices=VARIANTS, default=None)
    p.set_defaults(fn=cmd_antipode)

    p = sub.add_parser("primitives", help="primitive space bases and dimensions")
    _add_common(p)
    p.set_defaults(fn=cmd_primitives)

    p = sub.add_parser("fmu", help="the labeled-partition isomorphism")
    _add_common(p)
    p.set_defaults(fn=cmd_fmu)

    p = sub.add_parser("fpi", help="the maps-to-colors isomorphism")
    _add_common(p)
    p.set_defaults(fn=cmd_fpi)

    p = sub.add_parser("reconstruct-pi", help="rebuild the coproduct from the order")
    _add_common(p)
    p.set_defaults(fn=cmd_reconstruct_pi)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_n < 0:
        print("max-n must be nonnegative", file=sys.stderr)
        return 1
    if args.max_n > engine.hard_ceiling():
        print(f"max-n {args.max_n} exceeds the ceiling {engine.hard_ceiling()} "
              f"(set SPECIES_FORGE_CEILING for CI soak runs)", file=sys.stderr)
        return 1
    if args.max_n == 5:
        print("warning: n = 5 components are large; expect a long run",
              file=sys.stderr)
    try:
        code = args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
