"""Command-line front end.

Exit codes: 0 all checks pass, 2 a check failed, 3 budget refusal, 4 invalid config.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import __version__
from .clifford import CliffordEngine, compare_rings
from .config import BUDGETS, BudgetExceeded, Budgets
from .extension import (SearchFallback, canonical_extension, extension_by_search,
                        multiplicativity_check, restriction_check, verify_s_invariance)
from .fields import is_prime
from .groups import (FiniteGroup, GroupSpec, count_kernel, enumerate_group,
                     enumerate_residue_group, permutation_group)
from . import matspace as ms
from .matspace import Family, lie_space, radical
from .oracle import character_degrees, check_degrees, class_algebra
from .rings import RingKind, RingSpec, local_ring

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CHECK, EXIT_BUDGET, EXIT_CONFIG = 0, 2, 3, 4

log = logging.getLogger("o2reps")


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


@dataclass
class Report:
    data: dict
    rows: list[list]  # TSV body; first row is the header
    ok: bool


# -- helpers ----------------------------------------------------------------------

def _mat(A) -> list:
    """Residue-field matrices as nested lists of element codes."""
    return np.asarray(A).tolist()


def _ring_mat(A, Q: int) -> list:
    """Ring matrices as row-major (a, b) coordinate pairs."""
    A = np.asarray(A)
    return [[[int(x % Q), int(x // Q)] for x in row] for row in A]


def _spec(args, kind: str | None = None) -> GroupSpec:
    if args.p is None or args.n is None or args.family is None:
        raise ConfigError("--family, --n and --p are required")
    if not is_prime(args.p) or args.p == 2:
        raise ConfigError(f"p = {args.p} must be an odd prime")
    if args.n < 1 or args.m < 1:
        raise ConfigError("n and m must be positive")
    kind = kind or args.ring
    if kind not in ("unramified", "ramified"):
        raise ConfigError(f"ring must be unramified or ramified for this command, got {kind}")
    try:
        return GroupSpec(Family(args.family), args.n, RingSpec(RingKind(kind), args.p, args.m))
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _budgets(args) -> Budgets:
    return BUDGETS.updated(enumerate=args.enum_budget, orbit_group=args.orbit_budget,
                           oracle=args.oracle_budget, max_q=args.max_q)


def _config(args) -> dict:
    # --threads is left out so that output is identical for every thread count
    keys = ["command", "family", "n", "p", "m", "ring"]
    return {k: getattr(args, k, None) for k in keys}


def _header(args, budgets: Budgets) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
            "config": _config(args), "budgets": budgets.as_dict()}


def _orbit_json(rec, index: int) -> dict:
    return {"rep": _mat(rec.rep), "size": rec.size, "stab_order": rec.stab_order,
            "centralizer_order": rec.centralizer_order, "index": index,
            "degrees": sorted(rec.degrees)}


def _engine(args, kind=None) -> CliffordEngine:
    budgets = _budgets(args)
    return CliffordEngine(_spec(args, kind), budgets, args.threads)


# -- commands -----------------------------------------------------------------------

def cmd_irr(args) -> Report:
    eng = _engine(args)
    budgets = eng.budgets
    G = eng.G1.order
    orbits = [_orbit_json(r, G // r.stab_order) for r in eng.orbits]
    irr = eng.irr_multiset()
    checks = eng.checks()
    spec = eng.spec
    data = _header(args, budgets)
    data.update({"family": spec.family.value, "n": spec.n, "p": spec.p, "m": spec.ring.m,
                 "ring": spec.ring.kind.value, "group_order": eng.group_order,
                 "residue_group_order": G, "orbits": orbits,
                 "irr": [{"dim": d, "count": c} for d, c in irr],
                 "irrep_count": eng.irrep_count(), "checks": checks})
    if args.class_count:
        full = enumerate_group(spec, eng.G1, eng.L, budgets.enumerate)
        classes = full.classes.count
        checks["class_count"] = classes == eng.irrep_count()
        data["class_count"] = classes
    rows = [["dim", "count"]] + [[d, c] for d, c in irr]
    return Report(data, rows, all(checks.values()))


def cmd_orbits(args) -> Report:
    eng = _engine(args)
    G = eng.G1.order
    data = _header(args, eng.budgets)
    orbits = [_orbit_json(r, G // r.stab_order) for r in eng.orbits]
    checks = {k: v for k, v in eng.checks().items() if k != "sum_squares"}
    data.update({"parameter_space": "scalar-classes" if eng.scalar else "lie-space",
                 "characters": eng.n_chars, "orbits": orbits, "checks": checks})
    rows = [["rep", "size", "stab_order", "centralizer_order", "index"]]
    rows += [[json.dumps(o["rep"], separators=(",", ":")), o["size"], o["stab_order"],
              o["centralizer_order"], o["index"]] for o in orbits]
    return Report(data, rows, all(checks.values()))


def cmd_compare(args) -> Report:
    budgets = _budgets(args)
    _spec(args, "unramified")  # validation only
    cmp = compare_rings(args.family, args.n, args.p, args.m, budgets, args.threads)
    data = _header(args, budgets)
    u, r = dict(cmp.multisets["unramified"]), dict(cmp.multisets["ramified"])
    dims = sorted(set(u) | set(r))
    data.update({
        "family": cmp.family.value, "n": cmp.n, "p": cmp.p, "m": cmp.m,
        "irr": {k: [{"dim": d, "count": c} for d, c in v] for k, v in cmp.multisets.items()},
        "equal": cmp.equal, "orbit_alignment": cmp.aligned,
        "ties": [{"invariants": _inv_json(k), "multiplicity": v} for k, v in cmp.ties],
        "diff": [{"dim": d, "unramified": u.get(d, 0), "ramified": r.get(d, 0)}
                 for d in dims if u.get(d, 0) != r.get(d, 0)],
        "checks": cmp.checks,
    })
    rows = [["dim", "unramified", "ramified"]] + [[d, u.get(d, 0), r.get(d, 0)] for d in dims]
    ok = cmp.equal and cmp.aligned and all(all(c.values()) for c in cmp.checks.values())
    return Report(data, rows, ok)


def _inv_json(inv) -> dict:
    size, stab, degs = inv
    return {"orbit_size": size, "stab_order": stab, "degrees": [[d, c] for d, c in degs]}


def cmd_radical(args) -> Report:
    spec = _spec(args)
    F = spec.field()
    L = lie_space(spec.family, spec.n, F, spec.base_q)
    rad = radical(L)
    N = spec.N
    data = _header(args, _budgets(args))
    data.update({"family": spec.family.value, "n": spec.n, "p": spec.p, "m": spec.ring.m,
                 "lie_dim": L.dim, "radical_dim": len(rad), "radical_basis": [_mat(b) for b in rad]})
    checks = {}
    scal = (spec.family is Family.SL) and spec.n % spec.p == 0
    if scal:
        # the radical should be exactly the scalar matrices (an F_q-line)
        is_scalar = all(not np.any(b[~np.eye(N, dtype=bool)]) and len(set(np.diagonal(b))) == 1 for b in rad)
        checks["scalar_line"] = is_scalar and len(rad) == F.m
    else:
        checks["nondegenerate"] = len(rad) == 0
    data["checks"] = checks
    rows = [["lie_dim", "radical_dim"], [L.dim, len(rad)]]
    return Report(data, rows, all(checks.values()))


def cmd_verify_ext(args) -> Report:
    eng = _engine(args)
    data = _header(args, eng.budgets)
    out, rows = [], [["rep", "branch", "restriction", "multiplicative", "extra"]]
    ok = True
    for rec in eng.orbits:
        ext = canonical_extension(eng, rec.rep)
        entry = {"rep": _mat(rec.rep), "stab_order": rec.stab_order}
        if isinstance(ext, SearchFallback):
            s = extension_by_search(eng, rec)
            entry.update({"branch": "search", "reason": ext.reason,
                          "restriction": restriction_check(eng, rec, s),
                          "multiplicative": multiplicativity_check(eng, rec, s)["ok"],
                          "extensions_found": s.n_solutions})
            entry["ok"] = entry["restriction"] and entry["multiplicative"]
        elif eng.scalar:
            r = verify_s_invariance(eng, rec, ext)
            entry.update({"branch": ext.branch, "splitting_field": ext.big.q, **r})
        else:
            entry.update({"branch": ext.branch, "splitting_field": ext.big.q,
                          "restriction": restriction_check(eng, rec, ext),
                          "multiplicative": multiplicativity_check(eng, rec, ext)["ok"]})
            entry["ok"] = entry["restriction"] and entry["multiplicative"]
        ok &= bool(entry["ok"])
        out.append(entry)
        extra = entry.get("chi_invariance", "")
        rows.append([json.dumps(entry["rep"], separators=(",", ":")), entry["branch"],
                     entry["restriction"], entry["multiplicative"], extra])
    data.update({"orbits": out, "checks": {"all_orbits": ok}})
    return Report(data, rows, ok)


def _builtin_group(name: str) -> FiniteGroup:
    if name == "c3":
        return permutation_group([(1, 2, 0)], name="C3")
    if name == "s3":
        return permutation_group([(1, 0, 2), (1, 2, 0)], name="S3")
    raise ConfigError(f"unknown builtin group {name}")


def _table_group(path: str) -> FiniteGroup:
    with open(path) as fh:
        spec = json.load(fh)
    kind, p, m = spec["kind"], int(spec["p"]), int(spec.get("m", 1))
    if spec.get("level", "ring") == "ring":
        R = local_ring(RingKind(kind), p, m)
        T, Q = R.tables, R.Q
        el = np.array([[[a + Q * b for a, b in row] for row in M] for M in spec["elements"]], dtype=np.int64)
    else:
        T = local_ring(RingKind(kind), p, m).F.tables()
        el = np.array(spec["elements"], dtype=np.int64)
    G = FiniteGroup(T, el.shape[-1], el, "table")
    N = el.shape[-1]
    if G.order != len(el) or G.order ** 2 > 10**7:
        raise ConfigError("element table has duplicates or is too large")
    prods = ms.mat_mul(T, G.elements[:, None], G.elements[None]).reshape(-1, N, N)
    if np.any(G.locate(prods) < 0) or G.locate(ms.identity(N)[None])[0] < 0:
        raise ConfigError("element table is not a group")
    return G


def cmd_oracle(args) -> Report:
    budgets = _budgets(args)
    if args.builtin:
        G = _builtin_group(args.builtin)
        label = {"group": args.builtin}
    elif args.table:
        G = _table_group(args.table)
        label = {"table": args.table}
    else:
        spec = _spec(args)
        if args.level == "residue":
            G = enumerate_residue_group(spec)
        else:
            G = enumerate_group(spec, budget=budgets.enumerate)
        label = {"group": spec.label(), "level": args.level}
    CA = class_algebra(G, budgets.oracle)
    degs = character_degrees(G, algebra=CA)
    checks = check_degrees(G.order, CA.count, degs)
    checks["class_algebra"] = CA.check()
    data = _header(args, budgets)
    data.update({**label, "order": G.order, "class_count": CA.count,
                 "class_sizes": sorted(int(s) for s in CA.sizes),
                 "degrees": [{"degree": d, "count": c} for d, c in sorted(Counter(degs).items())],
                 "sum_squares": sum(d * d for d in degs), "checks": checks})
    rows = [["degree", "count"]] + [[d, c] for d, c in sorted(Counter(degs).items())]
    return Report(data, rows, all(checks.values()))


def cmd_groups(args) -> Report:
    budgets = _budgets(args)
    spec = _spec(args)
    G1 = enumerate_residue_group(spec)
    L = lie_space(spec.family, spec.n, spec.field(), spec.base_q)
    kernel = count_kernel(spec, L)
    data = _header(args, budgets)
    G = enumerate_group(spec, G1, L, budgets.enumerate)
    checks = {"kernel_matches_lie_space": kernel == L.size,
              "order_product": G.order == G1.order * L.size}
    data.update({"group": spec.label(), "residue_order": G1.order, "kernel_size": kernel,
                 "order": G.order, "class_count": G.classes.count,
                 "residue_class_count": G1.classes.count, "checks": checks})
    rows = [["order", "kernel_size", "class_count"], [G.order, kernel, G.classes.count]]
    return Report(data, rows, all(checks.values()))


COMMANDS = {
    "irr": cmd_irr,
    "orbits": cmd_orbits,
    "compare": cmd_compare,
    "radical": cmd_radical,
    "verify-ext": cmd_verify_ext,
    "oracle": cmd_oracle,
    "groups": cmd_groups,
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="o2reps", description="Irreducible dimensions of classical groups over length-two rings.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--family", choices=[f.value for f in Family])
        sp.add_argument("--n", type=int)
        sp.add_argument("--p", type=int)
        sp.add_argument("--m", type=int, default=1)
        sp.add_argument("--ring", choices=["unramified", "ramified"], default="unramified")
        sp.add_argument("--format", choices=["json", "tsv"], default="json")
        sp.add_argument("--out")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--enum-budget", type=int)
        sp.add_argument("--orbit-budget", type=int)
        sp.add_argument("--oracle-budget", type=int)
        sp.add_argument("--max-q", type=int)
        sp.add_argument("-v", "--verbose", action="count", default=0)
        if name == "irr":
            sp.add_argument("--class-count", action="store_true",
                            help="also enumerate C(O_2) and compare with its class count")
        if name == "oracle":
            sp.add_argument("--builtin", choices=["c3", "s3"])
            sp.add_argument("--table", help="JSON element table")
            sp.add_argument("--level", choices=["residue", "full"], default="full")
    return ap


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.data, indent=2) + "\n"
    head = f"# schema_version={SCHEMA_VERSION} command={report.data['config']['command']}\n"
    body = "\n".join("\t".join(str(x) for x in row) for row in report.rows)
    return head + body + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        report = COMMANDS[args.command](args)
    except BudgetExceeded as e:
        print(f"budget refusal: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except ConfigError as e:
        print(f"invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not report.ok:
        failed = {k: v for k, v in report.data.get("checks", {}).items() if v is not True}
        print(f"check failure: {json.dumps(failed, default=str)}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
