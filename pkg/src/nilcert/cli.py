"""Command-line front end.

Parses group descriptions (inline JSON or file paths), dispatches to the
library, and emits deterministic JSON reports: sorted keys, no whitespace,
integers that can be large as decimal strings.  Domain errors exit 1 with a
structured error report; usage errors exit 2.  The optional ``--summary``
flag adds a human-readable line on stderr so stdout stays byte-stable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import cohomology, invariants, nilpotent2, semidirect
from .certificates import SCHEMA
from .errors import (
    InvalidParameters,
    NilcertError,
    QuotientTooLarge,
    UnsupportedGroupShape,
)
from .linalg import IntMatrix, Lattice, hnf, snf
from .nilpotent2 import NilSublattice, TwoStepLattice
from .semidirect import SemidirectLattice

DEFAULT_MAX_INDEX = 10**6
DEFAULT_MAX_ENUM = 10**4


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


# ---------------------------------------------------------------------------
# Presets: the worked-example groups, embedded and versioned
# ---------------------------------------------------------------------------


def preset_description(name: str, k: int | None = None, n: int | None = None) -> dict:
    """Embedded group descriptions for the worked examples."""
    if name == "sol3":
        return {
            "schema": SCHEMA,
            "type": "semidirect",
            "n": 2,
            "matrix": [["5", "2"], ["2", "1"]],
            "sublattice": [["1", "0"], ["0", "1"]],
            "m": 1,
        }
    if name == "heisenberg":
        kk = 1 if k is None else k
        if kk < 1:
            raise InvalidParameters("heisenberg preset needs k >= 1")
        return {
            "schema": SCHEMA,
            "type": "twostep",
            "f": 1,
            "b": 2,
            "forms": [[["0", str(kk)], [str(-kk), "0"]]],
        }
    if name == "torus":
        nn = 3 if n is None else n
        if nn < 1:
            raise InvalidParameters("torus preset needs n >= 1")
        return {
            "schema": SCHEMA,
            "type": "twostep",
            "f": nn,
            "b": 0,
            "forms": [[] for _ in range(nn)],
        }
    if name == "kxs1":
        return {
            "schema": SCHEMA,
            "type": "semidirect",
            "n": 2,
            "matrix": [["-1", "0"], ["0", "1"]],
            "sublattice": [["1", "0"], ["0", "1"]],
            "m": 1,
        }
    raise InvalidParameters("unknown preset %r" % name)


def presets() -> dict[str, dict]:
    """All embedded presets at their default parameters."""
    return {
        "sol3": preset_description("sol3"),
        "heisenberg:k": preset_description("heisenberg", k=1),
        "torus:n": preset_description("torus", n=3),
        "kxs1": preset_description("kxs1"),
    }


def _load_json_arg(value: str):
    """Inline JSON if the argument looks like it, otherwise a file path."""
    text = value
    if not value.lstrip().startswith(("{", "[")):
        with open(value, "r", encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def _group_from_description(desc: dict):
    kind = desc.get("type")
    if kind == "semidirect":
        return SemidirectLattice.from_json(desc)
    if kind == "twostep":
        return TwoStepLattice.from_json(desc)
    raise UnsupportedGroupShape("unknown group type %r" % kind)


def _resolve_group(args) -> object:
    if getattr(args, "preset", None):
        desc = preset_description(args.preset, k=getattr(args, "k", None), n=getattr(args, "n", None))
    elif getattr(args, "input", None):
        desc = _load_json_arg(args.input)
    else:
        raise InvalidParameters("provide --preset or --input")
    return _group_from_description(desc)


# ---------------------------------------------------------------------------
# Verb implementations
# ---------------------------------------------------------------------------


def _cmd_hnf(args):
    A = IntMatrix.from_json(_load_json_arg(args.input))
    form = hnf(A)
    return {"H": form.H.to_json(), "U": form.U.to_json()}


def _cmd_snf(args):
    A = IntMatrix.from_json(_load_json_arg(args.input))
    form = snf(A)
    return {
        "S": form.S.to_json(),
        "U": form.U.to_json(),
        "V": form.V.to_json(),
        "factors": [str(d) for d in form.factors],
    }


def _cmd_center(args):
    group = _resolve_group(args)
    if isinstance(group, SemidirectLattice):
        rank, structure = semidirect.center_rank(group)
        return {"rank": rank, "structure": structure.to_json()}
    rank, kernel = nilpotent2.center(group)
    return {"rank": rank, "kernel_basis": kernel.to_json()}


def _cmd_isolator(args):
    group = _resolve_group(args)
    if not isinstance(group, TwoStepLattice):
        raise UnsupportedGroupShape("isolator needs a twostep group")
    sqrt, l = nilpotent2.isolator(group)
    return {"sqrt_commutator": sqrt.to_json(), "l": l}


def _cmd_hbar1(args):
    group = _resolve_group(args)
    if not isinstance(group, TwoStepLattice):
        raise UnsupportedGroupShape("hbar1 needs a twostep group")
    return {"structure": nilpotent2.hbar1(group).to_json()}


def _pair_of_semidirect(args):
    G = _group_from_description(_load_json_arg(args.group))
    S = _group_from_description(_load_json_arg(args.subgroup))
    if not isinstance(G, SemidirectLattice) or not isinstance(S, SemidirectLattice):
        raise UnsupportedGroupShape("this verb needs two semidirect groups")
    return G, S


def _cmd_normalizer(args):
    G, S = _pair_of_semidirect(args)
    return {"normalizer": semidirect.normalizer(G, S).to_json()}


def _cmd_quotient(args):
    G, S = _pair_of_semidirect(args)
    return {"quotient": semidirect.quotient(G, S).to_json()}


def _cmd_intermediates(args):
    G, S = _pair_of_semidirect(args)
    subs = semidirect.intermediates(G, S, max_quotient=args.max_enum)
    return {"count": len(subs), "subgroups": [s.to_json() for s in subs]}


def _cmd_series(args):
    group = _group_from_description(_load_json_arg(args.input))
    if not isinstance(group, TwoStepLattice):
        raise UnsupportedGroupShape("series needs a twostep group")
    gamma_desc = _load_json_arg(args.gamma)
    sub = NilSublattice(
        group,
        Lattice.from_json(group.b, gamma_desc["U"]),
        Lattice.from_json(group.f, gamma_desc["W"]),
    )
    cert = nilpotent2.subnormal_series(group, sub, max_index=args.max_index)
    return cert.to_json_dict()


def _cmd_cohomology(args):
    act = cohomology.ModuleAction.from_json(_load_json_arg(args.input))
    op = args.op
    if op == "z1":
        space = cohomology.z1(act)
    elif op == "b1":
        space = cohomology.b1(act)
    elif op == "h1":
        return {"op": "h1", "structure": cohomology.h1(act).to_json()}
    else:
        return {"op": "h1-brute", "structure": cohomology.h1_brute(act).to_json()}
    return {
        "op": op,
        "structure": space.structure.to_json(),
        "basis": [
            [[str(x) for x in vec] for vec in cocycle] for cocycle in space.basis
        ],
    }


def _cmd_minkowski(args):
    return {"n": args.n, "bound": invariants.minkowski_bound(args.n)}


def _cmd_euler_bound(args):
    return {"chi": args.chi, "bound": invariants.euler_length_bound(args.chi)}


def _cmd_discsym2(args):
    group = _resolve_group(args)
    return invariants.discsym2_upper(group).to_json()


def _cmd_sol3_tower(args):
    if args.k >= 0 and 4**args.k > args.max_index:
        raise QuotientTooLarge(
            "tower index 4^%d exceeds --max-index %d" % (args.k, args.max_index)
        )
    return semidirect.sol3_tower(args.k).to_json_dict()


def _cmd_witness(args):
    if args.p >= 1 and args.a >= 0 and args.p ** (args.a + 2) > args.max_index:
        raise QuotientTooLarge(
            "witness index p^(a+2) exceeds --max-index %d" % args.max_index
        )
    return nilpotent2.heisenberg_witness(args.k, args.p, args.a).to_json_dict()


def _cmd_verify(args):
    cert = _load_json_arg(args.input)
    return {"verified": invariants.verify_certificate(cert)}


def _cmd_presets(args):
    return {"presets": presets()}


# ---------------------------------------------------------------------------
# Argument grammar
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilcert",
        description="Exact certificates for lattice invariants in nilpotent and solvable groups.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--max-index",
        type=int,
        default=int(os.environ.get("NILCERT_MAX_INDEX", DEFAULT_MAX_INDEX)),
        help="guardrail for index computations (env NILCERT_MAX_INDEX)",
    )
    common.add_argument(
        "--max-enum", type=int, default=DEFAULT_MAX_ENUM,
        help="guardrail for finite enumerations",
    )
    common.add_argument("--json", action="store_true", help="emit JSON (default; kept for compatibility)")
    common.add_argument("--summary", action="store_true", help="also print a plain-text summary on stderr")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, parents=[common], **kwargs)
        p.set_defaults(fn=fn)
        return p

    p = add("hnf", _cmd_hnf, help="row Hermite normal form of an integer matrix")
    p.add_argument("--input", required=True, help="matrix JSON (inline or path)")
    p = add("snf", _cmd_snf, help="Smith normal form of an integer matrix")
    p.add_argument("--input", required=True, help="matrix JSON (inline or path)")

    for name, fn, helptext in [
        ("center", _cmd_center, "center rank of a lattice"),
        ("isolator", _cmd_isolator, "isolator of the commutator subgroup"),
        ("hbar1", _cmd_hbar1, "outer classes trivial on both extension ends"),
        ("discsym2-bound", _cmd_discsym2, "lexicographic (f, b) upper bound"),
    ]:
        p = add(name, fn, help=helptext)
        p.add_argument("--input", help="group description JSON (inline or path)")
        p.add_argument("--preset", help="embedded preset name")
        p.add_argument("--k", type=int, help="preset parameter k")
        p.add_argument("--n", type=int, help="preset parameter n")

    for name, fn, helptext in [
        ("normalizer", _cmd_normalizer, "normalizer of S in G"),
        ("quotient", _cmd_quotient, "abelian quotient G/S"),
        ("intermediates", _cmd_intermediates, "subgroups strictly between S and G"),
    ]:
        p = add(name, fn, help=helptext)
        p.add_argument("--group", required=True, help="ambient group JSON (inline or path)")
        p.add_argument("--subgroup", required=True, help="subgroup JSON (inline or path)")

    p = add("series", _cmd_series, help="two-layer subnormal series certificate")
    p.add_argument("--input", required=True, help="twostep group JSON")
    p.add_argument("--gamma", required=True, help='sublattice JSON {"U": ..., "W": ...}')

    p = add("cohomology", _cmd_cohomology, help="crossed-homomorphism cohomology")
    p.add_argument("--input", required=True, help="module action JSON")
    p.add_argument("--op", choices=["z1", "b1", "h1", "h1-brute"], default="h1")

    p = add("minkowski", _cmd_minkowski, help="Minkowski bound for GL(n, Z)")
    p.add_argument("--n", type=int, required=True)

    p = add("euler-bound", _cmd_euler_bound, help="log2 length bound from the Euler characteristic")
    p.add_argument("--chi", type=int, required=True)

    p = add("sol3-tower", _cmd_sol3_tower, help="length-k Sol3 tower certificate")
    p.add_argument("--k", type=int, required=True)

    p = add("heisenberg-witness", _cmd_witness, help="(1,2) witness chain certificate")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--a", type=int, required=True)

    p = add("verify", _cmd_verify, help="re-verify a certificate from scratch")
    p.add_argument("--input", required=True, help="certificate JSON (inline or path)")

    add("presets", _cmd_presets, help="list the embedded group presets")
    return parser


def _summarize(verb: str, result: dict) -> str:
    if verb == "verify":
        return "certificate verified" if result["verified"] else "certificate REJECTED"
    if verb in ("sol3-tower", "heisenberg-witness", "series"):
        return "%s: total index %s, %d levels, min length %s" % (
            verb,
            result.get("total_index"),
            len(result.get("levels", result.get("chain", []))),
            result.get("min_length"),
        )
    if verb == "discsym2-bound":
        return "disc-sym_2 upper bound (%d, %d)" % (result["f"], result["b"])
    if verb == "minkowski":
        return "minkowski(%d) = %d" % (result["n"], result["bound"])
    return "%s: ok" % verb


def run(argv: list[str]) -> int:
    """Parse argv, execute, and print the JSON report; returns the exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.fn(args)
    except NilcertError as exc:
        report = {
            "schema": SCHEMA,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        sys.stdout.write(canonical_json(report) + "\n")
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        report = {
            "schema": SCHEMA,
            "error": {"type": "InputError", "message": str(exc)},
        }
        sys.stdout.write(canonical_json(report) + "\n")
        return 1
    report = {"schema": SCHEMA, "verb": args.verb, "result": result}
    sys.stdout.write(canonical_json(report) + "\n")
    if args.summary:
        sys.stderr.write(_summarize(args.verb, result) + "\n")
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
