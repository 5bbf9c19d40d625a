"""Command-line front end: ``arion <subcommand> ...``.

Field elements are lowercase hex, files are JSON. Exit status is 0 on success,
1 on invalid input and 2 when an internal invariant breaks.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import constraints, lab, security
from .core import Direction, InternalInvariant, arion_permute
from .field import FieldError
from .params import PROFILES, ArionParameters, ParameterError, SpongeParameters, as_field, profile, validate_sponge
from .sponge import MerkleTree, SpongeError, arion_hash, bytes_to_elements

VECTOR_HASHES = 20
VECTOR_PERMUTATIONS = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj, out=None):
    text = json.dumps(obj, sort_keys=True)
    (out or sys.stdout).write(text + "\n")


def _hex_list(text: str | None, p: int) -> list[int]:
    if not text:
        return []
    fld = as_field(p)
    return [fld.from_hex(t).value for t in text.split(",") if t.strip()]


def _load_params(ref: str) -> ArionParameters:
    path = Path(ref)
    if path.is_file():
        return ArionParameters.from_json(path.read_text())
    if ref in PROFILES:
        return profile(ref)
    raise UsageError(f"{ref!r} is neither a parameter file nor a built-in profile")


def _sponge(params: ArionParameters, args) -> SpongeParameters:
    cap = getattr(args, "capacity", 1)
    sp = SpongeParameters(params.n - cap, cap, getattr(args, "output_len", 1))
    problems = validate_sponge(params.p, sp, params.n) if params.profile128 else []
    if problems:
        raise ParameterError("; ".join(problems))
    return sp


def _hx(params: ArionParameters, v: int) -> str:
    return params.field.to_hex(v)


# --- subcommands ---------------------------------------------------------------------

def cmd_gen_params(args):
    params = ArionParameters.generate(args.prime, args.n, d2=args.d2, r=args.rounds, d1=args.d1, mode=args.mode,
                                      seed=args.seed.encode(), fresh_per_round=args.fresh_per_round,
                                      unsafe=args.unsafe, profile128=not args.no_profile)
    doc = params.to_dict()
    doc["params_id"] = params.params_id
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _emit(doc)


def cmd_permute(args):
    params = _load_params(args.params)
    x = _hex_list(args.state, params.p)
    key = _hex_list(args.key, params.p) or None
    if len(x) != params.n or (key is not None and len(key) != params.n):
        raise ParameterError(f"state and key need exactly {params.n} elements")
    direction = Direction.INVERSE if args.inverse else Direction.FORWARD
    y = arion_permute(x, params, key, direction)
    _emit({"params_id": params.params_id, "direction": direction.value,
           "key": [_hx(params, v) for v in (key or [0] * params.n)],
           "input": [_hx(params, v) for v in x], "output": [_hx(params, v) for v in y]})


def cmd_hash(args):
    params = _load_params(args.params)
    sp = _sponge(params, args)
    if args.bytes:
        msg = bytes_to_elements(Path(args.bytes).read_bytes(), params.p)
    else:
        msg = _hex_list(args.input, params.p)
    digest = arion_hash(msg, params, sp)
    digest = digest if isinstance(digest, list) else [digest]
    if args.json:
        _emit({"params_id": params.params_id, "input": [_hx(params, v) for v in msg],
               "digest": [_hx(params, v) for v in digest]})
    else:
        print(",".join(_hx(params, v) for v in digest))


def cmd_merkle(args):
    params = _load_params(args.params)
    sp = _sponge(params, args)
    raw = json.loads(Path(args.leaves).read_text())
    leaves = [as_field(params.p).from_hex(v).value for v in raw]
    tree = MerkleTree(leaves, params, sp)
    doc = {"params_id": params.params_id, "arity": tree.arity, "leaves": len(leaves), "root": _hx(params, tree.root)}
    if args.prove is not None:
        if not 0 <= args.prove < len(leaves):
            raise ParameterError(f"leaf index {args.prove} out of range")
        doc["index"] = args.prove
        doc["leaf"] = _hx(params, leaves[args.prove])
        doc["path"] = [[_hx(params, v) for v in level] for level in tree.path(args.prove)]
    _emit(doc)


def cmd_count(args):
    if args.report:
        _emit(constraints.count_report(args.d2).to_dict())
        return
    if args.n is None or args.d is None:
        raise UsageError("--n and --d1/--d are required unless --report is given")
    rounds = None
    if args.rounds:
        parts = [int(v) for v in args.rounds.split(",")]
        rounds = tuple(parts) if len(parts) == 2 else parts[0]
    if args.scheme == "r1cs":
        value = constraints.count_r1cs(args.hash, args.n, args.d, rounds, args.d2)
    else:
        value = constraints.count_plonk(args.hash, int(args.scheme[-1]), args.n, args.d, rounds, args.d2)
    if args.json:
        _emit({"scheme": args.scheme, "hash": args.hash, "n": args.n, "d": args.d, "d2": args.d2, "count": value})
    else:
        print(value)


def cmd_r1cs_emit(args):
    params = _load_params(args.params)
    sp = _sponge(params, args)
    message = _hex_list(args.message, params.p) if args.message is not None else None
    length = len(message) if message is not None else args.message_len
    cs = constraints.build_r1cs(params, sp, length)
    Path(args.out).write_text(cs.to_json())
    doc = {"params_id": params.params_id, "constraints": len(cs), "num_vars": cs.num_vars,
           "message_len": cs.message_len, "system": args.out}
    if message is not None and args.witness_out:
        w = constraints.generate_witness(cs, message, params, sp)
        Path(args.witness_out).write_text(json.dumps(w.to_dict()))
        doc["witness"] = args.witness_out
        doc["digest"] = [_hx(params, v) for v in constraints.output_values(cs, w)]
    _emit(doc)


def cmd_r1cs_check(args):
    cs = constraints.ConstraintSystem.from_dict(json.loads(Path(args.system).read_text()))
    w = constraints.Witness.from_dict(json.loads(Path(args.witness).read_text()))
    if w.p != cs.p:
        raise ParameterError("witness and system use different primes")
    bad = constraints.unsatisfied(cs, w)
    _emit({"satisfied": not bad, "constraints": len(cs), "violated": bad[:100], "violated_count": len(bad)})
    return 0 if not bad else 1


def cmd_estimate(args):
    params = _load_params(args.params)
    report = security.full_report(params, omega=args.omega, model=args.model)
    if args.json:
        _emit(report.to_dict())
    else:
        for e in report.estimates:
            flags = f"  [{', '.join(e.flags)}]" if e.flags else ""
            print(f"{e.kind.value:24s} {e.bits:6d}  {e.formula}{flags}")


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def cmd_lab(args):
    if args.lab_command == "density":
        pairs = [(args.d1, args.d2)] if args.d1 and args.d2 else None
        reps = lab.density_experiment(_ints(args.p), _ints(args.n), pairs, args.seeds, args.rounds,
                                      args.build_rounds, workers=args.threads)
        if args.json:
            _emit({"reports": [r.to_dict() for r in reps]})
        else:
            for r in reps:
                print(f"p={r.p} n={r.n} d1={r.d1} d2={r.d2} min_density={r.min_density:.4f} "
                      f"degree={min(r.degrees)} univariate={min(r.univariate)}")
    elif args.lab_command == "bijection":
        prm = lab.lab_params(args.p, args.n, args.d1, args.d2, args.rounds, args.seed.encode())
        _emit({"p": args.p, "n": args.n, "d1": args.d1, "d2": args.d2, "rounds": args.rounds,
               "bijective": lab.exhaustive_bijection_check(prm)})
    elif args.lab_command == "mds":
        _emit({"n": args.n, "p": as_field(args.p).p, "mds": lab.mds_check(args.n, as_field(args.p).p)})


def _vector_lines(name: str, threads: int | None):
    params = profile(name)
    sp = SpongeParameters(params.n - 1, 1)
    rng = random.Random(f"vectors/{name}")
    pid = params.params_id
    yield {"type": "params", "profile": name, "params_id": pid, "params": params.to_dict()}
    for length in range(VECTOR_HASHES):
        msg = [rng.randrange(params.p) for _ in range(length)]
        yield {"type": "hash", "params_id": pid, "input": [_hx(params, v) for v in msg],
               "output": [_hx(params, arion_hash(msg, params, sp))]}
    states = [[rng.randrange(params.p) for _ in range(params.n)] for _ in range(VECTOR_PERMUTATIONS)]
    keys = [[0] * params.n] + [[rng.randrange(params.p) for _ in range(params.n)]
                               for _ in range(VECTOR_PERMUTATIONS - 1)]
    if threads and threads > 1:
        outs = _keyed_batch(states, keys, params, threads)
    else:
        outs = [arion_permute(s, params, k) for s, k in zip(states, keys)]
    for s, k, y in zip(states, keys, outs):
        yield {"type": "permutation", "params_id": pid, "key": [_hx(params, v) for v in k],
               "input": [_hx(params, v) for v in s], "output": [_hx(params, v) for v in y]}


def _keyed_batch(states, keys, params, threads):
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(arion_permute, states, [params] * len(states), keys))


def cmd_vectors(args):
    names = args.profiles.split(",") if args.profiles else sorted(PROFILES)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for name in names:
            for line in _vector_lines(name, args.threads):
                _emit(line, out)
    finally:
        if args.out:
            out.close()


# --- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="arion", description="Arion permutation, ArionHash and their analysis tools.")
    ap.add_argument("--threads", type=int, default=None, help="cap on worker processes")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-params", help="generate a parameter set")
    g.add_argument("--prime", required=True, help="bls12, bn254 or a hex prime")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d1", type=int)
    g.add_argument("--d2", type=int, default=257)
    g.add_argument("--rounds", type=int)
    g.add_argument("--mode", choices=["standard", "aggressive"], default="standard")
    g.add_argument("--seed", default="ArionHash")
    g.add_argument("--fresh-per-round", action="store_true")
    g.add_argument("--unsafe", action="store_true")
    g.add_argument("--no-profile", action="store_true", help="skip the 128-bit round minimum")
    g.add_argument("--out")
    g.set_defaults(fn=cmd_gen_params)

    pm = sub.add_parser("permute", help="apply Arion or its inverse")
    pm.add_argument("--params", required=True)
    pm.add_argument("--state", required=True)
    pm.add_argument("--key")
    pm.add_argument("--inverse", action="store_true")
    pm.set_defaults(fn=cmd_permute)

    h = sub.add_parser("hash", help="ArionHash of field elements or a file")
    h.add_argument("--params", required=True)
    src = h.add_mutually_exclusive_group(required=True)
    src.add_argument("--input")
    src.add_argument("--bytes")
    h.add_argument("--capacity", type=int, default=1)
    h.add_argument("--output-len", type=int, default=1)
    h.add_argument("--json", action="store_true")
    h.set_defaults(fn=cmd_hash)

    m = sub.add_parser("merkle", help="Merkle root and membership paths")
    m.add_argument("--params", required=True)
    m.add_argument("--leaves", required=True, help="JSON file with a list of hex leaves")
    m.add_argument("--prove", type=int)
    m.add_argument("--capacity", type=int, default=1)
    m.set_defaults(fn=cmd_merkle)

    c = sub.add_parser("count", help="closed-form constraint counts")
    c.add_argument("--scheme", choices=["r1cs", "plonk2", "plonk3"], default="r1cs")
    c.add_argument("--hash", choices=list(constraints.HASHES), default="arion")
    c.add_argument("--n", type=int)
    c.add_argument("--d1", "--d", dest="d", type=int)
    c.add_argument("--d2", type=int, default=257)
    c.add_argument("--rounds", help="r, or r_f,r_p for poseidon")
    c.add_argument("--report", action="store_true", help="recompute every comparison-table cell")
    c.add_argument("--json", action="store_true")
    c.set_defaults(fn=cmd_count)

    e = sub.add_parser("r1cs-emit", help="write the ArionHash constraint system")
    e.add_argument("--params", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--message-len", type=int)
    e.add_argument("--message", help="hex elements; with --witness-out also writes the witness")
    e.add_argument("--witness-out")
    e.add_argument("--capacity", type=int, default=1)
    e.set_defaults(fn=cmd_r1cs_emit)

    k = sub.add_parser("r1cs-check", help="check a witness against a system")
    k.add_argument("--system", required=True)
    k.add_argument("--witness", required=True)
    k.set_defaults(fn=cmd_r1cs_check)

    s = sub.add_parser("estimate", help="security estimates")
    s.add_argument("--params", required=True)
    s.add_argument("--omega", type=float, default=2.0)
    s.add_argument("--model", choices=["arion", "arionhash"], default="arionhash")
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_estimate)

    lb = sub.add_parser("lab", help="small-prime experiments")
    lsub = lb.add_subparsers(dest="lab_command", required=True, parser_class=_Parser)
    d = lsub.add_parser("density")
    d.add_argument("--p", default="11,13,17,19,23")
    d.add_argument("--n", default="3")
    d.add_argument("--d1", type=int)
    d.add_argument("--d2", type=int)
    d.add_argument("--seeds", type=int, default=5)
    d.add_argument("--rounds", type=int, default=2)
    d.add_argument("--build-rounds", type=int, default=6)
    d.add_argument("--json", action="store_true")
    b = lsub.add_parser("bijection")
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--n", type=int, default=2)
    b.add_argument("--d1", type=int, default=3)
    b.add_argument("--d2", type=int, default=3)
    b.add_argument("--rounds", type=int, default=1)
    b.add_argument("--seed", default="lab")
    md = lsub.add_parser("mds")
    md.add_argument("--n", type=int, required=True)
    md.add_argument("--p", required=True, help="decimal, hex with 0x, or bls12/bn254")
    lb.set_defaults(fn=cmd_lab)

    v = sub.add_parser("vectors", help="test-vector bundle as JSON lines")
    v.add_argument("--profiles", help="comma-separated profile names (default: all)")
    v.add_argument("--out")
    v.set_defaults(fn=cmd_vectors)
    return ap


def _parse_prime(text: str):
    return text if text.lower() in ("bls12", "bn254") else int(text, 0)


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "command", None) == "lab" and args.lab_command == "mds":
            args.p = _parse_prime(args.p)
        if args.threads is not None and args.threads < 1:
            raise UsageError("--threads must be positive")
        rc = args.fn(args)
        return rc or 0
    except UsageError as exc:
        _emit({"error": "usage", "message": str(exc)}, sys.stderr)
        return 1
    except (ParameterError, FieldError, SpongeError, constraints.UnsupportedCombination,
            constraints.WitnessMismatch, lab.GridTooLarge, ValueError, KeyError, OSError) as exc:
        _emit({"error": "validation", "type": type(exc).__name__, "message": str(exc)}, sys.stderr)
        return 1
    except InternalInvariant as exc:
        _emit({"error": "internal", "type": type(exc).__name__, "message": str(exc)}, sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        _emit({"error": "internal", "type": type(exc).__name__, "message": str(exc)}, sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
