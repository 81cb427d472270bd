"""Command-line front end.

Every command prints one JSON report on stdout. ``--manifest PATH`` also
writes a manifest holding the fully resolved argument list, input file
hashes and the hash of the output; ``compressarg replay PATH`` re-runs it
and fails unless the output is byte-identical.

Exit codes: 0 all checked invariants held, 2 input error, 3 invariant
violated (a bug).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, avoidance, lll_sat, series, toy
from .errors import IntegrityError, ParseError

SCHEMA = 1
SEED_ENV = "COMPRESSARG_SEED"

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# --- commands ----------------------------------------------------------------------
# Each returns (report, ok) where ok is False when an invariant failed.


def cmd_sat(args):
    cnf = lll_sat.parse_dimacs(_read(args.input))
    premise = lll_sat.check_premise(cnf)
    trials = []
    ok = True
    for t in range(args.trials):
        seed = args.seed + t
        src = lll_sat.BitSource(seed)
        res = lll_sat.solve(cnf, src, max_resamples=args.max_resamples)
        tr = res.trace
        bits = lll_sat.reconstruct_bits(cnf, tr, verify=False)
        match = bits == list(src.log[cnf.var_count:])
        code, walk = lll_sat.encode_walk(tr, cnf)
        round_trip = lll_sat.decode_walk(code, cnf) == tr.walk
        satisfied = lll_sat.evaluate(cnf, tr.final_assignment)
        ok &= match and round_trip and (res.exhausted or satisfied)
        trials.append({
            "trial": t,
            "seed": seed,
            "status": "exhausted" if res.exhausted else "success",
            "resamples": tr.resamples,
            "satisfied": satisfied,
            "reconstruction_match": match,
            "walk_round_trip": round_trip,
            "walk_bits": walk.total_bits,
            "resample_bits": walk.resample_bits,
            "walk": walk.as_dict(),
            "trace": tr.as_dict() if args.with_trace else None,
        })
    report = {
        "var_count": cnf.var_count,
        "clauses": len(cnf.clauses),
        "n": cnf.n,
        "premise": premise.as_dict(),
        "trials": trials,
        "successes": sum(t["status"] == "success" for t in trials),
    }
    return report, ok


def cmd_avoid(args):
    fs = avoidance.parse_forbidden(_read(args.forbidden))
    miller = avoidance.check_miller(fs)
    letters = avoidance.LetterSource(fs.m, args.seed)
    state = avoidance.run_tetris(fs, letters, args.target_len, args.max_steps)
    recovered = avoidance.reconstruct_letters(fs, state.current, state.record)
    match = recovered == letters.log
    ok = match and not fs.has_factor(state.current)
    report = {
        "m": fs.m,
        "profile": {str(j): a for j, a in fs.profile.items()},
        "miller": miller.as_dict(),
        "status": "exhausted" if state.exhausted else "success",
        "final_length": len(state.current),
        "final": avoidance.word_to_text(state.current),
        "letters_drawn": state.letters_drawn,
        "deletions": state.record.deletions,
        "reconstruction_match": match,
        "coding": None,
    }
    if miller.holds:
        bits, rep = avoidance.encode_record(fs, state.record, miller)
        back = avoidance.decode_record(fs, bits, len(state.record), miller)
        ineq = avoidance.event_inequalities(fs, miller)
        coding = rep.as_dict()
        coding["round_trip"] = back == state.record
        coding["event_inequalities"] = {str(k): v for k, v in ineq.items()}
        report["coding"] = coding
        ok &= coding["round_trip"] and coding["within_bound"] and all(ineq.values())
    if args.with_record:
        report["record"] = state.record.to_json()
    return report, ok


def cmd_series(args):
    fs = avoidance.parse_forbidden(_read(args.forbidden))
    A = series.denominator(fs, max(args.N, fs.max_length, 1))
    g = series.invert(A, args.N)
    s = series.count_allowed(fs, args.n_max)
    piont = series.check_piontkovsky(fs, args.N)
    rec = series.check_recurrence(fs, s)
    flags = series.s_at_least_g(s, g)
    ok = rec and piont.consistent and (not piont.has_root or all(flags))
    report = {
        "m": fs.m,
        "profile": {str(j): a for j, a in fs.profile.items()},
        "N": args.N,
        "n_max": args.n_max,
        "denominator": series.denominator(fs, max(fs.max_length, 1)).to_json(),
        "g": g.to_json()[:args.n_max + 1],
        "s": s,
        "s_ge_g": flags,
        "recurrence_holds": rec,
        "piontkovsky": piont.as_dict(),
    }
    return report, ok


def cmd_toy_minor(args):
    rng = np.random.default_rng(args.seed)
    if args.input:
        M = toy.BitMatrix.from_text(_read(args.input))
    else:
        bits = rng.integers(0, 2, size=(args.n, args.n))
        if args.plant:
            rows = np.sort(rng.choice(args.n, args.k, replace=False))
            cols = np.sort(rng.choice(args.n, args.k, replace=False))
            bits[np.ix_(rows, cols)] = int(rng.integers(0, 2))
        M = toy.BitMatrix(bits)
    w = toy.find_monochromatic_minor(M, args.k)
    report = {"n": M.n, "k": args.k, "witness": None, "code_bits": None,
              "plain_bits": M.n * M.n, "saving": None, "round_trip": None}
    ok = True
    if w is not None:
        code = toy.compress_minor(M, w, args.k)
        rt = toy.decompress_minor(code, M.n, args.k) == M
        ok = rt and len(code) == toy.minor_code_length(M.n, args.k)
        report.update(witness=w.as_dict(), code_bits=len(code), saving=M.n * M.n - len(code),
                      round_trip=rt)
    if M.n ** 2 <= 25:
        cnt = toy.count_bad_matrices(M.n, args.k)
        report["bad_matrix_count"] = cnt.as_dict()
        ok &= cnt.exact_count <= cnt.union_bound
    return report, ok


def cmd_toy_rotation(args):
    eps = Fraction(args.eps)
    if args.input:
        x = "".join(_read(args.input).split())
        if x.strip("01"):
            raise InputError("bit string file may only contain 0 and 1")
    else:
        x = toy.random_bits(args.n, np.random.default_rng(args.seed))
    w = toy.min_shift_distance(x)
    report = {"n": len(x), "eps": str(eps), "min_shift": {"k": w.k, "distance": w.distance},
              "good": w.distance >= eps * len(x), "code": None}
    ok = True
    if w.distance < eps * len(x):
        code = toy.compress_rotation(x, w, eps)
        rt = toy.decompress_rotation(code.bits, len(x), eps) == x
        report["code"] = dict(code.as_dict(), round_trip=rt)
        ok = rt and len(code.bits) == code.total_bits and code.total_bits <= code.bound
    if args.trials:
        report["shift_test"] = toy.shift_test(len(x), eps, args.trials, args.seed)
    return report, ok


# --- argument handling ----------------------------------------------------------------


def _default_seed():
    v = os.environ.get(SEED_ENV)
    try:
        return int(v) if v is not None else 0
    except ValueError:
        raise InputError(f"{SEED_ENV} must be an integer, got {v!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="compressarg", description=__doc__.splitlines()[0])
    p.add_argument("--manifest", help="write a replayable run manifest to this path")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sat", help="resampling solver on a DIMACS file")
    s.add_argument("--input", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--max-resamples", type=int, default=lll_sat.DEFAULT_MAX_RESAMPLES)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--with-trace", action="store_true", help="include full traces in the report")
    s.set_defaults(func=cmd_sat, files=("input",))

    a = sub.add_parser("avoid", help="tetris process on a forbidden-set file")
    a.add_argument("--forbidden", required=True)
    a.add_argument("--target-len", type=int, required=True)
    a.add_argument("--seed", type=int)
    a.add_argument("--max-steps", type=int, default=10**6)
    a.add_argument("--with-record", action="store_true")
    a.set_defaults(func=cmd_avoid, files=("forbidden",))

    r = sub.add_parser("series", help="power-series criteria for a forbidden set")
    r.add_argument("--forbidden", required=True)
    r.add_argument("--N", type=int, default=series.DEFAULT_ORDER)
    r.add_argument("--n-max", type=int, default=12)
    r.set_defaults(func=cmd_series, files=("forbidden",))

    t = sub.add_parser("toy", help="the two toy compression arguments")
    tsub = t.add_subparsers(dest="toy_command", required=True)
    m = tsub.add_parser("minor")
    m.add_argument("--n", type=int, default=8)
    m.add_argument("--k", type=int, default=3)
    m.add_argument("--input")
    m.add_argument("--plant", action="store_true", help="plant a random monochromatic minor")
    m.add_argument("--seed", type=int)
    m.set_defaults(func=cmd_toy_minor, files=("input",))
    o = tsub.add_parser("rotation")
    o.add_argument("--n", type=int, default=256)
    o.add_argument("--eps", default="1/10")
    o.add_argument("--input")
    o.add_argument("--trials", type=int, default=0)
    o.add_argument("--seed", type=int)
    o.set_defaults(func=cmd_toy_rotation, files=("input",))

    rp = sub.add_parser("replay", help="re-run a manifest and compare outputs")
    rp.add_argument("path")
    rp.set_defaults(func=None, files=())
    return p


def _resolved_argv(args, argv):
    """argv with ``--seed`` pinned, so replay does not depend on the environment."""
    out = list(argv)
    if "--manifest" in out:
        i = out.index("--manifest")
        del out[i:i + 2]
    out = [a for a in out if not a.startswith("--manifest=")]
    if hasattr(args, "seed") and "--seed" not in out and not any(a.startswith("--seed=") for a in out):
        out += ["--seed", str(args.seed)]
    return out


def _run(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "replay":
        return _replay(args.path)
    if hasattr(args, "seed") and args.seed is None:
        args.seed = _default_seed()
    for name in ("n", "k", "trials", "target_len", "max_steps", "max_resamples", "N", "n_max"):
        v = getattr(args, name, None)
        if v is not None and v < 0:
            raise InputError(f"--{name.replace('_', '-')} must be non-negative")
    report, ok = args.func(args)
    command = args.command if args.command != "toy" else f"toy {args.toy_command}"
    report = {"schema": SCHEMA, "command": command, "version": __version__,
              "seed": getattr(args, "seed", None), "report": report}
    text = dumps(report)
    if args.manifest:
        files = {getattr(args, f): _sha256(getattr(args, f))
                 for f in args.files if getattr(args, f, None)}
        manifest = {
            "schema": SCHEMA,
            "command": command,
            "argv": _resolved_argv(args, argv),
            "seed": getattr(args, "seed", None),
            "inputs": files,
            "version": __version__,
            "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
            "outcome": {"invariants_ok": ok},
        }
        Path(args.manifest).write_text(dumps(manifest))
    return text, ok


def _replay(path):
    try:
        manifest = json.loads(_read(path))
        argv = manifest["argv"]
        inputs = manifest["inputs"]
        expected = manifest["output_sha256"]
    except (ValueError, KeyError, TypeError) as e:
        raise InputError(f"malformed manifest {path}: {e}") from None
    for f, digest in inputs.items():
        if not Path(f).exists() or _sha256(f) != digest:
            raise InputError(f"input {f} changed since the manifest was written")
    text, ok = _run(argv)
    if hashlib.sha256(text.encode()).hexdigest() != expected:
        raise IntegrityError("replayed output differs from the manifest")
    return text, ok


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        text, ok = _run(argv)
    except (InputError, ParseError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except IntegrityError as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
