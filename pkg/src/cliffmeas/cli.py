"""Command-line entry point: ``cliffmeas compile|verify|simulate|stats``."""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from .compiler import SCHEMA_VERSION, Schedule, compile_circuit, frame_correction
from .symplectic import CliffordGate, GateError
from .tableau import init_state
from .verify import apply_symplectic, end_to_end_check, run_schedule

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

_ARITY = {"H": 1, "P": 1, "X": 1, "Z": 1, "CNOT": 2}


class CircuitParseError(ValueError):
    def __init__(self, line: int, msg: str):
        self.line = line
        super().__init__(f"line {line}: {msg}")


def parse_circuit(text: str) -> tuple[int, list[CliffordGate]]:
    n = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0].upper()
        if n is None:
            if head != "QUBITS" or len(parts) != 2:
                raise CircuitParseError(lineno, "expected header 'qubits N'")
            try:
                n = int(parts[1])
            except ValueError:
                raise CircuitParseError(lineno, f"bad qubit count {parts[1]!r}") from None
            if n < 1:
                raise CircuitParseError(lineno, "qubit count must be positive")
            continue
        if head not in _ARITY:
            raise CircuitParseError(lineno, f"unknown gate {parts[0]!r}")
        if len(parts) != _ARITY[head] + 1:
            raise CircuitParseError(lineno, f"{head} takes {_ARITY[head]} qubit index(es)")
        try:
            idx = [int(p) for p in parts[1:]]
        except ValueError:
            raise CircuitParseError(lineno, "qubit indices must be integers") from None
        for q in idx:
            if not 1 <= q <= n:
                raise CircuitParseError(lineno, f"qubit {q} outside 1..{n}")
        try:
            gates.append(CliffordGate(head, tuple(q - 1 for q in idx)))
        except GateError as exc:
            raise CircuitParseError(lineno, str(exc)) from None
    if n is None:
        raise CircuitParseError(0, "missing 'qubits N' header")
    return n, gates


def serialize_circuit(n: int, gates: Sequence[CliffordGate]) -> str:
    return "\n".join([f"qubits {n}"] + [str(g) for g in gates]) + "\n"


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load_schedule(path: str) -> Schedule:
    obj = json.loads(_read(path))
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schedule schema {obj.get('schema_version')!r}")
    return Schedule.from_json(obj)


def cmd_compile(args) -> int:
    n, gates = parse_circuit(_read(args.input))
    s = compile_circuit(gates, n, form=args.stage_form, prune=args.prune)
    text = s.dumps()
    if args.output == "-":
        print(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    n, gates = parse_circuit(_read(args.input))
    reports = end_to_end_check(gates, n, args.seed, args.trials, form=args.stage_form, workers=args.workers)
    for r in reports:
        print(r.to_json())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_simulate(args) -> int:
    s = _load_schedule(args.input)
    rng = random.Random(args.seed)
    inp = init_state(args.state, s.n)
    final, outcomes = run_schedule(s, inp, rng)
    w = frame_correction(s, outcomes)
    final.apply_pauli(w)
    data = final.reduce_to(s.final_perm[s.n:])
    expected = apply_symplectic(inp, s.matrix, s.signs)
    ok = data.canonical_strings() == expected.canonical_strings()
    print(json.dumps({
        "outcomes": outcomes,
        "correction": str(w),
        "state": data.canonical_strings(),
        "expected": expected.canonical_strings(),
        "match": ok,
    }))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_stats(args) -> int:
    s = _load_schedule(args.input)
    print(f"qubits: {s.n}")
    print(f"rounds: {len(s.rounds)}")
    inv = s.ancilla_inventory
    print("ancillas: " + ", ".join(f"{k} x{v}" for k, v in sorted(inv.items())))
    print("final_perm: " + " ".join(str(q + 1) for q in s.final_perm))
    for r in s.rounds:
        ws = [p.weight for p in r.operators]
        anc = f"{r.ancilla.n_qubits}q {r.ancilla.mode}" if r.ancilla else "direct"
        wtxt = f"max weight {max(ws)}, total {sum(ws)}" if ws else "empty"
        print(f"  {r.stage_tag:8s} {len(ws):3d} ops  {wtxt:28s} {anc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cliffmeas", description=__doc__)
    ap.add_argument("--version", action="version", version=f"schedule schema {SCHEMA_VERSION}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile a circuit file into a measurement schedule")
    c.add_argument("-i", "--input", required=True)
    c.add_argument("-o", "--output", default="-")
    c.add_argument("--prune", action="store_true", help="drop empty rounds")
    c.add_argument("--stage-form", type=int, choices=(9, 11), default=9)
    c.set_defaults(func=cmd_compile)

    v = sub.add_parser("verify", help="compile and check against direct simulation")
    v.add_argument("-i", "--input", required=True)
    v.add_argument("--trials", type=int, default=3)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--stage-form", type=int, choices=(9, 11), default=9)
    v.add_argument("--workers", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="run a schedule on a product input state")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--state", choices=("all_zero", "all_plus"), default="all_zero")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("stats", help="summarize a schedule")
    t.add_argument("-i", "--input", required=True)
    t.set_defaults(func=cmd_stats)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CircuitParseError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
