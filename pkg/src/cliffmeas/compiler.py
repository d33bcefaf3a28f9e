"""Compile symplectic matrices into rounds of simultaneous Pauli measurements.

Qubits ``0..n-1`` are the auxiliary register A and ``n..2n-1`` the data
register Q. Every pair ``(A_j, Q_j)`` holds one logical qubit and one
auxiliary qubit; P and H stages teleport the logical qubit across the pair,
so which physical qubit plays which role is tracked in software.

P and H stages are two rounds: ``K_A tau_Q`` through a 4n-qubit ancilla, then
single-qubit measurements. C stages are three rounds: a Bell-type X (or Z)
round, the Z (or X) round carrying the matrix, then a direct reset of A.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

from .bruhat import Stage, StageSequence, bruhat_decompose
from .gadget import ancilla_projectors, auto_mode, base_state
from .gf2 import BinMatrix, inverse, rank, row_to_str, solve, str_to_row
from .gsf import GSF, gsf_measure_partial
from .pauli import PauliOp, canonical_generators, project_forced, symplectic_product
from .symplectic import CliffordGate, SymplecticMatrix, circuit_to_symplectic, is_symplectic
from .tableau import Tableau

SCHEMA_VERSION = "1.0"

BASES = ("X", "Y", "Z")
_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

# aux basis after a teleported P or H, as a function of the basis before
_AFTER = {
    "P": {"X": "Y", "Y": "X", "Z": "Z"},
    "H": {"X": "Z", "Y": "Y", "Z": "X"},
}
_BEFORE = {g: {v: k for k, v in t.items()} for g, t in _AFTER.items()}

# C stage variants: (aux bases accepted before, aux basis after). "mixed"
# tolerates Y auxiliaries at the price of a 4n ancilla in round 2.
C_VARIANTS = {"standard": ("Z", "X"), "dual": ("X", "Z"), "mixed": ("ZY", "X")}


class CompileError(RuntimeError):
    pass


class FrameError(RuntimeError):
    """The recorded outcomes admit no Pauli correction (a compiler bug)."""


def _anticommute(a: str, b: str) -> bool:
    (ax, az), (bx, bz) = _BITS[a], _BITS[b]
    return (ax * bz + az * bx) % 2 == 1


def _teleport_effect(aux: str, k: str, tau: str, sigma: str) -> tuple[str, str] | None:
    """Images of logical X and Z after measuring ``K_A tau_Q`` then ``sigma_Q``."""
    def mul(p, q):
        return (p[0] ^ q[0], p[1] ^ q[1])

    out = []
    for logical in "XZ":
        a = (0, 0)
        q = _BITS[logical]
        if _anticommute_bits(q, _BITS[tau]):
            a = mul(a, _BITS[aux])
        if _anticommute_bits(q, _BITS[sigma]):
            a = mul(a, _BITS[k])
            q = mul(q, _BITS[tau])
        if q not in ((0, 0), _BITS[sigma]):
            return None
        out.append({(1, 0): "X", (1, 1): "Y", (0, 1): "Z", (0, 0): "I"}[a])
    return out[0], out[1]


def _anticommute_bits(p, q) -> bool:
    return (p[0] * q[1] + p[1] * q[0]) % 2 == 1


def _teleport_table() -> dict[tuple[str, str], tuple[str, str, str]]:
    table: dict[tuple[str, str], list[tuple[str, str, str]]] = {}
    gates = {("Y", "Z"): "P", ("Z", "X"): "H"}
    for aux in BASES:
        for k in BASES:
            if not _anticommute(k, aux):
                continue
            for tau in BASES:
                for sigma in BASES:
                    if not _anticommute(tau, sigma):
                        continue
                    eff = _teleport_effect(aux, k, tau, sigma)
                    if eff in gates:
                        table.setdefault((aux, gates[eff]), []).append((k, tau, sigma))
    # fewest Y factors first; ties keep enumeration order
    return {key: min(opts, key=lambda o: (o[0] == "Y") + (o[1] == "Y")) for key, opts in table.items()}


TELEPORT = _teleport_table()


def _single(kind: str, qubit: int, n: int) -> PauliOp:
    return PauliOp.single(kind, qubit, n)


def _product(factors: Sequence[tuple[str, int]], n: int) -> PauliOp:
    x = z = 0
    for kind, q in factors:
        bx, bz = _BITS[kind]
        x |= bx << q
        z |= bz << q
    return PauliOp.hermitian(x, z, n)


# --------------------------------------------------------------------------
# ancillas


_WORDS = ("H", "P", "HP", "PH", "HPH")


def apply_layer(gens: Sequence[PauliOp], layer: Sequence[str]) -> list[tuple[int, int]]:
    """Unsigned generators after conjugating qubit ``q`` by the gate word ``layer[q]``."""
    masks: dict[str, int] = {}
    for q, w in enumerate(layer):
        if w:
            masks[w] = masks.get(w, 0) | (1 << q)
    out = []
    for g in gens:
        x, z = g.x, g.z
        for w, m in masks.items():
            bx, bz = x & m, z & m
            for gate in w:
                if gate == "H":
                    bx, bz = bz, bx
                else:
                    bz ^= bx
            x = (x & ~m) | bx
            z = (z & ~m) | bz
        out.append((x, z))
    return out


def _is_css(rows: Sequence[tuple[int, int]], n: int) -> bool:
    xs = BinMatrix(tuple(x for x, _ in rows), n)
    zs = BinMatrix(tuple(z for _, z in rows), n)
    return rank(xs) + rank(zs) == len(rows)


@dataclass
class AncillaSpec:
    n_qubits: int
    generators: list[PauliOp]
    mode: str
    css_witness: list[str]
    role: str = ""
    _state: Tableau | None = field(default=None, repr=False, compare=False)

    @classmethod
    def for_operators(cls, ops: Sequence[PauliOp], mode: str, n_data: int, role: str,
                      hint: Sequence[str] | None = None) -> "AncillaSpec":
        """Prepare the ancilla for ``ops``; ``hint`` is a candidate witness tried before searching."""
        t = base_state(n_data, mode)
        gens = t.stabilizers()
        for proj in ancilla_projectors(ops, mode) if ops else []:
            nxt = project_forced(gens, proj)
            if nxt is None:
                # deterministic: let the tableau check the sign
                t = Tableau.from_generators(gens)
                t.measure(proj, forced=1)
                nxt = t.stabilizers()
            gens = nxt
        gens = canonical_generators(gens)
        spec = cls(t.n, gens, mode, list(hint) if hint else [""] * t.n, role)
        if not css_witness_check(spec):
            spec.css_witness = find_css_witness(gens)
        return spec

    def state(self) -> Tableau:
        if self._state is None:
            self._state = Tableau.from_generators(self.generators)
        return self._state.copy()

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "mode": self.mode,
            "role": self.role,
            "generators": [str(g) for g in self.generators],
            "css_witness": [w or "I" for w in self.css_witness],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AncillaSpec":
        n = obj["n_qubits"]
        gens = [PauliOp.from_string(g, n) for g in obj["generators"]]
        wit = ["" if w == "I" else w for w in obj["css_witness"]]
        return cls(n, gens, obj["mode"], wit, obj.get("role", ""))


def css_witness_check(a: AncillaSpec) -> bool:
    if len(a.css_witness) != a.n_qubits:
        return False
    return _is_css(apply_layer(a.generators, a.css_witness), a.n_qubits)


def _bits(v: int) -> list[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def _components(gens: Sequence[PauliOp], n: int) -> list[list[int]]:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g in gens:
        sup = _bits(g.x | g.z)
        for q in sup[1:]:
            parent[find(q)] = find(sup[0])
    comps: dict[int, list[int]] = {}
    for q in range(n):
        comps.setdefault(find(q), []).append(q)
    return list(comps.values())


@functools.lru_cache(maxsize=4096)
def _search_layer(rows: tuple[tuple[int, int], ...], m: int) -> tuple[str, ...] | None:
    # fewest non-identity qubits first; the same local pattern recurs across pairs
    sub = [PauliOp(x, z, 0, m) for x, z in rows]
    for count in range(1, m + 1):
        for pos in itertools.combinations(range(m - 1, -1, -1), count):
            for words in itertools.product(_WORDS, repeat=count):
                trial = [""] * m
                for p, w in zip(pos, words):
                    trial[p] = w
                if _is_css(apply_layer(sub, trial), m):
                    return tuple(trial)
    return None


def find_css_witness(gens: Sequence[PauliOp], max_component: int = 8) -> list[str]:
    """Single-qubit layer making the state CSS, searched per connected component."""
    n = gens[0].n
    layer = [""] * n
    for comp in _components(gens, n):
        # a generator touching the component lies inside it
        cmask = sum(1 << q for q in comp)
        local = [g for g in gens if (g.x | g.z) & cmask]
        # restrict to the component's qubits
        idx = {q: i for i, q in enumerate(comp)}
        sub = []
        for g in local:
            x = z = 0
            for q in comp:
                x |= ((g.x >> q) & 1) << idx[q]
                z |= ((g.z >> q) & 1) << idx[q]
            sub.append(PauliOp(x, z, 0, len(comp)))
        m = len(comp)
        if not sub or _is_css([(g.x, g.z) for g in sub], m):
            continue
        if m > max_component:
            raise CompileError(f"ancilla component of {m} qubits is too large for witness search")
        found = _search_layer(tuple((g.x, g.z) for g in sub), m)
        if found is None:
            raise CompileError("no single-qubit layer makes the ancilla CSS")
        for q, w in zip(comp, found):
            layer[q] = w
    return layer


# --------------------------------------------------------------------------
# rounds and schedules


@dataclass
class MeasurementRound:
    operators: list[PauliOp]
    ancilla: AncillaSpec | None
    stage_tag: str
    outcome_slot: tuple[int, int] = (0, 0)

    def validate(self) -> None:
        for p in self.operators:
            if not p.is_hermitian():
                raise CompileError(f"{self.stage_tag}: operator {p} is not Hermitian")
        for i in range(len(self.operators)):
            for k in range(i + 1, len(self.operators)):
                if symplectic_product(self.operators[i], self.operators[k]):
                    raise CompileError(f"{self.stage_tag}: operators {i + 1} and {k + 1} do not commute")

    def to_json(self) -> dict:
        return {
            "stage_tag": self.stage_tag,
            "operators": [p.to_json() for p in self.operators],
            "ancilla": self.ancilla.to_json() if self.ancilla else None,
            "outcome_slot": list(self.outcome_slot),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MeasurementRound":
        return cls(
            [PauliOp.from_json(p) for p in obj["operators"]],
            AncillaSpec.from_json(obj["ancilla"]) if obj["ancilla"] else None,
            obj["stage_tag"],
            tuple(obj.get("outcome_slot", (0, 0))),
        )


@dataclass
class Layout:
    """Which physical qubit holds pair ``j``'s logical data and auxiliary qubit."""

    n: int
    holder: list[int]
    aux: list[int]
    basis: list[str]

    @classmethod
    def initial(cls, n: int, basis: Sequence[str]) -> "Layout":
        return cls(n, [n + j for j in range(n)], list(range(n)), list(basis))

    def copy(self) -> "Layout":
        return Layout(self.n, list(self.holder), list(self.aux), list(self.basis))


@dataclass
class Schedule:
    n: int
    rounds: list[MeasurementRound]
    final_perm: list[int]
    matrix: BinMatrix
    signs: list[int]
    initial_aux: list[str]
    final_aux: list[str]
    stages: StageSequence | None = None
    strict: bool = True

    @property
    def ancilla_inventory(self) -> dict[str, int]:
        inv: dict[str, int] = {}
        for r in self.rounds:
            if r.ancilla is not None:
                key = f"{r.ancilla.n_qubits // self.n}n" if self.n else str(r.ancilla.n_qubits)
                inv[key] = inv.get(key, 0) + 1
        return inv

    def ancillas(self) -> list[AncillaSpec]:
        return [r.ancilla for r in self.rounds if r.ancilla is not None]

    def n_outcomes(self) -> int:
        return sum(len(r.operators) for r in self.rounds)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "rounds": [r.to_json() for r in self.rounds],
            "final_perm": [q + 1 for q in self.final_perm],
            "inventory": self.ancilla_inventory,
            "initial_aux": self.initial_aux,
            "final_aux": self.final_aux,
            "target": {"matrix": self.matrix.to_strings(), "signs": self.signs},
            "strict": self.strict,
            "stages": self.stages.to_json() if self.stages else None,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, obj: dict) -> "Schedule":
        n = obj["n"]
        return cls(
            n,
            [MeasurementRound.from_json(r) for r in obj["rounds"]],
            [q - 1 for q in obj["final_perm"]],
            BinMatrix.from_strings(obj["target"]["matrix"]),
            list(obj["target"]["signs"]),
            list(obj["initial_aux"]),
            list(obj["final_aux"]),
            StageSequence.from_json(obj["stages"]) if obj.get("stages") else None,
            obj.get("strict", True),
        )


# --------------------------------------------------------------------------
# stage builders


def _pair_stage(gate: str, members: Sequence[int], layout: Layout, resets: dict[int, str], tag: str):
    n = layout.n
    n2 = 2 * n
    r1, r2 = [], []
    for j in sorted(members):
        k, tau, sigma = TELEPORT[(layout.basis[j], gate)]
        r1.append(_product([(k, layout.aux[j]), (tau, layout.holder[j])], n2))
        r2.append(_single(sigma, layout.holder[j], n2))
        layout.holder[j], layout.aux[j] = layout.aux[j], layout.holder[j]
        layout.basis[j] = sigma
    for j, accepted in sorted(resets.items()):
        if j in members:
            raise CompileError("cannot reset a teleported pair")
        if layout.basis[j] not in accepted:
            r2.append(_single(accepted[0], layout.aux[j], n2))
            layout.basis[j] = accepted[0]
    anc = AncillaSpec.for_operators(r1, "two_block", n2, tag) if r1 else AncillaSpec.for_operators([], "two_block", n2, tag)
    return [
        MeasurementRound(r1, anc, f"{tag}.r1"),
        MeasurementRound(r2, None, f"{tag}.r2"),
    ]


def _c_stage(u: BinMatrix, variant: str, layout: Layout, tag: str):
    n = layout.n
    n2 = 2 * n
    need, after = C_VARIANTS[variant]
    if any(b not in need for b in layout.basis):
        raise CompileError(f"{tag}: auxiliary qubits are not all in the {need} basis")
    if variant == "dual":
        a_kind, b_kind = "Z", "X"
        v = u + BinMatrix.identity(n)
    else:
        a_kind, b_kind = "X", "Z"
        v = inverse(u).T + BinMatrix.identity(n)
    r1 = [_product([(a_kind, layout.aux[j]), (a_kind, layout.holder[j])], n2) for j in range(n)]
    r2 = []
    for j in range(n):
        own = layout.basis[j] if variant == "mixed" else b_kind
        factors = [(own, layout.aux[j])] + [(b_kind, layout.holder[k]) for k in range(n) if v[j, k]]
        r2.append(_product(factors, n2))
    r3 = [_single(a_kind, layout.aux[j], n2) for j in range(n)]
    hint = None
    if auto_mode(r2) == "two_block":
        # Y on a lone auxiliary qubit: PH there turns Y (x) Z^f into Z-type rows
        hint = [""] * (2 * n2)
        for j in range(n):
            if layout.basis[j] == "Y":
                hint[layout.aux[j]] = "PH"
    layout.basis = [after] * n
    anc1 = AncillaSpec.for_operators(r1, auto_mode(r1), n2, tag + ".bell")
    anc2 = AncillaSpec.for_operators(r2, auto_mode(r2), n2, tag + ".key", hint)
    return [
        MeasurementRound(r1, anc1, f"{tag}.r1"),
        MeasurementRound(r2, anc2, f"{tag}.r2"),
        MeasurementRound(r3, None, f"{tag}.r3"),
    ]


def _stage_members(s: Stage) -> list[int]:
    if s.kind == "P":
        return [j for j, b in enumerate(s.lam) if b]
    if s.kind == "H":
        return sorted(s.conj[q] for q in s.subset)
    return []


def _plan_for(stages: Sequence[Stage], n: int, variants: dict[int, str], initial: str):
    resets: dict[int, dict[int, str]] = {i: {} for i, s in enumerate(stages) if s.kind in ("P", "H")}
    for j in range(n):
        req: str | None = None
        for i in range(len(stages) - 1, -1, -1):
            s = stages[i]
            if s.kind == "C":
                need, after = C_VARIANTS[variants[i]]
                if req is not None and after not in req:
                    return None
                req = need
            elif j in _stage_members(s):
                req = "".join(sorted(_BEFORE[s.kind][b] for b in req)) if req else None
            else:
                if req is not None:
                    resets[i][j] = req
                req = None
        if req is not None and initial not in req:
            return None
    return resets


def _count_resets(stages: Sequence[Stage], n: int, variants: dict[int, str], resets, initial: str) -> int:
    count = 0
    basis = [initial] * n
    for i, s in enumerate(stages):
        if s.kind == "C":
            basis = [C_VARIANTS[variants[i]][1]] * n
            continue
        for j in _stage_members(s):
            basis[j] = _AFTER[s.kind][basis[j]]
        for j, accepted in resets[i].items():
            if basis[j] not in accepted:
                basis[j] = accepted[0]
                count += 1
    return count


def plan_bases(stages: Sequence[Stage], n: int, initial: str = "X", allow_mixed: bool = False):
    """Choose C-stage variants and auxiliary resets so every stage finds the basis it needs.

    Returns ``(variants, resets)`` where ``resets[i]`` maps pair -> accepted
    bases for the P/H stage at index ``i``; a pair outside those is re-measured.
    Among feasible plans the one with fewest mixed C stages, then fewest
    re-measurements, wins.
    """
    cidx = [i for i, s in enumerate(stages) if s.kind == "C"]
    choices = ("dual", "standard", "mixed") if allow_mixed else ("dual", "standard")
    best = None
    for combo in itertools.product(choices, repeat=len(cidx)):
        variants = dict(zip(cidx, combo))
        resets = _plan_for(stages, n, variants, initial)
        if resets is None:
            continue
        score = (combo.count("mixed"), _count_resets(stages, n, variants, resets, initial))
        if best is None or score < best[0]:
            best = (score, variants, resets)
    if best is None:
        raise CompileError("no consistent auxiliary basis plan exists")
    return best[1], best[2]


def compile_stages(seq: StageSequence, matrix: BinMatrix, signs: Sequence[int], prune: bool = False) -> Schedule:
    n = seq.n
    stages = [s for s in seq.stages if s.kind != "Perm"]
    variants, resets = plan_bases(stages, n, allow_mixed=seq.form != 9)
    layout = Layout.initial(n, ["X"] * n)
    initial = list(layout.basis)
    rounds: list[MeasurementRound] = []
    counters = {"C": 0, "P": 0, "H": 0}
    for i, s in enumerate(stages):
        counters[s.kind] += 1
        tag = f"{s.kind}{counters[s.kind]}"
        if s.kind == "C":
            rounds += _c_stage(s.effective_u(), variants[i], layout, tag)
        else:
            rounds += _pair_stage(s.kind, _stage_members(s), layout, resets[i], tag)
    pi = seq.final_perm
    final_perm = [0] * (2 * n)
    for j in range(n):
        final_perm[pi[j]] = layout.aux[j]
        final_perm[n + pi[j]] = layout.holder[j]
    final_aux = [""] * n
    for j in range(n):
        final_aux[pi[j]] = layout.basis[j]
    if prune:
        rounds = [r for r in rounds if r.operators]
    start = 0
    for r in rounds:
        r.validate()
        r.outcome_slot = (start, start + len(r.operators))
        start += len(r.operators)
    return Schedule(n, rounds, final_perm, matrix, list(signs), initial, final_aux, seq, strict=not prune and seq.form == 9)


def compile(m: SymplecticMatrix | BinMatrix, signs: Sequence[int] | None = None, form: int = 9,
            prune: bool = False, check: bool = True) -> Schedule:
    """Compile a symplectic matrix; ``signs[i]`` = 1 puts a minus sign on the image of row ``i``."""
    mat = m.m if isinstance(m, SymplecticMatrix) else m
    if not is_symplectic(mat):
        raise CompileError("input matrix is not symplectic")
    n = mat.nrows // 2
    signs = list(signs) if signs is not None else [0] * (2 * n)
    seq = bruhat_decompose(mat, form)
    sched = compile_stages(seq, mat, signs, prune)
    if check and not symbolic_check(sched):
        raise CompileError("symbolic GSF propagation does not reach the target form")
    return sched


def circuit_signs(gates: Sequence[CliffordGate], n: int) -> list[int]:
    """Sign bits of the Heisenberg images of X_1..X_n, Z_1..Z_n under the circuit."""
    t = Tableau.zero_state(n).apply_circuit(gates)
    rows = t.destabilizers() + t.stabilizers()
    return [0 if r.sign() == 1 else 1 for r in rows]


def compile_circuit(gates: Sequence[CliffordGate], n: int, form: int = 9, prune: bool = False,
                    check: bool = True) -> Schedule:
    m = circuit_to_symplectic(gates, n)
    return compile(m, circuit_signs(gates, n), form, prune, check)


# --------------------------------------------------------------------------
# checks and corrections


def _aux_row(basis: str, q: int, n2: int) -> int:
    bx, bz = _BITS[basis]
    return (bx << q) | (bz << (n2 + q))


def initial_gsf(s: Schedule) -> GSF:
    n, n2 = s.n, 2 * s.n
    lx = tuple(1 << (n + j) for j in range(n))
    lz = tuple(1 << (n2 + n + j) for j in range(n))
    st = tuple(_aux_row(b, j, n2) for j, b in enumerate(s.initial_aux))
    return GSF(lx, lz, st, n2)


def target_gsf(s: Schedule) -> GSF:
    n, n2 = s.n, 2 * s.n
    qslots = s.final_perm[n:]
    rows = []
    for r in s.matrix.rows:
        x = z = 0
        for p in range(n):
            if (r >> p) & 1:
                x |= 1 << qslots[p]
            if (r >> (n + p)) & 1:
                z |= 1 << qslots[p]
        rows.append(x | (z << n2))
    st = tuple(_aux_row(b, s.final_perm[p], n2) for p, b in enumerate(s.final_aux))
    return GSF(tuple(rows[:n]), tuple(rows[n:]), st, n2)


def propagate_gsf(s: Schedule) -> GSF:
    g = initial_gsf(s)
    n2 = 2 * s.n
    for r in s.rounds:
        if r.operators:
            g = gsf_measure_partial(g, [p.x | (p.z << n2) for p in r.operators])
    return g


def symbolic_check(s: Schedule) -> bool:
    return propagate_gsf(s).equivalent(target_gsf(s))


def _choi_targets(s: Schedule) -> list[PauliOp]:
    n = s.n
    total = 3 * n
    qslots = s.final_perm[n:]
    out = []
    for i, r in enumerate(s.matrix.rows):
        img = PauliOp.hermitian(r & ((1 << n) - 1), r >> n, n, -1 if s.signs[i] else 1)
        ref = PauliOp.single("X" if i < n else "Z", 2 * n + (i % n), total)
        out.append(img.embed(qslots, total) * ref)
    for p, b in enumerate(s.final_aux):
        out.append(PauliOp.single(b, s.final_perm[p], total))
    return out


def choi_state(s: Schedule, outcomes: Sequence[int]) -> Tableau:
    """Run the rounds on A (x) (Q maximally entangled with n reference qubits)."""
    n = s.n
    total = 3 * n
    gens = [PauliOp.single(b, j, total) for j, b in enumerate(s.initial_aux)]
    for j in range(n):
        gens.append(_product([("X", n + j), ("X", 2 * n + j)], total))
        gens.append(_product([("Z", n + j), ("Z", 2 * n + j)], total))
    t = Tableau.from_generators(gens)
    if len(outcomes) != s.n_outcomes():
        raise FrameError(f"expected {s.n_outcomes()} outcomes, got {len(outcomes)}")
    k = 0
    reg = list(range(2 * n))
    for r in s.rounds:
        for p in r.operators:
            t.measure(p.embed(reg, total), forced=outcomes[k])
            k += 1
    return t


def frame_correction(s: Schedule, outcomes: Sequence[int]) -> PauliOp:
    """Pauli on the 2n-qubit register that maps the post-schedule state onto the target."""
    n = s.n
    n2 = 2 * n
    t = choi_state(s, outcomes)
    targets = _choi_targets(s)
    want = []
    rows = []
    for g in targets:
        if not t.is_deterministic(g):
            raise FrameError(f"target stabilizer {g} is not fixed by the schedule")
        want.append(0 if t.measure(g) == 1 else 1)
        # <W, g> = W.x . g.z + W.z . g.x restricted to the register
        mask = (1 << n2) - 1
        rows.append((g.z & mask) | ((g.x & mask) << n2))
    # solve w @ a == want, where column t of a is rows[t]
    a = BinMatrix(tuple(sum(((rows[t] >> b) & 1) << t for t in range(len(rows))) for b in range(2 * n2)), len(rows))
    try:
        w = solve(a, BinMatrix((sum(v << t for t, v in enumerate(want)),), len(rows))).rows[0]
    except ValueError as exc:
        raise FrameError("sign system is inconsistent") from exc
    return PauliOp.hermitian(w & ((1 << n2) - 1), w >> n2, n2)


# --------------------------------------------------------------------------
# single-stage entry points with the textbook auxiliary basis (|0>)


def p_stage_rounds(members: Sequence[int], n: int):
    _check_subset(members, n)
    layout = Layout.initial(n, ["Z"] * n)
    rounds = _pair_stage("P", members, layout, {}, "P")
    return rounds, rounds[0].ancilla


def h_stage_rounds(members: Sequence[int], n: int):
    _check_subset(members, n)
    layout = Layout.initial(n, ["Z"] * n)
    rounds = _pair_stage("H", members, layout, {}, "H")
    return rounds, rounds[0].ancilla


def c_stage_rounds(u: BinMatrix, conj: Sequence[int] | None, n: int, variant: str = "standard"):
    st = Stage.c(u, conj)
    st.validate()
    if st.n != n:
        raise CompileError("matrix size does not match n")
    layout = Layout.initial(n, [C_VARIANTS[variant][0]] * n)
    rounds = _c_stage(st.effective_u(), variant, layout, "C")
    return rounds, [rounds[0].ancilla, rounds[1].ancilla]


def _check_subset(members: Sequence[int], n: int) -> None:
    for q in members:
        if not 0 <= q < n:
            raise CompileError(f"qubit {q + 1} is outside 1..{n}")


def lemma2_construct(l1: BinMatrix) -> tuple[BinMatrix, BinMatrix]:
    """Rows ``l'_j = l_j + sum_{p in I_j} l'_p`` of ``(I L1)`` with ``l'_j . c_p = delta_jp``."""
    n = l1.nrows
    if l1.shape != (n, n):
        raise ValueError("L1 must be square")
    for i in range(n):
        if l1.rows[i] >> i:
            raise ValueError(f"row {i + 1} of L1 has support on or above the diagonal")
    rows = [(1 << j) | (l1.rows[j] << n) for j in range(n)]
    mask = (1 << n) - 1

    def dot_c(v: int, p: int) -> int:
        return ((v >> p) ^ (v >> (n + p))) & 1

    new: list[int] = []
    for j in range(n):
        v = rows[j]
        for p in range(j):
            if dot_c(rows[j], p):
                v ^= new[p]
        new.append(v)
    l2 = BinMatrix(tuple(v & mask for v in new), n)
    l3 = BinMatrix(tuple(v >> n for v in new), n)
    return l2, l3


def matrix_to_json(m: BinMatrix) -> list[str]:
    return m.to_strings()


__all__ = [
    "AncillaSpec",
    "MeasurementRound",
    "Schedule",
    "CompileError",
    "FrameError",
    "compile",
    "compile_circuit",
    "compile_stages",
    "circuit_signs",
    "css_witness_check",
    "find_css_witness",
    "frame_correction",
    "choi_state",
    "symbolic_check",
    "propagate_gsf",
    "p_stage_rounds",
    "h_stage_rounds",
    "c_stage_rounds",
    "lemma2_construct",
    "plan_bases",
    "row_to_str",
    "str_to_row",
]
