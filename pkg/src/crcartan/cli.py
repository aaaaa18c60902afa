"""Command-line front end: parse model files, run pipelines, emit reports.

Model file grammar (diff-friendly, one assignment per line, '#' comments):

    convention = s12            # or s13
    phi1 = x^2 + y^2
    phi2 = 2*x^3 + 2*x*y^2
    phi3 = 2*x^2*y + 2*y^3

    [rigid]                     # optional block for the automorphism solver
    codim = 3
    Phi1 = z*zb
    Phi2 = z*zb*(z + zb)
    Phi3 = (z*zb*(z - zb))/i

Algebra files (for the prolongation command) list structure constants:

    dim = 5
    grading = -1 -1 -2 -3 -3
    J = e1 -> e2, e2 -> -e1
    [e1, e2] = e3
    [e1, e3] = e4
    [e2, e3] = e5

Reports on stdout are bit-identical across runs for identical input (timing
goes to stderr); `--emit machine` switches to JSON with sorted keys.
Exit codes: 0 success, 2 parse error, 3 pipeline diagnostic.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
import time

from .autcr import (AutAlgebra, AutCRError, HolField, RigidModel, field_weight,
                    rigid_context, solve_rigid_aut, symbol_algebra,
                    tangency_residuals)
from .coframes import darboux_structure
from .crosscheck import compare, first_loop_reference
from .equivalence import (EquivalenceError, Geometry, InvariantReport,
                          branch_R0, branch_Rneq0, initial_torsion)
from .exact import Context, ExactError, Expr, GaussRat, I, parse, render, standard_context
from .frames import (FRAME_ORDER, Frame, FrameError, GraphingFunctions,
                     build_frame, structure_functions)
from .liealg import (GradedAlgebra, LieAlgebra, LieAlgebraError, GaussRat as _GR,
                     recognize_dim_le5, tanaka_prolong, validate)


class ParseError(Exception):
    def __init__(self, msg, line=None):
        super().__init__(f"line {line}: {msg}" if line else msg)


# ---------------------------------------------------------------------------
# model files
# ---------------------------------------------------------------------------

class ModelFile:
    def __init__(self, convention, phis, rigid_phis, text):
        self.convention = convention
        self.phis = phis                # dict name -> string
        self.rigid_phis = rigid_phis    # list of strings or None
        self.text = text

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()


def parse_model_file(text: str) -> ModelFile:
    convention = "s12"
    phis = {}
    rigid: dict[int, str] = {}
    codim = None
    section = "main"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower() == "[rigid]":
            section = "rigid"
            continue
        if "=" not in line:
            raise ParseError(f"expected 'name = value', got {line!r}", lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "convention":
            if val not in ("s12", "s13"):
                raise ParseError(f"unknown convention {val!r}", lineno)
            convention = val
        elif section == "main" and re.fullmatch(r"phi[123]", key):
            phis[key] = (val, lineno)
        elif section == "rigid" and key == "codim":
            codim = int(val)
        elif section == "rigid" and re.fullmatch(r"Phi\d+", key):
            rigid[int(key[3:])] = (val, lineno)
        else:
            raise ParseError(f"unknown key {key!r}", lineno)
    for k in ("phi1", "phi2", "phi3"):
        if k not in phis:
            raise ParseError(f"missing {k}")
    rigid_list = None
    if rigid:
        n = codim if codim is not None else max(rigid)
        if sorted(rigid) != list(range(1, n + 1)):
            raise ParseError("rigid block must define Phi1..Phid")
        rigid_list = [rigid[j] for j in range(1, n + 1)]
    return ModelFile(convention, phis, rigid_list, text)


def _parse_poly(ctx: Context, spec, what: str) -> Expr:
    text, lineno = spec
    try:
        return parse(ctx, text)
    except ExactError as exc:
        raise ParseError(f"{what}: {exc}", lineno) from None


def graphing_functions(mf: ModelFile) -> GraphingFunctions:
    ctx = standard_context()
    try:
        return GraphingFunctions(
            ctx,
            _parse_poly(ctx, mf.phis["phi1"], "phi1"),
            _parse_poly(ctx, mf.phis["phi2"], "phi2"),
            _parse_poly(ctx, mf.phis["phi3"], "phi3"),
        )
    except FrameError as exc:
        raise ParseError(str(exc)) from None


def rigid_model(mf: ModelFile) -> RigidModel:
    if not mf.rigid_phis:
        raise ParseError("no [rigid] block in model file")
    ctx = rigid_context(len(mf.rigid_phis))
    try:
        return RigidModel(ctx, tuple(
            _parse_poly(ctx, s, f"Phi{j+1}") for j, s in enumerate(mf.rigid_phis)))
    except AutCRError as exc:
        raise ParseError(str(exc)) from None


# ---------------------------------------------------------------------------
# algebra files
# ---------------------------------------------------------------------------

def parse_algebra_file(text: str):
    dim = None
    grading = None
    jmap = None
    brackets = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("dim"):
            dim = int(line.split("=", 1)[1])
            continue
        if line.startswith("grading"):
            grading = tuple(int(t) for t in line.split("=", 1)[1].split())
            continue
        if line.startswith("J"):
            jmap = line.split("=", 1)[1].strip()
            continue
        m = re.fullmatch(r"\[\s*e(\d+)\s*,\s*e(\d+)\s*\]\s*=\s*(.*)", line)
        if not m:
            raise ParseError(f"bad bracket line {line!r}", lineno)
        j, k = int(m.group(1)) - 1, int(m.group(2)) - 1
        brackets[(j, k)] = (m.group(3).strip(), lineno)
    if dim is None:
        raise ParseError("missing 'dim ='")
    ctx = Context([(f"e{s+1}", f"e{s+1}") for s in range(dim)])
    parsed = {}
    for (j, k), (rhs, lineno) in brackets.items():
        if rhs in ("0", ""):
            continue
        try:
            e = parse(ctx, rhs)
        except ExactError as exc:
            raise ParseError(str(exc), lineno) from None
        row = {}
        for s in range(dim):
            co = e.diff(f"e{s+1}")
            if not co.is_polynomial or not co.num.is_ground:
                raise ParseError("bracket right side must be linear", lineno)
            v = co.evaluate({n: GaussRat(0) for n in ctx.names})
            if not v.is_zero:
                row[s] = v
        parsed[(j, k)] = row
    g = LieAlgebra.from_brackets(dim, parsed)
    J = None
    if jmap and grading:
        ids = [k for k, d in enumerate(grading) if d == -1]
        J = [[GaussRat(0)] * len(ids) for _ in ids]
        for part in jmap.split(","):
            mm = re.fullmatch(r"\s*e(\d+)\s*->\s*(-?)\s*e(\d+)\s*", part)
            if not mm:
                raise ParseError(f"bad J entry {part!r}")
            src, sign, dst = int(mm.group(1)) - 1, mm.group(2), int(mm.group(3)) - 1
            J[ids.index(dst)][ids.index(src)] = GaussRat(-1 if sign else 1)
    return g, grading, J


def render_algebra(g: LieAlgebra) -> str:
    lines = [f"dim = {g.dim}"]
    for j in range(g.dim):
        for k in range(j + 1, g.dim):
            terms = []
            for s in range(g.dim):
                v = g.c[j][k][s]
                if v.is_zero:
                    continue
                cs = _coeff_str(v)
                terms.append(f"{cs}e{s+1}" if cs else f"e{s+1}")
            if terms:
                lines.append(f"[e{j+1}, e{k+1}] = " + " + ".join(terms))
    return "\n".join(lines)


def _coeff_str(v: GaussRat) -> str:
    if v == GaussRat(1):
        return ""
    return f"({v})*"


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------

def _emit(payload: dict, emit: str) -> str:
    if emit == "machine":
        return json.dumps(payload, sort_keys=True, indent=1)
    lines = []

    def walk(prefix, val):
        if isinstance(val, dict):
            for k in sorted(val):
                walk(f"{prefix}{k}." if prefix else f"{k}.", val[k]) if isinstance(val[k], dict) \
                    else walk(f"{prefix}{k}", val[k])
        elif isinstance(val, list):
            for item in val:
                lines.append(f"{prefix}: {item}")
        else:
            lines.append(f"{prefix} = {val}")

    walk("", payload)
    return "\n".join(lines)


def _report_header(mf: ModelFile) -> dict:
    return {"input_sha256": mf.sha256, "convention": mf.convention}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_frame(mf: ModelFile, args) -> dict:
    g = graphing_functions(mf)
    fr = build_frame(g, mf.convention)
    sf = structure_functions(build_frame(g, "s12"))
    out = _report_header(mf)
    out["frame"] = {nm: str(f) for nm, f in fr.fields().items()}
    out["structure_functions"] = {nm: render(v) for nm, v in sf.fundamental().items()}
    if args.cross_check:
        geom = Geometry(sf.frame, sf, darboux_structure(sf.frame, sf))
        ts = initial_torsion(geom)
        verdicts = compare(ts.values, first_loop_reference(sf))
        out["torsion_crosscheck"] = {nm: ("match" if ok else "MISMATCH")
                                     for nm, ok in verdicts}
    return out


def cmd_invariants(mf: ModelFile, args) -> dict:
    g = graphing_functions(mf)
    geom = Geometry.build(g)
    ts = initial_torsion(geom)
    branch = "R_zero" if geom.sf.R.is_zero else "R_nonzero"
    if args.branch_force == "r0" and branch != "R_zero":
        raise EquivalenceError("branch r0 forced but R != 0 on this input")
    if args.branch_force == "rneq0" and branch != "R_nonzero":
        raise EquivalenceError("branch rneq0 forced but R == 0 on this input")
    if branch == "R_zero":
        rep = branch_R0(ts, geom.sf, geom)
    else:
        rep = branch_Rneq0(ts, geom.sf, geom)
    out = _report_header(mf)
    out["branch"] = rep.branch
    out["case"] = rep.case
    out["verdict"] = rep.verdict
    out["invariants"] = {nm: str(v) for nm, v in sorted(rep.invariants.items())
                         if not isinstance(v, dict)}
    out["lemma_checks"] = [f"{nm}: {'pass' if ok else 'FAIL'}"
                           for nm, ok in rep.lemma_checks]
    out["normalizations"] = {nm: str(v) for nm, v in sorted(rep.normalizations.items())}
    if args.cross_check:
        verdicts = compare(ts.values, first_loop_reference(geom.sf))
        out["torsion_crosscheck"] = {nm: ("match" if ok else "MISMATCH")
                                     for nm, ok in verdicts}
    return out


def cmd_autcr(mf: ModelFile, args) -> dict:
    m = rigid_model(mf)
    alg = solve_rigid_aut(m, args.weight_bound)
    out = _report_header(mf)
    out["dimension"] = len(alg.basis)
    out["basis"] = [str(b) for b in alg.basis]
    out["commutators"] = render_algebra(alg.algebra).splitlines()[1:]
    weights = [field_weight(m, b) for b in alg.basis]
    if all(w is not None for w in weights) and any(w < 0 for w in weights):
        grading = [min(w, 0) for w in weights]
        try:
            gm = symbol_algebra(alg, grading)
            out["symbol_grading"] = " ".join(str(w) for w in grading)
            out["symbol_label"] = recognize_dim_le5(gm.algebra)
        except (AutCRError, LieAlgebraError) as exc:
            out["symbol_label"] = f"unavailable ({exc})"
    return out


def cmd_tanaka(text: str, args) -> dict:
    g, grading, J = parse_algebra_file(text)
    if validate(g) != "ok":
        raise ParseError("structure constants do not define a Lie algebra")
    if grading is None:
        raise LieAlgebraError("grading required for the prolongation")
    gm = GradedAlgebra(g, grading, J)
    comps = tanaka_prolong(gm)
    out = {"input_sha256": hashlib.sha256(text.encode()).hexdigest()}
    out["components"] = [f"g{c.degree}: dim {c.dim}" for c in comps]
    gens = []
    for b in comps[0].basis:
        desc = []
        for d in sorted(b, reverse=True):
            desc.append(f"deg {d}: " + str([[str(x) for x in row] for row in b[d]]))
        gens.append("; ".join(desc))
    out["g0_generators"] = gens
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="crcartan",
                                 description="exact equivalence-method computations "
                                             "for CR-generic 5-manifolds in C^4")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--emit", choices=("text", "machine"), default="text")
    common.add_argument("--cross-check", action="store_true",
                        help="compare derived torsion against the reference closed forms")
    sub = ap.add_subparsers(dest="command", required=True)
    p_frame = sub.add_parser("frame", parents=[common],
                             help="print the adapted frame and structure functions")
    p_frame.add_argument("file")
    p_frame.add_argument("--convention", choices=("s12", "s13"))
    p_inv = sub.add_parser("invariants", parents=[common],
                           help="run the full equivalence method")
    p_inv.add_argument("file")
    p_inv.add_argument("--convention", choices=("s12", "s13"))
    p_inv.add_argument("--branch-force", choices=("auto", "r0", "rneq0"), default="auto")
    p_aut = sub.add_parser("autcr", parents=[common],
                           help="solve for infinitesimal automorphisms of the rigid block")
    p_aut.add_argument("file")
    p_aut.add_argument("--weight-bound", type=int, default=None)
    p_tan = sub.add_parser("tanaka", parents=[common],
                           help="prolong a graded algebra file")
    p_tan.add_argument("file")
    args = ap.parse_args(argv)

    t0 = time.time()
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
        if args.command == "tanaka":
            payload = cmd_tanaka(text, args)
        else:
            mf = parse_model_file(text)
            if getattr(args, "convention", None):
                mf.convention = args.convention
            if args.command == "frame":
                payload = cmd_frame(mf, args)
            elif args.command == "invariants":
                payload = cmd_invariants(mf, args)
            else:
                payload = cmd_autcr(mf, args)
    except (ParseError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (EquivalenceError, FrameError, AutCRError, LieAlgebraError) as exc:
        print(f"pipeline diagnostic: {exc}", file=sys.stderr)
        return 3
    print(_emit(payload, args.emit))
    print(f"elapsed: {time.time() - t0:.2f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
