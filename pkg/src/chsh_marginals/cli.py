"""Command-line front end.

Every subcommand prints a JSON report on stdout. Exit codes:

    0  pass / feasible
    1  usage, parse or consistency error
    2  infeasible input (an inequality is violated)
    3  the chosen method failed or does not apply

Reports contain no timestamps, so identical inputs and seeds give
byte-identical output; ``--timing`` adds wall-clock figures on request.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import files
from .construct import construct_from_marginals, construct_joint_bell, feasible_intervals
from .errors import InfeasibleError, MarginalError, UnsupportedError
from .inequalities import (PASS_TOL, angle_chsh_report, bell_report, chsh_report,
                           marginal_positivity_report)
from .lp_oracle import lp_feasible, lp_feasible_bell
from .maxent import DEFAULT_MAX_ITER, solve_maxent
from .moments import (CROSS_PAIRS, SUBSETS, fixed_moments_from_marginals, marginalize_pair,
                      single_spin_marginals)
from .peres import (AngleSet, VectorQuad, angles_of, fit_vectors, joint_from_vectors_mc,
                    moments_from_vectors)
from .quantum import (MeasurementSetup, TwoQubitState, average_spins, eprb_marginals,
                      maximally_mixed, singlet, zero_mean_rotation)

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_FAILED = 0, 1, 2, 3
VERDICTS = ("feasible", "infeasible", "unsupported", "not-run", "failed")
METHODS = ("construct", "lp", "peres", "maxent")
DEFAULT_SAMPLES = 1_000_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# --- helpers -----------------------------------------------------------------

def _plain(x):
    """JSON-safe copy: numpy scalars/arrays to Python, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


class Tolerances:
    def __init__(self, base, strict):
        scale = 0.1 if strict else 1.0
        self.table = base * scale
        self.consistency = base * scale
        self.chsh = PASS_TOL * scale


def _tolerances(args, declared):
    base = args.tolerance if args.tolerance is not None else declared
    if not base > 0:
        raise UsageError("tolerance must be positive")
    return Tolerances(base, args.strict)


def _verdicts(**given):
    out = {m: "not-run" for m in METHODS}
    out.update(given)
    assert all(v in VERDICTS for v in out.values())
    return out


def _marginal_error(p, tables):
    err = 0.0
    for (i, j), t in tables.items():
        err = max(err, float(np.abs(marginalize_pair(p, (i, j)) - t).max()))
    return err


def _write_witness(args, p, **extra):
    if args.out:
        files.write_json(args.out, _plain(files.witness_document(p, **extra)))


def _chsh_section(C, tol):
    rep = chsh_report(*C, tol=tol)
    return rep, rep.as_dict()


def _read_four(args):
    pm, declared = files.read_marginals(args.marginals, tolerance=args.tolerance)
    tol = _tolerances(args, declared)
    B, C = fixed_moments_from_marginals(pm, tol.consistency, tol.table)
    return pm, tol, B, C


def _input_echo(args, B, C):
    return {"file": str(args.marginals), "B": dict(zip("1234", B.tolist())),
            "C": dict(zip(("13", "14", "23", "24"), C.tolist()))}


# --- subcommands -------------------------------------------------------------

def cmd_check(args):
    pm, tol, B, C = _read_four(args)
    rep, section = _chsh_section(C, tol.chsh)
    report = {"command": "check", "input": _input_echo(args, B, C), "chsh": section,
              "verdicts": _verdicts()}
    return report, EXIT_OK if rep.ok else EXIT_INFEASIBLE


def _run_algebraic(args, pm, tol, B, C, report):
    try:
        d = construct_from_marginals(pm, b_tol=tol.consistency,
                                     consistency_tol=tol.consistency, norm_tol=tol.table)
    except UnsupportedError as exc:
        report["diagnostic"] = f"{exc} (--method lp)"
        return "unsupported", EXIT_FAILED
    except InfeasibleError as exc:
        report["certificate"] = {"single_inequality_excess": exc.violation}
        return "infeasible", EXIT_INFEASIBLE
    fi = feasible_intervals(*C)
    report["intervals"] = {"E": list(fi.E_interval), "E_chosen": fi.E,
                           "sum": list(fi.sum_interval), "diff": list(fi.diff_interval)}
    return _accept(args, d.p, pm, tol, report, method="algebraic")


def _accept(args, p, pm, tol, report, **extra):
    err = _marginal_error(p, pm.tables())
    report["witness"] = {"p": list(p), "max_marginal_error": err}
    if err > tol.table:
        report["diagnostic"] = "witness does not reproduce the input marginals"
        return "failed", EXIT_FAILED
    _write_witness(args, p, **extra)
    return "feasible", EXIT_OK


def _run_lp(args, pm, tol, B, C, report):
    res = lp_feasible(pm, tol.consistency, tol.table)
    report["lp"] = {"phase_one_objective": res.infeasibility, "pivots": res.pivots}
    if not res.feasible:
        report["certificate"] = {"phase_one_objective": res.infeasibility}
        return "infeasible", EXIT_INFEASIBLE
    return _accept(args, res.witness, pm, tol, report, method="lp")


def _zero_mean_only(B, tol, report, name):
    if np.abs(B).max() > tol.consistency:
        report["diagnostic"] = (f"average spins are nonzero; the {name} method needs B = 0, "
                                "use --method lp")
        return True
    return False


def _run_peres(args, pm, tol, B, C, report):
    if _zero_mean_only(B, tol, report, "peres"):
        return "unsupported", EXIT_FAILED
    try:
        q = fit_vectors(AngleSet.from_correlators(*C))
    except InfeasibleError as exc:
        report["certificate"] = {"angle_chsh_excess": exc.violation}
        return "infeasible", EXIT_INFEASIBLE
    mc = joint_from_vectors_mc(q, args.samples, seed=args.seed)
    report["peres"] = _mc_section(q, mc)
    report["witness"] = {"p": list(mc.p), "max_marginal_error": _marginal_error(mc.p, pm.tables()),
                         "estimate": "monte-carlo"}
    _write_witness(args, mc.p, method="peres", estimate="monte-carlo", samples=args.samples,
                   seed=args.seed)
    return "feasible", EXIT_OK


def _run_maxent(args, pm, tol, B, C, report):
    if _zero_mean_only(B, tol, report, "maxent"):
        return "unsupported", EXIT_FAILED
    section, sol = _maxent_section(C, args)
    report["maxent"] = section
    if sol is None:
        return "failed", EXIT_FAILED
    return _accept(args, sol.joint().p, pm, tol, report, method="maxent")


def _maxent_section(C, args):
    """Report section plus the solution, or None when it did not converge."""
    try:
        sol = solve_maxent(*C, max_iter=args.max_iter)
    except MarginalError as exc:
        return {"converged": False, "message": str(exc)}, None
    section = {"converged": sol.converged, "residual": sol.residual, "iterations": sol.iterations,
               "lambda": list(sol.lam), "logN": sol.logN, "message": sol.message}
    return section, sol if sol.converged else None


RUNNERS = {"algebraic": ("construct", _run_algebraic), "lp": ("lp", _run_lp),
           "peres": ("peres", _run_peres), "maxent": ("maxent", _run_maxent)}


def cmd_construct(args):
    pm, tol, B, C = _read_four(args)
    rep, section = _chsh_section(C, tol.chsh)
    report = {"command": "construct", "method": args.method, "input": _input_echo(args, B, C),
              "chsh": section}
    slot, runner = RUNNERS[args.method]
    verdict, code = runner(args, pm, tol, B, C, report)
    report["verdicts"] = _verdicts(**{slot: verdict})
    return report, code


def cmd_oracle(args):
    pm, tol, B, C = _read_four(args)
    rep, section = _chsh_section(C, tol.chsh)
    report = {"command": "oracle", "input": _input_echo(args, B, C), "chsh": section}
    verdict, code = _run_lp(args, pm, tol, B, C, report)
    report["verdicts"] = _verdicts(lp=verdict)
    return report, code


def cmd_maxent(args):
    if args.correlators:
        C = np.array(args.correlators, dtype=float)
        report = {"command": "maxent", "input": {"C": dict(zip(("13", "14", "23", "24"), C))}}
        tol = Tolerances(files.DEFAULT_TOLERANCE if args.tolerance is None else args.tolerance,
                         args.strict)
        section, sol = _maxent_section(C, args)
        report["chsh"] = _chsh_section(C, tol.chsh)[1]
        report["maxent"] = section
        if sol is not None:
            report["witness"] = {"p": list(sol.joint().p)}
            _write_witness(args, sol.joint().p, method="maxent")
        report["verdicts"] = _verdicts(maxent="feasible" if sol is not None else "failed")
        return report, EXIT_OK if sol is not None else EXIT_FAILED
    if not args.marginals:
        raise UsageError("give a marginals file or --correlators")
    args.method = "maxent"
    report, code = cmd_construct(args)
    report["command"] = "maxent"
    return report, code


def cmd_bell(args):
    tables, declared = files.read_tables(args.marginals, files.THREE_SPIN_KEYS, args.tolerance)
    tol = _tolerances(args, declared)
    Bd = single_spin_marginals(tables, tol.consistency)
    C = {}
    for (i, j), t in tables.items():
        C[f"{i}{j}"] = float(t[0, 0] - t[0, 1] - t[1, 0] + t[1, 1])
    pos = {f"{i}{j}": marginal_positivity_report(Bd[i], Bd[j], C[f"{i}{j}"], tol=tol.chsh).ok
           for i, j in ((1, 2), (1, 3), (2, 3))}
    brep = bell_report(C["12"], C["13"], C["23"], tol=tol.chsh)
    report = {"command": "bell",
              "input": {"file": str(args.marginals), "B": {str(k): v for k, v in Bd.items()},
                        "C": C},
              "positivity": pos, "bell": brep.as_dict()}
    lp = lp_feasible_bell(tables[(1, 2)], tables[(1, 3)], tables[(2, 3)],
                          tol.consistency, tol.table)
    report["lp"] = {"phase_one_objective": lp.infeasibility, "feasible": lp.feasible}
    try:
        bj = construct_joint_bell(Bd[1], Bd[2], Bd[3], C["12"], C["13"], C["23"])
    except InfeasibleError as exc:
        report["certificate"] = {"d_interval_gap": exc.violation}
        report["verdicts"] = _verdicts(construct="infeasible",
                                       lp="feasible" if lp.feasible else "infeasible")
        return report, EXIT_INFEASIBLE
    err = max(float(np.abs(bj.pair_table(i, j) - tables[(i, j)]).max()) for i, j in tables)
    report["witness"] = {"p": list(bj.p), "D": bj.D, "D_interval": list(bj.D_interval),
                         "max_marginal_error": err}
    report["verdicts"] = _verdicts(construct="feasible",
                                   lp="feasible" if lp.feasible else "infeasible")
    if err > tol.table:
        report["verdicts"]["construct"] = "failed"
        return report, EXIT_FAILED
    _write_witness(args, bj.p, method="bell")
    return report, EXIT_OK


def _load_state(name):
    if name == "singlet":
        return singlet()
    if name in ("maximally-mixed", "mixed"):
        return maximally_mixed()
    path = Path(name)
    if not path.exists():
        raise UsageError(f"unknown state {name!r}: use singlet, maximally-mixed or a JSON file")
    try:
        data = json.loads(path.read_text())
        rho = np.array(data["real"], dtype=float)
        if "imag" in data:
            rho = rho + 1j * np.array(data["imag"], dtype=float)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise files.FileFormatError(f"{path}:1: expected {{\"real\": 4x4, \"imag\": 4x4}} ({exc})") \
            from None
    return TwoQubitState(rho)


def _vectors(values, name="--vectors"):
    if len(values) != 12:
        raise UsageError(f"{name} needs 12 numbers (four 3-vectors)")
    return [np.array(values[3 * k:3 * k + 3], dtype=float) for k in range(4)]


def cmd_quantum_gen(args):
    state = _load_state(args.state)
    if args.vectors:
        setup = MeasurementSetup(*_vectors(args.vectors))
    else:
        setup = MeasurementSetup.planar(*(args.angles or (0.0, 90.0, 45.0, 135.0)))
    if args.zero_mean:
        state = zero_mean_rotation(state, setup)
    pm = eprb_marginals(state, setup)
    B = average_spins(state, setup)
    C = np.array([pm.table(i, j)[0, 0] - pm.table(i, j)[0, 1] - pm.table(i, j)[1, 0]
                  + pm.table(i, j)[1, 1] for i, j in CROSS_PAIRS])
    tol = Tolerances(files.DEFAULT_TOLERANCE if args.tolerance is None else args.tolerance,
                     args.strict)
    doc = files.marginals_document(pm, tolerance=files.DEFAULT_TOLERANCE)
    if args.out:
        files.write_json(args.out, _plain(doc))
    report = {"command": "quantum-gen", "state": args.state, "zero_mean": args.zero_mean,
              "directions": [setup.direction(k) for k in range(1, 5)],
              "B": dict(zip("1234", B)), "chsh": _chsh_section(C, tol.chsh)[1],
              "marginals": doc, "verdicts": _verdicts()}
    return report, EXIT_OK


def _mc_section(q, mc):
    exact = moments_from_vectors(q)
    rows = {}
    for sub in SUBSETS[1:]:
        key = "".join(map(str, sub))
        est, se = mc.correlator(sub)
        row = {"estimate": est, "stderr": se}
        if len(sub) == 2:
            row["closed_form"] = exact.pair(*sub)
        elif len(sub) in (1, 3):
            row["closed_form"] = 0.0
        if "closed_form" in row:
            row["z"] = (est - row["closed_form"]) / se if se > 0 else 0.0
        rows[key] = row
    return {"vectors": q.matrix(), "angles": angles_of(q), "samples": mc.n, "moments": rows}


def cmd_peres_sim(args):
    report = {"command": "peres-sim", "seed": args.seed}
    if args.vectors:
        q = VectorQuad.normalized(*_vectors(args.vectors))
        report["input"] = {"vectors": q.matrix()}
    else:
        if args.correlators:
            target = AngleSet.from_correlators(*args.correlators)
            report["input"] = {"C": dict(zip(("13", "14", "23", "24"), args.correlators))}
        elif args.angles:
            target = AngleSet(*args.angles)
            report["input"] = {"angles": dict(zip(("13", "23", "24", "14"), args.angles))}
        else:
            raise UsageError("give --angles, --correlators or --vectors")
        report["angle_chsh"] = list(angle_chsh_report(*target.as_tuple()).values)
        try:
            q = fit_vectors(target)
        except InfeasibleError as exc:
            report["certificate"] = {"angle_chsh_excess": exc.violation}
            report["verdicts"] = _verdicts(peres="infeasible")
            return report, EXIT_INFEASIBLE
        got = angles_of(q)
        report["fit_error"] = max(abs(got[k] - v) for k, v in
                                  zip(("13", "23", "24", "14"), target.as_tuple()))
    mc = joint_from_vectors_mc(q, args.samples, seed=args.seed)
    report["peres"] = _mc_section(q, mc)
    report["verdicts"] = _verdicts(peres="feasible")
    _write_witness(args, mc.p, method="peres", estimate="monte-carlo", samples=args.samples,
                   seed=args.seed)
    return report, EXIT_OK


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--strict", action="store_true", help="tighten all tolerances tenfold")
    common.add_argument("--tolerance", type=float, default=None,
                        help="override the tolerance declared in the input file")
    common.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    common.add_argument("--out", help="write the witness (or marginals) JSON here")

    parser = _Parser(prog="chsh-marginals",
                     description="Check and realize pair marginals of four +/-1 variables.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="evaluate the CHSH inequalities")
    p.add_argument("marginals")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", parents=[common], help="build a joint distribution")
    p.add_argument("marginals")
    p.add_argument("--method", choices=tuple(RUNNERS), default="algebraic")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("bell", parents=[common], help="three-spin tables 12, 13, 23")
    p.add_argument("marginals")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("quantum-gen", parents=[common], help="marginals from a two-qubit state")
    p.add_argument("--state", default="singlet",
                   help="singlet, maximally-mixed, or a JSON file with 'real'/'imag' 4x4 arrays")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--angles", type=float, nargs=4, metavar="DEG",
                   help="planar directions a1 a2 a3 a4 in degrees")
    g.add_argument("--vectors", type=float, nargs=12, metavar="X")
    p.add_argument("--zero-mean", action="store_true",
                   help="rotate locally so all average spins vanish")
    p.set_defaults(func=cmd_quantum_gen)

    p = sub.add_parser("peres-sim", parents=[common], help="Monte Carlo of the classical spin model")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--angles", type=float, nargs=4, metavar="RAD",
                   help="theta13 theta23 theta24 theta14 in radians")
    g.add_argument("--correlators", type=float, nargs=4, metavar="C",
                   help="C13 C14 C23 C24")
    g.add_argument("--vectors", type=float, nargs=12, metavar="X")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_peres_sim)

    p = sub.add_parser("maxent", parents=[common], help="maximum-entropy fit")
    p.add_argument("marginals", nargs="?")
    p.add_argument("--correlators", type=float, nargs=4, metavar="C")
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.set_defaults(func=cmd_maxent)

    p = sub.add_parser("oracle", parents=[common], help="LP feasibility of the marginal problem")
    p.add_argument("marginals")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "samples", 1) < 1:
        print("error: --samples must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    start = time.perf_counter()
    try:
        report, code = args.func(args)
    except (UsageError, MarginalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report["exit_code"] = code
    if args.timing:
        report["timing"] = {"seconds": time.perf_counter() - start}
    sys.stdout.write(files.dumps(_plain(report)))
    return code


if __name__ == "__main__":
    sys.exit(main())
