"""Command-line front end.

Every subcommand prints (or writes) a JSON report embedding the numeric
policy, seed and version. Row-oriented results go to CSV when ``--out``
ends in ``.csv``; the JSON summary is then written next to it.

Exit codes: 0 success, 1 negative verdict (``validate``), 2 unreadable or
malformed input, 3 infeasible energy bound, 4 solver non-convergence.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channels import choi_distance, validate
from .convergence import (ChannelSequence, counterexample_dichotomy, default_probes, rotation_sequence,
                          strong_convergence_report, unitary_dilation_family, depolarizing_sequence,
                          counterexample_sequence, counterexample_probes)
from .dilations import (common_dilation, complete_to_unitary, isometry_residual, random_partial_isometries,
                        rotation_partial_isometries, universal_unitary_dilation, unitary_sequence_udc)
from .energy import (EnergyObservable, diamond_norm_unconstrained, e_norm, ec_bures_channels, ec_diamond_norm)
from .errors import ConvergenceError, DimensionError, InfeasibleEnergyError, NotHermitianError, NotPSDError
from .info import entropic_disturbance, holevo_chi
from .io import InputError, decode_channel, decode_ensemble, decode_matrix, dumps_report, load_json, write_csv
from .policy import DEFAULT_POLICY

EXIT_OK, EXIT_VERDICT, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_NONCONVERGENCE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5, check=True)
        return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        return __version__


def _policy(args):
    changes = {}
    if args.tol is not None:
        changes["solver_tol"] = args.tol
    if args.iters is not None:
        changes["seesaw_iters"] = args.iters
        changes["golden_iters"] = args.iters
    return DEFAULT_POLICY.replace(**changes)


def _log_base(text):
    table = {"e": None, "nats": None, "2": 2.0, "bits": 2.0}
    if text not in table:
        raise argparse.ArgumentTypeError("log base must be one of e, nats, 2, bits")
    return table[text]


def _obs(args, dim: int) -> EnergyObservable:
    h = decode_matrix(load_json(args.hamiltonian)) if args.hamiltonian else np.eye(dim)
    if h.shape != (dim, dim):
        raise InputError(f"Hamiltonian must be {dim}x{dim}")
    energy = args.energy if args.energy is not None else (2.0 if not args.hamiltonian else None)
    if energy is None:
        raise InputError("--energy is required together with --hamiltonian")
    return EnergyObservable(h, energy)


def _channel(path):
    return decode_channel(load_json(path))


# ---------------------------------------------------------------------------
# subcommands; each returns (result dict, csv rows or None, exit code)

def cmd_enorm(args, pol):
    a = decode_matrix(load_json(args.matrix))
    obs = _obs(args, a.shape[1])
    res = e_norm(a, obs, pol, full_output=True)
    result = {"value": res.value, "lower": res.lower, "multiplier": res.multiplier, "witness": res.witness,
              "E": obs.E, "E0": obs.E0}
    rows = None
    if args.sweep:
        grid = np.linspace(obs.E0, obs.E, args.sweep + 1)[1:]
        sq = [e_norm(a, obs.with_energy(float(e)), pol) ** 2 for e in grid]
        rows = [(k, "A", "energy", e) for k, e in enumerate(grid)] + \
               [(k, "A", "e_norm_sq", v) for k, v in enumerate(sq)]
        diffs = np.diff(sq)
        result["sweep"] = {
            "energies": grid, "e_norm_sq": sq,
            "nondecreasing": bool(np.all(diffs >= -1e-8)),
            "concave": bool(np.all(np.diff(diffs / np.diff(grid)) <= 1e-8)),
        }
    return result, rows, EXIT_OK


def cmd_bures(args, pol):
    phi, psi = _channel(args.phi), _channel(args.psi)
    obs = _obs(args, phi.dim_in)
    r = ec_bures_channels(phi, psi, obs, pol)
    return {"value": r.value, "upper": r.upper, "gap": r.gap, "witness": r.witness, "C": r.C,
            "dim_env": r.dim_env, "solver_status": r.status}, None, EXIT_OK


def cmd_diamond(args, pol):
    phi, psi = _channel(args.phi), _channel(args.psi)
    if args.hamiltonian:
        obs = _obs(args, phi.dim_in)
        br = ec_diamond_norm(phi, psi, obs, restarts=args.restarts, seed=args.seed, policy=pol)
    else:
        br = diamond_norm_unconstrained(phi, psi, restarts=args.restarts, seed=args.seed, policy=pol)
    return {"lower": br.lower, "upper": br.upper, "restart_values": br.restart_values,
            "constrained": bool(args.hamiltonian)}, None, EXIT_OK


def cmd_dilate(args, pol):
    phi = _channel(args.channel)
    if args.psi:
        psi = _channel(args.psi)
        cd = common_dilation(phi, psi, _obs(args, phi.dim_in), pol)
        res = cd.residuals(phi, psi)
        return {"mode": "common", "achieved": cd.achieved, "beta": cd.bures.value, "beta_upper": cd.bures.upper,
                "dim_env": cd.dim_env, "residuals": res, "V_phi": cd.V_phi, "V_psi": cd.V_psi}, None, EXIT_OK
    ud = universal_unitary_dilation(phi)
    rec = choi_distance(ud.channel(), phi)
    unit = isometry_residual(ud.U)
    return {"mode": "unitary", "reconstruction_residual": rec, "unitarity_residual": unit,
            "dims": {"A": ud.dim_in, "D": ud.dim_aux, "B": ud.dim_out, "E_prime": ud.dim_env},
            "U": ud.U, "sigma0": ud.sigma0}, None, EXIT_OK


def cmd_udc(args, pol):
    if args.family == "rotation":
        v0, vs = rotation_partial_isometries(args.n_max)
    else:
        v0, vs = random_partial_isometries(n_max=args.n_max, seed=args.seed)
    u0 = complete_to_unitary(v0)
    r = unitary_sequence_udc(vs, v0, u0, pol)
    rows = []
    for n, (gap, unit, rec, dist) in enumerate(zip(r.range_gaps, r.unitarity, r.reconstruction, r.distances), 1):
        rows.append((n, args.family, "range_gap", gap))
        if dist is not None:
            rows += [(n, args.family, "unitarity", unit), (n, args.family, "reconstruction", rec),
                     (n, args.family, "distance_to_U0", dist)]
    valid = [d for d in r.distances if d is not None]
    return {"family": args.family, "failures": r.failures, "final_distance": valid[-1] if valid else None,
            "max_unitarity_residual": max((u for u in r.unitarity if u is not None), default=0.0),
            "max_reconstruction_residual": max((u for u in r.reconstruction if u is not None), default=0.0)}, \
        rows, EXIT_OK


def cmd_counterexample(args, pol):
    rep = counterexample_dichotomy(args.m, args.n_max)
    fwd, dual = rep["forward"], rep["dual"]
    rows = fwd.rows + dual.rows
    tail = [v for n, v in dual.summary.items() if n >= 2]
    return {"m": args.m, "forward": fwd.as_dict(), "dual": dual.as_dict(),
            "dual_constant_one": bool(tail) and max(abs(v - 1.0) for v in tail) <= 1e-12}, rows, EXIT_OK


def cmd_disturbance(args, pol):
    ch = _channel(args.channel)
    mu = decode_ensemble(load_json(args.ensemble))
    base = args.log_base
    chi = holevo_chi(mu, base)
    chi_rel = holevo_chi(mu, base, form="relative")
    img = mu.image(ch)
    return {"chi": chi, "chi_relative_form": chi_rel, "chi_image": holevo_chi(img, base),
            "disturbance": entropic_disturbance(ch, mu, base),
            "log_base": "e" if base is None else base}, None, EXIT_OK


def _sequence_from_dir(path: Path) -> ChannelSequence:
    files = sorted(path.glob("*.json"), key=lambda p: (len(p.stem), p.stem))
    if len(files) < 2:
        raise InputError(f"{path} must contain the limit channel and at least one member as *.json")
    chans = [_channel(f) for f in files]
    return ChannelSequence(chans[0], lambda n: chans[n], len(chans) - 1, name=str(path))


def cmd_converge(args, pol):
    probes = None
    if args.dir:
        seq = _sequence_from_dir(Path(args.dir))
    elif args.family == "rotation":
        seq = rotation_sequence(args.n_max)
    elif args.family == "depolarizing":
        seq = depolarizing_sequence(2, 0.25, args.n_max)
    elif args.family == "unitary-dilation":
        seq = unitary_dilation_family(seed=args.seed).sequence(args.n_max)
    else:
        seq = counterexample_sequence(args.m)
        probes = counterexample_probes(args.m)
    probes = probes or default_probes(seq.dim_in, seed=args.seed)
    rep = strong_convergence_report(seq, probes, args.n_max)
    return {"sequence": seq.name, "forward": rep.as_dict()}, rep.rows, EXIT_OK


def cmd_validate(args, pol):
    ch = _channel(args.channel)
    rep = validate(ch, pol)
    return rep.as_dict(), None, EXIT_OK if rep.ok else EXIT_VERDICT


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="conic solver tolerance")
    common.add_argument("--iters", type=int, default=None, help="iteration cap for golden-section and see-saw")
    common.add_argument("--log-base", type=_log_base, default=None, help="e (default) or 2")
    common.add_argument("--out", default=None, help="output path (.json or .csv)")

    energy = argparse.ArgumentParser(add_help=False)
    energy.add_argument("--hamiltonian", help="JSON matrix file (default: identity)")
    energy.add_argument("--energy", type=float, help="energy bound E")

    p = _Parser(prog="chdl", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("enorm", parents=[common, energy], help="operator E-norm")
    s.add_argument("--matrix", required=True)
    s.add_argument("--sweep", type=int, default=0, help="number of E-grid points")
    s.set_defaults(func=cmd_enorm)

    s = sub.add_parser("bures", parents=[common, energy], help="energy-constrained Bures distance")
    s.add_argument("--phi", required=True)
    s.add_argument("--psi", required=True)
    s.set_defaults(func=cmd_bures)

    s = sub.add_parser("diamond", parents=[common, energy], help="diamond norm bracket")
    s.add_argument("--phi", required=True)
    s.add_argument("--psi", required=True)
    s.add_argument("--restarts", type=int, default=None)
    s.set_defaults(func=cmd_diamond)

    s = sub.add_parser("dilate", parents=[common, energy], help="unitary or common Stinespring dilation")
    s.add_argument("--channel", required=True)
    s.add_argument("--psi", help="second channel: build a common dilation")
    s.set_defaults(func=cmd_dilate)

    s = sub.add_parser("udc", parents=[common], help="converging unitary completions")
    s.add_argument("--family", choices=("rotation", "random"), default="rotation")
    s.add_argument("--n-max", type=int, default=20)
    s.set_defaults(func=cmd_udc)

    s = sub.add_parser("counterexample", parents=[common], help="forward/dual dichotomy table")
    s.add_argument("--m", type=int, default=16)
    s.add_argument("--n-max", type=int, default=None)
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("disturbance", parents=[common], help="Holevo quantity and entropic disturbance")
    s.add_argument("--channel", required=True)
    s.add_argument("--ensemble", required=True)
    s.set_defaults(func=cmd_disturbance)

    s = sub.add_parser("converge", parents=[common], help="strong convergence report")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--family", choices=("counterexample", "rotation", "depolarizing", "unitary-dilation"),
                   default="counterexample")
    g.add_argument("--dir", help="directory of channel files; the first in natural order is the limit")
    s.add_argument("--m", type=int, default=16)
    s.add_argument("--n-max", type=int, default=20)
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("validate", parents=[common], help="CPTP diagnostics of a channel file")
    s.add_argument("--channel", required=True)
    s.set_defaults(func=cmd_validate)
    return p


def _emit(report: dict, rows, out: str | None) -> None:
    text = dumps_report(report)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if path.suffix == ".csv":
        write_csv(path, rows or [])
        path = path.with_suffix(".json")
    path.write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    pol = _policy(args)
    try:
        result, rows, code = args.func(args, pol)
    except (InputError, DimensionError, NotHermitianError, NotPSDError) as exc:
        print(f"chdl: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleEnergyError as exc:
        print(f"chdl: infeasible energy bound: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConvergenceError as exc:
        print(f"chdl: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    report = {
        "command": args.command,
        "version": version_string(),
        "seed": args.seed,
        "policy": pol.as_dict(),
        "log_base": "e" if args.log_base is None else args.log_base,
        "threads": os.environ.get("CHDL_NUM_THREADS", "1"),
        "result": result,
    }
    _emit(report, rows, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
