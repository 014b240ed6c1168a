"""Command-line front end.

Exit codes: 0 all checks pass, 2 numeric mismatch, 3 input error.
Every artifact embeds the library version and a hash of the run config;
identical configs give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import LonInvError
from .experiment.detection import CountRecord, simulate_counts, tomography_settings
from .experiment.direct import direct_measure_itprime
from .experiment.hom import fit_hom_dip
from .experiment.preparation import (
    REFERENCE_AMPLITUDES,
    REFERENCE_STATE_TABLE,
    REFERENCE_THETAS_DEG,
    paper_state_table,
    prepare_state_hom,
    state_from_alpha,
)
from .experiment.tomography import fidelity, reconstruct_ls
from .fock import enumerate_fock_basis, photonic_homomorphism
from .operators import build_frame
from .optics import experiment_unitaries, haar_unitaries, qhq_decompose, sample_haar_u2
from .serialization import (
    complex_matrix_from_json,
    complex_matrix_to_json,
    dumps,
    manifest,
    round_sig,
)
from .transfer import density_vector, invariants, pure_density

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 2, 3
TABLE_TOL = 5e-4
EXACT_CONSERVATION_TOL = 1e-9
INVARIANT_KEYS = ("I_n", "I_t_prime", "I_t", "I_p", "I_o", "purity")


class InputError(Exception):
    pass


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args, **extra) -> dict:
    skip = {"func", "out", "frame_cache"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    cfg.update(extra)
    return cfg


def _csv_text(args, header: list[str], rows: list[list], config: dict) -> str:
    man = manifest(config)
    buf = io.StringIO()
    buf.write(f"# loninv {man['version']} config_hash={man['config_hash']}\n")
    buf.write(f"# config={json.dumps(config, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(config: dict, data) -> str:
    return dumps({"manifest": manifest(config), "data": data})


def _fmt(x: float, precision: int) -> str:
    return f"{x:.{precision}f}"


def _inv_dict(inv) -> dict:
    return {k: round_sig(v) for k, v in inv.as_dict().items()}


# -- table-s1 ---------------------------------------------------------------

def cmd_table_s1(args) -> int:
    rows = paper_state_table()
    header = ["theta_deg", "alpha_deg", "amp_2H0V", "amp_1H1V", "I_t", "I_p", "I_t_prime", "I_o", "pass", "mismatched"]
    out_rows, records, all_ok = [], [], True
    for row, ref, amps in zip(rows, REFERENCE_STATE_TABLE, REFERENCE_AMPLITUDES):
        inv = row.invariants
        alpha_deg = float(np.rad2deg(row.alpha))
        got = {"I_t": inv.i_t, "I_p": inv.i_p, "I_t_prime": inv.i_t_prime, "I_o": inv.i_o}
        want = dict(zip(("I_t", "I_p", "I_t_prime", "I_o"), ref[2:]))
        bad = [k for k in got if abs(got[k] - want[k]) > TABLE_TOL]
        if abs(alpha_deg - ref[1]) > 0.05 + 1e-9:
            bad.append("alpha")
        for label, a, b in zip(("amp_2H0V", "amp_1H1V"), np.abs(row.amplitudes[:2]), amps):
            if abs(a - b) > TABLE_TOL:
                bad.append(label)
        ok = not bad
        all_ok &= ok
        values = [ref[0], alpha_deg, float(abs(row.amplitudes[0])), float(abs(row.amplitudes[1])),
                  inv.i_t, inv.i_p, inv.i_t_prime, inv.i_o]
        out_rows.append([_fmt(v, args.precision) for v in values] + ["pass" if ok else "FAIL", ";".join(bad)])
        records.append({"theta_deg": ref[0], "alpha_deg": round_sig(alpha_deg),
                        "amplitudes": [round_sig(float(abs(a))) for a in row.amplitudes[:2]],
                        "invariants": _inv_dict(inv),
                        "reference": dict(zip(("alpha_deg", "I_t", "I_p", "I_t_prime", "I_o"), ref[1:])),
                        "pass": ok, "mismatched": bad})
    config = _config(args, tolerance=TABLE_TOL)
    if args.format == "json":
        _emit(args, _json_text(config, {"rows": records, "all_pass": all_ok}))
    else:
        _emit(args, _csv_text(args, header, out_rows, config))
    return EXIT_OK if all_ok else EXIT_MISMATCH


# -- fig3-theory ------------------------------------------------------------

def alpha_curve(alphas_deg) -> list[dict]:
    frame = build_frame(2, 2)
    out = []
    for a in alphas_deg:
        inv = invariants(density_vector(pure_density(state_from_alpha(np.deg2rad(a))), frame))
        out.append({"alpha_deg": float(a), **inv.as_dict()})
    return out


def cmd_fig3_theory(args) -> int:
    alphas = np.linspace(0.0, 90.0, args.points)
    curve = alpha_curve(alphas)
    config = _config(args)
    if args.format == "json":
        _emit(args, _json_text(config, [{k: round_sig(v) for k, v in row.items()} for row in curve]))
    else:
        header = ["alpha_deg", "I_t_prime", "I_t", "I_p", "I_o"]
        rows = [[_fmt(r[k], args.precision) for k in header] for r in curve]
        _emit(args, _csv_text(args, header, rows, config))
    return EXIT_OK


# -- conserve ---------------------------------------------------------------

def _unitary_set(args):
    if args.unitaries == "table-s2":
        return [(u.name, u.matrix) for u in experiment_unitaries()]
    return [(u.name, u.matrix) for u in haar_unitaries(args.count, args.seed)]


def _trial_rng(seed: int, *index: int) -> np.random.Generator:
    return np.random.default_rng([seed, *index])


def conservation_suite(thetas_deg, unitaries, shots_levels, seed: int, model: str = "ideal") -> dict:
    """Invariants of every (state, unitary, method) cell and deviation summaries."""
    frame = build_frame(2, 2)
    basis = enumerate_fock_basis(2, 2)
    settings = tomography_settings()
    cells = []
    for si, theta in enumerate(thetas_deg):
        prep = prepare_state_hom(np.deg2rad(theta))
        ref = invariants(prep.state).as_dict()
        for ui, (uname, U) in enumerate(unitaries):
            V = photonic_homomorphism(U, 2, basis=basis).matrix
            rho = V @ prep.state.rho @ V.conj().T
            evolved = invariants(density_vector(rho, frame)).as_dict()
            cells.append(_cell(theta, uname, "exact", None, evolved, ref))
            tomo = reconstruct_ls(simulate_counts(rho, settings, None), settings)
            cells.append(_cell(theta, uname, "tomography", None, invariants(tomo.rho_hat).as_dict(), ref,
                               fid=fidelity(rho, tomo.rho_hat.rho)))
            direct = direct_measure_itprime(rho, 2, 2, basis=basis)
            cells.append(_cell(theta, uname, "direct", None, {"I_t_prime": direct.value}, ref))
            for li, shots in enumerate(shots_levels):
                rng = _trial_rng(seed, si, ui, li, 0)
                rec = simulate_counts(rho, settings, shots, rng, model=model)
                tomo = reconstruct_ls(rec, settings)
                cells.append(_cell(theta, uname, "tomography", shots, invariants(tomo.rho_hat).as_dict(), ref,
                                   fid=fidelity(rho, tomo.rho_hat.rho)))
                d = direct_measure_itprime(rho, 2, 2, shots=shots, rng=_trial_rng(seed, si, ui, li, 1), basis=basis)
                cells.append(_cell(theta, uname, "direct", shots, {"I_t_prime": d.value}, ref, stderr=d.stderr))

    summary = []
    groups = sorted({(c["method"], c["shots"] or 0) for c in cells})
    for method, shots in groups:
        sel = [c for c in cells if c["method"] == method and (c["shots"] or 0) == shots]
        devs = np.array([c["deviation"] for c in sel])
        itp = np.array([c["I_t_prime"] - c["reference_I_t_prime"] for c in sel])
        summary.append({"method": method, "shots": shots or None, "cells": len(sel),
                        "max_deviation": float(devs.max()), "spread_I_t_prime": float(itp.std())})
    return {"cells": cells, "summary": summary}


def _cell(theta, uname, method, shots, values, ref, fid=None, stderr=None) -> dict:
    devs = [abs(values[k] - ref[k]) for k in values if k in ref and k != "purity"]
    cell = {"theta_deg": theta, "unitary": uname, "method": method, "shots": shots,
            "deviation": float(max(devs)), "reference_I_t_prime": ref["I_t_prime"]}
    for k in INVARIANT_KEYS:
        cell[k] = values.get(k)
    if fid is not None:
        cell["fidelity"] = fid
    if stderr is not None:
        cell["stderr"] = stderr
    return cell


def cmd_conserve(args) -> int:
    thetas = args.thetas if args.thetas else REFERENCE_THETAS_DEG
    result = conservation_suite(thetas, _unitary_set(args), args.shots or [], args.seed, args.detector_model)
    exact = next(s for s in result["summary"] if s["method"] == "exact")
    ok = exact["max_deviation"] <= EXACT_CONSERVATION_TOL
    config = _config(args, thetas_deg=list(thetas))
    if args.format == "json":
        def clean(d):
            return {k: (round_sig(v) if isinstance(v, float) else v) for k, v in d.items()}
        data = {"cells": [clean(c) for c in result["cells"]],
                "summary": [clean(s) for s in result["summary"]], "exact_pass": ok}
        _emit(args, _json_text(config, data))
    else:
        header = ["theta_deg", "unitary", "method", "shots", *INVARIANT_KEYS, "deviation"]
        rows = []
        for c in result["cells"]:
            rows.append([c["theta_deg"], c["unitary"], c["method"], c["shots"] or "exact"]
                        + ["" if c[k] is None else f"{c[k]:.12g}" for k in INVARIANT_KEYS]
                        + [f"{c['deviation']:.3e}"])
        for s in result["summary"]:
            rows.append(["summary", "", s["method"], s["shots"] or "exact"] + [""] * len(INVARIANT_KEYS)
                        + [f"max={s['max_deviation']:.3e};spread={s['spread_I_t_prime']:.3e}"])
        _emit(args, _csv_text(args, header, rows, config))
    return EXIT_OK if ok else EXIT_MISMATCH


# -- invariants -------------------------------------------------------------

def _load_json(path) -> dict:
    text = Path(path).read_text() if path != "-" else sys.stdin.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def state_from_json(data: dict) -> tuple[int, int, np.ndarray]:
    """Parse ``{"n", "m", "rho" | "amplitudes"}`` into ``(n, m, rho)``."""
    try:
        n, m = int(data["n"]), int(data["m"])
        if "rho" in data:
            rho = complex_matrix_from_json(data["rho"])
        elif "amplitudes" in data:
            rho = pure_density(complex_matrix_from_json(data["amplitudes"]))
        else:
            raise InputError("state file needs a 'rho' or 'amplitudes' field")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid state schema: {exc}") from exc
    return n, m, rho


def cmd_invariants(args) -> int:
    n, m, rho = state_from_json(_load_json(args.state))
    frame = build_frame(n, m, cache_dir=args.frame_cache)
    try:
        state = density_vector(rho, frame)
    except ValueError as exc:
        raise InputError(f"{args.state}: {exc}") from exc
    inv = invariants(state)
    data = {"n": n, "m": m, "invariants": _inv_dict(inv),
            "coefficients": [round_sig(c) for c in state.coeffs],
            "partition": {"photon_number": 1, "traceless_tangent": m * m - 1, "perpendicular": frame.size - m * m}}
    _emit(args, _json_text(_config(args, state_file=Path(args.state).name), data))
    return EXIT_OK


# -- prepare ----------------------------------------------------------------

def cmd_prepare(args) -> int:
    thetas = args.theta if args.theta else REFERENCE_THETAS_DEG
    out = []
    for t in thetas:
        prep = prepare_state_hom(np.deg2rad(t))
        out.append({"theta_deg": t, "alpha_deg": round_sig(np.rad2deg(prep.alpha)), "n": 2, "m": 2,
                    "basis": [[2, 0], [1, 1], [0, 2]],
                    "amplitudes": complex_matrix_to_json(np.round(prep.amplitudes, 15)),
                    "invariants": _inv_dict(invariants(prep.state))})
    _emit(args, _json_text(_config(args), out))
    return EXIT_OK


# -- tomography -------------------------------------------------------------

def _unitary_by_name(name: str) -> np.ndarray:
    if name == "identity":
        return np.eye(2, dtype=complex)
    for u in experiment_unitaries():
        if u.name == name:
            return u.matrix
    raise InputError(f"unknown unitary {name!r}; use identity or U1..U8")


def cmd_tomo_simulate(args) -> int:
    prep = prepare_state_hom(np.deg2rad(args.theta))
    V = photonic_homomorphism(_unitary_by_name(args.unitary), 2).matrix
    rho = V @ prep.state.rho @ V.conj().T
    shots = args.shots[0] if args.shots else None
    rec = simulate_counts(rho, tomography_settings(), shots, np.random.default_rng(args.seed),
                          model=args.detector_model)
    data = rec.to_dict()
    data["truth"] = complex_matrix_to_json(np.round(rho, 15))
    _emit(args, _json_text(_config(args), data))
    return EXIT_OK


def cmd_tomo_reconstruct(args) -> int:
    payload = _load_json(args.record)
    data = payload.get("data", payload)
    try:
        rec = CountRecord.from_dict(data)
    except (KeyError, ValueError) as exc:
        raise InputError(f"{args.record}: {exc}") from exc
    truth = complex_matrix_from_json(data["truth"]) if "truth" in data else None
    res = reconstruct_ls(rec, tomography_settings(), method=args.method, reference=truth)
    out = res.to_dict()
    out["residual"] = round_sig(out["residual"])
    if out["fidelity_vs"] is not None:
        out["fidelity_vs"] = round_sig(out["fidelity_vs"])
    out["invariants"] = _inv_dict(invariants(res.rho_hat))
    _emit(args, _json_text(_config(args, record_file=Path(args.record).name), out))
    return EXIT_OK


# -- sample-u2 --------------------------------------------------------------

def cmd_sample_u2(args) -> int:
    if args.unitaries == "table-s2":
        items = [{"name": u.name, "psi": u.params.psi, "chi": u.params.chi, "xi": u.params.xi,
                  "angles_deg": list(u.angles_deg), "matrix": complex_matrix_to_json(u.matrix)}
                 for u in experiment_unitaries()]
    else:
        rng = np.random.default_rng(args.seed)
        items = []
        for k in range(args.count):
            p, U = sample_haar_u2(rng)
            angles = [round_sig(float(np.rad2deg(a))) for a in qhq_decompose(U)]
            items.append({"name": f"haar{k + 1}", "psi": round_sig(p.psi), "chi": round_sig(p.chi),
                          "xi": round_sig(p.xi), "alpha": round_sig(p.alpha), "angles_deg": angles,
                          "matrix": complex_matrix_to_json(np.round(U, 14))})
    _emit(args, _json_text(_config(args), items))
    return EXIT_OK


# -- dip-fit ----------------------------------------------------------------

def cmd_dip_fit(args) -> int:
    try:
        data = np.loadtxt(args.samples, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise InputError(f"{args.samples}: {exc}") from exc
    if data.shape[1] < 2:
        raise InputError("dip samples need two columns: delay, coincidence")
    model = fit_hom_dip(data[:, 0], data[:, 1])
    _emit(args, _json_text(_config(args, samples_file=Path(args.samples).name),
                           {k: round_sig(v) for k, v in model.as_dict().items()}))
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--shots", type=int, nargs="+", help="shots per setting (omit for exact mode)")
    common.add_argument("--detector-model", choices=("ideal", "splitting"), default="ideal")
    common.add_argument("--frame-cache", help="directory for cached frames (env LONINV_FRAME_CACHE)")

    parser = argparse.ArgumentParser(prog="loninv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"loninv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table-s1", parents=[common], help="reference state table with pass/fail")
    p.add_argument("--precision", type=int, default=3)
    p.set_defaults(func=cmd_table_s1)

    p = sub.add_parser("fig3-theory", parents=[common], help="invariant curves over alpha")
    p.add_argument("--points", type=int, default=91)
    p.add_argument("--precision", type=int, default=6)
    p.set_defaults(func=cmd_fig3_theory)

    p = sub.add_parser("conserve", parents=[common], help="conservation suite")
    p.add_argument("--unitaries", choices=("table-s2", "haar"), default="table-s2")
    p.add_argument("--count", type=int, default=8, help="number of Haar samples")
    p.add_argument("--thetas", type=float, nargs="+", help="HWP angles in degrees")
    p.set_defaults(func=cmd_conserve)

    p = sub.add_parser("invariants", parents=[common], help="invariants of a state file")
    p.add_argument("state", help="JSON state file")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("prepare", parents=[common], help="HOM-prepared states")
    p.add_argument("--theta", type=float, nargs="+", help="HWP angles in degrees")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("tomo-simulate", parents=[common], help="simulate tomography counts")
    p.add_argument("--theta", type=float, default=22.5, help="HWP angle in degrees")
    p.add_argument("--unitary", default="U1", help="identity or U1..U8")
    p.set_defaults(func=cmd_tomo_simulate)

    p = sub.add_parser("tomo-reconstruct", parents=[common], help="reconstruct from a count record")
    p.add_argument("record", help="JSON count record")
    p.add_argument("--method", choices=("linear", "cholesky"), default="linear")
    p.set_defaults(func=cmd_tomo_reconstruct)

    p = sub.add_parser("sample-u2", parents=[common], help="evolution unitaries with QHQ angles")
    p.add_argument("--unitaries", choices=("table-s2", "haar"), default="haar")
    p.add_argument("--count", type=int, default=8)
    p.set_defaults(func=cmd_sample_u2)

    p = sub.add_parser("dip-fit", parents=[common], help="fit the HOM dip model to CSV samples")
    p.add_argument("samples", help="CSV with delay,coincidence columns")
    p.set_defaults(func=cmd_dip_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FileNotFoundError, LonInvError) as exc:
        print(f"loninv: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
