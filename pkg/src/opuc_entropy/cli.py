"""Command-line front end.

Commands: ``lemma`` (block profiles and their functionals), ``construct``
(the staged measure construction), ``verify`` (the invariant suite),
``realline`` (transfer to [-1, 1]), ``entropy-table`` (entropy sweeps).
All outputs are UTF-8 CSV with LF endings and a header row; identical
configuration and seed produce byte-identical files.

Exit codes: 0 success, 1 validation error, 2 numerical or infeasibility
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import blocks, construction, entropy, measures, opuc, realline
from .errors import NumericalError, StageFailureError, ValidationError

_FMT = "%.17g"


def _f(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return _FMT % x


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_f(v) if not isinstance(v, str) else v for v in row) + "\n")


def _write_plot(path: Path, pairs):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for x, y in pairs:
            fh.write(_f(x) + " " + _f(y) + "\n")


def _parse_floats(text: str):
    return [float(v) for v in text.replace(",", " ").split()]


def _load_config(path):
    out = {}
    if path is None:
        return out
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _resolve(args, config, key, default, cast=str):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return cast(config[key])
    return default


# ---------------------------------------------------------------------------
# lemma
# ---------------------------------------------------------------------------


def cmd_lemma(args) -> int:
    config = _load_config(args.config)
    L = _resolve(args, config, "L", 0.25, float)
    C = _resolve(args, config, "C", 10.0, float)
    k_max = _resolve(args, config, "kmax", 4, int)
    out = Path(_resolve(args, config, "out", "."))
    out.mkdir(parents=True, exist_ok=True)

    spec = blocks.block_breakpoints(L, C, k_max)
    cal = construction.load_calibration()
    thr_gamma = cal["thresholds"]["gamma"]
    thr_psi = cal["thresholds"]["psi"]

    bp_rows = []
    for k in range(1, spec.k_max + 1):
        gap = spec.breakpoints[k] - spec.breakpoints[k - 1]
        ratio = gap / spec.breakpoints[k]
        bp_rows.append((k, spec.breakpoints[k], gap, ratio))
    _write_csv(out / "breakpoints.csv", ["k", "N_k", "gap", "gap_ratio"], bp_rows)

    gp_rows = []
    plot = []
    for k in range(1, spec.k_max + 1):
        gh = blocks.block_gammas(spec, k)
        n_k = spec.breakpoints[k]
        gp = blocks.gamma_psi(gh[::-1])
        lower = thr_gamma * L**4 * np.sqrt(n_k)
        upper = blocks.gamma_upper_bound(gh)
        psi_lower = thr_psi * L**3
        ok = lower <= gp.gamma <= upper and gp.psi >= psi_lower
        gp_rows.append((k, n_k, gp.gamma, gp.psi, lower, upper, psi_lower, ok))
        plot.append((np.sqrt(n_k), gp.gamma))
    _write_csv(
        out / "gamma_psi.csv",
        ["k", "N_k", "gamma", "psi", "gamma_lower", "gamma_upper", "psi_lower", "sandwich_ok"],
        gp_rows,
    )
    if args.plot_data:
        _write_plot(out / "gamma_vs_sqrtN.dat", plot)
    return 0 if all(r[-1] for r in gp_rows) else 2


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    config = _load_config(args.config)
    K = _resolve(args, config, "K", None, int)
    L_list = _parse_floats(_resolve(args, config, "L", "0.25,0.25"))
    d_list = _parse_floats(_resolve(args, config, "delta", "0.1,0.05"))
    eps = _resolve(args, config, "eps_prime", 0.01, float)
    oversample = _resolve(args, config, "oversample", 1, int)
    moment_count = _resolve(args, config, "moment_count", 8, int)
    out = Path(_resolve(args, config, "out", "."))
    out.mkdir(parents=True, exist_ok=True)
    if K is not None and K != len(L_list):
        raise ValidationError(f"K={K} does not match {len(L_list)} scale entries")

    try:
        state = construction.run_construction(
            L_list, d_list, eps_prime=eps, moment_count=moment_count, oversample=oversample
        )
    except StageFailureError as exc:
        # partial outputs plus diagnostics
        with open(out / "failure.txt", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(str(exc) + "\n")
        if exc.partial is not None:
            construction.save_state(exc.partial, out / "state_partial.txt")
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2

    rows = []
    plot = []
    for rec in state.stages:
        ent_log = np.log(rec.entropy_hat) if rec.entropy_hat > 0 else float("nan")
        rows.append(
            (
                rec.k,
                rec.m,
                rec.scale,
                rec.kappa,
                rec.log_phi_at_one,
                ent_log,
                rec.entropy_over_sqrt_m,
                rec.entropy_atom_log,
                rec.atom_ratio,
            )
        )
        plot.append((rec.m, rec.entropy_over_sqrt_m))
    _write_csv(
        out / "growth.csv",
        [
            "k",
            "M_k",
            "L_k",
            "kappa_k",
            "log_phi_at_one",
            "entropy_hat_log",
            "entropy_over_sqrtM",
            "entropy_atom_log",
            "atom_ratio",
        ],
        rows,
    )
    matrix_rows = []
    for j, row in enumerate(state.entropy_matrix, start=1):
        for offset, value in enumerate(row):
            matrix_rows.append((j, j + offset, value))
    _write_csv(out / "entropy_matrix.csv", ["checkpoint", "stage", "entropy"], matrix_rows)
    construction.save_state(state, out / "state.txt")
    if args.plot_data:
        _write_plot(out / "entropy_over_sqrtM.dat", plot)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _verify_checks(seed: int, oversample: int, schur_file):
    rng = np.random.default_rng(seed)
    checks = []

    if schur_file is not None:
        try:
            raw = np.array(_parse_floats(Path(schur_file).read_text(encoding="utf-8")))
            opuc.as_schur(raw)
            checks.append(("schur_parameter_range", float(np.max(np.abs(raw))), 1.0, True))
        except ValidationError:
            bad = float(np.max(np.abs(raw))) if raw.size else float("nan")
            checks.append(("schur_parameter_range", bad, 1.0, False))

    # recurrence coefficients against the exact-arithmetic moment solve
    worst = 0.0
    for _ in range(10):
        g = rng.uniform(-0.9, 0.9, 10)
        moms = opuc.exact_moments_from_schur(g, 10)
        oracle = opuc.gram_schmidt_oracle(moms, 10)
        pair = opuc.evaluate(g, 10, opuc.grid_for_degree(10))
        got = opuc.coefficients_from_grid(pair)
        worst = max(worst, float(np.max(np.abs(got - oracle))))
    checks.append(("oracle_equivalence", worst, 1e-9, worst <= 1e-9))

    # Szego identity on block profiles and small mixed-sign draws (random
    # draws with larger entries push polynomial zeros against the circle
    # and genuinely need finer grids than the rule provides)
    worst = 0.0
    fixtures = [blocks.profile_for_length(n, 0.25)[::-1] / 2 for n in (100, 200, 640)]
    fixtures += [rng.uniform(-0.3, 0.3, 24) for _ in range(3)]
    for g in fixtures:
        m = measures.bernstein_szego(g)
        r = measures.szego_integral(m, opuc.grid_for_degree(len(g), oversample))
        worst = max(worst, abs(r.quadrature - r.analytic))
    checks.append(("szego_identity", worst, 1e-7, worst <= 1e-7))

    # Geronimus half value in the log domain
    worst = 0.0
    for n in (10, 100, 1000):
        gh = np.full(n, 0.25 / np.sqrt(n))
        carrier = gh[::-1] / 2.0
        kap = measures.kappa_choice(carrier, n)
        grid = opuc.grid_for_degree(n)
        pert = measures.geronimus_perturbed_phi(carrier, n, kap.value, grid)
        base = opuc.evaluate(carrier, n, grid)
        worst = max(
            worst,
            abs(pert.log_value_at_one - base.log_value_at_one + np.log(2.0)),
        )
    checks.append(("geronimus_half_value", worst, 1e-9, worst <= 1e-9))

    # log- mass and the growth ceiling over an entropy sweep
    log_minus_worst = 0.0
    upper_margin = float("-inf")
    for g in fixtures:
        m = measures.bernstein_szego(g)
        n = len(g) // 2
        rep = entropy.entropy_integral(m, g, n, monic=False, oversample=oversample)
        log_minus_worst = max(log_minus_worst, rep.entropy_minus)
        rep_m = entropy.entropy_integral(m, g, n, monic=True, oversample=oversample)
        bound = entropy.entropy_upper_bound(g, n) + rep_m.quadrature_error
        upper_margin = max(upper_margin, rep_m.entropy - bound)
    checks.append(("log_minus_bound", log_minus_worst, 1.0, log_minus_worst < 1.0))
    checks.append(("entropy_upper_bound", upper_margin, 0.0, upper_margin <= 0.0))

    # profile functionals against calibrated thresholds
    cal = construction.load_calibration()
    L = cal["scale"]
    spec = blocks.block_breakpoints(L, cal["growth_factor"], cal["k_max"])
    gamma_margin = float("inf")
    agree_worst = 0.0
    for k in range(1, spec.k_max + 1):
        gh = blocks.block_gammas(spec, k)
        gp = blocks.gamma_psi(gh[::-1])
        agree_worst = max(agree_worst, abs(gp.gamma - gp.gamma_reversed_form) / gp.gamma)
        n_k = spec.breakpoints[k]
        gamma_margin = min(
            gamma_margin,
            min(
                gp.gamma - cal["thresholds"]["gamma"] * L**4 * np.sqrt(n_k),
                blocks.gamma_upper_bound(gh) - gp.gamma,
                gp.psi - cal["thresholds"]["psi"] * L**3,
            ),
        )
    checks.append(("gamma_forms_agree", agree_worst, 1e-9, agree_worst <= 1e-9))
    checks.append(("gamma_sandwich", gamma_margin, 0.0, gamma_margin >= 0.0))

    # quadrature stability under grid doubling
    g = blocks.profile_for_length(200, 0.25)[::-1] / 2
    m = measures.bernstein_szego(g)
    base = measures.szego_integral(m, opuc.grid_for_degree(len(g), oversample))
    fine = measures.szego_integral(m, opuc.grid_for_degree(len(g), 2 * oversample))
    rel = abs(base.quadrature - fine.quadrature) / max(1.0, abs(fine.quadrature))
    checks.append(("quadrature_stability", rel, 1e-6, rel < 1e-6))
    return checks


def cmd_verify(args) -> int:
    config = _load_config(args.config)
    seed = _resolve(args, config, "seed", 20240801, int)
    oversample = _resolve(args, config, "oversample", 2, int)
    out = Path(_resolve(args, config, "out", "."))
    out.mkdir(parents=True, exist_ok=True)
    checks = _verify_checks(seed, oversample, args.schur_file)
    _write_csv(
        out / "checks.csv",
        ["check", "measured", "threshold", "pass"],
        checks,
    )
    failed = [c for c in checks if not c[3]]
    for name, measured, threshold, ok in checks:
        marker = "ok " if ok else "FAIL"
        print(f"{marker} {name}: measured {measured:.6g} vs threshold {threshold:.6g}")
    return 0 if not failed else 2


# ---------------------------------------------------------------------------
# realline
# ---------------------------------------------------------------------------


def cmd_realline(args) -> int:
    config = _load_config(args.config)
    out = Path(_resolve(args, config, "out", "."))
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    if args.chebyshev is not None:
        m = int(args.chebyshev)
        rep = realline.real_line_map(np.zeros(max(m, 1)), m)
        rows.append(rep)
    else:
        if args.state is None:
            raise ValidationError("realline needs --state FILE or --chebyshev M")
        state = construction.load_state(args.state)
        kappa = state.stages[-1].kappa
        logw = float(np.log(kappa) - np.log1p(kappa))
        for m in state.checkpoints:
            rep = realline.real_line_map(state.schur, m, atom_log_weight=logw)
            rows.append(rep)
    _write_csv(
        out / "realline.csv",
        [
            "m",
            "log_p_at_one",
            "log_phi_at_one",
            "log_ratio",
            "ratio_ok",
            "circle_atom_log",
            "line_atom_log",
        ],
        [
            (r.m, r.log_p_at_one, r.log_phi_at_one, r.log_ratio, r.ratio_ok,
             r.circle_atom_log, r.line_atom_log)
            for r in rows
        ],
    )
    return 0 if all(r.ratio_ok for r in rows) else 2


# ---------------------------------------------------------------------------
# entropy-table
# ---------------------------------------------------------------------------


def cmd_entropy_table(args) -> int:
    config = _load_config(args.config)
    out = Path(_resolve(args, config, "out", "."))
    out.mkdir(parents=True, exist_ok=True)
    oversample = _resolve(args, config, "oversample", 1, int)

    if args.measure is not None:
        measure = measures.load_measure(args.measure)
        schur = measure.schur_prefix
        if measure.atoms:
            kappa = dict(measure.atoms).get(0.0)
            if kappa is not None:
                schur = measures.schur_of_perturbed(
                    measure.schur_prefix, kappa, measure.degree + 1
                )
    elif args.schur is not None:
        schur = opuc.as_schur(_parse_floats(args.schur))
        measure = measures.bernstein_szego(schur)
    else:
        raise ValidationError("entropy-table needs --measure FILE or --schur LIST")

    if args.degrees is not None:
        degrees = [int(v) for v in args.degrees.replace(",", " ").split()]
    else:
        top = len(schur)
        degrees = sorted({max(1, top // 8), top // 4, top // 2, top})
    monic = not args.orthonormal

    rows = []
    for n in degrees:
        rep = entropy.entropy_integral(measure, schur, n, monic=monic, oversample=oversample)
        rows.append(rep.csv_row())
    with open(out / "entropy.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(entropy.ENTROPY_CSV_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opuc-entropy",
        description="Szego recurrences, point-mass perturbations, and entropy growth runs.",
    )
    parser.add_argument("--threads", type=int, default=0,
                        help="reserved; computations are vectorized in-process (0 = auto)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lemma", help="block profile table with functional bounds")
    p.add_argument("--L", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--kmax", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.add_argument("--plot-data", action="store_true")
    p.set_defaults(func=cmd_lemma)

    p = sub.add_parser("construct", help="run the staged construction")
    p.add_argument("--K", type=int)
    p.add_argument("--L")
    p.add_argument("--delta")
    p.add_argument("--eps-prime", dest="eps_prime", type=float)
    p.add_argument("--oversample", type=int)
    p.add_argument("--moment-count", dest="moment_count", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.add_argument("--plot-data", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--seed", type=int)
    p.add_argument("--oversample", type=int)
    p.add_argument("--schur-file", dest="schur_file")
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("realline", help="transfer a run to [-1, 1]")
    p.add_argument("--state")
    p.add_argument("--chebyshev", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_realline)

    p = sub.add_parser("entropy-table", help="entropy reports over a degree list")
    p.add_argument("--measure")
    p.add_argument("--schur")
    p.add_argument("--degrees")
    p.add_argument("--orthonormal", action="store_true")
    p.add_argument("--oversample", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_entropy_table)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.threads < 0:
        parser.error("--threads must be >= 0")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
