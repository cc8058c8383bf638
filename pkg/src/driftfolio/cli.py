"""Command-line interface: solve, sweep, metrics, verify, example-8asset.

Exit codes: 0 success, 1 verification failure, 2 input validation failure,
3 numerical failure. CSV output uses 17 significant digits, '.' decimal
separator and '\\n' line endings, so files are byte-deterministic for fixed
inputs, flags and seeds.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .asymptotics import compute_coa_rdr, limit_strategy
from .errors import (
    ConvergenceError,
    DegenerateDirectionError,
    DegenerateSpectrumError,
    DriftfolioError,
    InternalConsistencyError,
    KernelMismatchError,
    NotPositiveDefiniteError,
    SingularGeometryError,
    ValidationError,
)
from .geometry import build_constraint_geometry, check_identities
from .model import UncertaintySet
from .oracles import brute_force_worst_case, mc_estimate_utility
from .solver import (
    evaluate_g,
    robust_strategy,
    solve_robust,
    verify_saddle_point,
    worst_case_drift,
)
from .specio import bundled_spec_path, load_problem_spec
from .spectral import cholesky_factor, spectral_decompose

NUMERICAL_ERRORS = (
    ConvergenceError,
    DegenerateSpectrumError,
    KernelMismatchError,
    NotPositiveDefiniteError,
    SingularGeometryError,
    InternalConsistencyError,
    DegenerateDirectionError,
)


def _fmt(x) -> str:
    """Fixed 17-significant-digit decimal formatting for CSV cells."""
    return format(float(x), ".17g")


def _write_text(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _kappa_grid(args) -> np.ndarray:
    if args.kappa_steps < 1:
        raise ValidationError(f"--kappa-steps must be >= 1, got {args.kappa_steps}")
    if args.kappa_max < args.kappa_min:
        raise ValidationError("--kappa-max must be >= --kappa-min")
    if args.kappa_steps == 1:
        return np.array([args.kappa_min])
    if args.scale == "log":
        if args.kappa_min <= 0:
            raise ValidationError("log scale needs --kappa-min > 0")
        return np.geomspace(args.kappa_min, args.kappa_max, args.kappa_steps)
    return np.linspace(args.kappa_min, args.kappa_max, args.kappa_steps)


def _solution_record(solution) -> dict:
    return {
        "kappa": solution.kappa,
        "gamma": solution.gamma,
        "h": solution.h,
        "psi": solution.psi,
        "rho_star": list(solution.rho_star),
        "mu_star": list(solution.mu_star),
        "pi_star": list(solution.pi_star),
        "value": solution.value,
        "ce": solution.ce,
    }


def _sweep_row(spec, kappa: float, limit: np.ndarray) -> list[str]:
    uset = UncertaintySet(nu=spec.uncertainty.nu, Gamma=spec.uncertainty.Gamma, kappa=float(kappa))
    sol = solve_robust(spec.market, spec.profile, uset)
    psi = sol.psi if sol.psi is not None else float("nan")
    cells = [
        _fmt(kappa),
        _fmt(psi),
        _fmt(psi / kappa if kappa > 0 else float("nan")),
    ]
    cells += [_fmt(x) for x in sol.pi_star]
    cells += [_fmt(x) for x in sol.mu_star]
    cells += [
        _fmt(sol.value),
        _fmt(sol.ce),
        _fmt(np.linalg.norm(sol.pi_star - limit)),
    ]
    return cells


def cmd_solve(args) -> int:
    spec = load_problem_spec(args.spec, gamma_override=args.gamma)
    solution = solve_robust(spec.market, spec.profile, spec.uncertainty)
    _write_text(args.output, json.dumps(_solution_record(solution), indent=2) + "\n")
    return 0


def cmd_sweep(args) -> int:
    spec = load_problem_spec(args.spec, gamma_override=args.gamma)
    grid = _kappa_grid(args)
    d = spec.market.d
    limit = limit_strategy(spec.uncertainty.Gamma, spec.profile.h)
    header = (
        ["kappa", "psi", "psi_over_kappa"]
        + [f"pi_{i}" for i in range(1, d + 1)]
        + [f"mu_{i}" for i in range(1, d + 1)]
        + ["value", "ce", "dist_to_limit"]
    )
    lines = [",".join(header)]
    for kappa in grid:
        lines.append(",".join(_sweep_row(spec, kappa, limit)))
    _write_text(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_metrics(args) -> int:
    spec = load_problem_spec(args.spec, gamma_override=args.gamma)
    grid = _kappa_grid(args)
    header = ["kappa", "coa", "rdr", "ce_nu_hat", "ce_nu_star", "ce_mustar_star", "ce_mustar_hat"]
    lines = [",".join(header)]
    for kappa in grid:
        uset = UncertaintySet(
            nu=spec.uncertainty.nu, Gamma=spec.uncertainty.Gamma, kappa=float(kappa)
        )
        rep = compute_coa_rdr(spec.market, spec.profile, uset)
        lines.append(
            ",".join(
                _fmt(x)
                for x in (
                    kappa,
                    rep.coa,
                    rep.rdr,
                    rep.ce_nu_hat,
                    rep.ce_nu_star,
                    rep.ce_mustar_star,
                    rep.ce_mustar_hat,
                )
            )
        )
    _write_text(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_verify(args) -> int:
    spec = load_problem_spec(args.spec, gamma_override=args.gamma)
    market, profile, uncertainty = spec.market, spec.profile, spec.uncertainty
    checks: list[tuple[str, bool, str]] = []

    geometry = build_constraint_geometry(market)
    idrep = check_identities(geometry, market)
    checks.append(("algebraic identities", idrep.passed, f"max dev {idrep.max_deviation:.3e}"))

    solution = solve_robust(market, profile, uncertainty)
    if uncertainty.kappa > 0:
        tau = cholesky_factor(uncertainty.Gamma)
        spectral = spectral_decompose(geometry, tau)
        M = tau.T @ geometry.A @ tau
        V, lam = spectral.eigenvectors, spectral.eigenvalues
        recon = float(np.max(np.abs(V @ np.diag(lam) @ V.T - M)))
        checks.append(
            ("spectral reconstruction", recon <= 1e-9 * (1.0 + np.max(np.abs(M))),
             f"max dev {recon:.3e}")
        )
        kern = float(np.linalg.norm(M @ V[:, 0]))
        checks.append(
            ("kernel eigenvector", kern <= 1e-9 * (1.0 + lam[-1]), f"residual {kern:.3e}")
        )
        orth = float(np.max(np.abs(V.T @ V - np.eye(market.d))))
        checks.append(("eigenbasis orthonormality", orth <= 1e-10, f"max dev {orth:.3e}"))

        mu_star, rho_star, psi = worst_case_drift(spectral, geometry, profile, uncertainty)
        bdry = abs(np.linalg.norm(rho_star) - uncertainty.kappa)
        checks.append(
            ("boundary constraint ||rho*|| = kappa", bdry <= 1e-9 * uncertainty.kappa,
             f"|dev| {bdry:.3e}")
        )
        a1 = abs(rho_star @ V[:, 0] + psi)
        checks.append(
            ("v1 coefficient equals -psi", a1 <= 1e-10 * (1.0 + uncertainty.kappa),
             f"|dev| {a1:.3e}")
        )
        try:
            robust_strategy(mu_star, rho_star, psi, spectral, geometry, profile)
            checks.append(("dual strategy representation", True, "both closed forms agree"))
        except InternalConsistencyError as exc:
            checks.append(("dual strategy representation", False, str(exc)))

        if market.d <= 3 or args.force_oracle:
            def g(rho):
                return evaluate_g(rho, spectral, geometry, profile, uncertainty.nu)

            _, g_best = brute_force_worst_case(
                g, market.d, uncertainty.kappa, n_grid=max(args.n_samples, 1000),
                seed=args.seed,
            )
            g_solver = g(rho_star)
            checks.append(
                ("brute-force dual oracle", g_solver <= g_best + 1e-8,
                 f"solver {g_solver:.12g} vs grid {g_best:.12g}")
            )

    saddle = verify_saddle_point(
        market, profile, uncertainty, solution, n_samples=args.n_samples, seed=args.seed
    )
    checks.append(
        ("saddle point inequalities",
         saddle.investor_slack <= saddle.tol and saddle.market_slack <= saddle.tol,
         f"slacks {saddle.investor_slack:.3e} / {saddle.market_slack:.3e}")
    )
    checks.append(
        ("minimax equality at mu*", saddle.minimax_gap <= saddle.gap_tol,
         f"gap {saddle.minimax_gap:.3e}")
    )

    est = mc_estimate_utility(
        market, solution.pi_star, solution.mu_star, profile.gamma,
        n_paths=args.n_paths, seed=args.seed,
    )
    checks.append(
        ("Monte Carlo consistency", est.within(solution.value),
         f"mc {est.mean:.8g} +- {est.stderr:.2g} vs {solution.value:.8g}")
    )

    all_ok = True
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<36} {detail}")
        all_ok &= ok
    return 0 if all_ok else 1


def cmd_example_8asset(args) -> int:
    args.spec = str(bundled_spec_path())
    return cmd_sweep(args)


def _add_grid_flags(p, kappa_min=0.01, kappa_max=2.0, steps=40):
    p.add_argument("--kappa-min", type=float, default=kappa_min)
    p.add_argument("--kappa-max", type=float, default=kappa_max)
    p.add_argument("--kappa-steps", type=int, default=steps)
    p.add_argument("--scale", choices=["linear", "log"], default="linear")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftfolio",
        description=(
            "Robust constrained portfolio choice under ellipsoidal drift "
            "uncertainty: worst-case drift, optimal constant strategy, "
            "asymptotics and robustness metrics."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance, emit a JSON record")
    p.add_argument("spec", help="spec file path, or the name 'example-8asset'")
    p.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    p.add_argument("--gamma", type=float, default=None, help="override profile gamma")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve over a kappa grid, emit CSV")
    p.add_argument("spec")
    _add_grid_flags(p)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("metrics", help="COA/RDR over a kappa grid, emit CSV")
    p.add_argument("spec")
    _add_grid_flags(p)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("verify", help="run the built-in verification suite")
    p.add_argument("spec")
    p.add_argument("--n-samples", type=int, default=10_000)
    p.add_argument("--n-paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--force-oracle", action="store_true",
                   help="run the brute-force dual oracle even for d > 3")
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("example-8asset", help="kappa sweep on the bundled 8-asset market")
    _add_grid_flags(p, kappa_min=0.01, kappa_max=0.5, steps=50)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(func=cmd_example_8asset)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except DriftfolioError as exc:  # safety net for anything uncategorized
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
