"""Command line: ``ncehrenfest {derive,verify,evolve,limits}``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .context import CONVENTIONS
from .matrix_rep import MatrixError
from .textio import render
from .workflows import derive, discrepancy_reports, evolution_report, limit_checks, verify

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
TARGETS = ("hamiltonian", "position-rate", "momentum-rate")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="DIR", default="ncehrenfest-output",
                        help="output directory (default: %(default)s)")
    common.add_argument("--convention", choices=sorted(CONVENTIONS),
                        help="NC normalization convention (overrides the config)")
    common.add_argument("--order", type=int, metavar="N",
                        help="star-product expansion order (overrides the config)")
    common.add_argument("--json", action="store_true", help="print the JSON report to stdout")

    parser = argparse.ArgumentParser(
        prog="ncehrenfest",
        description="Derive and verify Heisenberg rates of the noncommutative Dirac Hamiltonian.")
    sub = parser.add_subparsers(dest="command", required=True)
    d = sub.add_parser("derive", parents=[common], help="print a derivation with its audit")
    d.add_argument("target", choices=TARGETS)
    sub.add_parser("verify", parents=[common], help="run every consistency check")
    sub.add_parser("evolve", parents=[common], help="evolve a packet and check Ehrenfest residuals")
    sub.add_parser("limits", parents=[common], help="check the commutative limits")
    return parser


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_derive(cfg: RunConfig, target: str, out: Path, as_json: bool) -> int:
    d = derive(cfg)
    reports = discrepancy_reports(d)
    stem = target.replace("-", "_")
    if target == "hamiltonian":
        b = d.bundle
        plain = [f"H_nc = {render(b.h_nc)}", "", "explicit:", f"  {render(b.explicit())}", "",
                 "pieces:"]
        latex = [r"H_{nc} = " + render(b.explicit(), "latex")]
        for name, piece in b.pieces.items():
            plain.append(f"  {name}: {render(piece)}")
            plain.append(f"    provenance: {b.provenance[name]}")
            latex.append(rf"\text{{{name}}}: " + render(b.explicit(name), "latex"))
        report = reports["deformed_hamiltonian"]
        payload = b.to_dict()
        text = "\n".join(plain) + "\n"
    else:
        r = d.position if target == "position-rate" else d.momentum
        report = reports["position_rate" if target == "position-rate" else "deformed_lorentz_force"]
        payload = r.to_dict()
        text = r.to_text()
        latex = [rf"\dot{{{r.observable}}}_{k} = " + render(c, "latex")
                 for k, c in enumerate(r.components, start=1)]
    payload["discrepancies"] = report.to_dict()
    text += "\n" + report.to_text()
    _write(out, f"{stem}.txt", text)
    _write(out, f"{stem}.tex", "\n".join(latex) + "\n")
    _write(out, f"{stem}.json", _dump(payload))
    print(_dump(payload) if as_json else text, end="")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path, as_json: bool) -> int:
    rep = verify(cfg)
    payload = rep.to_dict()
    _write(out, "verify.json", _dump(payload))
    _write(out, "audit.csv", rep.audit.to_csv())
    if as_json:
        print(_dump(payload), end="")
    else:
        counts = {s: sum(c.status == s for c in rep.checks) for s in ("pass", "fail", "skip")}
        print(f"{len(rep.checks)} checks: {counts['pass']} pass, {counts['fail']} fail, "
              f"{counts['skip']} skipped")
        for c in rep.failures():
            extra = f" residual {c.residual:.3e} > {c.tolerance:.0e}" if c.residual is not None else ""
            print(f"FAIL [{c.category}] {c.identity}{extra} {c.detail}".rstrip())
        print(f"{len(rep.findings())} findings against printed coefficients:")
        for f in rep.findings():
            print(f"  {f}")
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_evolve(cfg: RunConfig, out: Path, as_json: bool) -> int:
    rep = evolution_report(cfg)
    payload = rep.to_dict()
    _write(out, "trajectory.csv", rep.trajectory.to_csv())
    _write(out, "ehrenfest.json", _dump(payload))
    if as_json:
        print(_dump(payload), end="")
    else:
        for r in rep.records:
            flag = "pass" if r["pass"] else "FAIL"
            print(f"{flag}  {r['identity']}: {r['residual']:.6g} (tolerance {r['tolerance']})")
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_limits(cfg: RunConfig, out: Path, as_json: bool) -> int:
    checks = limit_checks(derive(cfg))
    payload = {"pass": all(c.passed for c in checks), "limits": [c.to_dict() for c in checks]}
    _write(out, "limits.json", _dump(payload))
    if as_json:
        print(_dump(payload), end="")
    else:
        for c in checks:
            print(f"{'pass' if c.passed else 'FAIL'}  {c.name}")
            if not c.passed:
                for k, delta in enumerate(c.delta, start=1):
                    print(f"    delta[{k}] = {render(delta)}")
    return EXIT_OK if payload["pass"] else EXIT_CHECK


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.convention, args.order)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    try:
        if args.command == "derive":
            return cmd_derive(cfg, args.target, out, args.json)
        if args.command == "verify":
            return cmd_verify(cfg, out, args.json)
        if args.command == "evolve":
            return cmd_evolve(cfg, out, args.json)
        return cmd_limits(cfg, out, args.json)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MatrixError, ValueError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
