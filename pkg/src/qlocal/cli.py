"""Command-line front end.

Exit codes: 0 success (inequality violations are results, not errors),
2 input error, 3 non-commuting wings, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import re
import sys
from datetime import datetime, timezone

from . import __version__
from .correlations import behavior_from_scenario, check_no_signaling, correlation_point, quadruple
from .errors import QlocalError, ValidationError
from .files import ReportDocument, bundled_scenarios, load_scenario, parse_state, read_scenario_text
from .inequalities import (
    CIRELSON_BOUND,
    all_reports,
    chsh_value,
    lhv_membership,
    phi_sweep,
)
from .models import (
    RNG_ALGORITHM,
    AxisConfiguration,
    nonlocal_protocol_quadruple,
    pr_behavior,
    pr_quadruple,
    pr_sample,
    pr_table,
)

DEFAULT_SEED = 1
SEED_ENV = "QLOCAL_SEED"
DEFAULT_CIRCLE_BUDGET = 4000
DEFAULT_OPT_BUDGET = 20000


def resolve_seed(seed: int | None) -> int:
    """Explicit flag, else ``$QLOCAL_SEED``, else :data:`DEFAULT_SEED`."""
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise ValidationError(f"must be an integer, got {env!r}", SEED_ENV) from None


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.replace(microsecond=0).isoformat()


def _metadata(seed: int | None = None, **extra) -> dict:
    meta = {"tool": "qlocal", "version": __version__, "timestamp": _timestamp(), "seed": seed}
    meta.update(extra)
    return meta


_ANGLE_RE = re.compile(r"^\s*(?P<sign>[-+]?)\s*(?:(?P<num>\d+(?:\.\d*)?)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$")


def parse_angle(text: str) -> float:
    """Parse ``0.785``, ``pi/4``, ``3pi/4`` or ``-2*pi/3``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE_RE.match(text)
    if not m:
        raise ValidationError(f"cannot parse angle {text!r}")
    value = math.pi * float(m["num"] or 1) / float(m["den"] or 1)
    return -value if m["sign"] == "-" else value


# --- commands ---------------------------------------------------------------


def cmd_eval(scenario_path: str) -> ReportDocument:
    scenario = load_scenario(scenario_path)
    q = quadruple(scenario)
    table = behavior_from_scenario(scenario)
    ns = check_no_signaling(table)
    lhv = lhv_membership(q)
    return ReportDocument(
        command="eval",
        quadruple=q,
        point=correlation_point(q),
        reports=all_reports(q),
        no_signaling=ns,
        details={
            "scenario": scenario_path,
            "chsh": chsh_value(q),
            "embedding": scenario.embedding,
            "behavior": table.to_dict(),
            "lhv": {"member": lhv.member, "weights": list(lhv.weights) if lhv.weights else None,
                    "violated": lhv.violated},
        },
        metadata=_metadata(),
    )


def _csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_sweep(scenario_path: str, steps: int = 360) -> str:
    scenario = load_scenario(scenario_path)
    point = correlation_point(quadruple(scenario))
    sweep = phi_sweep(point, steps)
    return _csv(["phi", "value", "bound"], [[repr(s.phi), repr(s.value), repr(s.bound)] for s in sweep.samples])


def cmd_circle(steps: int = 8, budget: int = DEFAULT_CIRCLE_BUDGET, seed: int | None = None) -> str:
    """Optimised circle points plus the corners of the axis-aligned and slanted squares."""
    from .optimize import trace_circle

    seed = resolve_seed(seed)
    rows = []
    for cp in trace_circle(steps, budget, seed):
        rows.append(["circle", repr(cp.phi), repr(cp.point.x), repr(cp.point.y), repr(cp.radius),
                     "true" if cp.converged else "false"])
    for x, y in ((2, 2), (-2, 2), (-2, -2), (2, -2)):
        rows.append(["axis_square", "", repr(float(x)), repr(float(y)), repr(math.hypot(x, y)), ""])
    for x, y in ((CIRELSON_BOUND, 0.0), (0.0, CIRELSON_BOUND), (-CIRELSON_BOUND, 0.0), (0.0, -CIRELSON_BOUND)):
        rows.append(["slanted_square", "", repr(x), repr(y), repr(math.hypot(x, y)), ""])
    return _csv(["series", "phi", "x", "y", "radius", "converged"], rows)


def cmd_prbox(axes: AxisConfiguration | None = None) -> ReportDocument:
    axes = axes or AxisConfiguration.canonical()
    q = pr_quadruple(axes)
    table = pr_table(axes)
    return ReportDocument(
        command="prbox",
        quadruple=q,
        point=correlation_point(q),
        reports=all_reports(q),
        no_signaling=check_no_signaling(table),
        details={
            "axes": {"alpha_prime": axes.alpha_prime, "beta": axes.beta, "alpha": axes.alpha,
                     "beta_prime": axes.beta_prime},
            "chsh": chsh_value(q),
            "behavior": table.to_dict(),
        },
        metadata=_metadata(),
    )


def cmd_prbox_sample(theta: float, count: int, seed: int | None = None) -> ReportDocument:
    seed = resolve_seed(seed)
    s = pr_sample(theta, count, seed)
    exact = pr_behavior(theta)
    freq = {"++": s.row.pp, "+-": s.row.pm, "-+": s.row.mp, "--": s.row.mm}
    ref = {"++": exact.pp, "+-": exact.pm, "-+": exact.mp, "--": exact.mm}
    return ReportDocument(
        command="prbox-sample",
        details={
            "theta": s.theta,
            "count": s.count,
            "counts": dict(zip(freq, s.counts)),
            "frequencies": freq,
            "exact": ref,
            "max_deviation": max(abs(freq[k] - ref[k]) for k in freq),
        },
        metadata=_metadata(seed, rng_algorithm=RNG_ALGORITHM),
    )


def cmd_protocol() -> ReportDocument:
    res = nonlocal_protocol_quadruple()
    q = res.quadruple
    marginals = {
        f"{x}{y}": {"alice_plus": res.behavior.row(x, y).marginal_a(1), "bob_plus": res.behavior.row(x, y).marginal_b(1)}
        for x in (0, 1) for y in (0, 1)
    }
    return ReportDocument(
        command="protocol",
        quadruple=q,
        point=correlation_point(q),
        reports=all_reports(q),
        no_signaling=check_no_signaling(res.behavior),
        details={
            "chsh": chsh_value(q),
            "per_wing_nosignal": res.per_wing_nosignal,
            "invariant_procedure": False,
            "marginals": marginals,
            "behavior": res.behavior.to_dict(),
        },
        metadata=_metadata(),
    )


def _load_state(source: str | None):
    if source is None:
        return None
    if source == "optimize":
        return "optimize"
    import json

    text = read_scenario_text(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", source) from exc
    raw = doc.get("state", doc) if isinstance(doc, dict) else doc
    return parse_state(raw)


def cmd_optimize(target: str = "chsh", phi: float = 0.0, budget: int = DEFAULT_OPT_BUDGET,
                 seed: int | None = None, state: str | None = None) -> ReportDocument:
    from .optimize import maximize_chsh, maximize_rotated

    seed = resolve_seed(seed)
    st = _load_state(state)
    if target == "chsh":
        res = maximize_chsh(st, budget, seed)
    elif target == "rotated":
        res = maximize_rotated(phi, st, budget, seed)
    else:
        raise ValidationError(f"must be 'chsh' or 'rotated', got {target!r}", "--target")
    s = res.best_settings
    return ReportDocument(
        command="optimize",
        quadruple=res.quadruple,
        point=res.point,
        reports=all_reports(res.quadruple),
        details={
            "target": target,
            "phi": phi if target == "rotated" else None,
            "state": state or "singlet",
            "best_value": res.best_value,
            "converged": res.converged,
            "evaluations": res.evaluations,
            "budget": budget,
            "settings": {
                "angles": list(s.angles),
                "bloch": [list(map(float, n)) for n in s.bloch_vectors()],
                "state_params": list(s.state_params) if s.state_params else None,
            },
        },
        metadata=_metadata(seed),
    )


# --- argument parsing -------------------------------------------------------


def _axes(text: str) -> AxisConfiguration:
    parts = [p for p in text.split(",")]
    if len(parts) != 4:
        raise ValidationError("expected four comma-separated angles a',b,a,b'", "--axes")
    ap, b, a, bp = (parse_angle(p) for p in parts)
    return AxisConfiguration(alpha=a, alpha_prime=ap, beta=b, beta_prime=bp)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlocal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qlocal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate all inequalities on a scenario file")
    p.add_argument("scenario", help="path to a scenario file, or a bundled scenario name")
    p.add_argument("-o", "--output")

    p = sub.add_parser("sweep", help="rotated-family values over a grid of phi (CSV)")
    p.add_argument("scenario")
    p.add_argument("--steps", type=int, default=360)
    p.add_argument("-o", "--output")

    p = sub.add_parser("circle", help="trace the circle bound by optimisation (CSV)")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--budget", type=int, default=DEFAULT_CIRCLE_BUDGET, help="evaluations per phi")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")

    p = sub.add_parser("prbox", help="PR-box correlations on four in-plane axes")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--axes", help="a',b,a,b' angles in radians (pi/4 style accepted)")
    g.add_argument("--canonical", action="store_true", help="axes at successive pi/4 separations (default)")
    p.add_argument("-o", "--output")

    p = sub.add_parser("prbox-sample", help="Monte-Carlo sample of one PR-box setting pair")
    p.add_argument("--theta", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")

    p = sub.add_parser("protocol", help="setting-dependent sigma_x protocol on the singlet")
    p.add_argument("-o", "--output")

    p = sub.add_parser("optimize", help="maximise CHSH or the rotated functional over settings")
    p.add_argument("--target", choices=["chsh", "rotated"], default="chsh")
    p.add_argument("--phi", default="0")
    p.add_argument("--budget", type=int, default=DEFAULT_OPT_BUDGET)
    p.add_argument("--seed", type=int)
    p.add_argument("--state", help="state/scenario file, bundled name, or 'optimize' (default: singlet)")
    p.add_argument("-o", "--output")

    sub.add_parser("scenarios", help="list bundled scenario files")
    return parser


def run(args: argparse.Namespace) -> str:
    c = args.command
    if c == "eval":
        return cmd_eval(args.scenario).to_json()
    if c == "sweep":
        return cmd_sweep(args.scenario, args.steps)
    if c == "circle":
        return cmd_circle(args.steps, args.budget, args.seed)
    if c == "prbox":
        return cmd_prbox(_axes(args.axes) if args.axes else None).to_json()
    if c == "prbox-sample":
        return cmd_prbox_sample(parse_angle(args.theta), args.count, args.seed).to_json()
    if c == "protocol":
        return cmd_protocol().to_json()
    if c == "optimize":
        return cmd_optimize(args.target, parse_angle(args.phi), args.budget, args.seed, args.state).to_json()
    if c == "scenarios":
        return "".join(name + "\n" for name in bundled_scenarios())
    raise ValidationError(f"unknown command {c!r}")


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = run(args)
    except QlocalError as exc:
        print(f"qlocal: error: {exc}", file=sys.stderr)
        return exc.exit_code
    target = getattr(args, "output", None)
    if target:
        with open(target, "w", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
