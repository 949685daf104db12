"""Command-line front end: products, powers, rotation bounds, length reports.

Every subcommand prints exact rationals as strings (valuations are in units
of pi); decimal columns are annotations.  Exit status follows one contract:
0 when every checked identity or inequality holds, 2 when a check fails or
input data fails validation, 1 on usage errors.  The environment variable
QH_HOFER_THREADS caps the worker count of the sweep subcommands.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .hofer_lengths import SampledPath, fixed_extremum_check, lengths_blowup_loop
from .novikov import NovikovElement, ParseError, SphereClass, valuation
from .quantum_homology import (
    ManifoldModel,
    ModelError,
    NotInvertibleError,
    load_model,
    model_blowup_cp2,
    model_cpn,
    model_to_dict,
    nov_scale,
    power,
    quantum_product,
    save_model,
)
from .seidel_bounds import (
    MonotoneCaseError,
    growth_table,
    omega_f,
    psi,
    q_element,
    r_tilde_certificate,
    two_sided_bounds,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK = 2


class CheckFailure(Exception):
    """A named inequality or identity did not hold."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for failed
    # checks, so usage problems are remapped to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def worker_count(env=os.environ) -> int:
    raw = env.get("QH_HOFER_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _dec(q) -> str:
    return f"{float(q):.12g}"


def _resolve_model(args) -> ManifoldModel:
    selector = getattr(args, "model", None) or "blowup"
    if selector == "blowup":
        if args.a2 is None:
            raise UsageProblem("--a2 is required for the blow-up model")
        return model_blowup_cp2(args.a2)
    if selector == "cpn":
        if args.n is None:
            raise UsageProblem("--n is required for the projective-space model")
        return model_cpn(args.n)
    if not os.path.exists(selector):
        raise UsageProblem(f"model file not found: {selector}")
    return load_model(selector)


class UsageProblem(Exception):
    pass


# ---------------------------------------------------------------------------
# Algebra subcommands.
# ---------------------------------------------------------------------------


def cmd_product(args) -> int:
    model = _resolve_model(args)
    result = quantum_product(model, model.element(args.x), model.element(args.y))
    text = model.format(result)
    if args.format == "json":
        text = json.dumps({"model": model.name, "product": text}, indent=2)
    _emit(text, args.out)
    return EXIT_OK


def cmd_power(args) -> int:
    model = _resolve_model(args)
    result = power(model, model.element(args.x), args.k)
    text = model.format(result)
    if args.format == "json":
        text = json.dumps({"model": model.name, "k": args.k, "power": text}, indent=2)
    _emit(text, args.out)
    return EXIT_OK


def cmd_invert(args) -> int:
    from .quantum_homology import invert

    model = _resolve_model(args)
    x = model.element(args.x)
    z = invert(model, x, args.floor)
    residual = quantum_product(model, x, z) - model.unit()
    exact = residual.is_zero()
    if not exact:
        top = valuation(residual, model.omega)
        if top >= args.floor:
            raise CheckFailure(
                f"residual reaches area {top}, not below the floor {args.floor}"
            )
    payload = {
        "model": model.name,
        "inverse": model.format(z),
        "exact": exact,
        "floor": str(args.floor),
    }
    if args.format == "json":
        text = json.dumps(payload, indent=2)
    else:
        tag = "exact inverse" if exact else f"inverse truncated at area {args.floor}"
        text = f"{model.format(z)}\n# {tag}"
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Rotation-bound subcommands.
# ---------------------------------------------------------------------------


def cmd_psi(args) -> int:
    element = psi(args.k, args.a2)
    model = model_blowup_cp2(args.a2)
    # Independent composition: scale Q^k by the delta exponential afterwards.
    shift = SphereClass(
        (-2 * element.delta * args.k, element.delta * args.k)
    )
    recomposed = nov_scale(
        power(model, q_element(model), args.k), NovikovElement.exp(shift)
    )
    if recomposed != element.value:
        raise CheckFailure("rotation element disagrees with its recomposition")
    v = valuation(element.value, model.omega)
    if args.format == "json":
        text = json.dumps(
            {
                "k": args.k,
                "a2": str(element.a_squared),
                "delta": str(element.delta),
                "value": model.format(element.value),
                "valuation": str(v),
            },
            indent=2,
        )
    else:
        text = (
            f"{model.format(element.value)}\n"
            f"# delta = {element.delta}, v = {v} (x pi)"
        )
    _emit(text, args.out)
    return EXIT_OK


def _bounds_rows(k_max: int, a2: Fraction) -> list:
    workers = worker_count()
    if workers <= 1 or k_max < 4 * workers:
        return two_sided_bounds(k_max, a2)
    model = model_blowup_cp2(a2)
    q = q_element(model)
    from .quantum_homology import exact_inverse

    qi = exact_inverse(model, q)
    edges = [1 + (i * k_max) // workers for i in range(workers)] + [k_max + 1]
    spans = [
        (edges[i], edges[i + 1] - 1)
        for i in range(workers)
        if edges[i + 1] > edges[i]
    ]

    def chunk(span):
        lo, hi = span
        xp = power(model, q, lo - 1)
        xn = power(model, qi, lo - 1)
        rows = []
        for k in range(lo, hi + 1):
            xp = quantum_product(model, xp, q)
            xn = quantum_product(model, xn, qi)
            rows.append((k, valuation(xp, model.omega) + valuation(xn, model.omega)))
        return rows

    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(chunk, spans))
    return sorted(row for part in parts for row in part)


def cmd_bounds(args) -> int:
    a2 = args.a2
    of = omega_f(a2)
    rows = _bounds_rows(args.kmax, a2)
    failures = [k for k, b in rows if k >= 2 and b < of]
    if args.format == "csv":
        lines = ["k,bound,bound_dec,omegaF,omegaF_dec,holds"]
        for k, b in rows:
            lines.append(f"{k},{b},{_dec(b)},{of},{_dec(of)},{k < 2 or b >= of}")
        text = "\n".join(lines)
    elif args.format == "json":
        text = json.dumps(
            {
                "a2": str(a2),
                "omegaF": str(of),
                "rows": [{"k": k, "bound": str(b)} for k, b in rows],
                "all_hold": not failures,
            },
            indent=2,
        )
    else:
        lines = [f"{'k':>4}  {'bound (x pi)':>14}  {'decimal':>12}"]
        for k, b in rows:
            lines.append(f"{k:>4}  {str(b):>14}  {float(b):>12.8f}")
        verdict = "holds" if not failures else f"FAILS at k = {failures[:5]}"
        lines.append(f"# two-sided bound >= omega(F) = {of} for k >= 2: {verdict}")
        text = "\n".join(lines)
    _emit(text, args.out)
    if failures:
        raise CheckFailure(
            f"two-sided bound >= omega(F) fails at k = {failures[0]}"
        )
    return EXIT_OK


def cmd_growth(args) -> int:
    table = growth_table(args.kmax, args.a2)
    s = table.summary
    failures = [r.k for r in table.rows if r.k >= 2 and r.bound < s.omega_f]
    if args.format == "csv":
        text = table.to_csv().rstrip("\n")
    elif args.format == "json":
        text = json.dumps(
            {
                "a2": str(s.a_squared),
                "rows": [
                    {
                        "k": r.k,
                        "vQk": str(r.v_qk),
                        "vQnegk": str(r.v_qnegk),
                        "bound": str(r.bound),
                        "psi_rate": None if r.psi_rate is None else str(r.psi_rate),
                    }
                    for r in table.rows
                ],
                "summary": {
                    "omegaF": str(s.omega_f),
                    "regime_bounded": s.regime_bounded,
                    "qneg_max": str(s.qneg_max),
                    "qneg_argmax": s.qneg_argmax,
                    "qneg_bounded": s.qneg_bounded,
                    "period": s.period,
                    "slope_last_period": (
                        None if s.slope_last_period is None else str(s.slope_last_period)
                    ),
                    "slope_reference": str(s.slope_reference),
                    "psi_rate_min": (
                        None if s.psi_rate_min is None else str(s.psi_rate_min)
                    ),
                    "psi_rate_reference": str(s.psi_rate_reference),
                },
            },
            indent=2,
        )
    else:
        lines = [f"{'k':>4}  {'v(Q^k)':>10}  {'v(Q^-k)':>10}  {'sum':>10}  {'psi/k':>10}"]
        for r in table.rows:
            rate = "-" if r.psi_rate is None else str(r.psi_rate)
            lines.append(
                f"{r.k:>4}  {str(r.v_qk):>10}  {str(r.v_qnegk):>10}  "
                f"{str(r.bound):>10}  {rate:>10}"
            )
        lines.append(
            f"# v(Q^-k) bounded: {s.qneg_bounded} "
            f"(max {s.qneg_max} first at k = {s.qneg_argmax})"
        )
        lines.append(
            f"# slope over last period ({s.period}): {s.slope_last_period}  "
            f"reference omega(F/4 - E/2)/3 = {s.slope_reference}"
        )
        lines.append(
            f"# min psi-rate: {s.psi_rate_min}  "
            f"reference (1-a^2)^2/(12(1+a^2)) = {s.psi_rate_reference}"
        )
        text = "\n".join(lines)
    _emit(text, args.out)
    if failures:
        raise CheckFailure(f"two-sided bound >= omega(F) fails at k = {failures[0]}")
    return EXIT_OK


def cmd_rtilde(args) -> int:
    cert = r_tilde_certificate(args.a2, args.kmax)
    if args.format == "json":
        text = json.dumps(
            {
                "a2": str(cert.a_squared),
                "k_max": cert.k_max,
                "min_bound": str(cert.min_bound),
                "attained_at": cert.attained_at,
                "omegaF": str(cert.omega_f),
                "matches_omegaF": cert.matches_omega_f,
            },
            indent=2,
        )
    else:
        text = (
            f"min over k in [1, {cert.k_max}] of v(Q^k) + v(Q^-k) = "
            f"{cert.min_bound} (x pi), attained at k = {cert.attained_at}\n"
            f"omega(F) = {cert.omega_f} (x pi); matches: {cert.matches_omega_f}"
        )
    _emit(text, args.out)
    if not cert.matches_omega_f:
        raise CheckFailure(
            f"sweep minimum {cert.min_bound} differs from omega(F) = {cert.omega_f}"
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Length subcommands.
# ---------------------------------------------------------------------------


def cmd_lengths(args) -> int:
    lengths = lengths_blowup_loop(args.k, args.a2)
    total_over_pi = lengths.total / math.pi
    if args.k == 2:
        reference = float(1 - args.a2)
    else:
        reference = 1.0
    if args.format == "json":
        text = json.dumps(
            {
                "k": args.k,
                "a2": str(args.a2),
                "L_plus": lengths.l_plus,
                "L_minus": lengths.l_minus,
                "L": lengths.total,
                "L_over_pi": total_over_pi,
                "reference_over_pi": reference,
            },
            indent=2,
        )
    else:
        text = (
            f"L+ = {lengths.l_plus:.12f}  ({lengths.l_plus / math.pi:.12f} x pi)\n"
            f"L- = {lengths.l_minus:.12f}  ({lengths.l_minus / math.pi:.12f} x pi)\n"
            f"L  = {lengths.total:.12f}  ({total_over_pi:.12f} x pi)"
        )
    _emit(text, args.out)
    if lengths.l_plus < 0 or lengths.l_minus < 0:
        raise CheckFailure("one-sided lengths must be nonnegative")
    if abs(total_over_pi - reference) > 1e-12:
        raise CheckFailure(
            f"L/pi = {total_over_pi} differs from the closed form {reference}"
        )
    return EXIT_OK


def cmd_geocheck(args) -> int:
    try:
        path = SampledPath.from_csv(args.path)
    except OSError as exc:
        raise UsageProblem(f"cannot read {args.path}: {exc}") from exc
    except ValueError as exc:
        raise UsageProblem(str(exc)) from exc
    report = fixed_extremum_check(path, window=args.window)
    if args.format == "text":
        text = (
            f"fixed max at each moment: {report.has_fixed_max_each_moment}\n"
            f"fixed min at each moment: {report.has_fixed_min_each_moment}"
        )
    else:
        text = report.to_json()
    _emit(text, args.out)
    if not (report.has_fixed_max_each_moment and report.has_fixed_min_each_moment):
        missing = []
        if not report.has_fixed_max_each_moment:
            missing.append("max")
        if not report.has_fixed_min_each_moment:
            missing.append("min")
        raise CheckFailure(f"no fixed {' and '.join(missing)} on some window")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Model-file subcommands.
# ---------------------------------------------------------------------------


def cmd_model_export(args) -> int:
    model = _resolve_model(args)
    if args.out:
        save_model(model, args.out)
    else:
        print(json.dumps(model_to_dict(model), indent=2))
    return EXIT_OK


def cmd_model_validate(args) -> int:
    if not os.path.exists(args.path):
        raise UsageProblem(f"model file not found: {args.path}")
    try:
        model = load_model(args.path)
    except (ModelError, json.JSONDecodeError) as exc:
        raise CheckFailure(f"invalid model: {exc}") from exc
    print(f"model {model.name!r} is valid: {len(model.basis)} basis classes, "
          f"{len(model.gw)} table entries")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Wiring.
# ---------------------------------------------------------------------------


def _add_model_flags(sub) -> None:
    sub.add_argument(
        "--model",
        default="blowup",
        help="builtin name (blowup, cpn) or a model JSON file path",
    )
    sub.add_argument("--n", type=int, help="complex dimension for the cpn model")
    sub.add_argument("--a2", type=Fraction, help="exceptional area a^2 (rational)")


def _add_common(sub, formats=("text", "json"), default="text") -> None:
    sub.add_argument("--format", choices=formats, default=default)
    sub.add_argument("--out", help="write output to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qhofer", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("product", help="quantum product of two elements")
    _add_model_flags(sub)
    _add_common(sub)
    sub.add_argument("x")
    sub.add_argument("y")
    sub.set_defaults(handler=cmd_product)

    sub = subs.add_parser("power", help="integer quantum power")
    _add_model_flags(sub)
    _add_common(sub)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("x")
    sub.set_defaults(handler=cmd_power)

    sub = subs.add_parser("invert", help="inverse, truncated at a valuation floor")
    _add_model_flags(sub)
    _add_common(sub)
    sub.add_argument("--floor", type=Fraction, default=Fraction(-8))
    sub.add_argument("x")
    sub.set_defaults(handler=cmd_invert)

    sub = subs.add_parser("psi", help="rotation element Psi(k)")
    _add_common(sub)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--a2", type=Fraction, required=True)
    sub.set_defaults(handler=cmd_psi)

    sub = subs.add_parser("bounds", help="two-sided bound sweep over k")
    _add_common(sub, formats=("text", "json", "csv"))
    sub.add_argument("--kmax", type=int, required=True)
    sub.add_argument("--a2", type=Fraction, required=True)
    sub.set_defaults(handler=cmd_bounds)

    sub = subs.add_parser("growth", help="growth table of v(Q^k), v(Q^-k)")
    _add_common(sub, formats=("text", "json", "csv"))
    sub.add_argument("--kmax", type=int, required=True)
    sub.add_argument("--a2", type=Fraction, required=True)
    sub.set_defaults(handler=cmd_growth)

    sub = subs.add_parser("rtilde", help="certified seminorm value from the sweep")
    _add_common(sub)
    sub.add_argument("--kmax", type=int, default=50)
    sub.add_argument("--a2", type=Fraction, required=True)
    sub.set_defaults(handler=cmd_rtilde)

    sub = subs.add_parser("lengths", help="lengths of the k-fold rotation loop")
    _add_common(sub)
    sub.add_argument("--k", type=int, default=2, choices=(1, 2))
    sub.add_argument("--a2", type=Fraction, required=True)
    sub.set_defaults(handler=cmd_lengths)

    sub = subs.add_parser("geocheck", help="fixed-extremum check on a sampled path")
    _add_common(sub, default="json")
    sub.add_argument("--window", type=int, default=2)
    sub.add_argument("path")
    sub.set_defaults(handler=cmd_geocheck)

    sub = subs.add_parser("model-export", help="write a builtin model as JSON")
    _add_model_flags(sub)
    sub.add_argument("--out", help="output file (stdout when omitted)")
    sub.set_defaults(handler=cmd_model_export)

    sub = subs.add_parser("model-validate", help="check a model JSON file")
    sub.add_argument("path")
    sub.set_defaults(handler=cmd_model_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageProblem as exc:
        print(f"qhofer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"qhofer: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckFailure as exc:
        print(f"qhofer: check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (MonotoneCaseError, NotInvertibleError, ModelError) as exc:
        print(f"qhofer: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except ValueError as exc:
        print(f"qhofer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
