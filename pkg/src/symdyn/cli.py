"""Command-line entry point: ``symdyn <group> <action> [options]``.

Exit status: 0 on success or a verified-true check, 1 when a check is
verified false, 2 on malformed input.
"""
import argparse
import csv
import io as _stdio
import os
import sys

from . import cf
from .errors import SymdynError
from .io import (
    decimal_str,
    dumps,
    load_branch_system,
    load_matrix,
    load_potential,
    load_sequence,
    load_sft,
    sequence_to_json,
    write_atomic,
)

PRECISION_ENV = "SYMDYN_PRECISION"
DIGITS = 40  # significant digits in printed decimals


def default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return cf.DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError:
        raise SystemExit(f"{PRECISION_ENV} must be an integer, got {raw!r}")
    return bits


def parse_word_arg(text, alphabet):
    """``0,1,1`` or ``011`` (one character per symbol) into alphabet symbols."""
    tokens = [t.strip() for t in text.split(",")] if "," in text else list(text.strip())
    by_name = {str(s): s for s in alphabet}
    try:
        return tuple(by_name[t] for t in tokens)
    except KeyError as exc:
        raise argparse.ArgumentTypeError(f"symbol {exc.args[0]!r} is not in the alphabet {list(by_name)}") from None


class _Fail(Exception):
    def __init__(self, message):
        self.message = message


def _word(args, sft, name="word"):
    try:
        return parse_word_arg(getattr(args, name), sft.alphabet)
    except argparse.ArgumentTypeError as exc:
        raise _Fail(f"--{name}: {exc}")


def _enc_json(enc):
    out = {
        "lo": decimal_str(enc.lo, DIGITS, "floor"),
        "hi": decimal_str(enc.hi, DIGITS, "ceiling"),
    }
    if enc.exact is not None:
        out["exact"] = str(enc.exact)
    return out


# -- commands ------------------------------------------------------------------------
# each returns (payload, exit_code); payload is a dict (JSON) or str (raw text)

def cmd_sft_check(args):
    from .construction import gluing_table
    from .sft import is_mixing, period, transitivity_report

    sft = load_sft(args.sft)
    rep = transitivity_report(sft)
    out = {
        "transitive": rep.transitive,
        "mixing": is_mixing(sft),
        "period": period(sft),
        "essential": list(rep.essential),
        "inessential": list(rep.flagged),
        "diagnostic": rep.diagnostic,
    }
    if rep.transitive and not rep.flagged:
        table = gluing_table(sft)
        out["gluing_table"] = [{"pair": [x, y], "word": list(w)} for (x, y), w in table.words.items()]
    return out, 0 if rep.transitive else 1


def cmd_avoid_build(args):
    from .avoidance import build_avoidance_sft, one_third_core, w_one_third

    sft = load_sft(args.sft)
    a = _word(args, sft)
    forb = one_third_core(a) if args.minimal else w_one_third(a)
    av = build_avoidance_sft(sft, forb)
    out = {
        "forbidden_count": len(w_one_third(a)),
        "forbidden_minimal_count": len(one_third_core(a)),
        "state_length": av.state_length,
        "states": av.n_states,
        "edges": int(av.adjacency.nnz),
        "empty": av.is_empty,
        "transitive": av.transitive,
        "period": av.period,
        "diagnostic": av.diagnostic,
    }
    return out, 1 if av.is_empty else 0


def cmd_avoid_check31(args):
    from .avoidance import check_prop31

    sft = load_sft(args.sft)
    rep = check_prop31(sft, _word(args, sft))
    return rep.to_json(), 0 if rep.condition_holds and rep.transitive else 1


def cmd_avoid_check32(args):
    from .avoidance import check_prop32
    from .towers import build_tower

    base = load_sft(args.sft)
    b = _word(args, base)
    tower = build_tower(base, args.k)
    a = tuple(s for x in b for s in tower.presentation.lift((x,)))
    rep = check_prop32(tower, a)
    ok = rep.tower_transitive and rep.decomposition_holds
    return rep.to_json(), 0 if ok else 1


def cmd_spectrum_enumerate(args):
    from .spectra import enumerate_spectrum

    sft = load_sft(args.sft)
    pot = load_potential(args.potential)
    sample = enumerate_spectrum(sft, pot, args.max_period, args.dedup_tol, args.precision, args.threads)
    rows = sample.distinct() if not args.all_orbits else list(sample.entries)
    if args.format == "json":
        return {"values": [dict(orbit=list(o), period=len(o), **_enc_json(e)) for o, e in rows]}, 0
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["orbit", "period", "value_lo", "value_hi"])
    for orbit, enc in rows:
        w.writerow([" ".join(str(s) for s in orbit), len(orbit),
                    decimal_str(enc.lo, DIGITS, "floor"), decimal_str(enc.hi, DIGITS, "ceiling")])
    return buf.getvalue(), 0


def cmd_spectrum_value(args):
    from .spectra import lagrange_value, markov_value

    pot = load_potential(args.potential)
    seq = load_sequence(args.sequence)
    if args.kind == "markov":
        enc = markov_value(pot, seq, prec=args.precision)
    else:
        enc = lagrange_value(pot, seq, prec=args.precision)
    return dict(kind=args.kind, **_enc_json(enc)), 0


def cmd_construct_ha(args):
    from .construction import gluing_table, h_a

    sft = load_sft(args.sft)
    seq = h_a(sft, gluing_table(sft), _word(args, sft), load_sequence(args.theta))
    return sequence_to_json(seq), 0


def cmd_construct_verify34(args):
    from .construction import gluing_table, verify_prop34

    sft = load_sft(args.sft)
    pot = load_potential(args.potential)
    rep = verify_prop34(sft, gluing_table(sft), _word(args, sft), pot, load_sequence(args.theta), args.k_max)
    out = rep.to_json()
    out["limsup"] = decimal_str(rep.limsup, DIGITS)
    return out, 0 if rep.passed else 1


def cmd_dim_estimate(args):
    from .dimension import dimension_enclosure, validate_regular

    system = load_branch_system(args.system)
    rep = validate_regular(system)
    if not rep.ok:
        return {"regular": False, "diagnostics": list(rep.diagnostics)}, 1
    enc = dimension_enclosure(system, args.depth)
    return {
        "lo": decimal_str(enc.lo, 17, "floor"),
        "hi": decimal_str(enc.hi, 17, "ceiling"),
        "depth": enc.depth,
        "residual": decimal_str(enc.residual, 17, "ceiling"),
    }, 0


def cmd_linearize_analyze(args):
    from .linearization import analyze, l_r_membership

    T = load_matrix(args.matrix)
    rep = analyze(T, args.tol)
    out = rep.to_json()
    code = 0
    if args.regularity is not None:
        m = l_r_membership(T, args.regularity, args.tol)
        out["membership"] = {"condition1": m.condition1, "condition2": m.condition2, "member": m.member,
                             "r": m.r, "r_p": m.r_p}
        code = 0 if m.member else 1
    return out, code


def cmd_linearize_resonance(args):
    from .linearization import resonance_free

    rep = resonance_free(load_matrix(args.matrix), args.order, args.tol)
    out = {
        "free": rep.free,
        "order": rep.order,
        "convention": rep.convention,
        "witnesses": [{"eigenvalue": [repr(z.real), repr(z.imag)], "l": list(l)} for z, l in rep.witnesses],
    }
    return out, 0 if rep.free else 1


# -- parser ----------------------------------------------------------------------------

def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", "-o", help="output file (default: stdout); written atomically")
    common.add_argument("--precision", type=_positive, default=None,
                        help=f"working precision in bits (default: ${PRECISION_ENV} or {cf.DEFAULT_PRECISION})")
    common.add_argument("--threads", type=_positive, default=1, help="worker processes for enumeration (default: 1)")

    p = argparse.ArgumentParser(prog="symdyn", description="Computational symbolic dynamics toolkit.")
    groups = p.add_subparsers(dest="group", required=True)

    def action(group, name, fn, help_text):
        sp = group.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(fn=fn)
        return sp

    g = groups.add_parser("sft", help="subshifts of finite type").add_subparsers(dest="action", required=True)
    sp = action(g, "check", cmd_sft_check, "transitivity, mixing and gluing table")
    sp.add_argument("--sft", required=True)

    g = groups.add_parser("avoid", help="word-avoidance subshifts").add_subparsers(dest="action", required=True)
    sp = action(g, "build", cmd_avoid_build, "build the subshift avoiding the one-third factors of a word")
    sp.add_argument("--sft", required=True)
    sp.add_argument("--word", required=True)
    sp.add_argument("--minimal", action="store_true", help="forbid only the minimal factors (same subshift)")
    sp = action(g, "check31", cmd_avoid_check31, "connector-count condition vs actual transitivity")
    sp.add_argument("--sft", required=True)
    sp.add_argument("--word", required=True)
    sp = action(g, "check32", cmd_avoid_check32, "tower version, word given in the base alphabet")
    sp.add_argument("--sft", required=True, help="base SFT")
    sp.add_argument("--k", type=_positive, required=True, help="tower height")
    sp.add_argument("--word", required=True)

    g = groups.add_parser("spectrum", help="Lagrange and Markov values").add_subparsers(dest="action", required=True)
    sp = action(g, "enumerate", cmd_spectrum_enumerate, "values of periodic orbits up to a period")
    sp.add_argument("--sft", required=True)
    sp.add_argument("--potential", required=True, help="potential file, or cf_sum / cf_product")
    sp.add_argument("--max-period", type=_positive, required=True)
    sp.add_argument("--dedup-tol", type=float, default=1e-12)
    sp.add_argument("--all-orbits", action="store_true", help="one row per orbit instead of per distinct value")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp = action(g, "value", cmd_spectrum_value, "value of one eventually periodic sequence")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--sequence", required=True)
    sp.add_argument("--kind", choices=("markov", "lagrange"), default="markov")

    g = groups.add_parser("construct", help="word insertion and block sequences").add_subparsers(dest="action", required=True)
    sp = action(g, "ha", cmd_construct_ha, "insert a word at the centre of a sequence")
    sp.add_argument("--sft", required=True)
    sp.add_argument("--word", required=True)
    sp.add_argument("--theta", required=True)
    sp = action(g, "verify34", cmd_construct_verify34, "limsup mechanism on the block sequence")
    sp.add_argument("--sft", required=True)
    sp.add_argument("--word", required=True)
    sp.add_argument("--theta", required=True)
    sp.add_argument("--potential", required=True)
    sp.add_argument("--k-max", type=_positive, default=50)

    g = groups.add_parser("dim", help="Cantor set dimension").add_subparsers(dest="action", required=True)
    sp = action(g, "estimate", cmd_dim_estimate, "certified dimension bracket")
    sp.add_argument("--system", required=True)
    sp.add_argument("--depth", type=_positive, default=8)

    g = groups.add_parser("linearize", help="hyperbolic matrix checks").add_subparsers(dest="action", required=True)
    sp = action(g, "analyze", cmd_linearize_analyze, "spectral spreading, smoothness budget, r_p")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--regularity", type=_positive, default=None, help="also test membership for this regularity")
    sp = action(g, "resonance", cmd_linearize_resonance, "search for resonances up to an order")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision is None:
        args.precision = default_precision()
    try:
        with cf.precision(args.precision):
            payload, code = args.fn(args)
    except _Fail as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return 2
    except SymdynError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = payload if isinstance(payload, str) else dumps(payload)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
