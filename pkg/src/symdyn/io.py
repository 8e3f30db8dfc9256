"""JSON file formats (version 1) and atomic output writing."""
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from .dimension import BranchSystem
from .errors import InputError
from .sequences import EventuallyPeriodicSequence
from .sft import Sft, from_forbidden_pairs
from .spectra import Potential, cf_product, cf_sum, locally_constant

FORMAT = 1


def _load(source, what):
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{what} file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path}: line {exc.lineno}: {exc.msg}") from None
    return data


def _check(data, what, allowed, required=()):
    if not isinstance(data, dict):
        raise InputError(f"{what}: expected a JSON object")
    fmt = data.get("format", FORMAT)
    if fmt != FORMAT:
        raise InputError(f"{what}: unsupported format {fmt!r} (expected {FORMAT})")
    extra = set(data) - set(allowed) - {"format"}
    if extra:
        raise InputError(f"{what}: unknown field(s) {sorted(extra)}")
    for key in required:
        if key not in data:
            raise InputError(f"{what}: missing field {key!r}")


def _symbol(x, what):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise InputError(f"{what}: symbols must be integers or strings, got {x!r}")
    return x


def _word(xs, what):
    if not isinstance(xs, list):
        raise InputError(f"{what}: expected a list of symbols")
    return tuple(_symbol(x, what) for x in xs)


def _number(x, what):
    if isinstance(x, bool):
        raise InputError(f"{what}: expected a number, got {x!r}")
    try:
        return Fraction(x) if not isinstance(x, float) else Fraction(str(x))
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"{what}: cannot read {x!r} as a rational or decimal") from None


# -- SFT ----------------------------------------------------------------------

def sft_from_json(data) -> Sft:
    _check(data, "sft", {"alphabet", "transitions", "forbidden_pairs"}, ("alphabet",))
    alphabet = _word(data["alphabet"], "sft.alphabet")
    if "transitions" in data:
        rows = data["transitions"]
        if not isinstance(rows, list) or len(rows) != len(alphabet):
            raise InputError(f"sft.transitions: expected {len(alphabet)} rows")
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != len(alphabet) or any(v not in (0, 1) for v in row):
                raise InputError(f"sft.transitions row {i}: expected {len(alphabet)} entries of 0/1")
        return Sft(alphabet, np.array(rows, dtype=bool))
    pairs = [tuple(_word(p, "sft.forbidden_pairs")) for p in data.get("forbidden_pairs", [])]
    return from_forbidden_pairs(alphabet, pairs)


def sft_to_json(sft: Sft) -> dict:
    return {
        "format": FORMAT,
        "alphabet": list(sft.alphabet),
        "transitions": sft.transitions.astype(int).tolist(),
    }


def load_sft(source) -> Sft:
    return sft_from_json(_load(source, "sft"))


# -- sequences -----------------------------------------------------------------

def sequence_from_json(data) -> EventuallyPeriodicSequence:
    _check(data, "sequence", {"left_period", "core", "right_period", "origin"}, ("left_period",))
    origin = data.get("origin", 0)
    if not isinstance(origin, int) or isinstance(origin, bool):
        raise InputError("sequence.origin: expected an integer")
    right = data.get("right_period")
    return EventuallyPeriodicSequence(
        _word(data["left_period"], "sequence.left_period"),
        _word(data.get("core", []), "sequence.core"),
        None if right is None else _word(right, "sequence.right_period"),
        origin,
    )


def sequence_to_json(seq: EventuallyPeriodicSequence) -> dict:
    return {
        "format": FORMAT,
        "left_period": list(seq.left_period),
        "core": list(seq.core),
        "right_period": list(seq.right_period),
        "origin": seq.origin,
    }


def load_sequence(source) -> EventuallyPeriodicSequence:
    return sequence_from_json(_load(source, "sequence"))


# -- potentials -----------------------------------------------------------------

def potential_from_json(data) -> Potential:
    _check(data, "potential", {"kind", "radius", "table", "default", "digit_cap"}, ("kind",))
    kind = data["kind"]
    if kind == "cf_sum":
        return cf_sum()
    if kind == "cf_product":
        return cf_product(data.get("digit_cap"))
    if kind != "locally_constant":
        raise InputError(f"potential.kind: unknown kind {kind!r}")
    radius = data.get("radius")
    if not isinstance(radius, int) or radius < 0:
        raise InputError("potential.radius: expected a nonnegative integer")
    table = {}
    for i, entry in enumerate(data.get("table", [])):
        if not isinstance(entry, dict) or set(entry) != {"word", "value"}:
            raise InputError(f"potential.table[{i}]: expected {{'word': [...], 'value': ...}}")
        table[_word(entry["word"], f"potential.table[{i}].word")] = _number(entry["value"], f"potential.table[{i}].value")
    return locally_constant(radius, table, _number(data.get("default", 0), "potential.default"))


def potential_to_json(p: Potential) -> dict:
    if not p.is_locally_constant:
        out = {"format": FORMAT, "kind": p.kind}
        if p.digit_cap is not None:
            out["digit_cap"] = p.digit_cap
        return out
    return {
        "format": FORMAT,
        "kind": "locally_constant",
        "radius": p.radius,
        "default": str(p.default),
        "table": [{"word": list(w), "value": str(v)} for w, v in sorted(p.table.items(), key=repr)],
    }


def load_potential(source) -> Potential:
    """A potential file, or the bare names ``cf_sum`` / ``cf_product``."""
    if source in ("cf_sum", "cf_product"):
        return potential_from_json({"kind": source})
    return potential_from_json(_load(source, "potential"))


# -- branch systems ---------------------------------------------------------------

def branch_system_from_json(data, base_dir=None) -> BranchSystem:
    _check(data, "system", {"kind", "branches", "digits", "digit_sft"}, ("kind",))
    kind = data["kind"]
    if kind == "affine":
        specs = []
        for i, b in enumerate(data.get("branches", [])):
            what = f"system.branches[{i}]"
            if not isinstance(b, dict) or set(b) != {"interval", "slope", "offset", "covers"}:
                raise InputError(f"{what}: expected interval, slope, offset, covers")
            iv = b["interval"]
            if not isinstance(iv, list) or len(iv) != 2:
                raise InputError(f"{what}.interval: expected [lo, hi]")
            specs.append((
                tuple(_number(x, f"{what}.interval") for x in iv),
                _number(b["slope"], f"{what}.slope"),
                _number(b["offset"], f"{what}.offset"),
                tuple(b["covers"]),
            ))
        return BranchSystem.affine(specs)
    if kind == "gauss":
        digits = data.get("digits")
        if not isinstance(digits, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in digits):
            raise InputError("system.digits: expected a list of positive integers")
        ref = data.get("digit_sft")
        sft = None
        if isinstance(ref, str):
            path = Path(ref) if base_dir is None or Path(ref).is_absolute() else Path(base_dir) / ref
            sft = load_sft(path)
        elif ref is not None:
            sft = sft_from_json(ref)
        return BranchSystem.gauss(digits, sft)
    raise InputError(f"system.kind: unknown kind {kind!r}")


def load_branch_system(source) -> BranchSystem:
    base = None if isinstance(source, dict) else Path(source).parent
    return branch_system_from_json(_load(source, "system"), base)


# -- matrices -------------------------------------------------------------------------

def load_matrix(source) -> np.ndarray:
    """JSON array of rows, ``{"matrix": rows}``, or whitespace-separated decimal text rows."""
    if isinstance(source, (list, dict)):
        data = source
    else:
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise InputError(f"matrix file {path}: {exc.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            rows = []
            for n, line in enumerate(text.splitlines(), 1):
                if line.strip():
                    try:
                        rows.append([float(x) for x in line.replace(",", " ").split()])
                    except ValueError:
                        raise InputError(f"matrix file {path}: line {n}: not a row of decimals") from None
            data = rows
    if isinstance(data, dict):
        _check(data, "matrix", {"matrix"}, ("matrix",))
        data = data["matrix"]
    try:
        mat = np.array([[float(x) for x in row] for row in data], dtype=float)
    except (TypeError, ValueError):
        raise InputError("matrix: expected rows of numbers") from None
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
        raise InputError(f"matrix: expected a nonempty square matrix, got shape {mat.shape}")
    return mat


# -- output -------------------------------------------------------------------------

def write_atomic(path, text: str):
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def decimal_str(x, digits=40, rounding=None) -> str:
    """Decimal string of an mpf, Fraction or int, rounded to ``digits`` significant digits.

    ``rounding`` is ``"floor"``, ``"ceiling"`` or None (nearest), so enclosure
    endpoints can be printed outward.
    """
    import decimal
    from mpmath import mpf

    if isinstance(x, mpf):
        man, exp = x.man_exp if x != 0 else (0, 0)
        x = Fraction(int(man)) * (Fraction(2) ** int(exp))
    x = Fraction(x)
    mode = {"floor": decimal.ROUND_FLOOR, "ceiling": decimal.ROUND_CEILING, None: decimal.ROUND_HALF_EVEN}[rounding]
    ctx = decimal.Context(prec=digits, rounding=mode)
    d = ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))
    return format(d, "f") if abs(d.adjusted()) < 30 else str(d)
