"""Command-line front end.

Every command prints one JSON document (sorted keys, so identical runs give
identical bytes).  Exit codes: 0 success, 1 usage or input error, 2 when the
mathematics refuses (pole, irregular cusp, character problem, truncation).
"""

import argparse
import hashlib
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bf_pairing import CharacterError, bf_pair, octagonal_setup, orthogonality_report
from .exact_arith import ConductorError, to_string
from .mock_eichler import MockSpec, PoleError, holo_part_at_cusp, xi_check
from .modular_group import CongruenceGroup, SL2Matrix, cusp_to_matrix, decompose_st, word_length_bound
from .qseries import TruncationError
from .theta_forms import ShiftedLattice, ThetaSource, UnaryThetaSpec, polygonal_to_lattice, theta_expansion_infty

CACHE_ENV = "BFPAIRING_CACHE_DIR"


class UsageError(Exception):
    pass


class MathRejection(Exception):
    pass


# --- cache ------------------------------------------------------------------------


class ExpansionCache:
    """One JSON file per expansion, named by the hash of its request."""

    def __init__(self, root):
        self.root = Path(root) if root else None

    def _path(self, key):
        h = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()
        return self.root / h[:2] / f"{h}.json"

    def get(self, key):
        if self.root is None:
            return None
        p = self._path(key)
        if not p.exists():
            return None
        with open(p) as fh:
            data = json.load(fh)
        return data["value"] if data.get("key") == key else None

    def put(self, key, value):
        if self.root is None:
            return
        p = self._path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump({"key": key, "value": value}, fh, sort_keys=True)
        os.replace(tmp, p)

    def cached(self, key, compute):
        hit = self.get(key)
        if hit is not None:
            return hit
        value = compute()
        self.put(key, value)
        return value


def _cache_from(args):
    if args.no_cache:
        return ExpansionCache(None)
    root = args.cache_dir or os.environ.get(CACHE_ENV)
    if not root:
        root = Path.home() / ".cache" / "bfpairing"
    return ExpansionCache(root)


# --- input parsing -------------------------------------------------------------------


def _rational(s, what="value"):
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"bad {what}: {s!r}") from e


def _cusp(s):
    if s in ("oo", "inf", "infinity"):
        return (1, 0)
    try:
        if "/" in s:
            a, c = s.split("/")
            return int(a), int(c)
        return int(s), 1
    except ValueError as e:
        raise UsageError(f"bad cusp {s!r}; use a/c or oo") from e


def _load_input(path):
    if path is None:
        raise UsageError("this command needs --input (a JSON file, or - for stdin)")
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from e


def parse_form(data):
    """Lattice, polygonal, unary or sum input -> (object with .to_source(), description)."""
    if not isinstance(data, dict):
        raise UsageError("input must be a JSON object")
    if "sum" in data:
        parts = [parse_form(x) for x in data["sum"]]
        if not parts:
            raise UsageError("empty sum")
        return ("sum", parts), {"sum": [d for _, d in parts]}
    if "polygonal" in data:
        p = data["polygonal"]
        try:
            m, a, b, c = (int(p[k]) for k in ("m", "a", "b", "c"))
        except (KeyError, TypeError, ValueError) as e:
            raise UsageError("polygonal needs integer m, a, b, c") from e
        try:
            lat, const, _ = polygonal_to_lattice(m, a, b, c)
        except ValueError as e:
            raise UsageError(str(e)) from e
        return lat, {"polygonal": {"m": m, "a": a, "b": b, "c": c}, "lattice": lat.to_json(), "constant_shift": str(const)}
    if "gram" in data:
        try:
            lat = ShiftedLattice(data["gram"], [_rational(x, "shift") for x in data.get("shift", [])])
        except (TypeError, ValueError) as e:
            raise UsageError(f"bad lattice: {e}") from e
        return lat, {"lattice": lat.to_json()}
    if "unary" in data:
        u = data["unary"]
        try:
            th = UnaryThetaSpec(int(u["h"]), int(u["t"]), int(u["N"]))
        except (KeyError, TypeError, ValueError) as e:
            raise UsageError(f"bad unary theta: {e}") from e
        return th, {"unary": th.to_json()}
    raise UsageError("input needs one of: gram/shift, polygonal, unary, sum")


def to_source(form, scale=1):
    if isinstance(form, tuple) and form[0] == "sum":
        src = None
        for part, _ in form[1]:
            s = to_source(part, scale)
            src = s if src is None else src + s
        return src
    if isinstance(form, ShiftedLattice):
        return form.to_source(scale)
    return form.to_source().rescale(scale)


def _group(args, required=True):
    g0, g1 = getattr(args, "group0", None), getattr(args, "group1", None)
    if g0 is None and g1 is None:
        if required:
            raise UsageError("need --group0/--group1")
        return None
    try:
        return CongruenceGroup(g0 or 1, g1 or 1)
    except ValueError as e:
        raise UsageError(str(e)) from e


# --- commands -----------------------------------------------------------------------


def cmd_theta_expand(args, cache):
    form, desc = parse_form(_load_input(args.input))
    bound = _rational(args.bound, "bound")
    scale = _rational(args.scale, "scale")
    a, c = _cusp(args.cusp)
    key = {"cmd": "theta-expand", "form": desc, "bound": str(bound), "scale": str(scale), "cusp": [a, c]}

    def compute():
        if c == 0 and not isinstance(form, tuple) and scale == 1 and isinstance(form, ShiftedLattice):
            ex = theta_expansion_infty(form, bound)
        else:
            src = to_source(form, scale)
            ex = src.slash_expansion(cusp_to_matrix(a, c), bound)
        return ex.to_json()

    return {"input": desc, "cusp": args.cusp, "scale": str(scale), "expansion": cache.cached(key, compute)}


def _mock_spec(args):
    try:
        if args.preimage:
            return MockSpec.preimage(UnaryThetaSpec(args.h, args.t, args.N), _rational(args.rescale, "rescale"))
        return MockSpec(args.h, args.t, args.N, rescale=_rational(args.rescale, "rescale"))
    except PoleError:
        raise
    except ValueError as e:
        raise UsageError(str(e)) from e


def cmd_mock_expand(args, cache):
    spec = _mock_spec(args)
    bound = _rational(args.bound, "bound")
    a, c = _cusp(args.cusp)
    group = _group(args, required=False)
    g = cusp_to_matrix(a, c)
    width, regular = (1, True) if group is None else group.width_at(g)
    key = {
        "cmd": "mock-expand",
        "spec": [args.h, args.t, args.N, str(spec.rescale), args.preimage],
        "cusp": [a, c],
        "bound": str(bound),
        "width": width,
    }

    def compute():
        he = holo_part_at_cusp(spec, g, bound, width=width, reject_irregular=args.strict, regular=regular)
        return he.to_json()

    return {"spec": spec.label, "preimage": args.preimage, "rescale": str(spec.rescale), "cusp": args.cusp,
            "width": width, "regular": regular, "harmonic": cache.cached(key, compute)}


def cmd_cusps(args, cache):
    group = _group(args)
    cusps = group.cusp_set()
    return {
        "group": group.label(),
        "index": group.index(),
        "psl_index": group.psl_index(),
        "minus_identity": group.contains_minus_identity(),
        "cusp_count": len(cusps),
        "cusps": [cd.to_json() for cd in cusps],
    }


def cmd_decompose(args, cache):
    try:
        g = SL2Matrix(args.a, args.b, args.c, args.d)
    except ValueError as e:
        raise UsageError(str(e)) from e
    w = decompose_st(g)
    if w.matrix() != g:
        raise MathRejection("reconstruction failed")
    return {
        "matrix": list(g),
        "tokens": w.to_json(),
        "sign": w.sign,
        "length": len(w),
        "length_bound": word_length_bound(g),
        "reconstructs": True,
    }


def cmd_pair(args, cache):
    form, desc = parse_form(_load_input(args.input))
    scale = _rational(args.scale, "scale")
    f = to_source(form, scale)
    group = _group(args)
    try:
        theta = UnaryThetaSpec(args.h, args.t, args.N)
    except ValueError as e:
        raise UsageError(str(e)) from e
    rep = bf_pair(f, theta, group, check_characters=not args.skip_character_check, reject_irregular=args.strict)
    out = rep.to_json()
    out["input"] = desc
    out["scale"] = str(scale)
    return out


def cmd_almost_universal(args, cache):
    group = _group(args, required=False)
    try:
        res = orthogonality_report(args.m, args.a, args.b, args.c, group=group, use_filter=not args.no_filter)
    except ValueError as e:
        if isinstance(e, (PoleError, CharacterError, TruncationError)):
            raise
        raise UsageError(str(e)) from e
    out = res.to_json()
    out["form"] = {"m": args.m, "a": args.a, "b": args.b, "c": args.c}
    out["lattice"] = res.lattice.to_json()
    out["filter"] = not args.no_filter
    return out


def cmd_xi_check(args, cache):
    spec = _mock_spec(args)
    taus = [complex(t.replace(" ", "")) for t in (args.tau or ["1j", "0.3333333333333333+1j", "2j"])]
    if any(t.imag <= 0 for t in taus):
        raise UsageError("sample points must lie in the upper half plane")
    err = xi_check(spec, taus, step=args.step)
    return {"spec": spec.label, "preimage": args.preimage, "rescale": str(spec.rescale),
            "samples": [repr(t) for t in taus], "step": args.step, "max_error": float(f"{err:.6e}")}


COMMANDS = {
    "theta-expand": cmd_theta_expand,
    "mock-expand": cmd_mock_expand,
    "cusps": cmd_cusps,
    "decompose": cmd_decompose,
    "pair": cmd_pair,
    "almost-universal": cmd_almost_universal,
    "xi-check": cmd_xi_check,
}


def build_parser():
    p = argparse.ArgumentParser(prog="bfpairing", description="Exact Bruinier-Funke pairings of theta series.")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", help=f"expansion cache (default ${CACHE_ENV} or ~/.cache/bfpairing)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")
    common.add_argument("--json", dest="output", help="same as --output")
    sub = p.add_subparsers(dest="command", required=True)

    def group_flags(sp):
        sp.add_argument("--group0", type=int)
        sp.add_argument("--group1", type=int)

    def mock_flags(sp):
        sp.add_argument("--h", type=int, required=True)
        sp.add_argument("--t", type=int, required=True)
        sp.add_argument("--N", type=int, required=True)
        sp.add_argument("--rescale", default="1")
        sp.add_argument("--preimage", action="store_true", help="use t^-1/2 F(t tau), the true preimage of vartheta_h,t,N")

    sp = sub.add_parser("theta-expand", parents=[common])
    sp.add_argument("--input", "-i")
    sp.add_argument("--bound", default="10")
    sp.add_argument("--scale", default="1")
    sp.add_argument("--cusp", default="oo")

    sp = sub.add_parser("mock-expand", parents=[common])
    mock_flags(sp)
    sp.add_argument("--cusp", default="oo")
    sp.add_argument("--bound", default="4")
    sp.add_argument("--strict", action="store_true", help="reject irregular cusps")
    group_flags(sp)

    sp = sub.add_parser("cusps", parents=[common])
    sp.add_argument("--gamma0", dest="group0", type=int, default=1)
    sp.add_argument("--gamma1", dest="group1", type=int, default=1)

    sp = sub.add_parser("decompose", parents=[common])
    for k in "abcd":
        sp.add_argument(k, type=int)

    sp = sub.add_parser("pair", parents=[common])
    sp.add_argument("--input", "-i")
    sp.add_argument("--scale", default="1")
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--strict", action="store_true", help="reject irregular cusps")
    sp.add_argument("--skip-character-check", action="store_true")
    group_flags(sp)

    sp = sub.add_parser("almost-universal", parents=[common])
    for k in ("m", "a", "b", "c"):
        sp.add_argument(f"--{k}", type=int, required=True)
    sp.add_argument("--no-filter", action="store_true", default=True,
                    help="pair against every candidate (default)")
    sp.add_argument("--filter", dest="no_filter", action="store_false",
                    help="skip candidates whose character does not match")
    group_flags(sp)

    sp = sub.add_parser("xi-check", parents=[common])
    mock_flags(sp)
    sp.add_argument("--tau", action="append")
    sp.add_argument("--step", type=float, default=1e-4)
    return p


def run(argv=None, stdout=None):
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    try:
        out = COMMANDS[args.command](args, _cache_from(args))
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (MathRejection, PoleError, CharacterError, TruncationError, ConductorError, NotImplementedError) as e:
        print(f"rejected: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        # remaining ValueErrors come from the mathematics (e.g. irregular cusps)
        print(f"rejected: {e}", file=sys.stderr)
        return 2
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
