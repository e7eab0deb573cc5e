"""Command-line front end.

Every subcommand prints a single JSON document (compact by default,
indented with --pretty) whose arithmetic values are exact decimal strings;
runs with identical arguments are byte-identical.  Pure computations are
cached on disk under --cache-dir (default ./.eiscache) keyed by the
canonical parameter text; `verify-cache` recomputes every entry and checks
the stored payloads byte for byte.

Exit codes: 0 success, 1 parameter/usage error, 2 computation error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile

from .characters import enumerate_chars, parse_char, conductor as char_conductor
from .criteria import (
    aux_char_search,
    full_report,
    ingest_records,
    nonprincipality_verdict,
    selmer_upper_km1,
)
from .errors import ComputationError, EiscongError, ParameterError
from .exact import padic_context
from .hecke1 import depth_scan, sturm_bound
from .lfunc import bernoulli, eta, kummer_check
from .qexp import build_h, eisenstein_qexp
from .characters import primitive_char

CACHE_SCHEMA_VERSION = 1

DEFAULT_S = 6
DEFAULT_SMAX = 3


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

class Cache:
    """Content-addressed JSON cache: one file per (command, parameters) key,
    written atomically (temp file + rename)."""

    def __init__(self, root: str):
        self.root = os.path.join(root, str(CACHE_SCHEMA_VERSION))

    @staticmethod
    def key_text(command: str, params: dict) -> str:
        parts = [command] + [f"{k}={params[k]}" for k in sorted(params)]
        return "|".join(parts)

    def _path(self, key: str) -> str:
        digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
        return os.path.join(self.root, digest + ".json")

    def get(self, key: str):
        path = self._path(key)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                entry = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return None
        if entry.get("key") != key or entry.get("version") != CACHE_SCHEMA_VERSION:
            return None
        return entry.get("payload")

    def put(self, command: str, params: dict, key: str, payload) -> None:
        os.makedirs(self.root, exist_ok=True)
        entry = {"key": key, "version": CACHE_SCHEMA_VERSION,
                 "command": command, "params": params, "payload": payload}
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, separators=(",", ":"))
            os.replace(tmp, self._path(key))
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)

    def entries(self):
        if not os.path.isdir(self.root):
            return
        for name in sorted(os.listdir(self.root)):
            if not name.endswith(".json"):
                continue
            try:
                with open(os.path.join(self.root, name), "r", encoding="utf-8") as fh:
                    yield name, json.load(fh)
            except (OSError, json.JSONDecodeError):
                yield name, None


# ---------------------------------------------------------------------------
# command computations (pure: normalized params dict -> JSON payload)
# ---------------------------------------------------------------------------

def _parse_sigma(text: str) -> list[int]:
    try:
        out = sorted({int(x) for x in text.split(",") if x.strip() != ""})
    except ValueError as exc:
        raise ParameterError(f"bad --sigma value {text!r}") from exc
    if not out:
        raise ParameterError("--sigma must list at least one prime")
    return out


def _compute_bernoulli(params):
    n = int(params["n"])
    return {"n": n, "value": str(bernoulli(n))}


def _compute_eta(params):
    psi = parse_char(params["psi"])
    p = int(params["p"])
    k = int(params["k"])
    sigma = _parse_sigma(params["sigma"])
    s = int(params["s"])
    psi0 = primitive_char(psi)
    ctx = padic_context(p, psi0.order, s)
    value = eta(psi0, k, sigma, ctx)
    out = {"p": p, "k": k, "psi": psi0.canonical_text(), "sigma": sigma}
    out.update(value.as_dict())
    return out


def _compute_chars(params):
    f = int(params["f"])
    parity = None if params["parity"] == "" else int(params["parity"])
    exact = None if params["conductor"] == "" else int(params["conductor"])
    chars = enumerate_chars(f, parity=parity, exact_conductor=exact)
    return {
        "modulus": f,
        "count": len(chars),
        "characters": [
            {"char": c.canonical_text(), "order": c.order, "parity": c.parity,
             "conductor": char_conductor(c)} for c in chars],
    }


def _compute_eisenstein(params):
    l = int(params["l"])
    phi = parse_char(params["phi"])
    prec = int(params["prec"])
    return eisenstein_qexp(l, phi, prec).as_dict()


def _compute_build_h(params):
    p = int(params["p"])
    k = int(params["k"])
    psi = primitive_char(parse_char(params["psi"]))
    ell = int(params["ell"])
    m = int(params["m"])
    sigma = _parse_sigma(params["sigma"])
    s = int(params["s"])
    prec = int(params["prec"])
    from math import lcm
    aux = aux_char_search(p, k, psi, ell, m, s=s)
    if not aux.found:
        raise ComputationError(
            f"no auxiliary character of conductor {ell}^m (m <= {m}) satisfies "
            "the p-unit condition")
    ctx = padic_context(p, lcm(psi.order, aux.char.order), s)
    h, rep = build_h(psi, k, ell, m, aux.char, sigma, ctx, prec)
    return {"aux_char": aux.as_dict(), "report": rep.as_dict(), "h": h.as_dict()}


def _compute_scan(params):
    k = int(params["k"])
    p = int(params["p"])
    sigma = _parse_sigma(params["sigma"])
    s_max = int(params["smax"])
    records, skipped = depth_scan(k, p, sigma, s_max)
    return {
        "k": k, "p": p, "sigma": sigma, "s_max": s_max,
        "sturm_bound": sturm_bound(k, 1),
        "records": [r.as_dict() | {"capped": r.capped} for r in records],
        "skipped": [{"weight": sk.weight, "p": sk.p, "reason": sk.reason}
                    for sk in skipped],
    }


def _compute_selmer(params):
    p = int(params["p"])
    k = int(params["k"])
    sigma = _parse_sigma(params["sigma"])
    f_res = int(params["fres"])
    return selmer_upper_km1(p, k, sigma, f_res).as_dict()


def _compute_aux_char(params):
    p = int(params["p"])
    k = int(params["k"])
    psi = primitive_char(parse_char(params["psi"]))
    ell = int(params["ell"])
    m_max = int(params["mmax"])
    s = int(params["s"])
    return aux_char_search(p, k, psi, ell, m_max, s=s).as_dict()


def _compute_kummer(params):
    return kummer_check(int(params["p"]), int(params["k"]))


def _compute_example37(params):
    return full_report(
        37, 32, parse_char("trivial"), [31, 37],
        s=int(params["s"]), prec=int(params["prec"]),
        records_path=fixture_path("example37.json"),
        s_max=int(params["smax"]))


COMMANDS = {
    "bernoulli": _compute_bernoulli,
    "eta": _compute_eta,
    "chars": _compute_chars,
    "eisenstein": _compute_eisenstein,
    "build-h": _compute_build_h,
    "scan": _compute_scan,
    "selmer": _compute_selmer,
    "aux-char": _compute_aux_char,
    "kummer": _compute_kummer,
    "example37": _compute_example37,
}


def fixture_path(name: str) -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    return os.path.join(here, "fixtures", name)


def run_cached(command: str, params: dict, cache: Cache | None):
    key = Cache.key_text(command, params)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    payload = COMMANDS[command](params)
    if cache is not None:
        cache.put(command, params, key, payload)
    return payload


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="eiscong",
        description="Exact Eisenstein-congruence toolkit: congruence bounds, "
                    "constructive q-expansion congruences, depth scans, Selmer "
                    "bounds, and the non-principality criterion.")
    ap.add_argument("--cache-dir", default="./.eiscache",
                    help="cache directory (default ./.eiscache)")
    ap.add_argument("--no-cache", action="store_true", help="bypass the cache")
    ap.add_argument("--pretty", action="store_true", help="indent the JSON output")
    ap.add_argument("--seed", type=int, default=0,
                    help="seed reserved for randomized subcommands")
    sub = ap.add_subparsers(dest="command")

    def add(name, **kw):
        return sub.add_parser(name, **kw)

    sp = add("bernoulli", help="exact Bernoulli number")
    sp.add_argument("--n", type=int, required=True)

    sp = add("eta", help="congruence-module bound and its valuation")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--psi", default="trivial")
    sp.add_argument("--sigma", required=True)
    sp.add_argument("--s", type=int, default=DEFAULT_S)

    sp = add("chars", help="enumerate Dirichlet characters")
    sp.add_argument("--f", type=int, required=True)
    sp.add_argument("--parity", type=int, choices=(-1, 1))
    sp.add_argument("--conductor", type=int)

    sp = add("eisenstein", help="Eisenstein series q-expansion")
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--phi", default="trivial")
    sp.add_argument("--prec", type=int, default=50)

    sp = add("build-h", help="construct and verify the cuspidal combination H")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--psi", default="trivial")
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--sigma", required=True)
    sp.add_argument("--s", type=int, default=DEFAULT_S)
    sp.add_argument("--prec", type=int, default=100)

    sp = add("scan", help="depth scan of level-1 eigensystems")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--sigma", required=True)
    sp.add_argument("--smax", type=int, default=DEFAULT_SMAX)

    sp = add("selmer", help="Selmer group bounds")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--sigma", required=True)
    sp.add_argument("--fres", type=int, default=1)

    sp = add("aux-char", help="search for a p-unit auxiliary character")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--psi", default="trivial")
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--mmax", type=int, default=1)
    sp.add_argument("--s", type=int, default=DEFAULT_S)

    sp = add("kummer", help="Kummer congruence check")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)

    sp = add("criterion", help="non-principality verdict from eigensystem records")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--psi", default="trivial")
    sp.add_argument("--sigma", required=True)
    sp.add_argument("--records", required=True)
    sp.add_argument("--s", type=int, default=DEFAULT_S)
    sp.add_argument("--e", type=int, default=1)
    sp.add_argument("--fres", type=int, default=1)
    sp.add_argument("--dim-chi-upper", type=int, default=None)
    sp.add_argument("--assume-nontrivial-extension", action="store_true")

    sp = add("report", help="full composite report")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--psi", default="trivial")
    sp.add_argument("--sigma", required=True)
    sp.add_argument("--s", type=int, default=DEFAULT_S)
    sp.add_argument("--prec", type=int, default=40)
    sp.add_argument("--ell", type=int)
    sp.add_argument("--mmax", type=int, default=1)
    sp.add_argument("--records")
    sp.add_argument("--smax", type=int, default=DEFAULT_SMAX)
    sp.add_argument("--assume-nontrivial-extension", action="store_true")

    sp = add("example37", help="preset: the full p=37, k=32, level-31 example")
    sp.add_argument("--s", type=int, default=DEFAULT_S)
    sp.add_argument("--prec", type=int, default=40)
    sp.add_argument("--smax", type=int, default=DEFAULT_SMAX)

    add("verify-cache", help="recompute every cache entry and compare bytes")
    return ap


def _render(payload, pretty: bool) -> str:
    if pretty:
        return json.dumps(payload, indent=2)
    return json.dumps(payload, separators=(",", ":"))


def _criterion_payload(args) -> dict:
    records = ingest_records(args.records)
    psi = primitive_char(parse_char(args.psi))
    sigma = _parse_sigma(args.sigma)
    ctx = padic_context(args.p, psi.order, args.s)
    eta_value = eta(psi, args.k, sigma, ctx)
    dim_chi = args.dim_chi_upper
    hypothesis_source = "explicit"
    if dim_chi is None:
        selmer = selmer_upper_km1(args.p, args.k, sigma, args.fres)
        if selmer.dim_chi_upper == 1 and args.assume_nontrivial_extension:
            dim_chi = 1
            hypothesis_source = "selmer-upper-plus-assertion"
        else:
            dim_chi = selmer.dim_chi_upper
            hypothesis_source = "selmer-upper-only"
    crit = nonprincipality_verdict(eta_value, records, e=args.e, f_res=args.fres,
                                   dim_chi_upper=dim_chi)
    out = {"p": args.p, "k": args.k, "sigma": sigma,
           "dim_chi_upper": dim_chi, "hypothesis_source": hypothesis_source}
    out.update(crit.as_dict())
    return out


def _verify_cache_payload(cache: Cache) -> dict:
    checked = 0
    mismatches = []
    unknown = []
    for name, entry in cache.entries():
        if entry is None or "command" not in entry:
            unknown.append(name)
            continue
        command = entry["command"]
        if command not in COMMANDS:
            unknown.append(name)
            continue
        expected = _render(entry["payload"], False)
        actual = _render(COMMANDS[command](entry["params"]), False)
        checked += 1
        if expected != actual:
            mismatches.append({"file": name, "key": entry.get("key")})
    return {"checked": checked, "mismatches": mismatches,
            "unverifiable": unknown, "ok": not mismatches}


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.command is None:
        ap.print_usage()
        return 1
    cache = None if args.no_cache else Cache(args.cache_dir)
    try:
        if args.command == "bernoulli":
            payload = run_cached("bernoulli", {"n": str(args.n)}, cache)
        elif args.command == "eta":
            payload = run_cached("eta", {
                "p": str(args.p), "k": str(args.k), "psi": args.psi,
                "sigma": args.sigma, "s": str(args.s)}, cache)
        elif args.command == "chars":
            payload = run_cached("chars", {
                "f": str(args.f),
                "parity": "" if args.parity is None else str(args.parity),
                "conductor": "" if args.conductor is None else str(args.conductor)},
                cache)
        elif args.command == "eisenstein":
            payload = run_cached("eisenstein", {
                "l": str(args.l), "phi": args.phi, "prec": str(args.prec)}, cache)
        elif args.command == "build-h":
            payload = run_cached("build-h", {
                "p": str(args.p), "k": str(args.k), "psi": args.psi,
                "ell": str(args.ell), "m": str(args.m), "sigma": args.sigma,
                "s": str(args.s), "prec": str(args.prec)}, cache)
        elif args.command == "scan":
            payload = run_cached("scan", {
                "k": str(args.k), "p": str(args.p), "sigma": args.sigma,
                "smax": str(args.smax)}, cache)
        elif args.command == "selmer":
            payload = run_cached("selmer", {
                "p": str(args.p), "k": str(args.k), "sigma": args.sigma,
                "fres": str(args.fres)}, cache)
        elif args.command == "aux-char":
            payload = run_cached("aux-char", {
                "p": str(args.p), "k": str(args.k), "psi": args.psi,
                "ell": str(args.ell), "mmax": str(args.mmax), "s": str(args.s)},
                cache)
        elif args.command == "kummer":
            payload = run_cached("kummer", {"p": str(args.p), "k": str(args.k)}, cache)
        elif args.command == "criterion":
            payload = _criterion_payload(args)
        elif args.command == "report":
            payload = full_report(
                args.p, args.k, primitive_char(parse_char(args.psi)),
                _parse_sigma(args.sigma), s=args.s, prec=args.prec, ell=args.ell,
                m_max=args.mmax, records_path=args.records,
                assume_nontrivial_extension=args.assume_nontrivial_extension,
                s_max=args.smax)
        elif args.command == "example37":
            payload = run_cached("example37", {
                "s": str(args.s), "prec": str(args.prec), "smax": str(args.smax)},
                cache)
        elif args.command == "verify-cache":
            payload = _verify_cache_payload(cache if cache else Cache(args.cache_dir))
        else:
            ap.print_usage()
            return 1
    except ParameterError as exc:
        print(json.dumps({"error": "parameter", "message": str(exc)}), file=sys.stderr)
        return 1
    except EiscongError as exc:
        print(json.dumps({"error": "computation", "message": str(exc)}), file=sys.stderr)
        return 2
    print(_render(payload, args.pretty))
    return 0


if __name__ == "__main__":
    sys.exit(main())
