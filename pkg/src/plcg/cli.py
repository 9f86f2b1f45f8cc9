"""Command-line front end.

    plcg validate  MANIFEST
    plcg construct MANIFEST --zeta 1+2^3 [--json-out cert.json]
    plcg report    MANIFEST --mode properties|homomorphism [--zeta1 Z --zeta2 Z]
    plcg corpus    [--out DIR]

Exit codes: 0 success, 1 validation or property failure, 2 unreadable input,
3 degree outside the admissible range.
"""
from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .adams import NotInGamma, normalize_section
from .fusion import representative_data, validate_fusion
from .group import LevelTooLow, Report, validate_presentation
from .io import InputError, Manifest, dumps
from .linking import TransporterLinking, check_mono_epi, validate_linking
from .torus import PAdicUnitApprox

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RANGE = 0, 1, 2, 3

_ZETA_FORM = re.compile(r"^\s*1\s*\+\s*(?:(-?\d+)\s*\*\s*)?(\d+)\s*\^\s*(\d+)\s*$")


def parse_zeta(text: str, p: int, precision: int) -> PAdicUnitApprox:
    """A decimal integer or the form "1+a*p^m" (also "1+p^m")."""
    m = _ZETA_FORM.match(text)
    if m:
        a = int(m.group(1)) if m.group(1) else 1
        base, e = int(m.group(2)), int(m.group(3))
        if base != p:
            raise InputError(f"zeta {text!r}: base {base} is not p = {p}")
        value = 1 + a * base**e
    else:
        try:
            value = int(text)
        except ValueError:
            raise InputError(f"cannot parse zeta {text!r}") from None
    if value % p == 0:
        raise InputError(f"zeta = {value} is not a {p}-adic unit")
    return PAdicUnitApprox(p, precision, value % p**precision)


def _print_report(title: str, rep: Report) -> None:
    print(f"== {title}")
    for line in rep.lines():
        print(f"  {line}")


def _load(args):
    m = Manifest.load(args.manifest)
    G, F, L = m.load_all(args.level)
    prec = args.precision or m.precision or max(G.level, 1)
    return m, G, F, L, int(prec)


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    m, G, F, L, _ = _load(args)
    ok = True
    rep = validate_presentation(G)
    _print_report(f"presentation {G.name}", rep)
    ok &= rep.ok
    if not rep.ok:
        return EXIT_FAIL
    rep = validate_fusion(F)
    _print_report(f"fusion {F.name}", rep)
    ok &= rep.ok
    if L is not None:
        samples = None if G.rank == 0 else 6
        rep = validate_linking(L, samples=samples, seed=args.seed)
        _print_report(f"linking ({L.model})", rep)
        ok &= rep.ok
    return EXIT_OK if ok else EXIT_FAIL


def _pipeline(G, F, L):
    from .operation import compute_kG

    if not isinstance(L, TransporterLinking):
        L = TransporterLinking(F)
    data = representative_data(F)
    sigma = normalize_section(G)
    kg = compute_kG(L, data, sigma)
    return L, data, sigma, kg


def cmd_construct(args) -> int:
    from .operation import build_aG

    m, G, F, L, prec = _load(args)
    if F.model != "conjugation":
        raise InputError("construct needs the fusion system of S (no extra generators)")
    zeta = parse_zeta(args.zeta, G.p, prec)
    L, data, sigma, kg = _pipeline(G, F, L)
    print(f"k_S = {kg.kf.k_S}")
    print(f"k_F = {kg.kf.k_F}")
    print(f"k_G = {kg.k_G}")
    try:
        ag = build_aG(F, zeta, L=L, data=data, sigma=sigma, kg=kg)
    except NotInGamma as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RANGE
    cert = ag.certificate()
    cert["zeta"] = zeta.to_json()
    text = dumps(cert)
    if args.json_out:
        Path(args.json_out).write_text(text)
        print(f"certificate written to {args.json_out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def properties_report(G, F, L, prec: int, seed: int = 0) -> Report:
    """Invariant suite: presentation, fusion, linking, bullets, orders and the functor Psi."""
    from .adams import construct_psi_zeta
    from .fusion import bullet_suite
    from .operation import build_aG, ordering_check, verify_choice_independence, verify_functor

    rep = Report(True)
    rep.merge(validate_presentation(G), "presentation: ")
    rep.merge(validate_fusion(F), "fusion: ")
    if L is not None:
        rep.merge(validate_linking(L, samples=None if G.rank == 0 else 6, seed=seed), "linking: ")
        if G.rank == 0:
            rep.merge(check_mono_epi(L), "linking: ")
    if F.model != "conjugation":
        return rep
    L, data, sigma, kg = _pipeline(G, F, L)
    psi = construct_psi_zeta(G, sigma, PAdicUnitApprox(G.p, prec, (1 + G.p ** max(kg.kf.k_S, 1)) % G.p**prec))
    rep.merge(bullet_suite(F, psi), "bullet: ")
    m = sigma.log_order()
    rep.add("k_G >= k_F >= m", ordering_check(kg, m), f"k_G={kg.k_G}, k_F={kg.kf.k_F}, m={m}")
    zeta = PAdicUnitApprox(G.p, prec, (1 + G.p ** max(kg.k_G, 1)) % G.p**prec)
    ag = build_aG(F, zeta, L=L, data=data, sigma=sigma, kg=kg)
    rep.merge(verify_functor(ag, level=min(G.level, prec), seed=seed), "functor: ")
    rep.merge(verify_choice_independence(ag, level=min(G.level, prec), seed=seed), "functor: ")
    return rep


def cmd_report(args) -> int:
    m, G, F, L, prec = _load(args)
    if args.mode == "properties":
        rep = properties_report(G, F, L, prec, args.seed)
        _print_report(f"properties of {G.name}", rep)
        return EXIT_OK if rep.ok else EXIT_FAIL
    from .operation import verify_homomorphism

    if not (args.zeta1 and args.zeta2):
        raise InputError("homomorphism mode needs --zeta1 and --zeta2")
    z1 = parse_zeta(args.zeta1, G.p, prec)
    z2 = parse_zeta(args.zeta2, G.p, prec)
    L, data, sigma, kg = _pipeline(G, F, L)
    try:
        rep = verify_homomorphism(F, z1, z2, level=min(G.level, prec), seed=args.seed, L=L, data=data, sigma=sigma, kg=kg)
    except NotInGamma as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RANGE
    _print_report(f"homomorphism ({args.zeta1}, {args.zeta2}) on {G.name}", rep)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_corpus(args) -> int:
    from .examples import write_corpus

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in write_corpus(out):
        print(out / name)
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plcg", description="Unstable Adams operations on p-local compact groups.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("manifest", help="manifest JSON naming the group, fusion and linking files")
        sp.add_argument("--level", type=int, default=None, help="working torus level L")
        sp.add_argument("--precision", type=int, default=None, help="p-adic precision of degrees")
        sp.add_argument("--seed", type=int, default=0, help="seed for sampled sweeps")

    sp = sub.add_parser("validate", help="validate the presentation, fusion system and linking system")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("construct", help="build the Adams operation of a given degree and print its certificate")
    common(sp)
    sp.add_argument("--zeta", required=True, help='degree: decimal or "1+a*p^m"')
    sp.add_argument("--json-out", default=None, help="write the certificate here instead of stdout")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("report", help="run a property suite")
    common(sp)
    sp.add_argument("--mode", choices=["properties", "homomorphism"], default="properties")
    sp.add_argument("--zeta1", default=None)
    sp.add_argument("--zeta2", default=None)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("corpus", help="write the example corpus")
    sp.add_argument("--out", default="corpus")
    sp.set_defaults(func=cmd_corpus)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except LevelTooLow as e:
        print(f"error: working level too low: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
