"""Command line front end.

Subcommands: validate, cohomology, verify, degenerate.  Each reads a fan
file (UTF-8 JSON), prints a human-readable report to stdout, or the
machine payload with --json.  The machine payload contains no timing, so
identical input and flags give byte-identical output.

Exit codes: 0 success / all verified, 1 internal error, 2 validation
failure, 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cech import CoverSimplex, verify_exactness, verify_quasi_iso
from .fan import Cone, Fan, FanError, parse_fan_file, primitive_collections
from .semiproj import check_semiprojective, degeneration_exponent
from .twisted import (
    build_twisted,
    default_t_max,
    element_string,
    lg_cohomology,
    log_derivations,
    lsop_check,
    ring_structure,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_MISMATCH = 3

WORKERS_ENV = "TORICLG_WORKERS"


def _frac(x: Fraction) -> str | int:
    x = Fraction(x)
    return int(x) if x.denominator == 1 else str(x)


def _cone_list(c: Cone) -> list[int]:
    return list(c.ray_indices)


@dataclass
class Report:
    command: str
    fan_meta: dict
    params: dict
    payload: dict
    timing_seconds: float

    def machine_dict(self) -> dict:
        # timing deliberately excluded: machine reports are byte-reproducible
        return {"command": self.command, "fan": self.fan_meta,
                "params": self.params, "payload": self.payload}

    def to_json(self) -> str:
        return json.dumps(self.machine_dict(), sort_keys=True, indent=2)

    def human(self) -> str:
        lines = [f"== {self.command} =="]
        meta = self.fan_meta
        lines.append(f"fan: rank {meta['rank']}, {meta['num_rays']} rays, "
                     f"{meta['num_max_cones']} maximal cones")
        if self.params:
            lines.append("params: " + ", ".join(f"{k}={v}" for k, v in sorted(self.params.items())))
        lines.extend(_human_payload(self.command, self.payload))
        lines.append(f"time: {self.timing_seconds:.3f}s")
        return "\n".join(lines)


def _human_payload(command: str, payload: dict) -> list[str]:
    lines: list[str] = []
    if command == "validate":
        lines.append(f"valid: {payload['valid']}")
        lines.append("all cones: " + " ".join("{" + ",".join(map(str, c)) + "}"
                                              for c in payload["all_cones"]))
        pcs = payload["primitive_collections"]
        lines.append("primitive collections: " +
                     (" ".join("{" + ",".join(map(str, p)) + "}" for p in pcs) if pcs else "none"))
        sp = payload["semiprojective"]
        if sp["semiprojective"]:
            lines.append("semi-projective: yes")
            for cone, fun in zip(payload["max_cones"], sp["certificate"]):
                lines.append(f"  slope on {{{','.join(map(str, cone))}}}: {fun}")
        else:
            lines.append(f"semi-projective: no ({sp['reason']})")
    elif command == "cohomology":
        lines.append("dims by total degree: " + " ".join(map(str, payload["dims"])))
        if "ring" in payload:
            ring = payload["ring"]
            lines.append("cohomology basis:")
            for cls in ring["basis"]:
                lines.append(f"  t={cls['degree']} #{cls['index']}: {cls['representative']}")
            lines.append("nonzero products:")
            shown = 0
            for c in ring["products"]:
                if any(Fraction(str(x)) != 0 for x in c["coords"]):
                    lines.append(f"  ({c['left']}) * ({c['right']}) -> {c['coords']}")
                    shown += 1
            if not shown:
                lines.append("  none besides the unit row")
        if "regular_sequence" in payload:
            ls = payload["regular_sequence"]
            lines.append(f"coefficient forms regular: {ls['regular']}; "
                         f"quotient dims {ls['quotient_dims']}")
    elif command == "verify":
        lines.append(f"exactness (m <= {payload['m_max']}): {payload['exactness_ok']}")
        lines.append("dims twisted-complex : " + " ".join(map(str, payload["dims_twisted"])))
        lines.append("dims double-complex  : " + " ".join(map(str, payload["dims_forms_total"])))
        lines.append("dims constant-forms  : " + " ".join(map(str, payload["dims_const_total"])))
        lines.append(f"all pipelines agree: {payload['agree']}")
    elif command == "degenerate":
        lines.append("slope certificate:")
        for cone, fun in zip(payload["max_cones"], payload["certificate"]):
            lines.append(f"  {{{','.join(map(str, cone))}}}: {fun}")
        lines.append(f"reference cone: {{{','.join(map(str, payload['reference_cone']))}}}")
        if payload["relations"]:
            for rel in payload["relations"]:
                lines.append("  " + rel["text"])
        else:
            lines.append("  no relations (all rays generate the reference cone)")
        lines.append(f"presentation check: {'ok' if payload['presentation']['checked'] else 'FAILED'}")
    return lines


def _fan_meta(fan: Fan, path: str) -> dict:
    return {"path": path, "rank": fan.rank, "num_rays": fan.num_rays,
            "num_max_cones": len(fan.max_cones)}


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FanError(f"cannot read {path}: {exc}") from None
    return parse_fan_file(text)


def _parse_index_list(raw: str) -> list[int]:
    try:
        return [int(x) for x in raw.split(",") if x.strip() != ""]
    except ValueError:
        raise FanError(f"expected a comma-separated integer list, got {raw!r}") from None


# -- commands -------------------------------------------------------------


def cmd_validate(args) -> tuple[Report, int]:
    start = time.monotonic()
    fan, poly = _load(args.fan_file)
    sp = check_semiprojective(fan, poly)
    payload = {
        "valid": True,
        "rank": fan.rank,
        "rays": [list(r) for r in fan.rays],
        "max_cones": [_cone_list(c) for c in fan.max_cones],
        "all_cones": [_cone_list(c) for c in fan.all_cones],
        "primitive_collections": [list(p) for p in primitive_collections(fan)],
        "semiprojective": {
            "semiprojective": sp.semiprojective,
            "reason": sp.reason,
            "certificate": [list(f) for f in sp.certificate.functionals] if sp.certificate else None,
            "witnesses": [str(w) for w in sp.witnesses],
        },
    }
    report = Report("validate", _fan_meta(fan, args.fan_file), {}, payload,
                    time.monotonic() - start)
    return report, EXIT_OK


def cmd_cohomology(args) -> tuple[Report, int]:
    start = time.monotonic()
    fan, _ = _load(args.fan_file)
    t_max = args.tmax if args.tmax is not None else default_t_max(fan)
    tc = build_twisted(fan)
    coh = lg_cohomology(tc, t_max)
    payload: dict = {"t_max": t_max, "dims": list(coh.dims)}
    if args.ring:
        ring = ring_structure(tc, t_max)
        basis = [{"degree": t, "index": i,
                  "representative": element_string(ring.representatives[(t, i)])}
                 for (t, i) in ring.basis]
        products = []
        for (ta, ia, tb, ib), coords in sorted(ring.constants.items()):
            products.append({"left": f"t={ta}#{ia}", "right": f"t={tb}#{ib}",
                             "degree": ta + tb,
                             "coords": [_frac(x) for x in coords]})
        payload["ring"] = {"basis": basis, "products": products}
        ls = lsop_check(tc)
        payload["regular_sequence"] = {
            "regular": ls.regular,
            "forms": [str(f) for f in tc.linear_forms],
            "quotient_dims": list(ls.dims),
            "expected_dims": list(ls.expected),
            "max_degree": ls.max_degree,
        }
    report = Report("cohomology", _fan_meta(fan, args.fan_file),
                    {"tmax": t_max, "ring": bool(args.ring)}, payload,
                    time.monotonic() - start)
    return report, EXIT_OK


def _exactness_degree_worker(task: tuple[str, tuple[tuple[int, ...], ...] | None, int, int]) -> dict:
    """Per-degree exactness in a separate process; re-parses the fan file."""
    text, cover_indices, m, m_max = task
    fan, _ = parse_fan_file(text)
    cs = _cover_from_indices(fan, cover_indices)
    rep = verify_exactness(cs, m_max, degrees=[m])
    return {
        "m": m,
        "exact": rep.exact,
        "augmentation": rep.augmentation[m],
        "entries": {p: rep.entries[(m, p)] for (mm, p) in rep.entries if mm == m},
    }


def _cover_from_indices(fan: Fan, indices: tuple[tuple[int, ...], ...] | None) -> CoverSimplex:
    if indices is None:
        return CoverSimplex(fan)
    return CoverSimplex(fan, [fan.cone(ix) for ix in indices])


def cmd_verify(args) -> tuple[Report, int]:
    start = time.monotonic()
    path = args.fan_file
    text = Path(path).read_text(encoding="utf-8")
    fan, _ = parse_fan_file(text)
    m_max = args.mmax if args.mmax is not None else 2 * fan.rank + 4
    t_max = args.tmax if args.tmax is not None else default_t_max(fan)
    cover_indices = None
    if args.cover:
        picks = _parse_index_list(args.cover)
        cones = []
        for i in picks:
            if not 1 <= i <= len(fan.all_cones):
                raise FanError(f"--cover index {i} outside 1..{len(fan.all_cones)}")
            cones.append(fan.all_cones[i - 1])
        cover_indices = tuple(c.ray_indices for c in cones)
    cs = _cover_from_indices(fan, cover_indices)

    workers = int(os.environ.get(WORKERS_ENV, "1") or "1")
    if workers > 1:
        tasks = [(text, cover_indices, m, m_max) for m in range(m_max + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_degree = list(pool.map(_exactness_degree_worker, tasks))
    else:
        per_degree = [_exactness_degree_worker((text, cover_indices, m, m_max))
                      for m in range(m_max + 1)]
    exact_ok = all(d["exact"] for d in per_degree)

    quasi = verify_quasi_iso(cs, t_max)
    agree = exact_ok and quasi.agree
    payload = {
        "m_max": m_max,
        "t_max": t_max,
        "cover": [list(c.ray_indices) for c in cs.cover],
        "exactness_ok": exact_ok,
        "exactness": [
            {"m": d["m"], "exact": d["exact"],
             "augmentation": d["augmentation"],
             "joints": [{"p": p, **vals} for p, vals in sorted(d["entries"].items())]}
            for d in per_degree
        ],
        "dims_twisted": list(quasi.dims_twisted),
        "dims_forms_total": list(quasi.dims_forms_total),
        "dims_const_total": list(quasi.dims_const_total),
        "chain_map_ok": quasi.chain_map_ok,
        "induced_iso_ok": quasi.induced_iso_ok,
        "agree": agree,
    }
    report = Report("verify", _fan_meta(fan, path),
                    {"mmax": m_max, "tmax": t_max, "workers": workers}, payload,
                    time.monotonic() - start)
    return report, EXIT_OK if agree else EXIT_MISMATCH


def cmd_degenerate(args) -> tuple[Report, int]:
    start = time.monotonic()
    fan, poly = _load(args.fan_file)
    sp = check_semiprojective(fan, poly)
    if not sp.semiprojective:
        raise FanError(f"fan is not semi-projective: {sp.reason}")
    cert = sp.certificate
    if args.sigma_m:
        cone = fan.cone(_parse_index_list(args.sigma_m))
        if cone.dim != fan.rank:
            raise FanError(f"--sigma-m cone {cone} is not full-dimensional")
    else:
        cone = fan.max_cones[0]
    relations = []
    for l in range(1, fan.num_rays + 1):
        if l in cone.index_set:
            continue
        rel = degeneration_exponent(fan, cert, cone, l)
        relations.append({
            "ray": l,
            "coefficients": list(rel.coefficients),
            "exponent": rel.exponent,
            "text": rel.as_string(),
        })
    pres = log_derivations(fan, cone)
    payload = {
        "max_cones": [_cone_list(c) for c in fan.max_cones],
        "certificate": [list(f) for f in cert.functionals],
        "reference_cone": _cone_list(cone),
        "relations": relations,
        "presentation": {
            "base": list(pres.base),
            "extra": list(pres.extra),
            "coefficients": [list(c) for c in pres.coefficients],
            "differential_coeffs": [str(f) for f in pres.differential_coeffs],
            "checked": True,
            "checked_degree": pres.checked_degree,
        },
    }
    report = Report("degenerate", _fan_meta(fan, args.fan_file),
                    {"sigma_m": args.sigma_m or ""}, payload,
                    time.monotonic() - start)
    return report, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toriclg",
        description="Exact cohomology cross-checks for smooth toric fans")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="parse and validate a fan file")
    p_val.add_argument("fan_file")
    p_val.add_argument("--json", action="store_true")
    p_val.set_defaults(func=cmd_validate)

    p_coh = sub.add_parser("cohomology", help="twisted-complex cohomology and ring")
    p_coh.add_argument("fan_file")
    p_coh.add_argument("--tmax", type=int, default=None)
    p_coh.add_argument("--ring", action="store_true")
    p_coh.add_argument("--json", action="store_true")
    p_coh.set_defaults(func=cmd_cohomology)

    p_ver = sub.add_parser("verify", help="cross-check all cohomology pipelines")
    p_ver.add_argument("fan_file")
    p_ver.add_argument("--mmax", type=int, default=None)
    p_ver.add_argument("--tmax", type=int, default=None)
    p_ver.add_argument("--cover", type=str, default="",
                       help="comma-separated 1-based indices into the all-cones "
                            "list printed by validate; default: maximal cones")
    p_ver.add_argument("--json", action="store_true")
    p_ver.set_defaults(func=cmd_verify)

    p_deg = sub.add_parser("degenerate", help="slope certificate and degeneration relations")
    p_deg.add_argument("fan_file")
    p_deg.add_argument("--sigma-m", type=str, default="",
                       help="comma-separated ray indices of the reference cone")
    p_deg.add_argument("--json", action="store_true")
    p_deg.set_defaults(func=cmd_degenerate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except FanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    print(report.to_json() if args.json else report.human())
    return code


if __name__ == "__main__":
    sys.exit(main())
