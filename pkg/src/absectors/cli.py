"""Command-line runner: build a net, pick a potential, write one report per analysis."""

from __future__ import annotations

import argparse
import cmath
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .cocycle import UnitaryCocycle, build_frame, holonomy_rep
from .fieldalg import statistics_choice, statistics_phase, tensor_product, transporter
from .flatpot import (
    FlatPotential,
    direct_edge_sum,
    loop_integral,
    potential_cocycle,
    potential_from_character,
)
from .homotopy import PathError, approximate_curve, base_fundamental_cycles, pi1_presentation
from .poset import build_net, validate_net
from .sectors import analyze, roundtrip, twist_from_potential, twisted_transporter
from .serialize import SchemaError, complex_from_json, cover_from_json, potential_from_json

ANALYSES = ("validate", "pi1", "holonomy", "statistics", "sector", "roundtrip")


class InputError(Exception):
    pass


@dataclass
class Job:
    net: tuple | None = None  # (kind, sizes)
    complex_path: Path | None = None
    cover_path: Path | None = None
    potential: Path | dict | None = None
    character: list | None = None
    analyses: list = field(default_factory=lambda: ["validate"])
    out: Path = Path("reports")
    format: str = "json"
    tolerance: float = 1e-9

    def check(self) -> None:
        if not self.analyses:
            raise InputError("job: analyses: must be nonempty")
        bad = [a for a in self.analyses if a not in ANALYSES]
        if bad:
            raise InputError(f"job: analyses: unknown analysis {bad[0]!r}")
        if self.format not in ("json", "csv"):
            raise InputError(f"job: format: expected json or csv, got {self.format!r}")
        if self.net is None and (self.complex_path is None or self.cover_path is None):
            raise InputError("job: net: give a fixture or both complex and cover files")
        if self.potential is not None and self.character is not None:
            raise InputError("job: potential: give either a potential or a character, not both")
        for name in ("complex_path", "cover_path"):
            p = getattr(self, name)
            if p is not None and not Path(p).is_file():
                raise InputError(f"{p}: file not found")
        if isinstance(self.potential, Path) and not self.potential.is_file():
            raise InputError(f"{self.potential}: file not found")


def parse_net(text: str) -> tuple:
    kind, _, rest = text.partition(":")
    try:
        sizes = tuple(int(x) for x in rest.split(",")) if rest else ()
    except ValueError:
        raise InputError(f"--net: bad sizes in {text!r}") from None
    if kind not in ("line", "circle", "wedge") or not sizes:
        raise InputError(f"--net: expected line:N, circle:N or wedge:N1,N2, got {text!r}")
    return kind, sizes


def _read_json(path: Path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from None


def job_from_json(path: Path) -> Job:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: $: expected an object")
    root = Path(path).parent

    def rel(key):
        v = data.get(key)
        if v is None:
            return None
        if not isinstance(v, str):
            raise InputError(f"{path}: {key}: expected a file path")
        return root / v

    job = Job()
    net = data.get("net")
    if isinstance(net, str):
        job.net = parse_net(net)
    elif isinstance(net, dict):
        try:
            job.net = (str(net["kind"]), tuple(int(x) for x in net["sizes"]))
        except (KeyError, TypeError, ValueError):
            raise InputError(f"{path}: net: expected {{'kind': ..., 'sizes': [...]}}") from None
    elif net is not None:
        raise InputError(f"{path}: net: expected a string or object")
    job.complex_path = rel("complex")
    job.cover_path = rel("cover")
    pot = data.get("potential")
    if isinstance(pot, str):
        job.potential = root / pot
    elif isinstance(pot, dict):
        job.potential = pot
    elif pot is not None:
        raise InputError(f"{path}: potential: expected a file path or a weights object")
    if "character" in data:
        ch = data["character"]
        if not isinstance(ch, list) or not all(isinstance(x, (int, float)) for x in ch):
            raise InputError(f"{path}: character: expected a list of numbers")
        job.character = [float(x) for x in ch]
    if "analyses" in data:
        an = data["analyses"]
        if not isinstance(an, list) or not all(isinstance(x, str) for x in an):
            raise InputError(f"{path}: analyses: expected a list of names")
        job.analyses = list(an)
    if "out" in data:
        job.out = root / str(data["out"])
    job.format = str(data.get("format", "json"))
    tol = data.get("tolerance", 1e-9)
    if not isinstance(tol, (int, float)) or tol <= 0:
        raise InputError(f"{path}: tolerance: expected a positive number")
    job.tolerance = float(tol)
    return job


def _load_net(job: Job):
    if job.net is not None:
        try:
            return build_net(job.net[0], *job.net[1])
        except (ValueError, TypeError) as exc:
            raise InputError(f"net: {exc}") from None
    try:
        base = complex_from_json(_read_json(job.complex_path))
    except SchemaError as exc:
        raise InputError(f"{job.complex_path}: {exc}") from None
    try:
        return cover_from_json(_read_json(job.cover_path), base)
    except SchemaError as exc:
        raise InputError(f"{job.cover_path}: {exc}") from None


def _load_potential(job: Job, P, pres) -> FlatPotential:
    if job.character is not None:
        if len(job.character) != pres.rank:
            raise InputError(f"character: expected {pres.rank} values, got {len(job.character)}")
        return potential_from_character(P, pres, job.character)
    if job.potential is None:
        return FlatPotential.zero(P.base)
    src = job.potential if isinstance(job.potential, dict) else _read_json(job.potential)
    where = "potential" if isinstance(job.potential, dict) else str(job.potential)
    if isinstance(src, dict) and isinstance(src.get("weights"), list) and src["weights"] and all(
        isinstance(x, (int, float)) for x in src["weights"]
    ):
        if len(src["weights"]) != len(P.base.edges):
            raise InputError(f"{where}: weights: expected one number per base edge")
        return FlatPotential(P.base, tuple(src["weights"]))
    try:
        return potential_from_json(src, P.base)
    except SchemaError as exc:
        raise InputError(f"{where}: {exc}") from None


def _clean(x):
    if isinstance(x, float):
        return x + 0.0
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _holonomy_report(P, pres, A: FlatPotential, tol: float) -> dict:
    ahat = potential_cocycle(P, A)
    z = UnitaryCocycle.from_abelian(ahat, sign=-1)
    rep = holonomy_rep(z, pres, tol)
    gens = []
    for k, m in enumerate(rep.free_images()):
        period = loop_integral(ahat, pres.generator_loop(k))
        gens.append({"gen": k, "period": period, "phase": float(cmath.phase(m[0, 0]))})
    loops = []
    for i, cycle in enumerate(base_fundamental_cycles(P.base)):
        try:
            loop = approximate_curve(P, cycle, closed=True)
        except PathError:
            continue
        li = loop_integral(ahat, loop)
        loops.append({
            "loop": f"cycle{i}",
            "curve": list(cycle),
            "loop_integral": li,
            "edge_sum": direct_edge_sum(A, cycle),
            "phase": float(cmath.phase(cmath.exp(-1j * li))),
        })
    return {
        "convention": "holonomy = exp(-i * loop_integral)",
        "generators": gens,
        "loops": loops,
        "topologically_trivial": rep.topologically_trivial,
    }


def _statistics_report(P, A: FlatPotential) -> dict:
    z = twisted_transporter(P, twist_from_potential(potential_cocycle(P, A)))
    zbar = transporter(P, conjugate=True)
    rows = []
    for a in P.ids:
        choice = statistics_choice(P, a)
        if choice is None:
            continue
        eps = statistics_phase(z, a, P, *choice)
        rows.append({"a": a, "o": choice[0], "o1": choice[1], "epsilon": [eps.real, eps.imag]})
    kappa = None
    for sign in (1, -1):
        if rows and all(abs(complex(*r["epsilon"]) - sign) < 1e-9 for r in rows):
            kappa = sign
    conj = [
        tensor_product(transporter(P), zbar, e, P)
        for e in P.comparability_edges
        if any(P.perp(x, e[0]) and P.perp(x, e[1]) for x in P.ids)
    ]
    return {
        "kappa": kappa,
        "pairs": rows,
        "conjugate_tensor_is_one": all(w.is_scalar and w.scalar == 1 for w in conj),
        "conjugate_pairs_checked": len(conj),
    }


def run_job(job: Job) -> int:
    job.check()
    P = _load_net(job)
    out = Path(job.out)
    out.mkdir(parents=True, exist_ok=True)
    tol = job.tolerance
    status = 0
    reports = {}
    wanted = [a for a in ANALYSES if a in job.analyses]
    pres = None
    if any(a != "validate" for a in wanted):
        try:
            pres = pi1_presentation(P)
        except PathError as exc:
            raise InputError(f"net: {exc}") from None
    A = _load_potential(job, P, pres) if pres is not None else None
    for name in wanted:
        if name == "validate":
            rep = validate_net(P)
            reports[name] = {
                "diamonds": len(P),
                "comparable_pairs": len(P.comparability_edges),
                "chains": len(P.chains),
                **rep.to_dict(),
            }
            if not rep.ok:
                status = 1
        elif name == "pi1":
            reports[name] = pres.summary()
        elif name == "holonomy":
            reports[name] = _holonomy_report(P, pres, A, tol)
        elif name == "statistics":
            reports[name] = _statistics_report(P, A)
        elif name == "sector":
            z = twisted_transporter(P, twist_from_potential(potential_cocycle(P, A)))
            reports[name] = analyze(z, P, pres, build_frame(P, pres.base), tol).to_dict()
        elif name == "roundtrip":
            sigma = twist_from_potential(potential_cocycle(P, A))
            rt = roundtrip(P, pres, sigma, build_frame(P, pres.base))
            rt["ok"] = rt["max_loop_error"] <= tol and rt["equivalence_defect"] <= tol
            if not rt["ok"]:
                status = 1
            reports[name] = rt
    for name, payload in reports.items():
        payload = _clean(payload)
        if job.format == "json":
            (out / f"{name}.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        else:
            write_csv(out / f"{name}.csv", payload)
    return status


def _flatten_rows(payload: dict) -> list[dict]:
    rows = []
    for key in sorted(payload):
        val = payload[key]
        if isinstance(val, list) and val and all(isinstance(x, dict) for x in val):
            for entry in val:
                row = {"table": key}
                for k, v in entry.items():
                    row[k] = json.dumps(v) if isinstance(v, (list, dict)) else v
                rows.append(row)
        else:
            rows.append({"table": "summary", "key": key, "value": json.dumps(val) if isinstance(val, (list, dict)) else val})
    return rows


def write_csv(path: Path, payload: dict) -> None:
    rows = _flatten_rows(payload)
    cols = ["table"] + sorted({k for r in rows for k in r} - {"table"})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow(r)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="absectors", description=__doc__)
    ap.add_argument("--job", type=Path, help="job JSON file; other flags are ignored")
    ap.add_argument("--net", help="fixture: line:N, circle:N or wedge:N1,N2")
    ap.add_argument("--complex", type=Path, help="complex.json")
    ap.add_argument("--cover", type=Path, help="cover.json")
    ap.add_argument("--potential", type=Path, help="potential JSON with edge weights")
    ap.add_argument("--character", help="comma-separated periods, one per pi_1 generator")
    ap.add_argument("--analyses", default="validate", help=f"comma-separated subset of {','.join(ANALYSES)}")
    ap.add_argument("--out", type=Path, default=Path("reports"))
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--tolerance", type=float, default=1e-9)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.job is not None:
            job = job_from_json(args.job)
        else:
            character = None
            if args.character:
                try:
                    character = [float(x) for x in args.character.split(",")]
                except ValueError:
                    raise InputError("--character: expected comma-separated numbers") from None
            job = Job(
                net=parse_net(args.net) if args.net else None,
                complex_path=args.complex,
                cover_path=args.cover,
                potential=args.potential,
                character=character,
                analyses=[a for a in args.analyses.split(",") if a],
                out=args.out,
                format=args.format,
                tolerance=args.tolerance,
            )
        return run_job(job)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
