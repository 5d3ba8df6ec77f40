"""Suite orchestration: configuration, batteries and aggregated reports.

A config is a mapping ``{seed, bound, suites: [{name, ...params}]}``; files
may be YAML or JSON.  Each suite turns its parameters into one or more
:class:`VerificationReport` values.  Reports never contain timings, so the
same config and seed give byte-identical JSON.
"""

from __future__ import annotations

import copy
import json
import time
from pathlib import Path

import yaml

from .coring import check_power_idem, check_tower_laws, cosheaf_presentation_check
from .elimination import build_eliminated, verify_elim_identities
from .errors import ConfigError, ResourceBound, SteinlabError
from .nilmod import SplitNilModule, all_binary_cocycles, verify_module_identities
from .report import Check, RunReport, VerificationReport, emit_report
from .rings import HomotopeLevel, Zmod, make_ring
from .rootsys import (certify_all, check_vacuous_row, is_k_small, parse_system,
                      root_spanned_subspaces, table_vacuous_rel)
from .steingrp import (check_relations, check_root_units, collection_battery,
                       make_pinning)
from .xmod import (cosheaf_glue_steinberg, crossed_module_check, gauss_battery,
                   point_action_battery, symbol_battery, unipotent_levi_injectivity)

DEFAULT_BOUND = 2_000_000

SL3 = lambda ring: {"kind": "sl", "n": 3, "ring": ring}

DEFAULT_SUITES = [
    {"name": "rootsys", "systems": ["A3", "A4", "B3", "B4", "C3", "C4", "D4", "BC3", "BC4"],
     "claims": [1, 2, 3, 4, 5]},
    {"name": "table"},
    {"name": "nilmod", "rings": ["Zmod:2", "Zmod:3", "Zmod:4"], "max_rank": 2},
    {"name": "tower", "rings": ["Zmod:4", "Zmod:8", "Zmod:9", "Zmod:12", "Zmod:35"], "max_level": 2},
    {"name": "cosheaf", "instances": [{"ring": "Zmod:35", "s": 1, "t": [5, 7]},
                                      {"ring": "Zmod:12", "s": 2, "t": [3, 5]}],
     "levels": [1, 2]},
    {"name": "power_idem", "rings": ["Zmod:2", "Zmod:3", "Zmod:4"], "max_rank": 2,
     "ks": [1, 2], "levels": [0, 1, 2]},
    {"name": "relations",
     "pinnings": [SL3("Zmod:2"), SL3("Zmod:3"), {"kind": "sl", "n": 4, "ring": "Zmod:2"},
                  {"kind": "gl_block", "k": 3, "d": 2, "ring": "Zmod:2"}],
     "homotope": {"pinning": SL3("Zmod:4"), "s": 2, "levels": [0, 1, 2]}},
    {"name": "collection",
     "pinnings": [SL3("Zmod:2"), SL3("Zmod:3"), {"kind": "sl", "n": 4, "ring": "Zmod:2"},
                  {"kind": "gl_block", "k": 3, "d": 2, "ring": "Zmod:2"}],
     "count": 10000, "max_len": 8},
    {"name": "weyl", "pinnings": [SL3("Zmod:3"), {"kind": "gl_block", "k": 3, "d": 2, "ring": "Zmod:2"}]},
    {"name": "elim", "systems": ["A3", "A4"], "rings": ["Zmod:2", "Zmod:3"]},
    {"name": "gauss", "rings": ["Zmod:2", "Zmod:3", "Zmod:4", "Zmod:5", "Zmod:8", "Zmod:9"],
     "n": 3, "samples": 500, "ext_samples": 500},
    {"name": "crossed_module", "instances": [
        {"ring": "Zmod:4", "s": 2, "level": 1, "mode": "exhaustive"},
        {"ring": "Zmod:9", "s": 3, "level": 1, "mode": "sample", "samples": 1000}]},
    {"name": "symbols", "rings": ["Zmod:5", "Zmod:4"], "n": 3},
    {"name": "glue", "instances": [{"ring": "Zmod:35", "s": 1, "t": [5, 7]},
                                   {"ring": "Zmod:12", "s": 2, "t": [3, 5]}], "level": 1},
    {"name": "point_action", "instances": [
        {"ring": "Zmod:35", "s": 1, "covers": [[5, 7], [10, 14]]},
        {"ring": "Zmod:12", "s": 2, "covers": [[1], [3, 5]]}], "level": 1, "count": 5},
]

GROUPS = {
    "rootsys": ["rootsys", "table"],
    "nilmod": ["nilmod"],
    "coring": ["tower", "cosheaf", "power_idem"],
    "steingrp": ["relations", "collection", "weyl"],
    "elim": ["elim"],
    "xmod": ["gauss", "crossed_module", "symbols", "glue", "point_action"],
}
GROUPS["all"] = [name for names in GROUPS.values() for name in names]

DEFAULT_CONFIG = {"seed": 0, "bound": DEFAULT_BOUND, "suites": DEFAULT_SUITES}


# --- configuration ---------------------------------------------------------

def load_config(path) -> dict:
    """Read a YAML or JSON config file and validate it."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return normalize_config(data)


def normalize_config(data) -> dict:
    """Fill defaults and reject malformed configs.

    Suites may be given as a list of names or of mappings; a name alone
    picks up the default parameters of that suite.
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(data) - {"seed", "bound", "suites"}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    seed = data.get("seed", 0)
    bound = data.get("bound", DEFAULT_BOUND)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    if not isinstance(bound, int) or isinstance(bound, bool) or bound <= 0:
        raise ConfigError("bound must be a positive integer")
    defaults = {s["name"]: s for s in DEFAULT_SUITES}
    suites = []
    for entry in data.get("suites", []) or []:
        if isinstance(entry, str):
            entry = {"name": entry}
        if not isinstance(entry, dict) or entry.get("name") not in SUITES:
            raise ConfigError(f"unknown suite {entry!r}")
        merged = copy.deepcopy(defaults[entry["name"]])
        merged.update(copy.deepcopy(entry))
        suites.append(merged)
    return {"seed": seed, "bound": bound, "suites": suites}


def select(config: dict, group: str, suite: str | None = None) -> dict:
    """Restrict a config to one CLI group (and optionally one suite)."""
    if group not in GROUPS:
        raise ConfigError(f"unknown group {group!r}")
    names = GROUPS[group]
    if suite is not None:
        if suite not in names:
            raise ConfigError(f"suite {suite!r} is not in group {group!r}")
        names = [suite]
    kept = [s for s in config["suites"] if s["name"] in names]
    return {**config, "suites": kept}


# --- suite helpers ---------------------------------------------------------

def _param(params, key, kind=None):
    if key not in params:
        raise ConfigError(f"suite {params['name']!r} needs {key!r}")
    value = params[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"suite {params['name']!r}: {key!r} has the wrong type")
    return value


def _rings(params):
    """``ring`` overrides ``rings`` so CLI flags can narrow a suite to one ring."""
    specs = [params["ring"]] if "ring" in params else _param(params, "rings", list)
    return [make_ring(s) for s in specs]


def _zmod(ring):
    if not isinstance(ring, Zmod):
        raise ConfigError(f"{ring} is not Z/m")
    return ring


def _pinning(spec):
    if not isinstance(spec, dict):
        raise ConfigError(f"bad pinning spec {spec!r}")
    try:
        pin = make_pinning(spec)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad pinning spec {spec!r}") from exc
    if "flip" in spec:
        alpha, beta = spec["flip"]
        try:
            pin = pin.with_sign_flipped(alpha, beta)
        except ValueError as exc:
            raise ConfigError(f"cannot flip sign of {spec['flip']!r}") from exc
    return pin


def _merge(report: VerificationReport, checks, where: dict):
    """Fold ``checks`` into ``report`` by name, keeping the first counterexample."""
    for c in checks:
        existing = next((e for e in report.checks if e.name == c.name), None)
        if existing is None:
            existing = report.add(Check(c.name, "pass", 0))
        if c.status == "skipped":
            if existing.status == "pass" and existing.instances == 0:
                existing.status, existing.reason = "skipped", c.reason
            continue
        if existing.status == "skipped":
            existing.status, existing.reason = "pass", None
        existing.instances += c.instances
        if c.status == "fail" and existing.status != "fail":
            existing.status = "fail"
            existing.counterexample = {**where, "witness": c.counterexample}


# --- suites ---------------------------------------------------------------

def suite_rootsys(params, seed, bound):
    out = []
    claims = tuple(params.get("claims", (1, 2, 3, 4, 5)))
    for name in _param(params, "systems", list):
        phi = parse_system(name)
        report = VerificationReport("rootsys", {"system": name, "claims": list(claims)})
        subspaces = root_spanned_subspaces(phi)
        per_claim = {c: [0, []] for c in claims}
        hyp = {c: 0 for c in claims}
        for V, claim, count, bad in certify_all(phi, claims, subspaces):
            hyp[claim] += 1
            per_claim[claim][0] += count
            per_claim[claim][1].extend(b.to_dict() for b in bad)
        for c in claims:
            n, bad = per_claim[c]
            report.add(Check.from_failures(f"claim{c}", n, bad))
        report.data = {"subspaces": len(subspaces), "subspaces_meeting_hypothesis": {str(c): hyp[c] for c in claims}}
        out.append(report)
    return out


def suite_table(params, seed, bound):
    rows = table_vacuous_rel()
    report = VerificationReport("table", {"rows": len(rows)})
    bad = []
    for i, row in enumerate(rows):
        msgs = check_vacuous_row(row)
        if msgs:
            bad.append({"row": i, "errors": msgs})
    report.add(Check.from_failures("rows_recomputed", len(rows), bad))
    return [report]


def _modules(max_rank):
    for r1 in range(max_rank + 1):
        for r0 in range(max_rank + 1):
            for c in all_binary_cocycles(r1, r0):
                yield SplitNilModule(r1, r0, c)


def suite_nilmod(params, seed, bound):
    out = []
    max_rank = int(params.get("max_rank", 2))
    for ring in _rings(params):
        report = VerificationReport("nilmod", {"ring": ring.to_dict(), "max_rank": max_rank})
        count = 0
        for module in _modules(max_rank):
            count += 1
            if ring.size ** (2 * (module.rank1 + module.rank0)) > bound:
                raise ResourceBound(f"operation tables over {ring} exceed the bound")
            checks = [Check(r.name, "pass" if r.ok else "fail", r.instances, r.counterexample)
                      for r in verify_module_identities(module, ring)]
            _merge(report, checks, {"module": module.to_dict()})
        report.data = {"modules": count}
        out.append(report)
    return out


def suite_tower(params, seed, bound):
    out = []
    max_level = int(params.get("max_level", 2))
    for ring in _rings(params):
        ring = _zmod(ring)
        if ring.m ** 3 > bound:
            raise ResourceBound(f"law sweep over {ring} exceeds the bound")
        report = VerificationReport("tower", {"ring": ring.to_dict(), "max_level": max_level})
        svals = params.get("s", list(range(ring.m)))
        for s in svals:
            _merge(report, check_tower_laws(ring, s, max_level), {"s": s})
        out.append(report)
    return out


def suite_cosheaf(params, seed, bound):
    out = []
    for inst in _param(params, "instances", list):
        ring = make_ring(inst["ring"])
        for m in params.get("levels", [1, 2]):
            out.append(cosheaf_presentation_check(ring, inst["s"], tuple(inst["t"]), m,
                                                  bound=min(bound, 4096), seed=seed))
    return out


def suite_power_idem(params, seed, bound):
    out = []
    max_rank = int(params.get("max_rank", 2))
    ks, levels = params.get("ks", [1, 2]), params.get("levels", [0, 1, 2])
    for ring in _rings(params):
        ring = _zmod(ring)
        if ring.m ** (2 * max_rank + 1) > bound:
            raise ResourceBound(f"truncated level-map sweep over {ring} exceeds the bound")
        report = VerificationReport("power_idem", {"ring": ring.to_dict(), "max_rank": max_rank,
                                                   "ks": ks, "levels": levels})
        for s in range(ring.m):
            for module in _modules(max_rank):
                for k in ks:
                    for n in levels:
                        where = {"s": s, "module": module.to_dict(), "k": k, "n": n}
                        _merge(report, check_power_idem(ring, s, module, k, n), where)
        out.append(report)
    return out


def suite_relations(params, seed, bound):
    out = [check_relations(_pinning(spec)) for spec in _param(params, "pinnings", list)]
    homo = params.get("homotope")
    if homo:
        pin = _pinning(homo["pinning"])
        for n in homo.get("levels", [0, 1, 2]):
            out.append(check_relations(pin, HomotopeLevel(pin.ring, pin.ring.normalize(homo["s"]), n)))
    return out


def suite_collection(params, seed, bound):
    count = int(params.get("count", 10000))
    max_len = int(params.get("max_len", 8))
    return [collection_battery(_pinning(spec), count, seed, max_len)
            for spec in _param(params, "pinnings", list)]


def suite_weyl(params, seed, bound):
    return [check_root_units(_pinning(spec), bound=min(bound, 5000))
            for spec in _param(params, "pinnings", list)]


def suite_elim(params, seed, bound):
    """Every 1-small and 2-small root-spanned ``V``: the strongest battery whose
    hypothesis ``V`` meets."""
    out = []
    for name in _param(params, "systems", list):
        phi = parse_system(name)
        if phi.family != "A":
            raise ConfigError("elimination batteries need a type A system")
        for ring in _rings(params):
            pin = _pinning({"kind": "sl", "n": phi.rank + 1, "ring": ring, **params.get("pinning", {})})
            report = VerificationReport("elim", {"system": name, "ring": ring.to_dict()})
            counts = {"bij": 0, "sur": 0}
            for V in root_spanned_subspaces(pin.phi):
                if is_k_small(pin.phi, V, 2):
                    battery = "bij"
                elif is_k_small(pin.phi, V, 1):
                    battery = "sur"
                else:
                    continue
                counts[battery] += 1
                sub = verify_elim_identities(build_eliminated(pin, V), battery=battery)
                _merge(report, sub.checks, {"V": V.to_dict(), "battery": battery})
            report.data = {"subspaces_2_small": counts["bij"], "subspaces_1_small_only": counts["sur"]}
            out.append(report)
    return out


def suite_gauss(params, seed, bound):
    out = []
    n = int(params.get("n", 3))
    for ring in _rings(params):
        ring = _zmod(ring)
        report = gauss_battery(ring, n, int(params.get("samples", 500)), seed,
                               ext_samples=int(params.get("ext_samples", 500)))
        report.add(unipotent_levi_injectivity(ring, n, bound=bound))
        out.append(report)
    return out


def suite_crossed_module(params, seed, bound):
    out = []
    for inst in _param(params, "instances", list):
        ring = _zmod(make_ring(inst["ring"]))
        n = int(inst.get("n", 3))
        mode = inst.get("mode", "exhaustive")
        if mode == "exhaustive" and ring.m ** (n * n) > bound:
            raise ResourceBound(f"{ring.m}^{n * n} matrices exceed the bound {bound}")
        pin = make_pinning({"kind": "sl", "n": n, "ring": ring})
        out.append(crossed_module_check(pin, inst["s"], int(inst.get("level", 1)), mode,
                                        int(inst.get("samples", 1000)), seed))
    return out


def suite_symbols(params, seed, bound):
    n = int(params.get("n", 3))
    return [symbol_battery(make_pinning({"kind": "sl", "n": n, "ring": ring})) for ring in _rings(params)]


def suite_glue(params, seed, bound):
    level = int(params.get("level", 1))
    return [cosheaf_glue_steinberg(make_ring(inst["ring"]), inst["s"], tuple(inst["t"]), level=level, seed=seed)
            for inst in _param(params, "instances", list)]


def suite_point_action(params, seed, bound):
    level, count = int(params.get("level", 1)), int(params.get("count", 5))
    out = []
    for inst in _param(params, "instances", list):
        covers = [tuple(c) for c in inst["covers"]]
        out.append(point_action_battery(make_ring(inst["ring"]), inst["s"], covers, level=level,
                                        seed=seed, count=count))
    return out


SUITES = {
    "rootsys": suite_rootsys, "table": suite_table, "nilmod": suite_nilmod,
    "tower": suite_tower, "cosheaf": suite_cosheaf, "power_idem": suite_power_idem,
    "relations": suite_relations, "collection": suite_collection, "weyl": suite_weyl,
    "elim": suite_elim, "gauss": suite_gauss, "crossed_module": suite_crossed_module,
    "symbols": suite_symbols, "glue": suite_glue, "point_action": suite_point_action,
}


# --- orchestration ---------------------------------------------------------

def _error_report(name, params, exc):
    report = VerificationReport(name, {"params": {k: v for k, v in params.items() if k != "name"}})
    report.add(Check(name, "fail", 0, counterexample={"error": exc.code, "message": str(exc)}))
    return report


def run_suite(config=None) -> RunReport:
    """Run every selected suite in order and aggregate the reports.

    Library errors raised by a battery become a failing check with the
    error as counterexample; :class:`ResourceBound` is re-raised carrying
    the partial report in ``details["report"]``.
    """
    config = normalize_config(DEFAULT_CONFIG if config is None else config)
    seed, bound = config["seed"], config["bound"]
    run = RunReport()
    for params in config["suites"]:
        fn = SUITES[params["name"]]
        start = time.perf_counter()
        try:
            reports = fn(params, seed, bound)
        except ResourceBound as exc:
            raise ResourceBound(f"suite {params['name']}: {exc}", report=run) from exc
        except ConfigError:
            raise
        except SteinlabError as exc:
            reports = [_error_report(params["name"], params, exc)]
        elapsed = time.perf_counter() - start
        for r in reports:
            r.timing = elapsed / len(reports) if reports else 0.0
            run.suites.append(r)
    return run


__all__ = ["DEFAULT_CONFIG", "GROUPS", "SUITES", "load_config", "normalize_config", "select",
           "run_suite", "emit_report"]
