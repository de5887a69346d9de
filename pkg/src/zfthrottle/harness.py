"""Batch theorem verification over exhaustive small-graph corpora.

Every checker computes both sides of its statement through two independent
routes (classifier vs. brute-force solver, search vs. oracle, construction
vs. re-verification) and reports one record per corpus graph.  Reports are
reproducible: identical corpus and parameters give a byte-identical body;
wall time lives only in the summary record.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .canonical import canonical_form
from .catalog import classify_th_eq_n, classify_thplus, contains_Gk_member, is_accelerator
from .engine import Rule, Stalled, min_propagation_floor, propagate_deterministic
from .enumeration import connected_graphs_upto, enumerate_connected
from .errors import CapacityError, UsageError
from .extension import apply_script, characterization_certificate
from .graph6 import emit_graph6, parse_graph6
from .graphs import Graph, bits, contract_edge, induced_subgraph, popcount
from .spectral import SPECTRAL_TIE_TOLERANCE, spectral_radius
from .throttle import (
    extract_certificate_subgraph,
    floor_throttling_via_supergraphs,
    throttling_number,
)


@dataclass
class VerificationReport:
    theorem: str
    corpus: dict
    records: list[dict] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def counterexamples(self) -> list[dict]:
        return [r for r in self.records if r["verdict"] != "pass"]

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def summary(self) -> dict:
        return {
            "theorem": self.theorem,
            "corpus": self.corpus,
            "graphs": len(self.records),
            "failures": len(self.counterexamples),
            "verdict": "pass" if self.passed else "fail",
        }

    def body_text(self) -> str:
        """Deterministic report body: one JSON line per record plus a summary."""
        lines = [json.dumps(r, sort_keys=True) for r in self.records]
        lines.append(json.dumps(self.summary(), sort_keys=True))
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        lines = [json.dumps(r, sort_keys=True) for r in self.records]
        summary = self.summary()
        summary["wallTime"] = round(self.wall_time, 3)
        lines.append(json.dumps(summary, sort_keys=True))
        return "\n".join(lines) + "\n"

    def body_digest(self) -> str:
        return hashlib.sha256(self.body_text().encode()).hexdigest()


# -- individual checkers -----------------------------------------------------
# Each checker maps (graph, extra, params) -> (ok, data).  ``extra`` carries
# per-graph payloads prepared by the driver (e.g. sampled blue sets).


def _expected_trichotomy(th_plus: int, n: int) -> str:
    if th_plus == n:
        return "equals_n"
    if th_plus == n - 1:
        return "equals_n_minus_1"
    return "below"


def _check_th_eq_n(g: Graph, extra, params) -> tuple[bool, dict]:
    by_patterns = classify_th_eq_n(g)
    th, _ = throttling_number(Rule.Z, g)
    return by_patterns == (th == g.n), {"classifier": by_patterns, "th": th}


def _check_thplus_high(g: Graph, extra, params) -> tuple[bool, dict]:
    cls = classify_thplus(g)
    th, _ = throttling_number(Rule.Z_PLUS, g)
    expected = _expected_trichotomy(th, g.n)
    return cls == expected, {"classifier": cls, "bruteForce": expected, "thplus": th}


def _check_psd_char(g: Graph, extra, params) -> tuple[bool, dict]:
    th, _ = throttling_number(Rule.Z_PLUS, g)
    certified = []
    ok = True
    for t in range(1, g.n + 1):
        script = characterization_certificate(g, t, "psd")
        if (script is not None) != (th <= t):
            ok = False
        if script is not None:
            if canonical_form(apply_script(script)) != canonical_form(g):
                ok = False
            certified.append(t)
    return ok, {"thplus": th, "certifiedT": certified}


def _check_psd_floor_char(g: Graph, extra, params) -> tuple[bool, dict]:
    th, _ = throttling_number(Rule.Z_PLUS_FLOOR, g)
    certified = []
    ok = True
    for t in range(1, g.n + 1):
        script = characterization_certificate(g, t, "psd_floor")
        if (script is not None) != (th <= t):
            ok = False
        if script is not None:
            if canonical_form(apply_script(script)) != canonical_form(g):
                ok = False
            certified.append(t)
    return ok, {"thZplusFloor": th, "certifiedT": certified}


def _floor_throttling_with_mode(g: Graph, mode: str) -> int:
    best = None
    for blue0 in range(1, 1 << g.n):
        result = min_propagation_floor(Rule.Z_PLUS_FLOOR, g, blue0, deactivation=mode)
        if isinstance(result, Stalled):
            continue
        th = popcount(blue0) + result[0]
        if best is None or th < best:
            best = th
    return best


def _check_spanning_supergraphs(g: Graph, extra, params) -> tuple[bool, dict]:
    th_zpf, _ = throttling_number(Rule.Z_PLUS_FLOOR, g)
    oracle_zpf = floor_throttling_via_supergraphs(Rule.Z_PLUS_FLOOR, g)
    th_zf, _ = throttling_number(Rule.Z_FLOOR, g)
    oracle_zf = floor_throttling_via_supergraphs(Rule.Z_FLOOR, g)
    # sensitivity: the stricter global-deactivation reading of the hop rule
    th_global = _floor_throttling_with_mode(g, "global")
    ok = th_zpf == oracle_zpf and th_zf == oracle_zf
    return ok, {
        "thZplusFloor": th_zpf,
        "supergraphOracle": oracle_zpf,
        "thZfloor": th_zf,
        "supergraphOracleZ": oracle_zf,
        "thZplusFloorGlobalDeactivation": th_global,
        "globalReadingDiverges": th_global != th_zpf,
    }


def _max_layer_savings(rule: Rule, g: Graph) -> int:
    best = 0
    for blue0 in range(1, 1 << g.n):
        prop = propagate_deterministic(rule, g, blue0)
        if isinstance(prop, Stalled):
            continue
        total = sum(popcount(layer) - 1 for layer in prop.layers)
        best = max(best, total)
    return best


def _check_savings(g: Graph, extra, params) -> tuple[bool, dict]:
    data = {}
    ok = True
    for rule in (Rule.Z, Rule.Z_PLUS):
        th, _ = throttling_number(rule, g)
        max_saved = _max_layer_savings(rule, g)
        for k in range(0, g.n):
            lhs = th < g.n - k
            rhs = max_saved >= k + 1
            if lhs != rhs:
                ok = False
        data[rule.value] = {"th": th, "maxSavings": max_saved}
    return ok, data


def _check_contraction(g: Graph, extra, params) -> tuple[bool, dict]:
    trials = []
    ok = True
    for blue0 in extra["blueSets"]:
        prop = propagate_deterministic(Rule.Z_PLUS, g, blue0)
        if isinstance(prop, Stalled):
            continue
        pt = prop.pt
        checked = 0
        for f in prop.forces:
            u, w = f.source, f.target
            contracted = contract_edge(g, u, w)
            merged, dropped = min(u, w), max(u, w)
            new_blue = 0
            for v in bits(blue0):
                if v == dropped:
                    v = merged
                elif v > dropped:
                    v -= 1
                new_blue |= 1 << v
            result = propagate_deterministic(Rule.Z_PLUS, contracted, new_blue)
            new_pt = None if isinstance(result, Stalled) else result.pt
            checked += 1
            if new_pt is None or new_pt > pt:
                ok = False
        trials.append({"B": sorted(bits(blue0)), "pt": pt, "edgesChecked": checked})
    return ok, {"trials": trials}


def _check_finite(g: Graph, extra, params) -> tuple[bool, dict]:
    ok = True
    data = {}
    for rule in (Rule.Z, Rule.Z_PLUS):
        th, _ = throttling_number(rule, g)
        entries = []
        for k in range(0, g.n + 1):
            if not (th < g.n - k and g.n >= k):
                continue
            cert = extract_certificate_subgraph(g, rule, k)
            h = cert.graph
            th_h, _ = throttling_number(rule, h)
            good = h.n <= 4 * k + 4 and th_h <= h.n - k - 1
            if not good:
                ok = False
            entries.append({"k": k, "sizeH": h.n, "thH": th_h, "r": cert.cut_step})
        data[rule.value] = entries
    return ok, data


def _check_accelerator(g: Graph, extra, params) -> tuple[bool, dict]:
    ok = True
    data = {}
    th, _ = throttling_number(Rule.Z, g)
    for k in (0, 1):
        hit = contains_Gk_member(g, k)
        no_member = hit is None
        th_high = th >= g.n - k
        if no_member != th_high:
            ok = False
        entry = {"th": th, "memberFree": no_member}
        if th < g.n - k:
            cert = extract_certificate_subgraph(g, Rule.Z, k)
            composition = tuple(popcount(src) - 1 for src in cert.source_masks)
            witness = is_accelerator(cert.graph, composition)
            if witness is None:
                ok = False
            entry["extractedComposition"] = list(composition)
            entry["extractedIsAccelerator"] = witness is not None
        data[f"k{k}"] = entry
    return ok, data


def _check_exact(g: Graph, extra, params) -> tuple[bool, dict]:
    th, _ = throttling_number(Rule.Z, g)
    k = 1
    free_k = contains_Gk_member(g, k) is None
    has_km1 = contains_Gk_member(g, k - 1) is not None
    lhs = th == g.n - k
    rhs = free_k and has_km1
    return lhs == rhs, {"th": th, "gkFree": free_k, "hasGkMinus1": has_km1}


def _tree_minors(g: Graph) -> list[Graph]:
    """All tree minors of a tree, one per isomorphism class (closure under
    leaf deletion and edge contraction)."""
    seen = {canonical_form(g): g}
    frontier = [g]
    while frontier:
        nxt = []
        for t in frontier:
            candidates = []
            for v in range(t.n):
                if t.degree(v) == 1:
                    candidates.append(induced_subgraph(t, t.full_mask & ~(1 << v)))
            for u, v in t.edges():
                candidates.append(contract_edge(t, u, v))
            for cand in candidates:
                key = canonical_form(cand)
                if key not in seen:
                    seen[key] = cand
                    nxt.append(cand)
        frontier = nxt
    return [seen[key] for key in sorted(seen)]


def _check_tree_monotone(g: Graph, extra, params) -> tuple[bool, dict]:
    th_t, _ = throttling_number(Rule.Z_PLUS, g)
    ok = True
    worst = None
    minors = _tree_minors(g)
    for minor in minors:
        th_m, _ = throttling_number(Rule.Z_PLUS, minor)
        if th_m > th_t:
            ok = False
            worst = emit_graph6(minor)
    return ok, {"thplus": th_t, "minorsChecked": len(minors), "violatingMinor": worst}


def _check_spectral(g: Graph, extra, params) -> tuple[bool, dict]:
    rho = spectral_radius(g)
    max_rho = extra["maxRadius"]
    is_max = rho >= max_rho - SPECTRAL_TIE_TOLERANCE
    th, _ = throttling_number(Rule.Z, g)
    ok = (not is_max) or th == g.n
    return ok, {"radius": round(rho, 9), "isMaximal": is_max, "th": th}


def _scan_spectral_converse(g: Graph, extra, params) -> tuple[bool, dict]:
    rho = spectral_radius(g)
    max_rho = extra["maxRadius"]
    is_max = rho >= max_rho - SPECTRAL_TIE_TOLERANCE
    th, _ = throttling_number(Rule.Z, g)
    # exploratory: never fails, only reports whether th = n graphs miss maximality
    return True, {
        "th": th,
        "isMaximal": is_max,
        "converseHolds": th != g.n or is_max,
    }


THEOREM_IDS = {
    "thm-th-eq-n": (_check_th_eq_n, 7),
    "thm-thplus-high": (_check_thplus_high, 7),
    "thm-psd-char": (_check_psd_char, 6),
    "thm-psd-floor-char": (_check_psd_floor_char, 5),
    "cor-spanning-supergraphs": (_check_spanning_supergraphs, 5),
    "lem-savings": (_check_savings, 6),
    "lem-contraction": (_check_contraction, 7),
    "thm-finite": (_check_finite, 7),
    "thm-accelerator": (_check_accelerator, 7),
    "cor-exact": (_check_exact, 7),
    "cor-tree-monotone": (_check_tree_monotone, 7),
    "cor-spectral": (_check_spectral, 7),
    "scan-spectral-converse": (_scan_spectral_converse, 7),
}

_CAPACITY = {
    "thm-psd-char": 6,
    "thm-psd-floor-char": 6,
    "cor-spanning-supergraphs": 6,
    "lem-savings": 7,
}


def theorem_ids() -> list[str]:
    return sorted(THEOREM_IDS)


def _build_corpus(theorem_id: str, nmax: int, params: dict) -> list[tuple[str, dict]]:
    """(graph6, extra) payload per corpus graph, in deterministic order."""
    if theorem_id == "cor-tree-monotone":
        graphs = [g for g in connected_graphs_upto(nmax) if g.edge_count() == g.n - 1]
        return [(emit_graph6(g), {}) for g in graphs]
    graphs = [g for g in connected_graphs_upto(nmax) if g.n >= 1]
    if theorem_id == "lem-contraction":
        trials = params.get("trials", 500)
        seed = params.get("seed", 20240801)
        rng = random.Random(seed)
        pool = [g for g in graphs if g.n >= 2]
        assignments: dict[str, list[int]] = {}
        made = 0
        while made < trials:
            g = pool[rng.randrange(len(pool))]
            blue0 = rng.randrange(1, 1 << g.n)
            if isinstance(propagate_deterministic(Rule.Z_PLUS, g, blue0), Stalled):
                continue
            assignments.setdefault(emit_graph6(g), []).append(blue0)
            made += 1
        return [(g6, {"blueSets": sorted(set(blues))}) for g6, blues in sorted(assignments.items())]
    if theorem_id in ("cor-spectral", "scan-spectral-converse"):
        by_nm: dict[tuple[int, int], float] = {}
        for g in graphs:
            key = (g.n, g.edge_count())
            rho = spectral_radius(g)
            if key not in by_nm or rho > by_nm[key]:
                by_nm[key] = rho
        return [
            (emit_graph6(g), {"maxRadius": by_nm[(g.n, g.edge_count())]})
            for g in graphs
        ]
    return [(emit_graph6(g), {}) for g in graphs]


def _run_payload(theorem_id: str, payload: list[tuple[str, dict]], params: dict) -> list[dict]:
    checker = THEOREM_IDS[theorem_id][0]
    records = []
    for g6, extra in payload:
        g = parse_graph6(g6)
        ok, data = checker(g, extra, params)
        records.append({"g6": g6, "verdict": "pass" if ok else "fail", "data": data})
    return records


def verify(
    theorem_id: str,
    nmax: int | None = None,
    params: dict | None = None,
    workers: int = 1,
) -> VerificationReport:
    """Check one theorem over its corpus; returns a per-graph report.

    ``nmax`` bounds the corpus order (per-theorem default from the registry;
    each checker also has a documented hard capacity).  ``params`` carries
    checker-specific knobs such as ``trials`` and ``seed`` for the random
    contraction-lemma corpus.  With ``workers > 1`` the corpus is sharded
    across processes; reports merge deterministically.
    """
    if theorem_id not in THEOREM_IDS:
        raise UsageError(
            f"unknown theorem id {theorem_id!r}; known ids: {', '.join(theorem_ids())}"
        )
    checker, default_nmax = THEOREM_IDS[theorem_id]
    params = dict(params or {})
    nmax = default_nmax if nmax is None else nmax
    cap = _CAPACITY.get(theorem_id, 7)
    if nmax > cap:
        raise CapacityError(f"{theorem_id} supports corpora up to n = {cap}")

    start = time.monotonic()
    payload = _build_corpus(theorem_id, nmax, params)
    if workers <= 1 or len(payload) < 2:
        records = _run_payload(theorem_id, payload, params)
    else:
        shards = [payload[i::workers] for i in range(workers)]
        shards = [s for s in shards if s]
        with ProcessPoolExecutor(max_workers=len(shards)) as pool:
            futures = [pool.submit(_run_payload, theorem_id, shard, params) for shard in shards]
            records = [r for fut in futures for r in fut.result()]
    records.sort(key=lambda r: (parse_graph6(r["g6"]).n, r["g6"]))

    corpus_desc = {"nmax": nmax, "source": "enumerate_connected", "graphs": len(records)}
    if theorem_id == "lem-contraction":
        corpus_desc["trials"] = params.get("trials", 500)
        corpus_desc["seed"] = params.get("seed", 20240801)
    if theorem_id == "cor-tree-monotone":
        corpus_desc["source"] = "trees"
    report = VerificationReport(theorem_id, corpus_desc, records)
    report.wall_time = time.monotonic() - start
    return report
