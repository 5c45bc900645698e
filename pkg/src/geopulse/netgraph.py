"""Region-to-token bipartite graphs and their degree analytics.

Relations are counted at occurrence level (a hashtag used twice in one post
counts twice); aggregation collapses the multiset into weighted edges.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from xml.sax.saxutils import quoteattr

from .errors import UnknownToken
from .geonorm import REGIONS, UNKNOWN, Gazetteer, normalize_place

_REGION_ORDER = {code: i for i, code in enumerate(REGIONS)}

MODES = ("hashtag", "mention")


@dataclass
class RelationMultiset:
    mode: str
    counts: Counter = field(default_factory=Counter)  # (region, token) -> occurrences

    @property
    def entry_count(self) -> int:
        return sum(self.counts.values())


@dataclass
class RegionGraph:
    mode: str
    edges: dict = field(default_factory=dict)  # (region, token) -> weight

    @property
    def regions(self) -> list[str]:
        present = {r for r, _ in self.edges}
        return [r for r in REGIONS if r in present]

    @property
    def tokens(self) -> list[str]:
        return sorted({t for _, t in self.edges})

    @property
    def node_count(self) -> int:
        return len(self.regions) + len(self.tokens)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> int:
        return sum(self.edges.values())


@dataclass
class DegreeTable:
    mode: str
    # region -> (out_degree, weighted_out_degree), in fixed region order
    region_rows: list = field(default_factory=list)
    # token -> (in_degree, weighted_in_degree), weighted desc then lexicographic
    token_rows: list = field(default_factory=list)


def build_relations(records, mode: str, g: Gazetteer) -> RelationMultiset:
    """One entry per (resolved region, token) occurrence; UNKNOWN drops out."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    rel = RelationMultiset(mode=mode)
    attr = "hashtags" if mode == "hashtag" else "mentions"
    for rec in records:
        region = normalize_place(rec.geo_full_name, g)
        if region == UNKNOWN:
            continue
        for token in getattr(rec, attr):
            rel.counts[(region, token)] += 1
    return rel


def aggregate(rel: RelationMultiset) -> RegionGraph:
    return RegionGraph(mode=rel.mode, edges=dict(rel.counts))


def degree_table(gph: RegionGraph) -> DegreeTable:
    out_deg = Counter()
    out_wgt = Counter()
    in_deg = Counter()
    in_wgt = Counter()
    for (region, token), weight in gph.edges.items():
        out_deg[region] += 1
        out_wgt[region] += weight
        in_deg[token] += 1
        in_wgt[token] += weight
    region_rows = [
        (region, out_deg[region], out_wgt[region]) for region in REGIONS if region in out_deg
    ]
    token_rows = sorted(
        ((token, in_deg[token], in_wgt[token]) for token in in_deg),
        key=lambda row: (-row[2], row[0]),
    )
    return DegreeTable(mode=gph.mode, region_rows=region_rows, token_rows=token_rows)


def prominent_region(token: str, gph: RegionGraph) -> str:
    """Region holding the heaviest edge to the token.

    Ties go to the region with the larger weighted out-degree, then to the
    fixed region order.
    """
    weights = {r: w for (r, t), w in gph.edges.items() if t == token}
    if not weights:
        raise UnknownToken(token)
    totals = Counter()
    for (region, _), weight in gph.edges.items():
        totals[region] += weight
    return min(
        weights,
        key=lambda r: (-weights[r], -totals[r], _REGION_ORDER[r]),
    )


def region_specific_tokens(gph: RegionGraph) -> dict:
    """Tokens with in-degree exactly 1, grouped under their only region.

    Returns region -> (token list sorted by weight desc then name, count,
    weighted sum). Regions with no specific tokens map to ([], 0, 0).
    """
    token_regions: dict[str, list] = {}
    for (region, token), weight in gph.edges.items():
        token_regions.setdefault(token, []).append((region, weight))
    result = {region: ([], 0, 0) for region in gph.regions}
    grouped: dict[str, list] = {region: [] for region in gph.regions}
    for token, hits in token_regions.items():
        if len(hits) == 1:
            region, weight = hits[0]
            grouped[region].append((token, weight))
    for region, pairs in grouped.items():
        pairs.sort(key=lambda p: (-p[1], p[0]))
        result[region] = ([t for t, _ in pairs], len(pairs), sum(w for _, w in pairs))
    return result


def _sorted_edges(gph: RegionGraph) -> list:
    return sorted(
        gph.edges.items(), key=lambda kv: (_REGION_ORDER[kv[0][0]], kv[0][1])
    )


def export_graph(gph: RegionGraph, fmt: str) -> str:
    """Render the graph as 'edge-csv' or 'gexf' with stable ordering."""
    if fmt == "edge-csv":
        lines = ["source,target,weight,mode"]
        for (region, token), weight in _sorted_edges(gph):
            lines.append(f"{region},{token},{weight},{gph.mode}")
        return "\n".join(lines) + "\n"
    if fmt == "gexf":
        return _to_gexf(gph)
    raise ValueError(f"unsupported format: {fmt}")


def _to_gexf(gph: RegionGraph) -> str:
    # Token node ids carry a "t:" prefix so a token can never collide with a
    # region node id.
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2">',
        f'  <graph defaultedgetype="directed" mode="static" label={quoteattr(gph.mode)}>',
        "    <nodes>",
    ]
    for region in gph.regions:
        out.append(f'      <node id="{region}" label="{region}" />')
    for token in gph.tokens:
        out.append(f"      <node id={quoteattr('t:' + token)} label={quoteattr(token)} />")
    out.append("    </nodes>")
    out.append("    <edges>")
    for idx, ((region, token), weight) in enumerate(_sorted_edges(gph)):
        out.append(
            f'      <edge id="{idx}" source="{region}" '
            f"target={quoteattr('t:' + token)} weight=\"{weight}\" />"
        )
    out.append("    </edges>")
    out.append("  </graph>")
    out.append("</gexf>")
    return "\n".join(out) + "\n"


def write_graph(gph: RegionGraph, fmt: str, path) -> None:
    data = export_graph(gph, fmt)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(data)
