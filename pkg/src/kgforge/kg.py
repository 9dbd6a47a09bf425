"""Typed knowledge graph over process parameters.

Nodes are the table's columns; edges carry either an undirected
contemporaneous correlation (method + coefficient) or a directed lagged
causal claim (lag + F statistic + p-value).  Edges are reified in the
Turtle output as link resources because plain predicates cannot carry
the per-edge attributes the filtering queries need.

Serialization is deterministic: node and edge order, Turtle statement
order, and JSON key order are all fixed, so identical graphs produce
byte-identical documents.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

from .correlation import CorrelationMatrix
from .errors import ColumnMismatchError, SchemaError, TurtleParseError
from .granger import GrangerResult

KG_PREFIX = "https://example.org/kgforge/vocab#"
XSD_PREFIX = "http://www.w3.org/2001/XMLSchema#"
DEFAULT_BASE_IRI = "https://example.org/kgforge/graph/"

EDGE_KINDS = ("correlation", "causal")


def slugify(label: str) -> str:
    """Lowercased IRI-safe id: runs of non-alphanumerics collapse to _."""
    slug = re.sub(r"[^a-z0-9]+", "_", label.lower()).strip("_")
    return slug or "column"


def assign_ids(labels) -> dict[str, str]:
    """Stable label -> unique slug mapping; collisions get numeric suffixes."""
    out: dict[str, str] = {}
    used: set[str] = set()
    for label in labels:
        base = slugify(label)
        slug = base
        n = 2
        while slug in used:
            slug = f"{base}_{n}"
            n += 1
        used.add(slug)
        out[label] = slug
    return out


@dataclass(frozen=True)
class Node:
    id: str
    label: str
    attrs: tuple[tuple[str, str], ...] = ()

    def to_json_dict(self) -> dict:
        return {"id": self.id, "label": self.label, "attrs": {k: v for k, v in self.attrs}}


@dataclass(frozen=True)
class Edge:
    """correlation: unordered (a, b normalized), weight = coefficient, method set.

    causal: directed a -> b, weight = F statistic, lag and p_value set.
    """

    kind: str
    a: str
    b: str
    weight: float
    method: str | None = None
    lag: int | None = None
    p_value: float | None = None

    def __post_init__(self):
        if self.kind not in EDGE_KINDS:
            raise SchemaError(f"edge kind must be one of {EDGE_KINDS}")
        if self.kind == "correlation":
            if self.method is None or self.lag is not None or self.p_value is not None:
                raise SchemaError("correlation edges carry a method and no lag/p-value")
            if abs(self.weight) > 1.0 + 1e-12:
                raise SchemaError("correlation weight outside [-1, 1]")
            if self.b < self.a:  # unordered pair, canonical endpoint order
                a, b = self.a, self.b
                object.__setattr__(self, "a", b)
                object.__setattr__(self, "b", a)
        else:
            if self.lag is None or self.lag < 1:
                raise SchemaError("causal edges need lag >= 1")
            if self.p_value is None or not 0.0 <= self.p_value <= 1.0:
                raise SchemaError("causal edges need a p-value in [0, 1]")
            if self.method is not None:
                raise SchemaError("method is for correlation edges only")

    @property
    def key(self) -> tuple:
        return (self.kind, self.a, self.b, self.lag or 0, self.method or "")

    def sort_key(self) -> tuple:
        return (self.kind, self.a, self.b, self.lag or 0, self.method or "")

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "a": self.a,
            "b": self.b,
            "weight": self.weight,
            "method": self.method,
            "lag": self.lag,
            "p_value": self.p_value,
        }


@dataclass(frozen=True)
class Provenance:
    dataset: str = ""
    created_at: str = ""
    config: tuple[tuple[str, str], ...] = ()  # flattened JSON snapshot
    integration: str = ""  # integration report JSON, "" when absent
    filters: tuple[str, ...] = ()  # JSON of each applied query, in order

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "created_at": self.created_at,
            "config": {k: json.loads(v) for k, v in self.config},
            "integration": json.loads(self.integration) if self.integration else None,
            "filters": [json.loads(f) for f in self.filters],
        }


@dataclass(frozen=True)
class KnowledgeGraph:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.id)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=Edge.sort_key)))
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise SchemaError("duplicate node ids")
        known = set(ids)
        keys = set()
        for e in self.edges:
            if e.a not in known or e.b not in known:
                raise SchemaError(f"edge endpoint not in node set: {e.a!r}/{e.b!r}")
            if e.key in keys:
                raise SchemaError(f"duplicate edge {e.key}")
            keys.add(e.key)

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise SchemaError(f"unknown node id {node_id!r}")

    def has_node(self, node_id: str) -> bool:
        return any(n.id == node_id for n in self.nodes)

    def structural_key(self) -> tuple:
        """The Turtle-visible projection used for round-trip equality.

        Covers node ids/labels, every edge with its attributes, and the
        dataset/creation provenance.  Node attrs, config snapshots, and
        the filter trail ride only in the JSON serialization.
        """
        return (
            tuple((n.id, n.label) for n in self.nodes),
            tuple(
                (e.kind, e.a, e.b, e.weight, e.method, e.lag, e.p_value)
                for e in self.edges
            ),
            self.provenance.dataset,
            self.provenance.created_at,
        )

    def to_json_dict(self) -> dict:
        return {
            "nodes": [n.to_json_dict() for n in self.nodes],
            "edges": [e.to_json_dict() for e in self.edges],
            "provenance": self.provenance.to_json_dict(),
        }


def structurally_equal(a: KnowledgeGraph, b: KnowledgeGraph) -> bool:
    return a.structural_key() == b.structural_key()


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _flatten_config(config: dict | None) -> tuple[tuple[str, str], ...]:
    if not config:
        return ()
    return tuple((k, json.dumps(config[k], sort_keys=True)) for k in sorted(config))


def build_graph(
    matrix: CorrelationMatrix,
    causal,
    corr_threshold: float,
    alpha: float,
    dataset: str = "",
    created_at: str | None = None,
    config: dict | None = None,
    integration: dict | None = None,
) -> KnowledgeGraph:
    """Merge correlation scores and causality results into one graph.

    Correlation edges keep pairs with |score| >= corr_threshold (degenerate
    pairs and the diagonal excluded).  Causal edges keep results whose
    effective p-value (adjusted when a correction ran) is below alpha.
    """
    if not 0.0 < alpha <= 1.0:
        raise SchemaError("alpha must lie in (0, 1]")
    causal = list(causal)
    universe = set(matrix.names)
    strays = sorted({n for r in causal for n in (r.source, r.target) if n not in universe})
    if strays:
        raise ColumnMismatchError("causal results reference unknown columns: " + ", ".join(strays))

    ids = assign_ids(matrix.names)
    nodes = tuple(Node(id=ids[label], label=label) for label in matrix.names)

    edges: list[Edge] = []
    for i, a in enumerate(matrix.names):
        for b in matrix.names[i + 1 :]:
            if matrix.is_flagged(a, b):
                continue
            score = matrix.score(a, b)
            if abs(score) >= corr_threshold:
                edges.append(
                    Edge(kind="correlation", a=ids[a], b=ids[b], weight=score, method=matrix.method)
                )

    seen = set()
    for r in causal:
        if r.failed:
            continue
        p_eff = r.effective_p_value()
        if math.isnan(p_eff) or p_eff >= alpha:
            continue
        edge = Edge(
            kind="causal",
            a=ids[r.source],
            b=ids[r.target],
            weight=r.f_statistic,
            lag=r.p,
            p_value=p_eff,
        )
        if edge.key in seen:
            raise SchemaError(f"duplicate causal result for {r.source}->{r.target} at lag {r.p}")
        seen.add(edge.key)
        edges.append(edge)

    provenance = Provenance(
        dataset=dataset,
        created_at=created_at if created_at is not None else _utc_now(),
        config=_flatten_config(config),
        integration=json.dumps(integration, sort_keys=True) if integration else "",
    )
    return KnowledgeGraph(nodes=nodes, edges=tuple(edges), provenance=provenance)


# ---------------------------------------------------------------------------
# Turtle

_IRI_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*://[^\s<>\"{}|\\^`]+[/#]$")


def _escape_literal(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "\\r")


def _double(v: float) -> str:
    return f'"{repr(float(v))}"^^xsd:double'


def to_turtle(graph: KnowledgeGraph, base_iri: str = DEFAULT_BASE_IRI) -> str:
    """Serialize to Turtle with a fixed vocabulary and deterministic order."""
    if not _IRI_RE.match(base_iri):
        raise SchemaError(f"base IRI must be absolute and end in / or #: {base_iri!r}")

    def iri(local: str) -> str:
        return f"<{base_iri}{local}>"

    subjects: list[tuple[str, list[tuple[str, str]]]] = []
    for n in graph.nodes:
        subjects.append(
            (iri(n.id), [("a", "kg:Parameter"), ("kg:label", f'"{_escape_literal(n.label)}"')])
        )
    for e in graph.edges:
        if e.kind == "causal":
            local = f"causal_{e.a}__{e.b}__lag{e.lag}"
            preds = [
                ("a", "kg:CausalLink"),
                ("kg:source", iri(e.a)),
                ("kg:target", iri(e.b)),
                ("kg:lag", f'"{e.lag}"^^xsd:integer'),
                ("kg:fStatistic", _double(e.weight)),
                ("kg:pValue", _double(e.p_value)),
            ]
        else:
            local = f"corr_{e.method}_{e.a}__{e.b}"
            preds = [
                ("a", "kg:CorrelationLink"),
                ("kg:memberA", iri(e.a)),
                ("kg:memberB", iri(e.b)),
                ("kg:method", f'"{e.method}"'),
                ("kg:coefficient", _double(e.weight)),
            ]
        subjects.append((iri(local), preds))
    subjects.append(
        (
            iri("provenance"),
            [
                ("a", "kg:Provenance"),
                ("kg:dataset", f'"{_escape_literal(graph.provenance.dataset)}"'),
                ("kg:createdAt", f'"{graph.provenance.created_at}"^^xsd:dateTime'),
            ],
        )
    )

    lines = [
        f"@prefix kg: <{KG_PREFIX}> .",
        f"@prefix xsd: <{XSD_PREFIX}> .",
        "",
    ]
    for subject, preds in sorted(subjects):
        preds = sorted(preds)
        body = " ;\n    ".join(f"{p} {o}" for p, o in preds)
        lines.append(f"{subject} {body} .")
    return "\n".join(lines) + "\n"


class _TurtleReader:
    """Just enough Turtle to re-read this module's own output shape."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.prefixes: dict[str, str] = {}

    def error(self, message: str):
        line = self.text.count("\n", 0, self.pos) + 1
        raise TurtleParseError(f"line {line}: {message}")

    def _skip_ws(self):
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self.pos += 1
            elif c == "#":
                nl = self.text.find("\n", self.pos)
                self.pos = len(self.text) if nl == -1 else nl + 1
            else:
                return

    def at_end(self) -> bool:
        self._skip_ws()
        return self.pos >= len(self.text)

    def _take(self, ch: str):
        self._skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def read_term(self) -> tuple[str, str, str | None]:
        """Returns (kind, value, datatype): kind in iri|literal."""
        self._skip_ws()
        c = self.peek()
        if c == "<":
            self.pos += 1
            end = self.text.find(">", self.pos)
            if end == -1:
                self.error("unterminated IRI")
            value = self.text[self.pos : end]
            self.pos = end + 1
            return "iri", value, None
        if c == '"':
            self.pos += 1
            out = []
            while True:
                if self.pos >= len(self.text):
                    self.error("unterminated literal")
                ch = self.text[self.pos]
                if ch == "\\":
                    nxt = self.text[self.pos + 1]
                    mapped = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}.get(nxt)
                    if mapped is None:
                        self.error(f"unsupported escape \\{nxt}")
                    out.append(mapped)
                    self.pos += 2
                elif ch == '"':
                    self.pos += 1
                    break
                else:
                    out.append(ch)
                    self.pos += 1
            datatype = None
            if self.text.startswith("^^", self.pos):
                self.pos += 2
                kind, value, _ = self.read_term()
                if kind != "iri":
                    self.error("datatype must be an IRI")
                datatype = value
            return "literal", "".join(out), datatype
        # prefixed name or the keyword 'a'
        m = re.match(r"[A-Za-z_][\w.\-]*:?[\w.\-]*", self.text[self.pos :])
        if not m:
            self.error(f"unexpected character {c!r}")
        token = m.group(0)
        self.pos += len(token)
        if token == "a":
            return "iri", "http://www.w3.org/1999/02/22-rdf-syntax-ns#type", None
        if ":" not in token:
            self.error(f"bare token {token!r}")
        prefix, local = token.split(":", 1)
        if prefix not in self.prefixes:
            self.error(f"unknown prefix {prefix!r}")
        return "iri", self.prefixes[prefix] + local, None

    def read_triples(self) -> list[tuple[str, str, tuple[str, str, str | None]]]:
        triples = []
        while not self.at_end():
            if self.text.startswith("@prefix", self.pos):
                self.pos += len("@prefix")
                self._skip_ws()
                m = re.match(r"([A-Za-z_][\w.\-]*)?:", self.text[self.pos :])
                if not m:
                    self.error("malformed @prefix")
                name = m.group(1) or ""
                self.pos += len(m.group(0))
                kind, iri_value, _ = self.read_term()
                if kind != "iri":
                    self.error("@prefix needs an IRI")
                self.prefixes[name] = iri_value
                self._take(".")
                continue
            kind, subject, _ = self.read_term()
            if kind != "iri":
                self.error("subject must be an IRI")
            while True:
                pkind, predicate, _ = self.read_term()
                if pkind != "iri":
                    self.error("predicate must be an IRI")
                while True:
                    obj = self.read_term()
                    triples.append((subject, predicate, obj))
                    if self.peek() == ",":
                        self._take(",")
                        continue
                    break
                if self.peek() == ";":
                    self._take(";")
                    if self.peek() == ".":  # tolerate trailing ; before .
                        break
                    continue
                break
            self._take(".")
        return triples


RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


def _local_name(iri_value: str) -> str:
    cut = max(iri_value.rfind("/"), iri_value.rfind("#"))
    return iri_value[cut + 1 :]


def from_turtle(text: str) -> KnowledgeGraph:
    """Rebuild a graph from Turtle produced by :func:`to_turtle`."""
    triples = _TurtleReader(text).read_triples()
    by_subject: dict[str, dict[str, list[tuple[str, str, str | None]]]] = {}
    for s, p, o in triples:
        by_subject.setdefault(s, {}).setdefault(p, []).append(o)

    def one(props: dict, predicate: str, subject: str) -> tuple[str, str, str | None]:
        values = props.get(KG_PREFIX + predicate if not predicate.startswith("http") else predicate, [])
        if len(values) != 1:
            raise TurtleParseError(f"{subject}: need exactly one kg:{predicate}")
        return values[0]

    def literal(props: dict, predicate: str, subject: str) -> str:
        kind, value, _ = one(props, predicate, subject)
        if kind != "literal":
            raise TurtleParseError(f"{subject}: kg:{predicate} must be a literal")
        return value

    def ref(props: dict, predicate: str, subject: str) -> str:
        kind, value, _ = one(props, predicate, subject)
        if kind != "iri":
            raise TurtleParseError(f"{subject}: kg:{predicate} must be an IRI")
        return _local_name(value)

    nodes: list[Node] = []
    edges: list[Edge] = []
    dataset = ""
    created_at = ""
    for subject, props in by_subject.items():
        types = props.get(RDF_TYPE, [])
        if len(types) != 1 or types[0][0] != "iri":
            raise TurtleParseError(f"{subject}: need exactly one type")
        type_local = _local_name(types[0][1])
        if type_local == "Parameter":
            nodes.append(Node(id=_local_name(subject), label=literal(props, "label", subject)))
        elif type_local == "CausalLink":
            edges.append(
                Edge(
                    kind="causal",
                    a=ref(props, "source", subject),
                    b=ref(props, "target", subject),
                    weight=float(literal(props, "fStatistic", subject)),
                    lag=int(literal(props, "lag", subject)),
                    p_value=float(literal(props, "pValue", subject)),
                )
            )
        elif type_local == "CorrelationLink":
            edges.append(
                Edge(
                    kind="correlation",
                    a=ref(props, "memberA", subject),
                    b=ref(props, "memberB", subject),
                    weight=float(literal(props, "coefficient", subject)),
                    method=literal(props, "method", subject),
                )
            )
        elif type_local == "Provenance":
            dataset = literal(props, "dataset", subject)
            created_at = literal(props, "createdAt", subject)
        else:
            raise TurtleParseError(f"{subject}: unknown type kg:{type_local}")

    try:
        return KnowledgeGraph(
            nodes=tuple(nodes),
            edges=tuple(edges),
            provenance=Provenance(dataset=dataset, created_at=created_at),
        )
    except SchemaError as exc:
        raise TurtleParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# JSON

def to_json(graph: KnowledgeGraph) -> str:
    """Canonical JSON: sorted keys, fixed node/edge order, compact separators."""
    return json.dumps(graph.to_json_dict(), sort_keys=True, separators=(",", ":"))


def from_json(text: str) -> KnowledgeGraph:
    doc = json.loads(text)
    nodes = tuple(
        Node(id=n["id"], label=n["label"], attrs=tuple(sorted((n.get("attrs") or {}).items())))
        for n in doc["nodes"]
    )
    edges = tuple(
        Edge(
            kind=e["kind"],
            a=e["a"],
            b=e["b"],
            weight=e["weight"],
            method=e.get("method"),
            lag=e.get("lag"),
            p_value=e.get("p_value"),
        )
        for e in doc["edges"]
    )
    p = doc.get("provenance", {})
    provenance = Provenance(
        dataset=p.get("dataset", ""),
        created_at=p.get("created_at", ""),
        config=tuple(
            (k, json.dumps(v, sort_keys=True)) for k, v in sorted((p.get("config") or {}).items())
        ),
        integration=json.dumps(p["integration"], sort_keys=True) if p.get("integration") else "",
        filters=tuple(json.dumps(f, sort_keys=True) for f in p.get("filters", [])),
    )
    return KnowledgeGraph(nodes=nodes, edges=edges, provenance=provenance)


# ---------------------------------------------------------------------------
# Queries

@dataclass(frozen=True)
class GraphQuery:
    """Threshold/structure filter; at least one criterion must be present.

    Weight and kind criteria apply to every edge; p-value and lag
    criteria constrain causal edges and leave correlation edges alone.
    ``nodes`` alone keeps the induced subgraph; with ``neighborhood_radius``
    it expands by that many hops over the surviving edges first.
    """

    kinds: frozenset[str] | None = None
    min_abs_weight: float | None = None
    max_p_value: float | None = None
    lag_range: tuple[int, int] | None = None
    nodes: frozenset[str] | None = None
    neighborhood_radius: int | None = None

    def __post_init__(self):
        if self.kinds is not None:
            object.__setattr__(self, "kinds", frozenset(self.kinds))
            bad = self.kinds - set(EDGE_KINDS)
            if bad:
                raise SchemaError(f"unknown edge kinds: {sorted(bad)}")
        if self.nodes is not None:
            object.__setattr__(self, "nodes", frozenset(self.nodes))
        if self.lag_range is not None:
            lo, hi = self.lag_range
            object.__setattr__(self, "lag_range", (int(lo), int(hi)))
            if lo > hi or lo < 1:
                raise SchemaError("lag_range must satisfy 1 <= lo <= hi")
        if self.neighborhood_radius is not None:
            if self.neighborhood_radius < 0:
                raise SchemaError("neighborhood_radius must be >= 0")
            if self.nodes is None:
                raise SchemaError("neighborhood_radius requires nodes")
        if all(
            v is None
            for v in (
                self.kinds,
                self.min_abs_weight,
                self.max_p_value,
                self.lag_range,
                self.nodes,
            )
        ):
            raise SchemaError("query needs at least one criterion")

    def to_json_dict(self) -> dict:
        return {
            "kinds": sorted(self.kinds) if self.kinds is not None else None,
            "min_abs_weight": self.min_abs_weight,
            "max_p_value": self.max_p_value,
            "lag_range": list(self.lag_range) if self.lag_range else None,
            "nodes": sorted(self.nodes) if self.nodes is not None else None,
            "neighborhood_radius": self.neighborhood_radius,
        }

    def matches(self, edge: Edge) -> bool:
        if self.kinds is not None and edge.kind not in self.kinds:
            return False
        if self.min_abs_weight is not None and abs(edge.weight) < self.min_abs_weight:
            return False
        if edge.kind == "causal":
            if self.max_p_value is not None and edge.p_value > self.max_p_value:
                return False
            if self.lag_range is not None and not (
                self.lag_range[0] <= edge.lag <= self.lag_range[1]
            ):
                return False
        return True


def filter_graph(graph: KnowledgeGraph, query: GraphQuery) -> KnowledgeGraph:
    """Keep edges passing every criterion; trim nodes to what survives.

    Listed query nodes always stay.  Idempotent for a fixed query; the
    applied query is recorded once in provenance.
    """
    if query.nodes is not None:
        unknown = sorted(n for n in query.nodes if not graph.has_node(n))
        if unknown:
            raise SchemaError("unknown node ids in query: " + ", ".join(unknown))

    surviving = [e for e in graph.edges if query.matches(e)]

    if query.nodes is not None:
        if query.neighborhood_radius is not None:
            adjacency: dict[str, set[str]] = {}
            for e in surviving:
                adjacency.setdefault(e.a, set()).add(e.b)
                adjacency.setdefault(e.b, set()).add(e.a)
            reached = set(query.nodes)
            frontier = set(query.nodes)
            for _ in range(query.neighborhood_radius):
                frontier = {
                    nxt for n in frontier for nxt in adjacency.get(n, ()) if nxt not in reached
                }
                if not frontier:
                    break
                reached |= frontier
            keep = reached
        else:
            keep = set(query.nodes)
        surviving = [e for e in surviving if e.a in keep and e.b in keep]
        node_ids = {e.a for e in surviving} | {e.b for e in surviving} | set(query.nodes)
    else:
        node_ids = {e.a for e in surviving} | {e.b for e in surviving}

    nodes = tuple(n for n in graph.nodes if n.id in node_ids)
    query_json = json.dumps(query.to_json_dict(), sort_keys=True)
    trail = graph.provenance.filters
    if not trail or trail[-1] != query_json:
        trail = trail + (query_json,)
    provenance = replace(graph.provenance, filters=trail)
    return KnowledgeGraph(nodes=nodes, edges=tuple(surviving), provenance=provenance)
