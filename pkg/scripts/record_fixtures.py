#!/usr/bin/env python3
"""Record HTTP fixtures for the browser client's contract tests.

Drives a real in-process server through the canonical analyst flow
(upload, preprocess, correlations, discovery, graph, filters, exports)
and saves every response byte-for-byte under frontend/tests/fixtures/,
plus a manifest describing each request so the UI test suite can replay
the conversation through a faked fetch.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from kgforge import electrostatic_spec, generate, write_csv
from kgforge.service import create_app

STAMP = "2026-08-22T00:00:00Z"
FIXTURES = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures"

GRANGER_CONFIG = {
    "alpha": 0.01,
    "lag_policy": "information_criterion",
    "multiple_testing": "benjamini_hochberg",
}
GRAPH_CONFIG = {"corr_threshold": 0.25, "alpha": 0.01, "created_at": STAMP}
# chosen so each step drops at least one edge of the seed-1 graph
WEIGHT_STEPS = (50, 100, 200, 1000)


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app(static_dir=Path("/nonexistent")))
    manifest = []

    def record(name, resp, *, method, path, query=None, body=None, body_file=None):
        suffix = ".ttl" if resp.headers["content-type"].startswith("text/turtle") else ".json"
        fname = name + suffix
        (FIXTURES / fname).write_bytes(resp.content)
        manifest.append(
            {
                "name": name,
                "method": method,
                "path": path,
                "query": query,
                "body": body,
                "body_file": body_file,
                "status": resp.status_code,
                "content_type": resp.headers["content-type"],
                "file": fname,
            }
        )
        return resp

    csv_text = write_csv(generate(electrostatic_spec(seed=1, t=2000)))
    (FIXTURES / "electro.csv").write_text(csv_text, encoding="utf-8")

    resp = record(
        "upload",
        client.post("/api/datasets?name=electro", content=csv_text.encode()),
        method="POST",
        path="/api/datasets",
        query={"name": "electro"},
        body_file="electro.csv",
    )
    assert resp.status_code == 201, resp.text
    sid = resp.json()["session_id"]
    base = f"/api/datasets/{sid}"

    bad = record(
        "upload_bad",
        client.post("/api/datasets?name=broken", content=b"a,b\n1\n"),
        method="POST",
        path="/api/datasets",
        query={"name": "broken"},
        body="a,b\n1\n",
    )
    assert bad.status_code == 422

    def post(name, path, body, query=None):
        url = base + path
        if query:
            url += "?" + "&".join(f"{k}={v}" for k, v in query.items())
        resp = client.post(url, json=body)
        assert resp.status_code == 200, f"{name}: {resp.text}"
        return record(name, resp, method="POST", path=base + path, query=query, body=body)

    post("preprocess", "/preprocess", {})
    post("correlation_pearson", "/correlation", {"method": "pearson"})
    post("correlation_euclidean", "/correlation", {"method": "euclidean"})
    post("granger", "/granger", GRANGER_CONFIG)
    graph = post("graph", "/graph", GRAPH_CONFIG)

    doc = json.loads(graph.content)
    kinds = [e["kind"] for e in doc["edges"]]
    assert len(doc["nodes"]) == 6 and len(kinds) == 5, (len(doc["nodes"]), kinds)
    assert kinds.count("correlation") == 1

    ttl = client.get(base + "/graph.ttl")
    assert ttl.status_code == 200
    record("graph_ttl", ttl, method="GET", path=base + "/graph.ttl")

    sizes = [len(doc["edges"])]
    for w in WEIGHT_STEPS:
        body = {"min_abs_weight": float(w)}
        filtered = post(f"filter_w{w}", "/graph/filter", body)
        sizes.append(len(json.loads(filtered.content)["edges"]))
        as_ttl = client.post(base + f"/graph/filter?format=ttl", json=body)
        assert as_ttl.status_code == 200
        record(
            f"filter_w{w}_ttl",
            as_ttl,
            method="POST",
            path=base + "/graph/filter",
            query={"format": "ttl"},
            body=body,
        )
    assert all(a > b for a, b in zip(sizes, sizes[1:])), sizes

    (FIXTURES / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    print(f"recorded {len(manifest)} interactions to {FIXTURES}")
    print(f"session {sid}; edge counts along the weight slider: {sizes}")


if __name__ == "__main__":
    main()
