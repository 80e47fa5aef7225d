"""Drive the HTTP session API the way the browser client does."""

import json
import pathlib
import threading
import urllib.error
import urllib.request

from recoursekit.service import RecourseService, build_engine, make_server

ROOT = pathlib.Path(__file__).resolve().parent.parent

engine = build_engine(ROOT / "data" / "credit_risk.csv", ROOT / "data" / "model.tsv")
server = make_server(RecourseService(engine), port=0)
base = f"http://127.0.0.1:{server.server_address[1]}"
threading.Thread(target=server.serve_forever, daemon=True).start()
print(f"serving on {base}\n")


def call(method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(base + path, data=data, method=method,
                                 headers={"Content-Type": "application/json"} if data else {})
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


status, schema = call("GET", "/api/schema")
print(f"GET /api/schema -> {status}; displayed: {schema['displayed']}")

status, doc = call("POST", "/api/session", {"max_l1_radius": 2.5})
sid = doc["session_id"]
print(f"POST /api/session -> {status}; id {sid}")

status, doc = call("POST", f"/api/session/{sid}/select", {"subject_id": "c012"})
print(f"select c012 -> {status}; {doc['total']} candidates")
top3 = [c["subject_id"] for c in doc["candidates"] if c["top3"]]
print(f"top-3 targets: {top3}")

status, doc = call("POST", f"/api/session/{sid}/select", {"subject_id": top3[0]})
outcomes = [s["outcome"] for s in doc["path"]["states"]]
print(f"select {top3[0]} -> {status}; outcomes along path: {[round(o, 3) for o in outcomes]}")

# the monitor reads stacked segments straight off the path document
last = doc["path"]["states"][-1]
print("\nstack for the newest state:")
for seg in last["segments"]:
    print(f"  {seg['sign']:<9} {seg['label']:<24} {seg['y_from']:+.3f} -> {seg['y_to']:+.3f}")

status, doc = call("POST", f"/api/session/{sid}/undo")
print(f"\nundo -> {status}; path length {len(doc['path']['states'])}")

# the current subject is never its own candidate: the server rejects it
status, doc = call("POST", f"/api/session/{sid}/select", {"subject_id": "c012"})
print(f"re-select current c012 -> {status} ({doc.get('code')})")

server.shutdown()
