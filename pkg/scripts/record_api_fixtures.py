"""Record request/response fixtures for the HTTP API contract test.

Boots the engine on the bundled fixture data exactly the way
``recoursekit serve`` does (background 32, seed 42, displayed 6), walks a
scripted session covering every endpoint, and stores the exact response
bytes. tests/test_acceptance.py replays the file against a fresh server
and requires byte identity.
"""

import json
import pathlib
import threading
import urllib.error
import urllib.request

from recoursekit.service import RecourseService, build_engine, make_server

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures" / "api_contract.json"


def record(method: str, url: str, body: str | None):
    data = body.encode() if body is not None else None
    req = urllib.request.Request(
        url, data=data, method=method,
        headers={"Content-Type": "application/json"} if body is not None else {},
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, resp.read().decode()
    except urllib.error.HTTPError as err:
        return err.code, err.read().decode()


def main() -> None:
    engine = build_engine(ROOT / "data" / "credit_risk.csv", ROOT / "data" / "model.tsv")
    service = RecourseService(engine)
    server = make_server(service, port=0)
    base = f"http://127.0.0.1:{server.server_address[1]}"
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()

    entries = []

    def step(name, method, path, body=None):
        status, response = record(method, base + path, body)
        entries.append(
            {
                "name": name,
                "method": method,
                "path": path,
                "body": body,
                "status": status,
                "response": response,
            }
        )
        return json.loads(response) if response else None

    step("schema", "GET", "/api/schema")
    step("subjects", "GET", "/api/subjects")
    doc = step("create_session", "POST", "/api/session", "{}")
    sid = doc["session_id"]
    doc = step("select_start", "POST", f"/api/session/{sid}/select",
               '{"subject_id": "c001"}')
    top1 = doc["candidates"][0]["subject_id"]
    step("candidates_default", "GET", f"/api/session/{sid}/candidates")
    step("select_top1", "POST", f"/api/session/{sid}/select",
         json.dumps({"subject_id": top1}))
    step("path_two_states", "GET", f"/api/session/{sid}/path")
    step("undo", "POST", f"/api/session/{sid}/undo")
    step("candidates_all", "GET", f"/api/session/{sid}/candidates?limit=all")
    step("select_not_a_candidate", "POST", f"/api/session/{sid}/select",
         '{"subject_id": "c001"}')
    step("session_with_constraints", "POST", "/api/session",
         '{"immutable_features": ["age"], "max_l1_radius": 2.5}')
    step("unknown_session_404", "GET", "/api/session/sffffff/path")
    step("bad_constraints_400", "POST", "/api/session",
         '{"immutable_features": ["nope"]}')

    server.shutdown()
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        json.dump(entries, fh, indent=1)
        fh.write("\n")
    print(f"recorded {len(entries)} exchanges to {OUT}")


if __name__ == "__main__":
    main()
