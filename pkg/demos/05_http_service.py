"""
Driving the HTTP API in-process
===============================

The same cycle as demo 04, but through the JSON API: health, predict
with at-risk flags, a feedback batch, a retrain, and the metrics
history. Uses an in-process test client; `scoreloop serve` runs the
identical app on a real port.
"""

import tempfile

from fastapi.testclient import TestClient

from scoreloop import TrainConfig
from scoreloop.loop import train_initial
from scoreloop.service import ApiConfig, create_app
from scoreloop.store import DatasetStore
from scoreloop.synthetic import generate_dataset

data = generate_dataset(n=1500, seed=7)
workdir = tempfile.mkdtemp(prefix="scoreloop-demo-")
store = DatasetStore.create(f"{workdir}/store", data)
train_initial(store, TrainConfig(num_rounds=40))
store.close()

app = create_app(ApiConfig(data_dir=f"{workdir}/store",
                           at_risk_threshold=66.0,
                           train_config=TrainConfig(num_rounds=40)))

with TestClient(app) as api:
    print(api.get("/v1/health").json())

    # score three students; anything under the threshold is flagged
    def as_payload(rec, with_target=False, bump=0.0):
        m = {c.name: v for c, v in zip(data.schema.columns, rec.values)
             if v is not None}
        m["id"] = rec.id
        if with_target:
            m["Exam_Score"] = min(100.0, rec.target + bump)
        return m

    probes = [as_payload(r) for r in list(data.rows)[:3]]
    body = api.post("/v1/predict", json={"records": probes}).json()
    for p in body["predictions"]:
        flag = "AT RISK" if p["at_risk"] else "ok"
        print(f"  {p['id']:<14} {p['score']:6.2f}  {flag}")

    # one student explained: contributions sum to the prediction
    ex = api.post("/v1/explain", json=probes[0]).json()
    print(f"explained {ex['id']}: prediction {ex['prediction']:.2f}, "
          f"{len(ex['contributions'])} contributions")

    # feed observed post-intervention scores back and retrain
    fb = {"note": "pilot", "records": [
        as_payload(r, with_target=True, bump=5.0) for r in list(data.rows)[:4]]}
    print(api.post("/v1/feedback", json=fb).json())
    report = api.post("/v1/retrain").json()
    print(f"deployed version {report['version_id']} "
          f"(parent {report['parent_version']})")

    history = api.get("/v1/metrics/history").json()
    for m in history["history"]:
        print(f"  {m['phase_label']:<12} RMSE {m['rmse']:.3f}  R2 {m['r2']:.3f}")
