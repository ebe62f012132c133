"""Batched episode evaluation with CSV / JSON reporting."""

import json
from dataclasses import dataclass

from .episode import METHODS, run_episode

CSV_COLUMNS = ("seed", "method", "object", "outcome", "failureKind",
               "transErr_mm", "rotErr_deg", "regrasps", "chosenGraspId",
               "trueGraspId", "entropyVision", "entropyFused")


@dataclass
class BatchReport:
    object_name: str
    records: list                  # EpisodeRecord, ordered by (method, seed)

    def counts(self, method):
        out = {"Success": 0, "NearSuccess": 0, "Failure": 0}
        for r in self.records:
            if r.method == method:
                out[r.outcome] += 1
        return out

    def failure_kinds(self, method):
        out = {}
        for r in self.records:
            if r.method == method and r.outcome == "Failure":
                out[r.failure_kind] = out.get(r.failure_kind, 0) + 1
        return out

    def methods(self):
        seen = []
        for r in self.records:
            if r.method not in seen:
                seen.append(r.method)
        return seen

    def episode_rows(self):
        rows = []
        for r in self.records:
            rows.append([
                str(r.seed), r.method, self.object_name, r.outcome,
                r.failure_kind,
                _fmt(r.trans_err_mm), _fmt(r.rot_err_deg),
                str(r.regrasps), str(r.chosen_grasp_id), str(r.true_grasp_id),
                _fmt(r.vision_summary.get("entropy")),
                _fmt(r.fused_summary.get("entropy")),
            ])
        return rows

    def write_episode_csv(self, path):
        with open(path, "w") as f:
            f.write(",".join(CSV_COLUMNS) + "\n")
            for row in self.episode_rows():
                f.write(",".join(row) + "\n")

    def write_summary_csv(self, path):
        with open(path, "w") as f:
            f.write("object,method,success,nearSuccess,failure,trials\n")
            for method in self.methods():
                c = self.counts(method)
                total = sum(c.values())
                f.write(f"{self.object_name},{method},{c['Success']},"
                        f"{c['NearSuccess']},{c['Failure']},{total}\n")

    def write_json(self, path):
        payload = {"object": self.object_name,
                   "records": [r.to_dict() for r in self.records]}
        with open(path, "w") as f:
            json.dump(payload, f, indent=1, sort_keys=True)


def _fmt(value):
    if value is None:
        return ""
    try:
        v = float(value)
    except (TypeError, ValueError):
        return ""
    if v != v:   # NaN
        return ""
    return f"{v:.6f}"


def run_batch(runtime, methods, seeds, log=lambda msg: None):
    """Run every (method, seed) episode; deterministic ordered reduce."""
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method '{m}'")
    records = []
    for method in methods:
        for seed in seeds:
            records.append(run_episode(runtime, method, int(seed)))
        c = {}
        for r in records:
            if r.method == method:
                c[r.outcome] = c.get(r.outcome, 0) + 1
        log(f"{method}: {c}")
    return BatchReport(runtime.config.name(), records)
