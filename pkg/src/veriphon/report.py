"""Serialization of evaluation reports: canonical JSON and CSV tables.

The canonical report body excludes wall-clock measurements so reruns of
the same config + seed are byte-identical; timings go to a sidecar file.
"""

import json
import os


def report_to_json(report) -> str:
    """Canonical body: config + results, stable key order, no timings."""
    doc = {"config": report.config, "conditions": report.conditions}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def timings_to_json(report) -> str:
    return json.dumps({"timings": report.timings}, indent=2,
                      sort_keys=True) + "\n"


def write_report(report, out_dir: str) -> dict:
    """Write report.json + timings.json; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {"report": os.path.join(out_dir, "report.json"),
             "timings": os.path.join(out_dir, "timings.json")}
    with open(paths["report"], "w") as fh:
        fh.write(report_to_json(report))
    with open(paths["timings"], "w") as fh:
        fh.write(timings_to_json(report))
    return paths


def _split_condition(name):
    if name == "clean":
        return None, None
    noise, snr = name.split("@", 1)
    return noise, float(snr.removesuffix("dB"))


def write_condition_table(named_reports, path: str) -> None:
    """Noise-by-system rows, SNR columns of mean AUC (plus a clean column).

    named_reports: iterable of (system_name, EvalReport).
    """
    named_reports = list(named_reports)
    snrs = sorted({snr for _, rep in named_reports
                   for name in rep.conditions
                   for _, snr in [_split_condition(name)] if snr is not None},
                  reverse=True)
    with open(path, "w") as fh:
        cols = ["system", "noise", "clean"] + [f"{s:g}dB" for s in snrs]
        fh.write(",".join(cols) + "\n")
        for sys_name, rep in named_reports:
            clean = rep.conditions.get("clean", {}).get("mean_auc", "")
            noises = sorted({n for name in rep.conditions
                             for n, _ in [_split_condition(name)]
                             if n is not None})
            if not noises:
                fh.write(",".join([sys_name, "-", str(clean)]
                                  + [""] * len(snrs)) + "\n")
                continue
            for noise in noises:
                row = [sys_name, noise, str(clean)]
                for snr in snrs:
                    cond = rep.conditions.get(f"{noise}@{snr:g}dB")
                    row.append(str(cond["mean_auc"]) if cond else "")
                fh.write(",".join(row) + "\n")


def write_system_summary(named_reports, path: str) -> None:
    """One row per system, one column per condition (mean AUC)."""
    named_reports = list(named_reports)
    conditions = []
    for _, rep in named_reports:
        for name in rep.conditions:
            if name not in conditions:
                conditions.append(name)
    with open(path, "w") as fh:
        fh.write(",".join(["system"] + conditions) + "\n")
        for sys_name, rep in named_reports:
            row = [sys_name]
            for cond in conditions:
                entry = rep.conditions.get(cond)
                row.append(str(entry["mean_auc"]) if entry else "")
            fh.write(",".join(row) + "\n")


def write_speaker_rocs(report, out_dir: str) -> list:
    """Per-condition CSV of ROC points for every speaker (plot data)."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for cond_name, cond in report.conditions.items():
        safe = cond_name.replace("@", "_at_")
        path = os.path.join(out_dir, f"roc_{safe}.csv")
        with open(path, "w") as fh:
            fh.write("speaker,fpr,tpr\n")
            for spk in sorted(cond["per_speaker"]):
                for fpr, tpr in cond["per_speaker"][spk]["points"]:
                    fh.write(f"{spk},{fpr!r},{tpr!r}\n")
        written.append(path)
    return written
