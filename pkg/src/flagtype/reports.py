"""Report serialization: a JSON document plus a CSV of decay curves.

Output is byte-reproducible for a fixed config and seed: keys are
sorted, floats carry 17 significant digits, and nothing time-dependent
is written.
"""

import json

from .config import config_to_dict

TOOL_NAME = "flagtype"


def report_payload(report, cfg=None, version="0.1.0"):
    """Full JSON-ready dictionary for a flag-type report."""
    payload = {
        "tool": TOOL_NAME,
        "version": version,
        "report": report.to_dict(),
    }
    if cfg is not None:
        payload["config"] = config_to_dict(cfg)
    return payload


def render_json(payload):
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_curves_csv(report):
    """Rows (root_index, length, min_log_rho) for every curve."""
    lines = ["root_index,length,min_log_rho"]
    for i in sorted(report.curves):
        curve = report.curves[i]
        if curve is None:
            continue
        for length, value in zip(curve.lengths, curve.min_log_rho):
            lines.append("%d,%d,%.17g" % (i, length, value))
    return "\n".join(lines) + "\n"


def write_report(report, json_path, csv_path, cfg=None, version="0.1.0"):
    payload = report_payload(report, cfg, version)
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(render_json(payload))
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(render_curves_csv(report))
    return payload
