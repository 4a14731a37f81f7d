"""File formats: network/result JSON, trace JSON lines, sweep CSV, SVG.

All writers are deterministic: identical inputs produce identical bytes.
Floats are serialized at full precision (Python's shortest round-trip repr),
so a network survives save/load bit for bit.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json

from .geometry import Point
from .network import Network, NodeClass, build_udg
from .protocol import LocalizationResult, VerificationReport

NETWORK_SCHEMA = "commwheel-network/1"
RESULT_SCHEMA = "commwheel-result/1"


class FileFormatError(ValueError):
    """Input file does not match the expected schema."""


def network_to_dict(network: Network) -> dict:
    return {
        "schema": NETWORK_SCHEMA,
        "r": network.r,
        "nodes": [{"id": v, "x": network.positions[v].x,
                   "y": network.positions[v].y} for v in network.ids],
    }


def network_from_dict(data: dict) -> Network:
    if not isinstance(data, dict) or data.get("schema") != NETWORK_SCHEMA:
        raise FileFormatError(
            f"expected a {NETWORK_SCHEMA!r} document, got "
            f"{data.get('schema') if isinstance(data, dict) else type(data).__name__!r}")
    try:
        r = float(data["r"])
        nodes = data["nodes"]
        positions = {}
        for entry in nodes:
            vid = int(entry["id"])
            if vid in positions:
                raise FileFormatError(f"duplicate node id {vid}")
            positions[vid] = Point(float(entry["x"]), float(entry["y"]))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, FileFormatError):
            raise
        raise FileFormatError(f"malformed network file: {e}") from e
    return build_udg(positions, r)


def dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def save_network(network: Network, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dump_json(network_to_dict(network)))


def load_network(path: str) -> Network:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise FileFormatError(f"not valid JSON: {e}") from e
    return network_from_dict(data)


def result_to_dict(result: LocalizationResult,
                   report: VerificationReport | None = None) -> dict:
    class_counts = {c.value: 0 for c in NodeClass}
    localized_counts = {c.value: 0 for c in NodeClass}
    nodes = []
    for v in sorted(result.positions):
        cls = result.classes[v]
        class_counts[cls.value] += 1
        pos = result.positions[v]
        if pos is not None:
            localized_counts[cls.value] += 1
        nodes.append({
            "id": v,
            "class": cls.value,
            "localized": pos is not None,
            "pos": None if pos is None else [pos.x, pos.y],
        })
    stats = {
        "class_counts": class_counts,
        "localized_counts": localized_counts,
        "message_counts": result.message_counts,
        "events": result.events,
        "rounds": result.trace.rounds,
        "leader": result.leader,
        "no_leader": result.no_leader,
        "localized_total": len(result.localized),
        "trace_hash": result.trace_hash,
        "alignment_residual":
            None if report is None or not report.aligned
            else report.max_residual,
        "faults": list(result.faults),
    }
    return {"schema": RESULT_SCHEMA, "nodes": nodes, "stats": stats}


def load_result(path: str) -> dict:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise FileFormatError(f"not valid JSON: {e}") from e
    if not isinstance(data, dict) or data.get("schema") != RESULT_SCHEMA:
        raise FileFormatError(f"expected a {RESULT_SCHEMA!r} document")
    if "nodes" not in data or "stats" not in data:
        raise FileFormatError("result file missing nodes/stats")
    return data


def trace_to_jsonl(result: LocalizationResult) -> str:
    lines = []
    for step, sender, receiver, kind, digest in result.trace.entries:
        lines.append(json.dumps(
            {"step": step, "from": sender, "to": receiver,
             "type": kind, "digest": digest}, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


def sweep_to_csv(stats) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["seed_triangle", "localized_count"])
    for tri in sorted(stats.counts):
        writer.writerow(["-".join(map(str, tri)), stats.counts[tri]])
    return buf.getvalue()


_CLASS_COLOR = {
    NodeClass.BOUNDARY: "#d62728",       # red
    NodeClass.ISOLATED_WEAK: "#2ca02c",  # green (weakly interior)
    NodeClass.WEAK: "#2ca02c",           # green
    NodeClass.STRONG: "#1f77b4",         # blue
}
_LOCALIZED_COLOR = "#1f77b4"   # blue
_UNLOCALIZED_COLOR = "#000000"  # black
_ZONE_COLOR = "#c6dbef"        # pale blue


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def render_svg(network: Network,
               classes: dict[int, NodeClass] | None = None,
               result: dict | None = None,
               size: float = 720.0) -> str:
    """Deterministic SVG: pale r/2 disks, edges, and colored nodes.

    Without a result, nodes are colored red/green/blue for
    boundary/weakly interior/strongly interior; with one, blue marks
    localized nodes and black unlocalized ones.
    """
    ids = network.ids
    result_nodes = None
    if result is not None:
        result_nodes = {entry["id"]: entry for entry in result["nodes"]}
        if set(result_nodes) != set(ids):
            raise FileFormatError("result file ids do not match the network")
    xs = [network.positions[v].x for v in ids]
    ys = [network.positions[v].y for v in ids]
    margin = network.r
    x0, y0 = min(xs) - margin, min(ys) - margin
    x1, y1 = max(xs) + margin, max(ys) + margin
    span = max(x1 - x0, y1 - y0)
    scale = size / span

    def sx(x: float) -> str:
        return _fmt((x - x0) * scale)

    def sy(y: float) -> str:
        return _fmt((y1 - y) * scale)  # flip so +y is up

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt((x1 - x0) * scale)}"'
        f' height="{_fmt((y1 - y0) * scale)}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    zone_r = _fmt(network.r / 2.0 * scale)
    for v in ids:
        p = network.positions[v]
        lines.append(f'<circle cx="{sx(p.x)}" cy="{sy(p.y)}" r="{zone_r}" '
                     f'fill="{_ZONE_COLOR}" fill-opacity="0.45"/>')
    for u, v in network.edges():
        p, q = network.positions[u], network.positions[v]
        lines.append(f'<line x1="{sx(p.x)}" y1="{sy(p.y)}" x2="{sx(q.x)}" '
                     f'y2="{sy(q.y)}" stroke="#999999" stroke-width="0.6"/>')
    node_r = _fmt(max(2.5, network.r * 0.08 * scale))
    for v in ids:
        p = network.positions[v]
        if result_nodes is not None:
            color = (_LOCALIZED_COLOR if result_nodes[v]["localized"]
                     else _UNLOCALIZED_COLOR)
        elif classes is not None:
            color = _CLASS_COLOR[classes[v]]
        else:
            color = _UNLOCALIZED_COLOR
        lines.append(f'<circle cx="{sx(p.x)}" cy="{sy(p.y)}" r="{node_r}" '
                     f'fill="{color}" class="node"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def derive_seed(root: int, label: str) -> int:
    """Label-split a 64-bit root seed into an independent stream seed."""
    digest = hashlib.sha256(f"{root}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1
