"""CSV/JSON serialisation of QLTF, DQLTF and comparison tables.

CSV files carry one ``# key=value ...`` metadata comment line ahead of the
header row; readers skip comment lines. Angles are degrees, frequencies rad/s.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .discrete import DqltfTable
from .multitone import FingerprintReport, QltfTable
from .spectral_core import phase_deg

QLTF_FIELDS = ["omega", "mag_U", "phase_U_deg", "mag_Y", "phase_Y_deg", "mag_G", "phase_G_deg"]
DQLTF_FIELDS = ["m", "omega_rad_s", "mag_U", "mag_Y", "mag_G", "phase_G_deg"]
COMPARE_FIELDS = ["omega", "mag_ratio", "phase_delta_deg"]


def _fmt(precision: int):
    spec = f"{{:.{precision}g}}"

    def f(x) -> str:
        s = spec.format(float(x))
        return "0" if s == "-0" else s

    return f


def qltf_records(table: QltfTable) -> list[dict]:
    order = np.argsort(table.omega, kind="stable")
    recs = []
    for i in order:
        u, y, g = table.u[i], table.y[i], table.g[i]
        recs.append(
            {
                "omega": float(table.omega[i]),
                "mag_U": float(abs(u)),
                "phase_U_deg": phase_deg(u),
                "mag_Y": float(abs(y)),
                "phase_Y_deg": phase_deg(y),
                "mag_G": float(abs(g)),
                "phase_G_deg": phase_deg(g),
            }
        )
    return recs


def _rows_to_csv(fields, records, meta: dict, precision: int) -> str:
    f = _fmt(precision)
    buf = io.StringIO()
    if meta:
        buf.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in records:
        w.writerow([r[k] if isinstance(r[k], (int, np.integer)) else f(r[k]) for k in fields])
    return buf.getvalue()


def _round(records, fields, precision):
    f = _fmt(precision)
    return [{k: (int(r[k]) if isinstance(r[k], (int, np.integer)) else float(f(r[k]))) for k in fields} for r in records]


def qltf_to_csv(table: QltfTable, precision: int = 6) -> str:
    return _rows_to_csv(QLTF_FIELDS, qltf_records(table), {"order": table.order}, precision)


def qltf_to_json(table: QltfTable, precision: int = 6) -> str:
    doc = {
        "order": table.order,
        "rows": _round(qltf_records(table), QLTF_FIELDS, precision),
        "diagnostics": list(table.diagnostics),
    }
    return json.dumps(doc, indent=2) + "\n"


def _parse_meta(lines) -> dict:
    meta = {}
    for line in lines:
        for item in line.lstrip("#").split():
            if "=" in item:
                k, v = item.split("=", 1)
                meta[k] = v
    return meta


def _table_from_records(order: int, recs: list[dict]) -> QltfTable:
    def cplx(mag, ph):
        return np.asarray(mag, dtype=float) * np.exp(1j * np.radians(np.asarray(ph, dtype=float)))

    cols = {k: [r[k] for r in recs] for k in QLTF_FIELDS}
    return QltfTable(
        order,
        np.asarray(cols["omega"], dtype=float),
        cplx(cols["mag_U"], cols["phase_U_deg"]),
        cplx(cols["mag_Y"], cols["phase_Y_deg"]),
        cplx(cols["mag_G"], cols["phase_G_deg"]),
    )


def read_qltf_table(path) -> QltfTable:
    """Parse a QLTF table written by :func:`qltf_to_csv` or :func:`qltf_to_json`."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        try:
            return _table_from_records(int(doc["order"]), doc["rows"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"{path}: not a QLTF JSON document ({exc})") from exc
    lines = text.splitlines()
    meta = _parse_meta(ln for ln in lines if ln.startswith("#"))
    body = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(body)
    if reader.fieldnames != QLTF_FIELDS:
        raise ValueError(f"{path}: expected header {','.join(QLTF_FIELDS)}")
    if "order" not in meta:
        raise ValueError(f"{path}: missing '# order=N' metadata line")
    try:
        recs = [{k: float(r[k]) for k in QLTF_FIELDS} for r in reader]
        return _table_from_records(int(meta["order"]), recs)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: {exc}") from exc


def dqltf_records(table: DqltfTable) -> list[dict]:
    omega = table.omega
    return [
        {
            "m": int(m),
            "omega_rad_s": float(w),
            "mag_U": float(abs(u)),
            "mag_Y": float(abs(y)),
            "mag_G": float(abs(g)),
            "phase_G_deg": phase_deg(g),
        }
        for m, w, u, y, g in zip(table.bins, omega, table.u, table.y, table.g)
    ]


def dqltf_to_csv(table: DqltfTable, precision: int = 6) -> str:
    meta = {"order": table.order, "N": table.N, "sample_interval": repr(table.sample_interval), "tau": table.tau}
    return _rows_to_csv(DQLTF_FIELDS, dqltf_records(table), meta, precision)


def dqltf_to_json(table: DqltfTable, precision: int = 6) -> str:
    doc = {
        "order": table.order,
        "N": table.N,
        "sample_interval": table.sample_interval,
        "tau": table.tau,
        "rows": _round(dqltf_records(table), DQLTF_FIELDS, precision),
        "diagnostics": list(table.diagnostics),
    }
    return json.dumps(doc, indent=2) + "\n"


def read_dqltf_csv(path) -> tuple[dict, list[dict]]:
    lines = Path(path).read_text().splitlines()
    meta = _parse_meta(ln for ln in lines if ln.startswith("#"))
    body = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(body)
    rows = [{k: (int(r[k]) if k == "m" else float(r[k])) for k in DQLTF_FIELDS} for r in reader]
    return meta, rows


def compare_records(rep: FingerprintReport) -> list[dict]:
    return [
        {"omega": float(w), "mag_ratio": float(r), "phase_delta_deg": float(d)}
        for w, r, d in zip(rep.omega, rep.mag_ratio, rep.phase_delta_deg)
    ]


def compare_to_csv(rep: FingerprintReport, precision: int = 6) -> str:
    f = _fmt(precision)
    meta = {
        "order": rep.order,
        "max_mag_deviation": f(rep.max_mag_deviation),
        "max_phase_deviation_deg": f(rep.max_phase_deviation_deg),
    }
    return _rows_to_csv(COMPARE_FIELDS, compare_records(rep), meta, precision)


def compare_to_json(rep: FingerprintReport, precision: int = 6) -> str:
    doc = {
        "order": rep.order,
        "rows": _round(compare_records(rep), COMPARE_FIELDS, precision),
        "max_mag_deviation": rep.max_mag_deviation,
        "max_phase_deviation_deg": rep.max_phase_deviation_deg,
        "unmatched": list(rep.unmatched),
    }
    return json.dumps(doc, indent=2) + "\n"
