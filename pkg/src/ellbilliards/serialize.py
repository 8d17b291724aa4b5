"""JSON and CSV encodings of billiards, grids, reports and sweeps.

Floats are written with Python's shortest round-trip repr (at most 17
significant digits) and dict keys keep insertion order, so the same input
always produces byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .billiard import Billiard, PonceletGrid, chord_lengths, is_at_infinity, turning_number
from .confocal import ConfocalEllipse
from .kinematics import kinematic_state

SWEEP_COLUMNS = ("u0", "perimeter", "sum_cos_theta", "C", "prod_r", "prod_l", "max_closure_residual")


def _f(x) -> float:
    # + 0.0 turns -0.0 into 0.0
    return float(x) + 0.0


def _point(p) -> list:
    return [_f(p[0]), _f(p[1])]


def config_to_dict(bil: Billiard) -> dict:
    cfg = bil.config
    return {
        "a_c": _f(cfg.fam.a_c),
        "b_c": _f(cfg.fam.b_c),
        "N": cfg.N,
        "tau": cfg.tau,
        "delta_u": _f(cfg.delta_u),
        "u0": _f(cfg.u0),
    }


def ellipse_to_dict(ell: ConfocalEllipse) -> dict:
    if ell.at_infinity:
        return {"at_infinity": True}
    return {"at_infinity": False, "k_e": _f(ell.k_e), "a_e": _f(ell.a_e), "b_e": _f(ell.b_e)}


def billiard_to_dict(bil: Billiard) -> dict:
    fam = bil.fam
    ks = kinematic_state(bil)
    ch = chord_lengths(bil)
    out = {
        "config": config_to_dict(bil),
        "modulus": _f(fam.m),
        "K": _f(fam.K),
        "ellipse": ellipse_to_dict(bil.ellipse),
        "k_e": _f(bil.k_e),
        "perimeter": _f(bil.perimeter),
        "closure_residual": _f(bil.closure_residual()),
        "vertices": [
            {
                "index": i + 1,
                "u": _f(bil.vertex_u[i]),
                "t": _f(bil.vertex_t[i]),
                "point": _point(bil.vertices[i]),
                "theta": _f(ks.theta[i]),
                "v_t": _f(ks.v_t[i]),
                "v_n": _f(ks.v_n[i]),
                "v": _f(ks.v[i]),
                "l": _f(ch.l[i]),
                "r": _f(ch.r[i]),
            }
            for i in range(bil.count)
        ],
        "contacts": [
            {
                "index": i + 1,
                "u": _f(bil.contact_u[i]),
                "t": _f(bil.contact_t[i]),
                "point": _point(bil.contacts[i]),
                "omega": _f(ks.omega[i]),
            }
            for i in range(bil.count)
        ],
    }
    if bil.is_closed:
        out["turning_number"] = int(round(turning_number(bil)))
    return out


def grid_to_dict(grid: PonceletGrid) -> dict:
    points = []
    for (i, j), p in sorted(grid.grid_points.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        entry = {"i": i + 1, "j": j}
        if is_at_infinity(p):
            entry["at_infinity"] = True
            entry["direction"] = _point(p.direction)
        else:
            entry["at_infinity"] = False
            entry["point"] = _point(p)
        points.append(entry)
    return {
        "config": config_to_dict(grid.base),
        "ellipse": ellipse_to_dict(grid.base.ellipse),
        "grid_ellipses": [dict(j=j, **ellipse_to_dict(e)) for j, e in enumerate(grid.grid_ellipses, 1)],
        "grid_points": points,
    }


def reports_to_dict(reports, passed: bool) -> dict:
    return {"passed": passed, "checks": [r.to_dict() for r in reports]}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([repr(_f(getattr(row, c))) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def parse_point(entry) -> tuple:
    """Inverse of the grid-point encoding: ``(x, y)`` or ``None`` at infinity."""
    if entry.get("at_infinity"):
        return None
    x, y = entry["point"]
    return (x, y) if math.isfinite(x) and math.isfinite(y) else None
