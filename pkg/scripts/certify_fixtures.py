"""Certify the shipped fixtures and print their volumes and timings.

Usage: python scripts/certify_fixtures.py [--json]
"""
from __future__ import annotations

import argparse
import json
import time

from artifact.certify import krawczyk_certify
from artifact.intervals import render_interval
from artifact.solver import solve
from artifact.triangulation import FIXTURES, gluing_system, load_fixture


def certify_one(name: str) -> dict:
    t0 = time.perf_counter()
    tri = load_fixture(name)
    sys_ = gluing_system(tri)
    cert = krawczyk_certify(sys_, solve(sys_))
    elapsed = time.perf_counter() - t0
    vol = cert.volume_enclosure
    return {
        "name": name,
        "tetrahedra": tri.n,
        "cusps": len(tri.peripheral),
        "geometric": cert.geometric,
        "unique": cert.unique,
        "volume": render_interval(vol) if vol else None,
        "volume_width": vol.width if vol else None,
        "seconds": round(elapsed, 4),
        "shapes": cert.render(),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    rows = [certify_one(n) for n in FIXTURES]
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        for r in rows:
            print(f"{r['name']:13s} n={r['tetrahedra']} cusps={r['cusps']} geometric={r['geometric']} "
                  f"vol={r['volume']} ({r['seconds']} s)")
            print(f"  {r['shapes']}")
    return 0 if all(r["geometric"] and r["unique"] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
