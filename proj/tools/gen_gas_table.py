#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Regenerate data/itu_p676_standard.csv.

Uses the ITU-R P.676-12 Annex 1 line-by-line model (via the `itur` package)
at the reference surface atmosphere. Only needed when refreshing the table.
"""
import sys

import numpy as np
from itur.models import itu676

PRESSURE_HPA = 1013.25
TEMPERATURE_K = 288.15
RHO_G_M3 = 7.5


def grid():
    freqs = set(np.round(np.arange(1.0, 100.0 + 1e-9, 0.25), 4))
    freqs |= set(np.round(np.arange(20.0, 25.0 + 1e-9, 0.1), 4))
    freqs |= set(np.round(np.arange(50.0, 70.0 + 1e-9, 0.1), 4))
    freqs.add(22.235)
    return sorted(freqs)


def main(out):
    itu676.change_version(12)
    with open(out, "w") as fh:
        fh.write("# ITU-R P.676-12 specific attenuation, oxygen + water vapour; "
                 "pressure_hpa=1013.25 temperature_c=15 water_vapour_g_m3=7.5\n")
        fh.write("freq_ghz,atten_db_per_km\n")
        for f in grid():
            g = itu676.gamma_exact(f, PRESSURE_HPA, RHO_G_M3, TEMPERATURE_K).value
            fh.write(f"{f:g},{float(g):.6g}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/itu_p676_standard.csv")
