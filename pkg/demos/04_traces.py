"""Which spacetime lines are visible, which are washed out, and the
canal/ridge structure along the main diagonals.

Run:  python3 demos/04_traces.py
"""
import math
from collections import Counter

import numpy as np

from carpetlab.boxmodel import BoxConfig
from carpetlab.carpet import (dominant_extrema, modulation_factor, term_decomposition,
                              trace_catalog)
from carpetlab.wavepacket import GaussianPacket

box = BoxConfig()
T = box.revival_time

still = GaussianPacket.from_box_units(box, 0.25, 0.05, 0.0)
print("interference modulation for a packet at rest at L/4:")
for n in range(-4, 5):
    print(f"  n = {n:+d}: {modulation_factor(still, n):+.3f}")

events = trace_catalog(still, box, 1e-3)
print(f"{len(events)} visible lines at threshold 1e-3")
print("interference slopes present:",
      sorted(Counter(e.n for e in events if e.term_class == "interference")))
for e in events[:6]:
    print("  ", e.to_dict())

# A moving packet: along the line of inverse slope +1 from the left wall
# the interference term is a canal between two ridges, along -1 from the
# right wall a ridge between two canals.
moving = GaussianPacket.from_box_units(box, 0.25, 0.05, 20 * math.pi)
for n in (1, -1):
    center = (2 * n * 0.125) % 1.0
    x = np.linspace(center - 0.12, center + 0.12, 241)
    _, _, inter = term_decomposition(moving, box, x, T / 8, n_values={n})
    shape = [(round(pos, 3), kind) for pos, kind, _ in dominant_extrema(x, inter)]
    print(f"cut across slope {n:+d} at t = T/8:", shape)
