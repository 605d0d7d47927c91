"""Eigenmodes of the box, a Gaussian packet expanded on them, and the two
exact revivals of the density.

Run:  python3 demos/01_box_and_revivals.py
"""
import numpy as np

from carpetlab.boxmodel import BoxConfig, eigenfunction, eigenphase
from carpetlab.propagator import probability_direct
from carpetlab.wavepacket import GaussianPacket, expand

box = BoxConfig()  # M = L = hbar = 1
T = box.revival_time
print(f"revival time T = {T:.15f}  (4/pi)")

# Walls are exact nodes of every eigenfunction, and the spectrum is
# quadratic: after one revival time each mode has turned 2 pi m**2.
print("u_m at the walls:", {m: (eigenfunction(box, m, 0.0), eigenfunction(box, m, 1.0))
                            for m in (1, 7, 40)})
print("phase(T)/2pi for m = 1..5:", [eigenphase(box, m, T) / (2 * np.pi) for m in range(1, 6)])

# A packet at L/4 of width L/20, at rest.
packet = GaussianPacket.from_box_units(box, 0.25, 0.05, 0.0)
state = expand(packet, box)
print(f"retained modes M = {state.m_max}, sum |psi_m|^2 = {state.mode_norm:.15f}")
print(f"wall leakage {packet.leakage_left:.2e} / {packet.leakage_right:.2e}, "
      f"boundary safe: {packet.boundary_safe}")

x = np.linspace(0.0, 1.0, 501)
w0 = probability_direct(state, box, x, 0.0)
full = probability_direct(state, box, x, T)
half = probability_direct(state, box, x, T / 2)
print(f"sup |W(x,T) - W(x,0)|     = {np.max(np.abs(full - w0)):.2e}")
print(f"sup |W(x,T/2) - W(L-x,0)| = {np.max(np.abs(half - w0[::-1])):.2e}")

# In between, the packet spreads and splits into copies: at T/4 it is a
# superposition of two half-size copies.
quarter = probability_direct(state, box, x, T / 4)
peaks = x[1:-1][(quarter[1:-1] > quarter[:-2]) & (quarter[1:-1] > quarter[2:]) & (quarter[1:-1] > 1)]
print("density peaks at T/4:", np.round(peaks, 3))
