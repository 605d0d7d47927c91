"""Driving the command line harness from Python: render, validate, list
traces and take a slice, all from the JSON configs next to this script.

Run:  python3 demos/05_harness.py
The same commands are available as ``carpetlab <command> --config ...``.
"""
import os
import tempfile

from carpetlab.harness.cli import main

here = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")
out = tempfile.mkdtemp(prefix="carpetlab-")

print("render:", main(["carpet", "--config", f"{here}/still_packet.json",
                       "--out", f"{out}/still.pgm"]))
print("validate (exit 0 expected):")
main(["validate", "--config", f"{here}/still_packet.json"])
print("validate with n_max = 1 (exit 3 expected):",
      main(["validate", "--config", f"{here}/too_few_slopes.json"]))
print("stationary eigenmode:", main(["validate", "--config", f"{here}/ground_state.json"]))
main(["traces", "--config", f"{here}/still_packet.json", "--threshold", "0.5"])
main(["slice", "--config", f"{here}/moving_packet.json", "--axis", "fixed-t",
      "--value", "0.125", "--out", f"{out}/slice.csv"])
print("outputs in", out, sorted(os.listdir(out)))
