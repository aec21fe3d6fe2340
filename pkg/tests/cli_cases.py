"""Documented CLI invocations on the bundled scenarios with expected exit codes."""
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
SC = ROOT / "scenarios"
FX = Path(__file__).resolve().parent / "fixtures"

# (argv, expected exit code) for every documented command
COMMANDS = [
    (["validate", SC / "classical.json"], 0),
    (["validate", SC / "gbit.json"], 0),
    (["validate", SC / "qubit.json"], 0),
    (["coexist", SC / "classical.json", "--a", "A", "--b", "B"], 0),
    (["coexist", SC / "gbit.json", "--a", "X", "--b", "Y"], 1),
    (["coexist", SC / "gbit.json", "--a", "X", "--b", "X"], 0),
    (["coexist", SC / "qubit.json", "--a", "Z", "--b", "Xo"], 1),
    (["repeatable", SC / "classical.json", "--effect", "a"], 0),
    (["repeatable", SC / "classical.json", "--effect", "a", "--op", "H"], 0),
    (["repeatable", SC / "classical.json", "--effect", "half"], 1),
    (["repeatable", SC / "classical.json", "--effect", "zero"], 0),
    (["seqprod", SC / "classical.json", "--obs", "A", "--instr", "I",
      "--then", "B"], 0),
    (["condition", SC / "gbit.json", "--obs", "X", "--instr", "IX",
      "--then", "Y"], 0),
    (["commutant", SC / "classical.json", "--state", "uniform", "--a", "e1",
      "--b", "e2"], 0),
    (["compose", SC / "gbit.json", "--i", "IX", "--j", "IY"], 0),
    (["validate", FX / "invalid_effect.json"], 1),
    (["validate", FX / "malformed.json"], 2),
    (["validate", FX / "does_not_exist.json"], 2),
    (["coexist", SC / "gbit.json", "--a", "X", "--b", "nope"], 2),
]
