import os
import subprocess
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.mark.parametrize("argv", [
    ["clt_sweep.py", "--sizes", "10,20", "--trials", "30"],
    ["kolmogorov_decay.py", "--sizes", "20,40", "--trials", "5"],
])
def test_script_runs(argv):
    res = subprocess.run([sys.executable, os.path.join(ROOT, "scripts", argv[0]), *argv[1:]],
                         capture_output=True, text=True, check=True)
    lines = res.stdout.strip().splitlines()
    assert len(lines) == 3 and lines[0].startswith("n,")


def test_density_tables(tmp_path):
    subprocess.run([sys.executable, os.path.join(ROOT, "scripts", "density_tables.py"),
                    "--outdir", str(tmp_path), "--grid", "11"], check=True, capture_output=True)
    assert len([p for p in os.listdir(tmp_path) if p.endswith(".csv")]) == 7
