"""Plot sweep CSVs (axis column first, one column per basis) to PNG.

Usage: python3 scripts/plot_csv.py FILE.csv [FILE.csv ...]
"""

import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot(path):
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    x = [float(r[0]) for r in body]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for i, name in enumerate(header[1:], start=1):
        ax.plot(x, [float(r[i]) for r in body], label=name)
    ax.set_xlabel(header[0])
    ax.set_ylabel("fidelity")
    ax.set_title(path.stem)
    ax.legend()
    fig.tight_layout()
    target = path.with_suffix(".png")
    fig.savefig(target, dpi=120)
    plt.close(fig)
    return target


if __name__ == "__main__":
    for arg in sys.argv[1:]:
        print(plot(arg))
