"""Generated matplotlib scripts for a results directory; nothing is rendered here."""

from pathlib import Path
from typing import Iterable, List, Union

HEADER = '''"""Plots for {directory}. Generated by smectic-bps; run with python and matplotlib installed."""

from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

HERE = Path(__file__).resolve().parent
'''

PROFILE_BLOCK = '''
profile = pd.read_csv(HERE / "{name}")
fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.5))
left.plot(profile["t"], profile["g"], label="g")
left.plot(profile["t"], 1.0 / (1.0 + np.exp(-4.0 * profile["W"].max() * profile["t"])), "--", label="logistic")
left.set_xlabel("t")
left.legend()
right.semilogy(profile["t"], profile["W"])
right.set_xlabel("t")
right.set_ylabel("W(g)")
fig.tight_layout()
fig.savefig(HERE / "{stem}.pdf")
'''

SWEEP_BLOCK = '''
sweep = pd.read_csv(HERE / "{name}")
fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.5))
left.semilogy(1.0 / sweep["eps"], sweep["oned_excess"], "o-")
left.set_xlabel("1/eps")
left.set_ylabel("r1D - cost")
right.loglog(sweep["eps"], sweep["defect_norm"], "o-", label="compression defect")
right.loglog(sweep["eps"], sweep["concentration_radius"], "s-", label="95% radius")
right.set_xlabel("eps")
right.legend()
fig.tight_layout()
fig.savefig(HERE / "{stem}.pdf")
'''

ENERGY_BLOCK = '''
table = pd.read_csv(HERE / "{name}")
fig, ax = plt.subplots(figsize=(5, 3.5))
for column in ("compression", "bending", "total"):
    if column in table:
        ax.plot(table.index, table[column], "o-", label=column)
ax.legend()
fig.tight_layout()
fig.savefig(HERE / "{stem}.pdf")
'''


class PlotScriptFormatter:
    """Builds the text of a plotting script from the CSV files it finds."""

    def classify(self, name: str) -> str:
        if name.startswith("profile"):
            return "profile"
        if name.startswith("sweep"):
            return "sweep"
        return "energy"

    def format_script(self, directory: Union[str, Path], csv_names: Iterable[str]) -> str:
        blocks: List[str] = [HEADER.format(directory=Path(directory).name)]
        templates = {"profile": PROFILE_BLOCK, "sweep": SWEEP_BLOCK, "energy": ENERGY_BLOCK}
        for name in sorted(csv_names):
            blocks.append(templates[self.classify(name)].format(name=name, stem=Path(name).stem))
        blocks.append("\nplt.show()\n")
        return "".join(blocks)

    def script_for_directory(self, directory: Union[str, Path]) -> str:
        directory = Path(directory)
        return self.format_script(directory, [path.name for path in directory.glob("*.csv")])
