import argparse
from pathlib import Path
from typing import Literal, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from pydantic import Field  # noqa: E402

from saddlecount.operations.models import IntegrabilityRow, SandwichRow, ScanRow  # noqa: E402
from saddlecount.routers.base import CommandRouter, RunConfig, add_run_arguments, write_outputs  # noqa: E402
from saddlecount.storage.csv_interface import CsvInterface  # noqa: E402

ROW_CLASSES = {
    "growth": ScanRow,
    "residuals": ScanRow,
    "sandwich": SandwichRow,
    "integrability": IntegrabilityRow,
}


class PlotRequest(RunConfig):
    input: str = Field(..., min_length=1)
    kind: Literal["growth", "residuals", "sandwich", "integrability"]
    name: Optional[str] = None

    def stem(self) -> str:
        return self.name or f"{Path(self.input).stem}_{self.kind}"


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="CSV written by scan, fit, sandwich or integrability")
    parser.add_argument("--kind", choices=sorted(ROW_CLASSES), required=True)
    parser.add_argument("--name", default=argparse.SUPPRESS, help="output file stem")
    add_run_arguments(parser)


def _draw(ax, kind: str, rows: list) -> None:
    if kind == "growth":
        ax.loglog([row.T for row in rows], [max(row.N, 1) for row in rows], "o", ms=3, label="N(T)")
        fitted = [row for row in rows if row.predicted == row.predicted]
        if fitted:
            ax.loglog([row.T for row in fitted], [row.predicted for row in fitted], "-", label="c X")
        ax.set_xlabel("T")
        ax.set_ylabel("count")
    elif kind == "residuals":
        ax.plot([row.T for row in rows], [row.residual for row in rows], "o-", ms=3)
        ax.axhline(0.0, color="grey", lw=0.5)
        ax.set_xlabel("T")
        ax.set_ylabel("N - c X")
    elif kind == "sandwich":
        order = sorted(range(len(rows)), key=lambda k: (rows[k].t, rows[k].theta))
        xs = list(range(len(order)))
        ax.fill_between(xs, [rows[k].lower for k in order], [rows[k].upper for k in order], alpha=0.3,
                        label="lower .. upper")
        ax.plot(xs, [rows[k].middle for k in order], "k.", ms=3, label="N(e^t)")
        ax.set_xlabel("check (sorted by t, theta)")
        ax.set_ylabel("count")
    else:
        ax.plot([row.t for row in rows], [row.value for row in rows], "o-", ms=3, label="circle average")
        ax.plot([row.t for row in rows], [row.running_sup for row in rows], "--", label="running sup")
        ax.set_xlabel("t")
        ax.set_ylabel("average of systole^(-alpha2)")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()


def run(request: PlotRequest) -> None:
    rows = CsvInterface(ROW_CLASSES[request.kind]).read(request.input)
    stem = request.stem()
    write_outputs(request, "plot", ROW_CLASSES[request.kind], rows, stem=stem)
    plt.rcParams["svg.hashsalt"] = "saddlecount"
    fig, ax = plt.subplots(figsize=(6, 4))
    _draw(ax, request.kind, rows)
    ax.set_title(stem)
    fig.tight_layout()
    target = Path(request.out) / f"{stem}.svg"
    fig.savefig(target, format="svg", metadata={"Date": None})
    plt.close(fig)
    print(target)


router = CommandRouter("plot", "static SVG chart from a CSV sidecar", PlotRequest, configure, run)
