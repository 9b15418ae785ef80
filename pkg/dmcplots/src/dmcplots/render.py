"""Render the three experiment figures from dmclearn CSV + manifest files.

fig2: step CDFs of the LM rate for two learners (plug-in and virtual sample).
fig3: success probability against the smoothing exponent alpha.
fig4: scatter of per-trial (LM rate, learned rate R) with the success region
      boundaries R = I - epsilon and R = LM rate drawn in red.

All numbers are read from the CSVs and the run manifests written by the
dmclearn CLI; nothing is recomputed here.  Output is deterministic: fixed
style, no timestamps in image metadata.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "svg.hashsalt": "dmcplots",
}


class MissingColumnError(ValueError):
    def __init__(self, path: str, column: str):
        super().__init__(f"{path}: missing required column {column!r}")
        self.column = column


@dataclass(frozen=True)
class FigureJob:
    figure: str  # "fig2" | "fig3" | "fig4"
    csv_paths: tuple[str, ...]
    out_path: str
    manifest_path: str | None = None
    labels: tuple[str, ...] = field(default=())


def read_columns(path: str, required: tuple[str, ...]) -> dict[str, list[str]]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise MissingColumnError(path, col)
        rows = list(reader)
    return {col: [row[col] for row in rows] for col in required}


def read_manifest(path: str) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def _save(fig, out_path: str):
    # SVG date metadata is suppressed so identical inputs give identical bytes
    fig.savefig(out_path, metadata={"Date": None} if out_path.endswith(".svg") else None)
    plt.close(fig)


def _step_cdf(ax, rates, cdf, label):
    # prepend a point at the first atom so the step starts from 0 probability
    ax.step([rates[0]] + rates, [0.0] + cdf, where="post", label=label)


def render_fig2(job: FigureJob) -> str:
    """Step CDFs of the LM rate, one curve per input CSV."""
    labels = job.labels or tuple(f"learner {i + 1}" for i in range(len(job.csv_paths)))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for path, label in zip(job.csv_paths, labels):
            cols = read_columns(path, ("rate_bits", "cdf"))
            rates = [float(v) for v in cols["rate_bits"]]
            cdf = [float(v) for v in cols["cdf"]]
            _step_cdf(ax, rates, cdf, label)
        ax.set_xlabel("LM rate (bits)")
        ax.set_ylabel("CDF")
        ax.set_ylim(0.0, 1.02)
        ax.legend()
        _save(fig, job.out_path)
    return job.out_path


def render_fig3(job: FigureJob) -> str:
    """Success probability over the smoothing-exponent grid."""
    cols = read_columns(job.csv_paths[0], ("alpha", "success_prob"))
    alphas = [float(v) for v in cols["alpha"]]
    probs = [float(v) for v in cols["success_prob"]]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(alphas, probs, marker="o")
        ax.set_xlabel(r"$\alpha$")
        ax.set_ylabel("success probability")
        _save(fig, job.out_path)
    return job.out_path


def render_fig4(job: FigureJob) -> str:
    """Per-trial (LM rate, R) scatter with the success region in red.

    The boundary values (the rate threshold and the identity line) come from
    the run manifest; this module never recomputes them.
    """
    manifest_path = job.manifest_path or job.csv_paths[0] + ".manifest.json"
    manifest = read_manifest(manifest_path)
    try:
        threshold = float(manifest["success_threshold_bits"])
        mi = float(manifest["mutual_information_bits"])
    except KeyError as e:
        raise MissingColumnError(manifest_path, str(e))
    cols = read_columns(job.csv_paths[0], ("lm_rate_bits", "R_bits"))
    lm = [float(v) for v in cols["lm_rate_bits"]]
    rr = [float(v) for v in cols["R_bits"]]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.scatter(lm, rr, s=8, alpha=0.5, label="trials")
        lo = min(min(lm), min(rr), threshold) - 0.01
        hi = max(max(lm), max(rr), mi) + 0.01
        ax.plot([lo, hi], [threshold, threshold], color="red",
                label="rate threshold")
        ax.plot([lo, hi], [lo, hi], color="red", linestyle="--",
                label="R = LM rate")
        ax.set_xlim(lo, hi)
        ax.set_xlabel("LM rate (bits)")
        ax.set_ylabel("learned rate R (bits)")
        ax.legend()
        _save(fig, job.out_path)
    return job.out_path


RENDERERS = {"fig2": render_fig2, "fig3": render_fig3, "fig4": render_fig4}


def render(job: FigureJob) -> str:
    """Render a figure job; returns the written image path."""
    try:
        renderer = RENDERERS[job.figure]
    except KeyError:
        raise ValueError(f"unknown figure id {job.figure!r}; expected one of {sorted(RENDERERS)}")
    return renderer(job)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dmcplots", description="Render experiment figures from dmclearn CSV outputs."
    )
    sub = parser.add_subparsers(dest="figure", required=True)

    sp = sub.add_parser("fig2", help="LM-rate CDF step curves")
    sp.add_argument("--csv", action="append", required=True,
                    help="CDF CSV (repeat for multiple curves)")
    sp.add_argument("--label", action="append", default=None,
                    help="legend label per CSV, in order")
    sp.add_argument("--out", required=True, help="output image (.png or .svg)")

    sp = sub.add_parser("fig3", help="success probability vs smoothing exponent")
    sp.add_argument("--csv", required=True, help="alpha-sweep CSV")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("fig4", help="per-trial rate scatter with success region")
    sp.add_argument("--csv", required=True, help="VSEE trials CSV")
    sp.add_argument("--manifest", default=None,
                    help="run manifest (default: <csv>.manifest.json)")
    sp.add_argument("--out", required=True)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    csv_paths = tuple(args.csv) if isinstance(args.csv, list) else (args.csv,)
    job = FigureJob(
        figure=args.figure,
        csv_paths=csv_paths,
        out_path=args.out,
        manifest_path=getattr(args, "manifest", None),
        labels=tuple(args.label) if getattr(args, "label", None) else (),
    )
    try:
        path = render(job)
    except (MissingColumnError, OSError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
