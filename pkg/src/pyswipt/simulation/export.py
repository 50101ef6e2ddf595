"""
PySWIPT Result Export

CSV and SVG writers for sweep curves and verification reports.
"""

from pathlib import Path
from typing import Optional, Sequence, Union
import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .simulator import CurveSet, CURVE_COLUMNS
from ..validation.oracle import OracleReport, reports_frame


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.6g"


def _emit(text: str, path: Optional[PathLike]) -> str:
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {path}")
    return text


def write_curves_csv(curves: CurveSet, path: Optional[PathLike] = None) -> str:
    """Write curves as ``policy,p_c_dBm,mean_se,std_se,trials``.

    Rows are sorted by policy then p_c, floats carry 6 significant digits and
    the file ends with a newline, so equal CurveSets give byte-identical files.

    Args:
        curves: Curves to write
        path: Destination; None only returns the text

    Returns:
        The CSV text
    """
    frame = curves.frame[CURVE_COLUMNS]
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return _emit(text, path)


def write_reports_csv(reports: Sequence[OracleReport], path: Optional[PathLike] = None) -> str:
    """Write verification reports, one row per instance."""
    text = reports_frame(reports).to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return _emit(text, path)


def write_curves_svg(curves: CurveSet, path: PathLike, title: Optional[str] = None) -> None:
    """Plot mean spectral efficiency against circuit power as SVG.

    Args:
        curves: Curves to plot, one line per policy
        path: Destination file
        title: Optional plot title
    """
    plt.rcParams["svg.hashsalt"] = "pyswipt"
    fig, ax = plt.subplots(figsize=(8, 5))
    for policy in curves.policies:
        rows = curves.curve(policy)
        ax.errorbar(rows["p_c_dBm"], rows["mean_se"], yerr=rows["std_se"],
                    marker="o", markersize=3, capsize=2, label=policy)
    ax.set_xlabel("Circuit power (dBm)")
    ax.set_ylabel("Spectral efficiency (bit/s/Hz)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if curves.policies:
        ax.legend()
    plt.tight_layout()
    plt.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Wrote {path}")
