"""Log-log ratio plots for RatioReports, rendered to standalone SVG."""

import io

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

# fixed salt and no timestamp: identical reports give identical bytes
_RC = {"svg.hashsalt": "expweights", "svg.fonttype": "path"}


def ratio_figure(report, ax_title=None):
    fig = Figure(figsize=(5.0, 3.6))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot(1, 1, 1)
    ns, rs = report.ns(), report.ratios()
    ax.loglog(ns, rs, "o-", color="0.15", lw=1.2, ms=4)
    ax.set_xlabel("n")
    ax.set_ylabel("ratio")
    ax.set_title(ax_title or f"{report.inequality_id}  slope {report.slope:.3f}  "
                 f"{report.verdict}", fontsize=9)
    ax.grid(True, which="both", lw=0.3, color="0.8")
    fig.tight_layout()
    return fig


def report_svg(report, title=None):
    """SVG document (str) with the log-log polyline of ratio against n."""
    with matplotlib.rc_context(_RC):
        fig = ratio_figure(report, title)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()
