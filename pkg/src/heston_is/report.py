"""Tabular results, CSV output and figures (gnuplot script plus a rendered PNG)."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field

NA = "NA"


@dataclass(frozen=True)
class PlotSpec:
    x: str
    y: str
    group: str | None = None
    yerr: str | None = None
    logx: bool = False
    logy: bool = False
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    hlines: tuple[tuple[str, float], ...] = ()


@dataclass
class Table:
    header: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    plot: PlotSpec | None = None
    # Extra data needed only by the figure, written next to the main CSV.
    plot_data: "Table | None" = None

    def add(self, *row) -> None:
        if len(row) != len(self.header):
            raise ValueError(f"row has {len(row)} cells, header has {len(self.header)}")
        self.rows.append(tuple(row))

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [r[i] for r in self.rows]


def format_cell(value) -> str:
    if value is None:
        return NA
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else NA
    return str(value)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    for row in table.rows:
        w.writerow([format_cell(c) for c in row])
    return buf.getvalue()


def _numeric(values):
    out = []
    for v in values:
        try:
            f = float(v)
        except (TypeError, ValueError):
            f = math.nan
        out.append(f)
    return out


def _groups(table: Table, spec: PlotSpec):
    if spec.group is None:
        return [(None, table.rows)]
    gi = table.header.index(spec.group)
    order: dict = {}
    for r in table.rows:
        order.setdefault(format_cell(r[gi]), []).append(r)
    return list(order.items())


def gnuplot_script(table: Table, spec: PlotSpec, data_file: str, image_file: str) -> str:
    col = {name: i + 1 for i, name in enumerate(table.header)}
    lines = [
        "# Regenerate with: gnuplot " + os.path.splitext(os.path.basename(image_file))[0] + ".gp",
        "set datafile separator ','",
        "set datafile missing 'NA'",
        "set terminal pngcairo size 900,600",
        f"set output '{os.path.basename(image_file)}'",
        f"set title '{spec.title}'",
        f"set xlabel '{spec.xlabel or spec.x}'",
        f"set ylabel '{spec.ylabel or spec.y}'",
        "set key left top",
        "set grid",
    ]
    if spec.logx:
        lines.append("set logscale x")
    if spec.logy:
        lines.append("set logscale y")
    x, y = col[spec.x], col[spec.y]
    style = "with yerrorbars" if spec.yerr else "with linespoints"
    using = f"{x}:{y}:({2}*${col[spec.yerr]})" if spec.yerr else f"{x}:{y}"
    clauses = []
    data = os.path.basename(data_file)
    for label, _ in _groups(table, spec):
        if label is None:
            clauses.append(f"'{data}' using {using} skip 1 {style} title '{spec.y}'")
        else:
            g = col[spec.group]
            xexpr = f"(strcol({g}) eq '{label}' ? ${x} : 1/0)"
            u = using.replace(f"{x}:", f"{xexpr}:", 1)
            clauses.append(f"'{data}' using {u} skip 1 {style} title '{spec.group}={label}'")
    for name, value in spec.hlines:
        clauses.append(f"{value!r} with lines dashtype 2 title '{name}'")
    lines.append("plot " + ", \\\n     ".join(clauses))
    return "\n".join(lines) + "\n"


def render_png(table: Table, spec: PlotSpec, image_file: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(9, 6))
    xi = table.header.index(spec.x)
    yi = table.header.index(spec.y)
    ei = table.header.index(spec.yerr) if spec.yerr else None
    for label, rows in _groups(table, spec):
        xs = _numeric(r[xi] for r in rows)
        ys = _numeric(r[yi] for r in rows)
        keep = [i for i in range(len(xs)) if math.isfinite(xs[i]) and math.isfinite(ys[i]) and (ys[i] > 0 or not spec.logy)]
        if not keep:
            continue
        name = spec.y if label is None else f"{spec.group}={label}"
        px, py = [xs[i] for i in keep], [ys[i] for i in keep]
        if ei is not None:
            errs = _numeric(rows[i][ei] for i in keep)
            ax.errorbar(px, py, yerr=[2 * e for e in errs], fmt="o", capsize=4, label=name)
        else:
            ax.plot(px, py, marker="o", label=name)
    for name, value in spec.hlines:
        ax.axhline(value, linestyle="--", color="grey", label=name)
    if spec.logx:
        ax.set_xscale("log")
    if spec.logy:
        ax.set_yscale("log")
    ax.set_title(spec.title)
    ax.set_xlabel(spec.xlabel or spec.x)
    ax.set_ylabel(spec.ylabel or spec.y)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(image_file, dpi=110)
    plt.close(fig)


def write_outputs(table: Table, out_path: str, render: bool = True) -> list[str]:
    """Write the CSV and, when the table has a plot, a gnuplot script and a PNG beside it."""
    written = []
    directory = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(directory, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv(table))
    written.append(out_path)
    if table.plot is None:
        return written
    stem = os.path.splitext(out_path)[0]
    source, data_file = table, out_path
    if table.plot_data is not None:
        source, data_file = table.plot_data, stem + "_curve.csv"
        with open(data_file, "w", encoding="utf-8", newline="") as fh:
            fh.write(to_csv(source))
        written.append(data_file)
    image = stem + ".png"
    script = stem + ".gp"
    with open(script, "w", encoding="utf-8") as fh:
        fh.write(gnuplot_script(source, table.plot, data_file, image))
    written.append(script)
    if render:
        render_png(source, table.plot, image)
        written.append(image)
    return written
