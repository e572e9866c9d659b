# Codes By Visionnn

from pathlib import Path
from typing import Dict, List, Optional, Sequence

from rich import box
from rich.align import Align
from rich.console import Console
from rich.panel import Panel
from rich.rule import Rule
from rich.table import Table
from rich.text import Text

from config import APP_AUTHOR, APP_TAGLINE, APP_VERSION, NS_PER_US

console = Console()

# ─── Color Palette ────────────────────────────────────────────────────────────
COLOR_PRIMARY   = "bright_cyan"
COLOR_SUCCESS   = "bright_green"
COLOR_WARNING   = "bright_yellow"
COLOR_ERROR     = "bright_red"
COLOR_DIM       = "dim white"
COLOR_ACCENT    = "magenta"
COLOR_HIGHLIGHT = "bold bright_white"


BANNER = r"""
   __                __              __
  / /  __ _________ / /____ _______ / /__
 / _ \/ // / __(_-</ __(_-</ __/ _ `/ / -_)
/_.__/\_,_/_/ /___/\__/___/\__/\_,_/_/\__/
"""


def print_banner() -> None:
    """Print the burstscale ASCII art banner with version and author info."""
    console.print()

    banner_text = Text(BANNER, style=f"bold {COLOR_PRIMARY}")
    console.print(Align.center(banner_text))

    subtitle = Text(f"  {APP_TAGLINE}", style=f"italic {COLOR_DIM}")
    console.print(Align.center(subtitle))

    info_line = Text(
        f"  v{APP_VERSION}  ·  Developed by {APP_AUTHOR}",
        style=f"dim {COLOR_ACCENT}",
    )
    console.print(Align.center(info_line))
    console.print()
    console.print(Rule(style=f"dim {COLOR_PRIMARY}"))
    console.print()


def print_success(message: str) -> None:
    console.print(f"\n  [{COLOR_SUCCESS}]✓ {message}[/{COLOR_SUCCESS}]")


def print_error(message: str) -> None:
    console.print(f"\n  [{COLOR_ERROR}]✗ {message}[/{COLOR_ERROR}]")


def print_warning(message: str) -> None:
    console.print(f"\n  [{COLOR_WARNING}]⚠ {message}[/{COLOR_WARNING}]")


def print_info(message: str) -> None:
    console.print(f"  [{COLOR_DIM}]→ {message}[/{COLOR_DIM}]")


def print_section(title: str) -> None:
    console.print()
    console.print(Rule(f"[bold {COLOR_PRIMARY}]{title}[/bold {COLOR_PRIMARY}]", style=f"dim {COLOR_PRIMARY}"))
    console.print()


# ─── Tables ───────────────────────────────────────────────────────────────────

def _fmt_us(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:,.1f}"


def print_results_table(rows: Sequence[Dict[str, object]]) -> None:
    """One row per (SLO, mode) cell. Error cells show their message."""
    table = Table(
        box=box.ROUNDED,
        border_style=COLOR_PRIMARY,
        header_style=f"bold {COLOR_PRIMARY}",
        padding=(0, 1),
        expand=False,
    )
    table.add_column("SLO (µs)", justify="right")
    table.add_column("Mode", style=COLOR_HIGHLIGHT)
    table.add_column("p50 (µs)", justify="right")
    table.add_column("p99 (µs)", justify="right")
    table.add_column("Avg. Cores", justify="right")
    table.add_column("Loss Rate", justify="right")
    table.add_column("Alerts", justify="right")

    for row in rows:
        slo = f"{row['slo_us']:g}"
        if row.get("type") == "error":
            table.add_row(slo, str(row["mode"]), Text(str(row["error"]), style=COLOR_ERROR), "", "", "", "")
            continue
        p99 = row.get("p99_us")
        over = p99 is not None and p99 > row["slo_us"]
        table.add_row(
            slo,
            str(row["mode"]),
            _fmt_us(row.get("p50_us")),
            Text(_fmt_us(p99), style=COLOR_WARNING if over else ""),
            f"{row['avg_cores']:.2f}",
            f"{row['loss_rate']:.2%}",
            str(row["alerts"]),
        )

    console.print(Align.center(table))
    console.print()


def print_trace_stats(stats, source: str) -> None:
    table = Table(
        show_header=False,
        box=box.DOUBLE_EDGE,
        border_style=COLOR_SUCCESS,
        padding=(0, 2),
        expand=False,
    )
    table.add_column("Label", style=f"bold {COLOR_DIM}", width=22)
    table.add_column("Value", style=COLOR_HIGHLIGHT)

    table.add_row("Source",              source)
    table.add_row("Packets",             f"{stats.packet_count:,}")
    table.add_row("Flows",               f"{stats.flow_count:,}")
    table.add_row("Duration",            f"{stats.duration_ns / NS_PER_US:,.1f} µs")
    table.add_row("Max flow rate",       f"{stats.max_flow_rate:,.0f} pkts/s")
    table.add_row("Flow arrival rate",   f"{stats.flow_arrival_rate:,.1f} flows/s")

    console.print()
    console.print(
        Panel(
            Align.center(table),
            title=f"[bold {COLOR_SUCCESS}]Trace Statistics[/bold {COLOR_SUCCESS}]",
            border_style=COLOR_SUCCESS,
            padding=(1, 4),
        )
    )
    console.print()


def print_frontier_summary(family) -> None:
    table = Table(box=box.ROUNDED, border_style=COLOR_PRIMARY, header_style=f"bold {COLOR_PRIMARY}", expand=False)
    table.add_column("Level", justify="right")
    table.add_column("Cuts")
    table.add_column("Points", justify="right")
    table.add_column("p at 1 flow", justify="right")
    table.add_column("Max flows", justify="right")
    for frontier in family.frontiers:
        table.add_row(
            str(frontier.level),
            frontier.scheme.label(),
            str(len(frontier.points)),
            str(frontier.points[0][1]),
            str(frontier.points[-1][0]),
        )
    console.print(Align.center(table))


def print_threshold_summary(table_) -> None:
    table = Table(box=box.ROUNDED, border_style=COLOR_PRIMARY, header_style=f"bold {COLOR_PRIMARY}", expand=False)
    table.add_column("Flows", justify="right")
    table.add_column("T (pkts/s)", justify="right")
    for flows, rate in zip(table_.grid, table_.rates):
        table.add_row(str(flows), f"{rate:,.0f}" if rate else Text("0", style=COLOR_WARNING))
    console.print(Align.center(table))


def print_oracle_result(exact_cores: int, greedy_cores: int, greedy_feasible: bool, assignments: List[str]) -> None:
    table = Table(
        show_header=False,
        box=box.DOUBLE_EDGE,
        border_style=COLOR_SUCCESS,
        padding=(0, 2),
        expand=False,
    )
    table.add_column("Label", style=f"bold {COLOR_DIM}", width=18)
    table.add_column("Value", style=COLOR_HIGHLIGHT)

    gap = greedy_cores - exact_cores
    table.add_row("Exact (MILP)", f"{exact_cores} cores")
    table.add_row("Greedy", f"{greedy_cores} cores" + ("" if greedy_feasible else "  (infeasible)"))
    table.add_row("Gap", Text(f"+{gap}", style=COLOR_WARNING if gap > 1 else COLOR_SUCCESS))
    for line in assignments:
        table.add_row("", Text(line, style=COLOR_DIM))

    console.print()
    console.print(
        Panel(
            Align.center(table),
            title=f"[bold {COLOR_SUCCESS}]Bucket Packing[/bold {COLOR_SUCCESS}]",
            border_style=COLOR_SUCCESS,
            padding=(1, 4),
        )
    )
    console.print()


def print_report_card(path: Path, cells: int, failed: int) -> None:
    style = COLOR_SUCCESS if not failed else COLOR_WARNING
    table = Table(show_header=False, box=box.DOUBLE_EDGE, border_style=style, padding=(0, 2), expand=False)
    table.add_column("Label", style=f"bold {COLOR_DIM}", width=18)
    table.add_column("Value", style=COLOR_HIGHLIGHT)
    table.add_row("Cells", str(cells))
    table.add_row("Failed", str(failed))
    table.add_row("Report", Text(str(path), style=f"bold {COLOR_PRIMARY}"))
    console.print(
        Panel(
            Align.center(table),
            title=f"[bold {style}]{'✓ Sweep Complete' if not failed else '⚠ Sweep Finished With Errors'}[/bold {style}]",
            border_style=style,
            padding=(1, 4),
        )
    )
    console.print()
