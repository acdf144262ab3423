"""Acceptance: all four figure kinds render from the committed golden CSVs,
plotted point counts equal the CSV row counts per series, and files are
byte-stable across repeated renders."""

from pathlib import Path

import pandas as pd

from figgen import plot_bench, plot_control_ensemble, plot_pareto, plot_state_ensemble

GOLDEN = Path(__file__).parent / "data" / "golden"
SCENARIOS = [
    GOLDEN / "eta_0" / "summary.csv",
    GOLDEN / "eta_0.02" / "summary.csv",
    GOLDEN / "eta_0.08" / "summary.csv",
    GOLDEN / "homogeneous" / "summary.csv",
]


def render_all(outdir: Path):
    results = {}
    results["state-ensemble"] = plot_state_ensemble(SCENARIOS, outdir / "states.svg")
    results["control-ensemble"] = plot_control_ensemble(SCENARIOS, outdir / "controls.svg")
    results["pareto"] = plot_pareto(GOLDEN / "pareto.csv", outdir / "pareto.svg")
    results["bench"] = plot_bench(GOLDEN / "bench.csv", outdir / "bench.svg")
    return results


def test_all_kinds_render_with_exact_point_counts(tmp_path):
    results = render_all(tmp_path)
    for kind, (path, counts) in results.items():
        assert path.exists(), kind
        assert counts and all(n > 0 for n in counts.values()), kind

    # ensemble series point counts == per-(scenario, variable, group) row counts
    for scenario in SCENARIOS:
        label = scenario.parent.name
        frame = pd.read_csv(scenario)
        for variable, result_kind in (("I", "state-ensemble"), ("D", "state-ensemble"),
                                      ("V", "control-ensemble"), ("L", "control-ensemble")):
            counts = results[result_kind][1]
            for group in sorted(frame["group"].unique()):
                expected = len(frame[(frame.variable == variable) & (frame.group == group)])
                assert counts[f"{label}/{variable}/group{int(group)}"] == expected

    pareto = pd.read_csv(GOLDEN / "pareto.csv")
    assert results["pareto"][1]["frontier"] == (pareto["eta"].astype(str) != "homogeneous").sum()
    assert results["pareto"][1]["homogeneous"] == (pareto["eta"].astype(str) == "homogeneous").sum()

    bench = pd.read_csv(GOLDEN / "bench.csv")
    assert results["bench"][1] == {"runtime": len(bench), "objective": len(bench)}
    print("ACCEPTANCE PASS - figure-generation: all four kinds rendered, "
          "point counts match CSV rows")


def test_renders_are_byte_stable(tmp_path):
    first = render_all(tmp_path / "a")
    second = render_all(tmp_path / "b")
    for kind in first:
        bytes_a = first[kind][0].read_bytes()
        bytes_b = second[kind][0].read_bytes()
        assert bytes_a == bytes_b, f"{kind} output is not byte-stable"
    print("ACCEPTANCE PASS - figure-stability: outputs byte-identical across runs")
