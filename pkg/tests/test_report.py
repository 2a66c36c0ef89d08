import csv
import json

from dyto.bench import BenchConfig, run_bench
from dyto.cli import main as dyto_main
from dyto.report import main as report_main, render_report


def small_report():
    cfg = BenchConfig(
        events_min=2,
        events_max=3,
        seeds=1,
        tokens_per_frame=37,
        dim=16,
        budget=64,
        heads=4,
        pool_grid=3,
        timing=False,
    )
    return run_bench(cfg)


def test_render_report_writes_csv_and_figures(tmp_path):
    written = render_report(small_report(), tmp_path)
    for path in written:
        assert path.exists() and path.stat().st_size > 0
    with open(tmp_path / "summary.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "method"
    assert {r[0] for r in rows[1:]} == {"dyto", "uniform-pool"}
    assert (tmp_path / "methods.png").exists()
    assert (tmp_path / "per_events.png").exists()


def test_report_cli_with_clusters(tmp_path):
    report_path = tmp_path / "report.json"
    report_path.write_text(json.dumps(small_report()))
    vid = tmp_path / "vid"
    assert dyto_main(["synth", "--output", str(vid), "--events", "3", "--frames", "30",
                      "--tokens", "9", "--dim", "16", "--seed", "4"]) == 0
    clusters = tmp_path / "clusters.json"
    assert dyto_main(["cluster", "--input", str(vid) + ".dyt", "--output", str(clusters)]) == 0
    outdir = tmp_path / "figs"
    assert report_main([str(report_path), "--outdir", str(outdir), "--clusters", str(clusters)]) == 0
    assert (outdir / "clusters.png").stat().st_size > 0
