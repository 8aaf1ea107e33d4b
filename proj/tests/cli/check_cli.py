"""Exit codes, report files and determinism of the command-line tool."""
import json
import pathlib
import subprocess
import sys
import tempfile

exe = sys.argv[1]
data = pathlib.Path(sys.argv[2])
configs = pathlib.Path(sys.argv[3])
failures = []


def run(*args):
    return subprocess.run([exe, *map(str, args)], capture_output=True, text=True)


def expect(name, cond, proc=None):
    if not cond:
        extra = f"\n  stdout: {proc.stdout[-400:]}\n  stderr: {proc.stderr[-400:]}" if proc else ""
        failures.append(name + extra)
    print(("ok   " if cond else "FAIL ") + name)


with tempfile.TemporaryDirectory() as tmp:
    out = pathlib.Path(tmp)

    p = run("certify", "--config", configs / "circle_certify.json", "--out", out / "certify")
    expect("certify exits 0", p.returncode == 0, p)
    report = json.loads((out / "certify" / "certify_report.json").read_text())
    first = report["certificates"][0]["certificate"]
    expect("certify value", abs(first["value"] - 0.5517427129385146) < 1e-14)
    expect("one file per request", len(list((out / "certify").glob("certificate_*.json"))) == 4)

    cert = out / "certify" / "certificate_0_margin_rademacher.json"
    p = run("certify", "--replay", cert)
    expect("replay is bit identical", p.returncode == 0 and json.loads(p.stdout)["identical"], p)

    p = run("certify", "--config", configs / "circle_certify.json", "--out", out / "csv", "--format", "csv")
    expect("csv format", p.returncode == 0 and p.stdout.startswith("index,bound,value"), p)

    p = run("certify", "--config", data / "missing_field.json", "--out", out / "x")
    expect("missing field exits 2", p.returncode == 2 and "/certificates/0/gamma" in p.stderr, p)
    p = run("certify", "--config", data / "nothing_to_do.json", "--out", out / "x")
    expect("empty request list exits 2", p.returncode == 2 and "nothing to do" in p.stderr, p)
    p = run("certify", "--config", data / "does_not_exist.json")
    expect("unknown file exits 2", p.returncode == 2, p)
    p = run("certify", "--config", data / "refusal.json", "--out", out / "refusal")
    refusal = json.loads((out / "refusal" / "certify_report.json").read_text())
    expect("refusal exits 3", p.returncode == 3 and "refused" in refusal["certificates"][0], p)
    p = run("certify", "--config", data / "uncertified.json", "--out", out / "unc")
    expect("uncertified constants exit 4", p.returncode == 4, p)
    p = run("certify", "--config", data / "uncertified.json", "--out", out / "unc", "--allow-uncertified")
    expect("--allow-uncertified exits 0", p.returncode == 0, p)
    p = run("frobnicate")
    expect("unknown subcommand exits 2", p.returncode == 2, p)

    a = run("coverage", "--config", data / "small_coverage.json", "--out", out / "cov_a", "--format", "csv")
    b = run("coverage", "--config", data / "small_coverage.json", "--out", out / "cov_b", "--workers", "3")
    expect("coverage exits 0", a.returncode == 0 and b.returncode == 0, a)
    same = (out / "cov_a" / "coverage_report.json").read_bytes() == (out / "cov_b" / "coverage_report.json").read_bytes()
    expect("coverage bytes identical across worker counts", same)
    c = run("coverage", "--config", data / "small_coverage.json", "--out", out / "cov_c", "--seed", "6")
    other = (out / "cov_c" / "coverage_report.json").read_bytes() != (out / "cov_a" / "coverage_report.json").read_bytes()
    expect("--seed changes the report", c.returncode == 0 and other, c)
    expect("small R warns", "warning" in a.stderr, a)

    p = run("solve", "--config", configs / "circle_solve.json", "--out", out / "solve")
    expect("solve exits 0", p.returncode == 0 and json.loads(p.stdout)["solve"]["status"] == "margin-feasible", p)
    p = run("solve", "--config", configs / "ellipse_soft_margin.json", "--out", out / "soft")
    expect("soft margin solve", p.returncode == 0 and json.loads(p.stdout)["solve"]["objective"] > 0, p)
    p = run("complexity", "--config", configs / "circle_complexity.json", "--out", out / "cx")
    expect("complexity", p.returncode == 0 and json.loads(p.stdout)["dimension_crossover"] == 573, p)
    p = run("reproduce-figures", "--out", out / "figs", "--mc-samples", "100000")
    summary = json.loads(p.stdout) if p.returncode == 0 else {}
    expect("figures", p.returncode == 0 and summary["crossover_sufficient"] == 573
           and summary["margin_violation"] == 0 and summary["soft_gamma"] > summary["hard_gamma"], p)

if failures:
    print(f"{len(failures)} failure(s):")
    for f in failures:
        print(" -", f)
    sys.exit(1)
