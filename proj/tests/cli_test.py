"""End-to-end checks of the confsec binary: exit codes, outputs and thread independence."""
import json
import pathlib
import subprocess
import sys
import tempfile

binary, root = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
d = root / "data"
tmp = pathlib.Path(tempfile.mkdtemp())
failures = []


def run(*args):
    return subprocess.run([str(binary), *map(str, args)], capture_output=True, text=True)


def expect(label, args, code):
    proc = run(*args)
    if proc.returncode != code:
        failures.append(f"{label}: exit {proc.returncode}, expected {code}\n{proc.stdout}{proc.stderr}")
    return proc


# exit codes
expect("version", ["--version"], 0)
expect("no subcommand", [], 2)
expect("unknown subcommand", ["teleport"], 2)
expect("unknown option", ["catalog", "list", "--colour"], 2)
expect("bad space", ["fpp", "--space", "S-1"], 2)
expect("missing file", ["finite", "fpp", "--poset", tmp / "nope.json"], 2)
(tmp / "garbled.json").write_text("{ not json")
expect("garbled json", ["finite", "sec", "--poset", tmp / "garbled.json"], 2)
expect("inconsistent facts", ["bounds", "query", "--facts", d / "facts/inconsistent.json", "--quantity", "TC(X)"], 1)

cert = json.loads((d / "certificates/rp2_pi2.json").read_text())
cert["matrices"] = [{"degree": 2, "rows": 1, "cols": 1, "entries": [[1]]}]
(tmp / "surjective.json").write_text(json.dumps(cert))
proc = expect("rejected certificate", ["certify", "induced", "--file", tmp / "surjective.json"], 1)
if "rejected" not in proc.stdout:
    failures.append("rejected certificate: verdict not printed")
expect("accepted certificate", ["certify", "induced", "--file", d / "certificates/rp2_pi2.json"], 0)

# human output
proc = expect("plan", ["plan", "--space", "S2", "--start", d / "configs/s2_start.json",
                       "--goal", d / "configs/s2_goal.json"], 0)
if "PASS" not in proc.stdout:
    failures.append("plan: no PASS line")
proc = expect("plan csv", ["--seed", 4, "plan", "--space", "T2", "--k", 3, "--plot", "csv"], 0)
rows = [line for line in proc.stdout.splitlines() if line and line[0].isdigit()]
if not rows or any(len(r.split(",")) != 4 for r in rows):
    failures.append("plan csv: malformed rows")
proc = expect("fpp RP2", ["fpp", "--space", "RP2", "--facts", d / "facts/rp2.json"], 0)
if "sec" not in proc.stdout:
    failures.append("fpp RP2: sec not reported")

# same seed, any thread count: identical results
for label, args in [
    ("batch", ["plan", "batch", "--scenarios", d / "scenarios/default.json"]),
    ("section", ["section", "verify", "--recipe", "key-lemma", "--space", "S2", "--k", 3, "--samples", 2000]),
    ("fpp", ["fpp", "--space", "RP3", "--samples", 3000]),
]:
    results = []
    for threads in (1, 4):
        out = tmp / f"{label}{threads}.json"
        expect(f"{label} threads={threads}", ["--seed", 11, "--threads", threads, "--json", out, *args], 0)
        if out.exists():
            results.append(json.loads(out.read_text())["result"])
    if len(results) == 2 and results[0] != results[1]:
        failures.append(f"{label}: result depends on --threads")

# different seeds give different random plans
a, b = tmp / "seed1.json", tmp / "seed2.json"
expect("seed 1", ["--seed", 1, "--json", a, "plan", "--space", "S2"], 0)
expect("seed 2", ["--seed", 2, "--json", b, "plan", "--space", "S2"], 0)
if a.exists() and b.exists() and json.loads(a.read_text())["result"] == json.loads(b.read_text())["result"]:
    failures.append("plan: seed ignored")

for f in failures:
    print("FAIL", f)
print(f"{len(failures)} failures")
sys.exit(1 if failures else 0)
