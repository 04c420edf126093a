"""Command-line client.  Requests are served by the FastAPI app, in-process
by default or remotely when --server is given; exit codes: 0 success, 1 suite
failure, 2 input error, 3 resource cap exceeded."""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import __version__


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=3600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app, raise_server_exceptions=False)


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _handle_http_error(resp):
    try:
        detail = resp.json().get("detail", resp.text)
    except Exception:
        detail = resp.text
    if resp.status_code == 413:
        _fail(str(detail), 3)
    if resp.status_code in (400, 422):
        _fail(str(detail), 2)
    _fail(f"service returned {resp.status_code}: {detail}", 1)


@click.group()
@click.version_option(__version__)
def main():
    """Spin-squeezing entanglement detection for N-qubit states."""


@main.command()
@click.option("--state", "state_path", required=True, type=click.Path(exists=False), help="State file (JSON).")
@click.option("--criteria", "criteria_csv", required=True, help="Comma-separated criterion ids.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--restarts", default=32, show_default=True, type=int)
@click.option("--coarse-grid", default=24, show_default=True, type=int)
@click.option("--rapidity-cap", default=5.0, show_default=True, type=float)
@click.option("--refine-iters", default=200, show_default=True, type=int)
@click.option("--tolerance", default=1e-9, show_default=True, type=float)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Report output path (default stdout).")
@click.option("--server", default=None, help="Remote service URL (default: in-process).")
def detect(state_path, criteria_csv, seed, restarts, coarse_grid, rapidity_cap, refine_iters, tolerance, out_path, server):
    """Run entanglement criteria on a state file and write a JSON report."""
    criteria_ids = [c.strip() for c in criteria_csv.split(",") if c.strip()]
    if not criteria_ids:
        _fail("criteria list must be non-empty", 2)
    try:
        with open(state_path) as fh:
            state_obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot read state file: {exc}", 2)
    payload = {
        "state": state_obj,
        "criteria": criteria_ids,
        "options": {
            "seed": seed,
            "restarts": restarts,
            "coarse_grid": coarse_grid,
            "rapidity_cap": rapidity_cap,
            "refine_iters": refine_iters,
            "tolerance": tolerance,
        },
    }
    with _client(server) as client:
        resp = client.post("/detect", json=payload)
    if resp.status_code != 200:
        _handle_http_error(resp)
    body = resp.json()
    report = body["report"]
    report["wall_time_s"] = None  # kept out of the file so reports are reproducible
    text = json.dumps(report, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    for entry in report["criteria"]:
        margin = entry["margin"]
        shown = "n/a" if margin is None else f"{margin:+.6e}"
        click.echo(f"{entry['criterion']:>16}: {entry['verdict']:<20} margin {shown}", err=True)
    if report.get("oracle") and not report["oracle"]["consistent"]:
        for note in report["oracle"]["notes"]:
            click.echo(f"ORACLE INCONSISTENCY: {note}", err=True)
    click.echo(f"done in {body['wall_time_s']:.2f}s", err=True)


@main.command()
@click.option("--suite", required=True, help="identities | equivalence-n2 | equivalence-n3 | proportionality | prep-roundtrip")
@click.option("--samples", default=None, type=int, help="Sample count override.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the detailed summary JSON here.")
@click.option("--csv", "csv_path", type=click.Path(), default=None, help="Write the scalar summary as a CSV table.")
@click.option("--server", default=None, help="Remote service URL (default: in-process).")
def verify(suite, samples, seed, out_path, csv_path, server):
    """Run a verification suite; exit 0 iff all thresholds pass."""
    payload = {"suite": suite, "seed": seed}
    if samples is not None:
        payload["samples"] = samples
    with _client(server) as client:
        resp = client.post("/verify", json=payload)
    if resp.status_code != 200:
        _handle_http_error(resp)
    body = resp.json()
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(body, fh, indent=2)
            fh.write("\n")
    if csv_path:
        import csv as csv_mod

        with open(csv_path, "w", newline="") as fh:
            writer = csv_mod.writer(fh)
            writer.writerow(["suite", "key", "value"])
            writer.writerow([suite, "passed", body["passed"]])
            for key, value in sorted(body["summary"].items()):
                if isinstance(value, dict):
                    for sub, v in sorted(value.items()):
                        if isinstance(v, (int, float, bool, str)):
                            writer.writerow([suite, f"{key}.{sub}", v])
                elif isinstance(value, (int, float, bool, str)):
                    writer.writerow([suite, key, value])
    status = "PASS" if body["passed"] else "FAIL"
    click.echo(f"{suite}: {status} ({body['wall_time_s']:.1f}s)")
    for key, value in body["summary"].items():
        if isinstance(value, (int, float, bool, str)):
            click.echo(f"  {key}: {value}")
    if not body["passed"]:
        failing = {
            k: v for k, v in body["summary"].items() if isinstance(v, (int, float, bool, str))
        }
        click.echo(f"suite thresholds not met: {failing}", err=True)
        sys.exit(1)


@main.command()
@click.option("--family", required=True, type=click.Choice(["ghz", "w", "coherent", "computational", "psi0", "oat"]))
@click.option("-n", "--n-qubits", required=True, type=int)
@click.option("--theta", default=0.0, type=float)
@click.option("--phi", default=0.0, type=float)
@click.option("--alpha", default=0.0, type=float)
@click.option("--bits", default=None, type=str)
@click.option("--chi", default=0.2, type=float, help="One-axis-twisting angle (family oat).")
@click.option("--out", "out_path", required=True, type=click.Path())
def state(family, n_qubits, theta, phi, alpha, bits, chi, out_path):
    """Write a named state to a JSON state file (local helper, no service)."""
    from .errors import ParameterError
    from .states import DickeCoefficients, build_named_state, coherent_dicke_vector, save_state

    try:
        if family == "oat":
            # exp(-i chi Jz^2) on the x-polarized coherent state, in the Dicke basis
            m = np.arange(n_qubits + 1)
            phases = np.exp(-1j * chi * (n_qubits / 2.0 - m) ** 2)
            v = phases * coherent_dicke_vector(n_qubits, np.pi / 2.0, 0.0)
            obj = DickeCoefficients(n_qubits, np.outer(v, v.conj()))
        else:
            kwargs = {}
            if family == "coherent":
                kwargs = {"theta": theta, "phi": phi}
            elif family == "computational":
                kwargs = {"bits": bits or "0" * n_qubits}
            elif family == "psi0":
                kwargs = {"alpha": alpha}
            obj = build_named_state(family, n_qubits, **kwargs)
    except ParameterError as exc:
        _fail(str(exc), 2)
    save_state(obj, out_path)
    click.echo(f"wrote {family} state ({n_qubits} qubits) to {out_path}", err=True)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the detection service."""
    import uvicorn

    uvicorn.run("ssq.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
