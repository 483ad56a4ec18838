"""Command line client.

Subcommands mirror the service endpoints one to one; by default they
call the handlers in process, with ``--server URL`` they POST to a
running service instead.  Either way the command formats the response
into files under ``<out>/<run-id>/``: CSV for curves, JSON for matrices
and diagnostics.  The run id defaults to ``<config-hash>-s<seed>``, so
distinct configurations never share a directory and reruns of the same
one are byte-identical.

Exit codes: 0 success, 2 bad input (config, flags, counts file), 3
numerical failure (non-convergence, degenerate statistics).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import yaml
from pydantic import ValidationError

from .config import load_config
from .errors import InputDomainError, NumericalFailure
from .service import api
from .service import schemas as sc


class _CliError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


# command -> (handler, HTTP path, request type, response type)
_ENDPOINTS = {
    "source-report": (api.source_report, "/source-report", sc.SourceReportRequest, sc.SourceReportResponse),
    "visibility-scan": (api.visibility_scan, "/visibility-scan", sc.VisibilityScanRequest, sc.VisibilityScanResponse),
    "bell": (api.bell, "/bell", sc.BellRequest, sc.BellResponse),
    "tomography": (api.tomography, "/tomography", sc.TomographyRequest, sc.TomographyResponse),
    "interference": (api.interference, "/interference", sc.InterferenceRequest, sc.InterferenceResponse),
    "simulate-counts": (api.simulate_counts_cmd, "/simulate-counts", sc.SimulateCountsRequest, sc.SimulateCountsResponse),
}


def _call(command: str, request, server: str | None):
    handler, path, _, response_type = _ENDPOINTS[command]
    if server is None:
        return handler(request)
    import httpx

    try:
        reply = httpx.post(
            server.rstrip("/") + path,
            json=request.model_dump(mode="json"),
            timeout=300.0,
        )
    except httpx.HTTPError as exc:
        raise _CliError(2, f"cannot reach server: {exc}") from exc
    if reply.status_code in (400, 422):
        raise _CliError(2, f"server rejected request: {reply.text}")
    if reply.status_code != 200:
        raise _CliError(3, f"server error {reply.status_code}: {reply.text}")
    return response_type.model_validate(reply.json())


# -- output formatting -------------------------------------------------------


def _cell(value) -> str:
    # repr of a float is its shortest exact form; ints and labels pass through
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, str)):
        return str(value)
    return repr(float(value))


def _write_csv(path: Path, meta: dict, columns: list[str], rows, extra_comments=()) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_hash={meta['config_hash']}\n")
        fh.write(f"# seed={meta['seed']}\n")
        for line in extra_comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _write_json(path: Path, document: dict) -> None:
    path.write_text(json.dumps(document, indent=2) + "\n")


def _read_counts(path: Path) -> list[sc.CountEntry]:
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(ln for ln in fh if not ln.startswith("#")) if r]
    except OSError as exc:
        raise _CliError(2, f"cannot read counts file: {exc}") from exc
    if not rows or [c.strip() for c in rows[0]] != ["label", "count"]:
        raise _CliError(2, "counts file must start with a 'label,count' header")
    entries = []
    for row in rows[1:]:
        if len(row) != 2:
            raise _CliError(2, f"malformed counts row: {','.join(row)}")
        try:
            entries.append(sc.CountEntry(label=row[0].strip(), count=int(row[1])))
        except (ValueError, ValidationError) as exc:
            raise _CliError(2, f"malformed counts row {','.join(row)}: {exc}") from exc
    return entries


# -- commands ----------------------------------------------------------------


class _Context:
    """Resolved config, transport and output directory for one invocation."""

    def __init__(self, args):
        self.args = args
        self.config = load_config(args.config)
        self.seed = args.seed  # None: use config.seed
        self.server = args.server

    def request(self, request_type, **kwargs):
        return request_type(config=self.config, seed=self.seed, **kwargs)

    def run_dir(self, response) -> Path:
        base = Path(self.args.out) if self.args.out else Path(self.config.output_dir)
        run_id = self.args.run_id or f"{response.config_hash}-s{response.seed}"
        directory = base / run_id
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    def say(self, message: str) -> None:
        if self.config.verbosity >= 1:
            print(message)


def _meta(response) -> dict:
    return {"config_hash": response.config_hash, "seed": response.seed}


def cmd_source_report(ctx: _Context) -> int:
    resp = _call("source-report", ctx.request(sc.SourceReportRequest), ctx.server)
    out = ctx.run_dir(resp) / "fig4_delay_report.csv"
    columns = [
        "length_mm", "compensation_length_mm", "compensation_orientation_deg",
        "tau_h_fs", "tau_v_fs", "delta_fs", "delta_effective_fs",
        "p_midpoint", "p_position_averaged",
    ]
    rows = [
        (r.length_mm, r.compensation_length_mm, r.compensation_orientation_deg,
         r.tau_h_fs, r.tau_v_fs, r.delta_fs, r.delta_effective_fs,
         r.p_midpoint, r.p_position_averaged)
        for r in resp.rows
    ]
    _write_csv(out, _meta(resp), columns, rows)
    ctx.say(f"wrote {out}")
    for r in resp.rows:
        ctx.say(
            f"  L={r.length_mm:g} mm comp={r.compensation_length_mm:g} mm"
            f"@{r.compensation_orientation_deg:g} deg: "
            f"p_mid={r.p_midpoint:.4f} p_z={r.p_position_averaged:.4f}"
        )
    return 0


def cmd_visibility_scan(ctx: _Context) -> int:
    resp = _call("visibility-scan", ctx.request(sc.VisibilityScanRequest), ctx.server)
    out = ctx.run_dir(resp) / "fig3_visibility.csv"
    columns = ["xi_s_deg"]
    comments = [f"idler_angle_deg={_cell(resp.idler_angle_deg)}"]
    for curve in resp.curves:
        tag = f"L{curve.length_mm:g}"
        columns.append(f"model_{tag}")
        if curve.counts is not None:
            columns.append(f"counts_{tag}")
            comments.append(
                f"fit_{tag}: V={_cell(curve.fitted_visibility)}"
                f" sigma={_cell(curve.fitted_sigma)} p_model={_cell(curve.p_model)}"
            )
    rows = []
    for k, xi in enumerate(resp.angles_deg):
        row = [xi]
        for curve in resp.curves:
            row.append(curve.probabilities[k])
            if curve.counts is not None:
                row.append(curve.counts[k])
        rows.append(row)
    _write_csv(out, _meta(resp), columns, rows, extra_comments=comments)
    ctx.say(f"wrote {out}")
    for curve in resp.curves:
        if curve.fitted_visibility is not None:
            ctx.say(
                f"  L={curve.length_mm:g} mm: p={curve.p_model:.4f}"
                f" fitted V={curve.fitted_visibility:.4f} +- {curve.fitted_sigma:.4f}"
            )
    return 0


def cmd_bell(ctx: _Context) -> int:
    resp = _call("bell", ctx.request(sc.BellRequest), ctx.server)
    run_dir = ctx.run_dir(resp)

    scan_path = run_dir / "fig8_chsh_scan.csv"
    columns = ["theta_deg"] + [f"S_p{c.p:g}" for c in resp.curves]
    rows = [
        [theta] + [c.s_values[k] for c in resp.curves]
        for k, theta in enumerate(resp.thetas_deg)
    ]
    _write_csv(scan_path, _meta(resp), columns, rows)
    ctx.say(f"wrote {scan_path}")

    points_path = run_dir / "fig9_bell_points.csv"
    columns = ["theta_deg", "S_model", "S_sim", "sigma_S", "significance"]
    rows = [
        (m.theta_deg, m.s_model, m.s_simulated, m.sigma_s, m.significance)
        for m in resp.markers
    ]
    _write_csv(points_path, _meta(resp), columns, rows,
               extra_comments=[f"state_p={_cell(resp.state_p)}"])
    ctx.say(f"wrote {points_path}")
    for m in resp.markers:
        ctx.say(
            f"  theta={m.theta_deg:g} deg: S={m.s_simulated:.4f} +- {m.sigma_s:.4f}"
            f" (model {m.s_model:.4f}, {m.significance:.1f} sigma from 2)"
        )
    return 0


def cmd_tomography(ctx: _Context) -> int:
    counts = None
    if ctx.args.counts is not None:
        counts = _read_counts(Path(ctx.args.counts))
    resp = _call("tomography", ctx.request(sc.TomographyRequest, counts=counts), ctx.server)
    out = ctx.run_dir(resp) / "tomography_result.json"
    _write_json(out, resp.model_dump(mode="json"))
    ctx.say(f"wrote {out}")
    ctx.say(
        f"  visibility={resp.visibility:.4f} purity={resp.purity:.4f}"
        + (f" |rho-model|_F={resp.frobenius_error:.5f}" if resp.frobenius_error is not None else "")
    )
    if not resp.diagnostics.converged:
        raise NumericalFailure("tomography did not converge")
    return 0


def cmd_interference(ctx: _Context) -> int:
    resp = _call("interference", ctx.request(sc.InterferenceRequest), ctx.server)
    run_dir = ctx.run_dir(resp)
    curve_path = run_dir / "fig7_interference.csv"
    rows = zip(resp.taus_fs, resp.single_normalized, resp.coincidence_normalized)
    _write_csv(curve_path, _meta(resp), ["tau_fs", "single_norm", "coincidence_norm"], rows)
    summary_path = run_dir / "interference_summary.json"
    _write_json(
        summary_path,
        resp.model_dump(mode="json", exclude={"taus_fs", "single_normalized", "coincidence_normalized"}),
    )
    ctx.say(f"wrote {curve_path}")
    ctx.say(f"wrote {summary_path}")
    ctx.say(
        f"  L={resp.length_mm:g} mm: envelope single={resp.single_envelope_fwhm_fs:.1f} fs"
        f" coincidence={resp.coincidence_envelope_fwhm_fs:.1f} fs"
    )
    return 0


def cmd_simulate_counts(ctx: _Context) -> int:
    req = ctx.request(
        sc.SimulateCountsRequest,
        mode=ctx.args.mode,
        state_p=ctx.args.state_p,
        flux=ctx.args.flux,
    )
    resp = _call("simulate-counts", req, ctx.server)
    out = ctx.run_dir(resp) / "counts.csv"
    _write_csv(
        out, _meta(resp), ["label", "count"],
        [(c.label, c.count) for c in resp.counts],
        extra_comments=[f"mode={resp.mode}", f"state_p={_cell(resp.state_p)}"],
    )
    ctx.say(f"wrote {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


# -- argument parsing ---------------------------------------------------------

_COMMANDS = {
    "source-report": (cmd_source_report, "delay budget and decoherence table per crystal length"),
    "visibility-scan": (cmd_visibility_scan, "polarizer-angle coincidence curves and visibility fits"),
    "bell": (cmd_bell, "CHSH S(theta) curves plus simulated measurement points"),
    "tomography": (cmd_tomography, "maximum-likelihood state reconstruction"),
    "interference": (cmd_interference, "single/coincidence fringe patterns and envelope widths"),
    "simulate-counts": (cmd_simulate_counts, "synthetic Poisson coincidence counts"),
}


def _add_common(parser: argparse.ArgumentParser, top: bool) -> None:
    # defined on the main parser and again on each subparser (SUPPRESS
    # default) so the flags work on either side of the subcommand
    default = None if top else argparse.SUPPRESS
    parser.add_argument("--config", default=default, metavar="PATH",
                        help="YAML configuration file (defaults reproduce the reference setup)")
    parser.add_argument("--seed", type=int, default=default, metavar="N",
                        help="override the configured random seed")
    parser.add_argument("--out", default=default, metavar="DIR",
                        help="output base directory (default: config output_dir)")
    parser.add_argument("--run-id", dest="run_id", default=default, metavar="ID",
                        help="subdirectory name (default: <config-hash>-s<seed>)")
    parser.add_argument("--server", default=default, metavar="URL",
                        help="POST to a running service instead of computing in process")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spdclab",
        description="Two-crystal downconversion source simulator and analysis toolkit.",
    )
    _add_common(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        _add_common(sp, top=False)
        if name == "tomography":
            sp.add_argument("--counts", default=None, metavar="FILE",
                            help="counts CSV to reconstruct from (default: simulate)")
        if name == "simulate-counts":
            sp.add_argument("--mode", default="tomography",
                            choices=["tomography", "visibility_scan", "bell"])
            sp.add_argument("--state-p", dest="state_p", type=float, default=None,
                            help="decoherence parameter of the simulated state")
            sp.add_argument("--flux", type=float, default=None,
                            help="mean events per setting")
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    try:
        return _COMMANDS[args.command][0](_Context(args))
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (InputDomainError, ValidationError, yaml.YAMLError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
