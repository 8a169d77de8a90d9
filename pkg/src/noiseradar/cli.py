"""Command-line client for the noise-radar statistics service.

Every command is a thin client: it serializes its inputs into the same
request models the HTTP service accepts, performs the request (in process
against the ASGI app by default, or against ``--server URL``), and formats
the response as JSON on stdout or CSV files.

Exit codes: 0 success; 2 malformed input or invalid parameters;
3 degenerate data (zero signal power); 4 I/O failure; 5 evaluation failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import math
import os
import sys
from typing import Any

import httpx

from . import __version__
from .errors import IQFileError
from .iqfile import read_iq, write_iq_binary, write_iq_csv
from .model import IQBatch

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_IO = 4
EXIT_EVALUATION = 5

_ERROR_CODE_EXITS = {
    "zero-signal-power": EXIT_DEGENERATE,
    "evaluation-failed": EXIT_EVALUATION,
}


class CommandError(Exception):
    """Carries an exit code and a message for uniform error reporting."""

    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


class ServiceClient:
    """POST/GET against the service, in process unless a server URL is given."""

    def __init__(self, server: str | None = None):
        self._server = server.rstrip("/") if server else None
        self._app = None
        if self._server is None:
            from .service import create_app

            self._app = create_app()

    def request(self, method: str, path: str, payload: dict | None = None) -> dict:
        try:
            if self._server is None:
                response = asyncio.run(self._asgi_request(method, path, payload))
            else:
                with httpx.Client(base_url=self._server, timeout=3600.0) as client:
                    response = client.request(method, path, json=payload)
        except httpx.HTTPError as exc:
            raise CommandError(EXIT_IO, f"service request failed: {exc}") from exc
        body = response.json()
        if response.status_code != 200:
            detail = body.get("detail", body)
            if isinstance(detail, dict) and "code" in detail:
                exit_code = _ERROR_CODE_EXITS.get(detail["code"], EXIT_INPUT)
                raise CommandError(exit_code, json.dumps({"error": detail}))
            raise CommandError(EXIT_INPUT, json.dumps({"error": detail}))
        return body

    async def _asgi_request(self, method: str, path: str, payload: dict | None):
        transport = httpx.ASGITransport(app=self._app)
        async with httpx.AsyncClient(transport=transport, base_url="http://service",
                                     timeout=3600.0) as client:
            return await client.request(method, path, json=payload)


# ---------------------------------------------------------------------------
# Output helpers


def _comment_line(command: str, params: dict) -> str:
    meta = json.dumps(params, sort_keys=True, default=str)
    return f"# noiseradar v{__version__} | {command} | {meta}"


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: str, command: str, params: dict, columns, rows) -> None:
    lines = [_comment_line(command, params), ",".join(columns)]
    lines.extend(",".join(_format_cell(cell) for cell in row) for row in rows)
    payload = ("\n".join(lines) + "\n").encode()
    try:
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except OSError as exc:
        raise CommandError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _emit_csv_or_stdout(out: str | None, command: str, params: dict, columns, rows) -> None:
    if out:
        _write_csv(out, command, params, columns, rows)
    else:
        print(_comment_line(command, params))
        print(",".join(columns))
        for row in rows:
            print(",".join(_format_cell(cell) for cell in row))


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        try:
            tmp = out + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            os.replace(tmp, out)
        except OSError as exc:
            raise CommandError(EXIT_IO, f"cannot write {out}: {exc}") from exc
    else:
        print(text)


def _parse_grid(text: str) -> dict:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise CommandError(EXIT_INPUT, f"bad grid spec {text!r}; expected lo:hi:count[:log]")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise CommandError(EXIT_INPUT, f"bad grid spec {text!r}: {exc}") from exc
    spacing = "linear"
    if len(parts) == 4:
        if parts[3] not in ("linear", "log"):
            raise CommandError(EXIT_INPUT, f"bad grid spacing {parts[3]!r}")
        spacing = parts[3]
    return {"lo": lo, "hi": hi, "count": count, "spacing": spacing}


def _parse_pfa_grid(text: str) -> list[float] | None:
    if text == "default":
        return None
    if ":" in text:
        g = _parse_grid(text)
        if g["spacing"] == "log":
            lo, hi = math.log10(g["lo"]), math.log10(g["hi"])
            return [10 ** (lo + (hi - lo) * i / (g["count"] - 1)) for i in range(g["count"])]
        return [g["lo"] + (g["hi"] - g["lo"]) * i / (g["count"] - 1) for i in range(g["count"])]
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise CommandError(EXIT_INPUT, f"bad pfa grid {text!r}: {exc}") from exc


def _parse_sweep(text: str) -> tuple[str, list[float]]:
    if "=" not in text:
        raise CommandError(EXIT_INPUT, f"bad sweep {text!r}; expected n=10,25,... or rho=0.1,...")
    name, _, values = text.partition("=")
    name = name.strip()
    if name not in ("n", "rho"):
        raise CommandError(EXIT_INPUT, f"sweep parameter must be n or rho, got {name!r}")
    try:
        parsed = [float(v) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise CommandError(EXIT_INPUT, f"bad sweep values {values!r}: {exc}") from exc
    if not parsed:
        raise CommandError(EXIT_INPUT, "sweep needs at least one value")
    return name, parsed


def _model_params(args) -> dict:
    return {"sigma1": args.sigma1, "sigma2": args.sigma2, "rho": args.rho,
            "phi": args.phi, "variant": args.variant}


# ---------------------------------------------------------------------------
# Commands


def _cmd_estimate(client: ServiceClient, args) -> int:
    try:
        batch = read_iq(args.input)
    except IQFileError as exc:
        print(json.dumps({"error": {"code": "malformed-input", "message": str(exc)}}),
              file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(json.dumps({"error": {"code": "io-error", "message": str(exc)}}),
              file=sys.stderr)
        return EXIT_IO
    payload = {"i1": batch.i1.tolist(), "q1": batch.q1.tolist(),
               "i2": batch.i2.tolist(), "q2": batch.q2.tolist(),
               "variant": args.variant}
    body = client.request("POST", "/estimate", payload)
    _emit_json(body, args.out)
    return EXIT_OK


def _summary_files(out: str, trials: int) -> list[str]:
    if trials == 1:
        return [out]
    stem, ext = os.path.splitext(out)
    width = len(str(trials - 1))
    return [f"{stem}_t{i:0{width}d}{ext}" for i in range(trials)]


def _cmd_simulate(client: ServiceClient, args) -> int:
    params = _model_params(args)
    if args.emit == "iq":
        if not args.out:
            raise CommandError(EXIT_INPUT, "--emit iq requires --out")
        paths = _summary_files(args.out, args.trials)
        for trial, path in enumerate(paths):
            body = client.request("POST", "/simulate/iq",
                                  {"params": params, "n": args.n,
                                   "seed": args.seed, "trial": trial})
            batch = IQBatch(i1=body["i1"], q1=body["q1"], i2=body["i2"], q2=body["q2"])
            try:
                if args.format == "binary":
                    write_iq_binary(batch, path)
                else:
                    write_iq_csv(batch, path, comment=_comment_line(
                        "simulate", {**params, "n": args.n, "seed": args.seed,
                                     "trial": trial})[2:])
            except OSError as exc:
                raise CommandError(EXIT_IO, f"cannot write {path}: {exc}") from exc
        print(json.dumps({"written": paths, "n": args.n, "trials": args.trials,
                          "seed": args.seed, "params": params}, indent=2, sort_keys=True))
        return EXIT_OK

    body = client.request("POST", "/simulate",
                          {"params": params, "n": args.n, "trials": args.trials,
                           "seed": args.seed, "include_trials": args.emit == "trials"})
    if args.emit == "trials":
        if not args.out:
            raise CommandError(EXIT_INPUT, "--emit trials requires --out")
        cols = body["columns"]
        names = ["trial", "sigma1_hat", "sigma2_hat", "rho_hat", "phi_hat",
                 "rho_clamped", "phi_degenerate", "ddn", "glr"]
        rows = [
            (i, cols["sigma1_hat"][i], cols["sigma2_hat"][i], cols["rho_hat"][i],
             cols["phi_hat"][i], int(cols["rho_clamped"][i]), int(cols["phi_degenerate"][i]),
             cols["ddn"][i], cols["glr"][i])
            for i in range(len(cols["rho_hat"]))
        ]
        _write_csv(args.out, "simulate",
                   {**params, "n": args.n, "trials": args.trials, "seed": args.seed},
                   names, rows)
        print(json.dumps({"summary": body["summary"], "written": args.out},
                         indent=2, sort_keys=True))
        return EXIT_OK
    _emit_json({"summary": body["summary"], "params": body["params"]}, args.out)
    return EXIT_OK


_FAMILY_FLAGS = {
    "sigma-exact": ("sigma", "n"),
    "rho-exact": ("rho", "n"),
    "phi-exact": ("rho", "phi", "n"),
    "ddn-exact": ("sigma1", "sigma2", "rho", "n"),
    "rice": ("alpha", "beta"),
    "von-mises": ("mu", "kappa"),
    "rayleigh": ("scale",),
}


def _default_grid(family: str, params: dict) -> dict:
    if family == "rho-exact":
        return {"lo": 0.0, "hi": 1.0, "count": 401, "spacing": "linear"}
    if family in ("phi-exact", "von-mises"):
        center = params.get("phi", params.get("mu", 0.0))
        return {"lo": center - math.pi, "hi": center + math.pi, "count": 361,
                "spacing": "linear"}
    if family == "sigma-exact":
        hi = 3.0 * params["sigma"]
    elif family == "ddn-exact":
        n, rho = params["n"], params["rho"]
        hi = (n * rho + 8.0 * math.sqrt(n / 2.0)) * params["sigma1"] * params["sigma2"] / 2.0
    elif family == "rice":
        hi = params["alpha"] + 8.0 * params["beta"]
    else:
        hi = 8.0 * params["scale"]
    return {"lo": 0.0, "hi": hi, "count": 401, "spacing": "linear"}


def _cmd_pdf(client: ServiceClient, args) -> int:
    required = _FAMILY_FLAGS[args.family]
    params = {}
    for name in required:
        value = getattr(args, name.replace("-", "_"))
        if value is None:
            raise CommandError(EXIT_INPUT, f"family {args.family} requires --{name}")
        params[name] = value
    grid = _parse_grid(args.grid) if args.grid else _default_grid(args.family, params)
    body = client.request("POST", "/pdf", {"family": args.family, "params": params,
                                           "grid": grid})
    rows = [(p["x"], p["density"], p["status"]) for p in body["points"]]
    if all(r[2] != "ok" for r in rows):
        print(json.dumps({"error": {"code": "evaluation-failed",
                                    "message": "every grid point failed"}}), file=sys.stderr)
        return EXIT_EVALUATION
    _emit_csv_or_stdout(args.out, "pdf", {"family": args.family, **params},
                        ("x", "density", "status"), rows)
    return EXIT_OK


def _cmd_roc(client: ServiceClient, args) -> int:
    method = {"exact": "exact", "approx": "closed-form", "mc": "monte-carlo"}[args.method]
    detector = {"rho": "rho-hat", "ddn": "ddn"}[args.detector]
    payload = {
        "detector": detector,
        "method": method,
        "params": {"rho": args.rho, "n": args.n, "sigma1": args.sigma1,
                   "sigma2": args.sigma2, "variant": args.variant},
        "trials": args.trials,
        "seed": args.seed,
    }
    grid = _parse_pfa_grid(args.pfa_grid)
    if grid is not None:
        payload["pfa_grid"] = grid
    body = client.request("POST", "/roc", payload)
    rows = [(p["pfa"], p["pd"], p["threshold"], p["status"]) for p in body["points"]]
    if all(r[3] != "ok" for r in rows):
        print(json.dumps({"error": {"code": "evaluation-failed",
                                    "message": "every grid point failed"}}), file=sys.stderr)
        return EXIT_EVALUATION
    meta = {"detector": detector, "method": method, "rho": args.rho, "n": args.n,
            "sigma1": args.sigma1, "sigma2": args.sigma2}
    if body.get("note"):
        meta["note"] = body["note"]
    _emit_csv_or_stdout(args.out, "roc", meta, ("pfa", "pd", "threshold", "status"), rows)
    return EXIT_OK


def _cmd_tvd(client: ServiceClient, args) -> int:
    sweep_param, values = _parse_sweep(args.sweep)
    payload = {
        "pair": args.pair,
        "sweep_param": sweep_param,
        "sweep_values": values,
        "phi": args.phi,
        "sigma1": args.sigma1,
        "sigma2": args.sigma2,
    }
    if sweep_param == "n":
        if args.rho is None:
            raise CommandError(EXIT_INPUT, "sweeping over n requires --rho")
        payload["rho"] = args.rho
    else:
        if args.n is None:
            raise CommandError(EXIT_INPUT, "sweeping over rho requires --n")
        payload["n"] = args.n
    body = client.request("POST", "/tvd/sweep", payload)
    rows = [(r["value"], r["tvd"], r["status"]) for r in body["rows"]]
    if all(r[2] != "ok" for r in rows):
        print(json.dumps({"error": {"code": "evaluation-failed",
                                    "message": "every sweep value failed"}}), file=sys.stderr)
        return EXIT_EVALUATION
    meta = {"pair": args.pair, "sweep": args.sweep, "rho": args.rho, "n": args.n,
            "phi": args.phi, "sigma1": args.sigma1, "sigma2": args.sigma2}
    _emit_csv_or_stdout(args.out, "tvd", meta, (sweep_param, "tvd", "status"), rows)
    return EXIT_OK


def _cmd_figures(client: ServiceClient, args) -> int:
    body = client.request("POST", f"/figures/{args.figure}")
    out_dir = args.out
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise CommandError(EXIT_IO, f"cannot create {out_dir}: {exc}") from exc
    manifest = {"figure": body["figure"], "version": __version__, "curves": []}
    for curve in body["curves"]:
        filename = f"{body['figure']}_{curve['name']}.csv"
        _write_csv(os.path.join(out_dir, filename), f"figures {body['figure']}",
                   curve["params"], curve["columns"], curve["rows"])
        manifest["curves"].append({
            "name": curve["name"],
            "file": filename,
            "params": curve["params"],
            "status": curve["status"],
            "failed_points": curve["failed_points"],
        })
    manifest_path = os.path.join(out_dir, f"{body['figure']}_manifest.json")
    try:
        tmp = manifest_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, manifest_path)
    except OSError as exc:
        raise CommandError(EXIT_IO, f"cannot write {manifest_path}: {exc}") from exc
    print(json.dumps({"figure": body["figure"], "out": out_dir,
                      "curves": len(manifest["curves"]),
                      "statuses": sorted({c["status"] for c in manifest["curves"]})},
                     indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sigma1", type=float, default=1.0, help="received amplitude")
    parser.add_argument("--sigma2", type=float, default=1.0, help="reference amplitude")
    parser.add_argument("--rho", type=float, default=0.0, help="correlation coefficient")
    parser.add_argument("--phi", type=float, default=0.0, help="phase (radians)")
    parser.add_argument("--variant", choices=("qtms", "noise"), default="qtms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noiseradar",
        description="Noise-type radar covariance statistics (thin client for the service).")
    parser.add_argument("--server", default=None,
                        help="service base URL; omitted = run in process")
    parser.add_argument("--version", action="version", version=f"noiseradar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate (sigma1, sigma2, rho, phi) from an IQ file")
    p.add_argument("input", help="IQ file (CSV or binary, auto-detected)")
    p.add_argument("--variant", choices=("qtms", "noise"), default="qtms")
    p.add_argument("--out", default=None, help="write the JSON result here")

    p = sub.add_parser("simulate", help="run Monte Carlo trials or emit IQ files")
    _add_model_flags(p)
    p.add_argument("--n", type=int, required=True, help="samples per trial")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit", choices=("summary", "trials", "iq"), default="summary")
    p.add_argument("--format", choices=("csv", "binary"), default="csv",
                   help="IQ file format for --emit iq")
    p.add_argument("--out", default=None)

    p = sub.add_parser("pdf", help="evaluate a density on a grid")
    p.add_argument("--family", required=True, choices=sorted(_FAMILY_FLAGS))
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--sigma1", type=float, default=None)
    p.add_argument("--sigma2", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--scale", type=float, default=None)
    p.add_argument("--grid", default=None, help="lo:hi:count[:log]")
    p.add_argument("--out", default=None)

    p = sub.add_parser("roc", help="build a ROC curve")
    p.add_argument("--detector", choices=("rho", "ddn"), required=True)
    p.add_argument("--method", choices=("exact", "approx", "mc"), required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma1", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--variant", choices=("qtms", "noise"), default="qtms")
    p.add_argument("--pfa-grid", default="default",
                   help="'default', lo:hi:count[:log], or comma-separated values")
    p.add_argument("--trials", type=int, default=10_000, help="monte-carlo trials")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("tvd", help="total variation distance sweep for an approximation pair")
    p.add_argument("--pair", choices=("rho-rice", "phi-vonmises", "ddn-rice"), required=True)
    p.add_argument("--sweep", required=True, help="n=10,25,... or rho=0.1,0.2,...")
    p.add_argument("--rho", type=float, default=None, help="fixed rho for an n sweep")
    p.add_argument("--n", type=int, default=None, help="fixed n for a rho sweep")
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--sigma1", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("figures", help="regenerate a figure's data as CSV files")
    p.add_argument("figure", help="fig1 ... fig11, or a panel id like fig7a")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


_HANDLERS = {
    "estimate": _cmd_estimate,
    "simulate": _cmd_simulate,
    "pdf": _cmd_pdf,
    "roc": _cmd_roc,
    "tvd": _cmd_tvd,
    "figures": _cmd_figures,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    try:
        client = ServiceClient(args.server)
        return _HANDLERS[args.command](client, args)
    except CommandError as exc:
        print(str(exc), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
