"""Command line interface: a thin client over the HTTP service.

By default the commands drive the FastAPI app in process (no server
needed); set ``FMM_SERVICE_URL`` or pass ``--service URL`` to talk to a
remote instance started with ``fmm serve``.
"""

from __future__ import annotations

import os
import sys

import click

from .matio import read_mat, write_mat


class ServiceClient:
    """Minimal JSON client; in-process unless a base URL is configured."""

    def __init__(self, base_url: str | None = None):
        self.base_url = base_url or os.environ.get("FMM_SERVICE_URL")
        if self.base_url:
            import httpx

            self._client = httpx.Client(base_url=self.base_url, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DeprecationWarning)
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def call(self, method: str, path: str, **kwargs) -> dict:
        response = self._client.request(method, path, **kwargs)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except Exception:
                detail = response.text
            raise click.ClickException(f"{path}: {detail}")
        return response.json()

    def get(self, path: str) -> dict:
        return self.call("GET", path)

    def post(self, path: str, payload: dict) -> dict:
        return self.call("POST", path, json=payload)


pass_client = click.make_pass_decorator(ServiceClient)


@click.group()
@click.option("--service", default=None, help="Base URL of a running fmm service.")
@click.pass_context
def main(ctx, service):
    """Laboratory for fast and accurate 2x2-recursive matrix multiplication."""
    ctx.obj = ServiceClient(service)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service under uvicorn."""
    import uvicorn

    uvicorn.run("fmmlab.service:app", host=host, port=port)


@main.command("catalog")
@click.argument("name", required=False)
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write the formula here.")
@pass_client
def catalog_cmd(client, name, output):
    """List catalog formulas, or export one to a .hm file."""
    if name is None:
        for entry in client.get("/catalog"):
            mark = "valid" if entry["brent_valid"] else "aux"
            click.echo(f"{entry['name']:16s} r={entry['rank']} {mark:5s} gamma21={entry['gamma21']:.6f}")
        return
    data = client.get(f"/catalog/{name}")
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(data["hm"])
        click.echo(f"wrote {output} (gamma21={data['gamma21']:.6f})")
    else:
        click.echo(data["hm"], nl=False)


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


@main.command()
@click.argument("hm_file", type=click.Path(exists=True, dir_okay=False))
@pass_client
def validate(client, hm_file):
    """Check a formula against the exact tensor identities."""
    data = client.post("/validate", {"hm": _read_text(hm_file)})
    if data["valid"]:
        click.echo("valid")
    else:
        click.echo(f"INVALID at index {data['first_failure']}")
        sys.exit(1)


@main.command()
@click.argument("hm_file", type=click.Path(exists=True, dir_okay=False))
@pass_client
def gamma(client, hm_file):
    """Growth factors, weights and norms of a formula."""
    data = client.post("/gamma", {"hm": _read_text(hm_file)})
    for key in ("gamma21", "gamma_11inf", "gamma_21inf", "gamma_01inf", "norm23", "frobenius_product"):
        click.echo(f"{key:18s} {data[key]:.9f}")
    click.echo(f"{'q0':18s} {data['q0']}")


@main.command()
@click.option("--k0", default=1, show_default=True, type=int, help="Base-case inner dimension.")
@click.option("--ell", default=0, show_default=True, type=int, help="Recursion depth.")
@click.option("--norm", type=click.Choice(["inf", "2"]), default="inf", show_default=True)
@click.argument("hm_file", type=click.Path(exists=True, dir_okay=False))
@pass_client
def bound(client, k0, ell, norm, hm_file):
    """Forward error coefficient kappa for the recursive algorithm."""
    data = client.post("/bound", {"hm": _read_text(hm_file), "k0": k0, "ell": ell, "norm": norm})
    click.echo(f"kappa  {data['kappa']:.6e}")
    click.echo(f"gamma  {data['gamma']:.9f}")
    click.echo(f"q0     {data['q0']}")


@main.group()
def orbit():
    """Isotropy-orbit operations."""


@orbit.command("apply")
@click.option("--rho", required=True, help="Positive scale (fraction like 9/8 stays exact).")
@click.option("--xi", required=True, help="Shear (fraction like -1/2 stays exact).")
@click.option("--float", "float_backend", is_flag=True, help="Force the float backend.")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
@click.argument("hm_file", type=click.Path(exists=True, dir_okay=False))
@pass_client
def orbit_apply(client, rho, xi, float_backend, output, hm_file):
    """Act on a formula with the (rho, xi) diagonal-shear isotropy."""
    payload = {"hm": _read_text(hm_file), "rho": rho, "xi": xi, "exact": not float_backend}
    data = client.post("/orbit/apply", payload)
    click.echo(f"gamma21 {data['gamma21']:.9f}")
    if data.get("hm") and output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(data["hm"])
        click.echo(f"wrote {output}")


@main.command("optimize-orbit")
@click.option("--starts", default=8, show_default=True, type=int)
@click.option("--tol", default=1e-12, show_default=True, type=float)
@pass_client
def optimize_orbit(client, starts, tol):
    """Minimize gamma21 over the (rho, xi) suborbit."""
    data = client.post("/orbit/optimize", {"starts": starts, "tol": tol})
    click.echo(f"rho   {data['rho']:.10f}")
    click.echo(f"xi    {data['xi']:.10f}")
    click.echo(f"gamma {data['gamma']:.10f}")


@main.command("optimize-frobenius")
@click.option("--starts", default=8, show_default=True, type=int)
@click.option("--tol", default=1e-12, show_default=True, type=float)
@pass_client
def optimize_frobenius(client, starts, tol):
    """Minimize the component Frobenius-norm objective."""
    data = client.post("/frobenius/optimize", {"starts": starts, "tol": tol})
    click.echo(f"point {data['point']}")
    click.echo(f"value {data['value']:.10f}")
    click.echo(f"gradient norm {data['gradient_norm']:.3e}")


@main.command()
@click.option("--order", "-k", default=4, show_default=True, type=int)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
@pass_client
def approx(client, order, output):
    """Exact dyadic-rational approximation of the orbit optimum."""
    data = client.post("/approx", {"order": order})
    with open(output, "w", encoding="utf-8") as fh:
        fh.write(data["hm"])
    click.echo(f"wrote {output} (gamma21={data['gamma21']:.7f})")


@main.command("sparsify-rot")
@click.option("--objective", type=click.Choice(["nnz", "canonical_vectors"]), default="nnz", show_default=True)
@click.option("--budget", default=720, show_default=True, type=int)
@click.argument("hm_file", type=click.Path(exists=True, dir_okay=False))
@pass_client
def sparsify_rot(client, objective, budget, hm_file):
    """Search rotation isotropies for a sparser equivalent formula."""
    data = client.post(
        "/sparsify-rot", {"hm": _read_text(hm_file), "objective": objective, "budget": budget}
    )
    click.echo(f"nonzeros {data['nnz']}  canonical rows {data['canonical_rows']}  gamma21 {data['gamma21']:.9f}")


@main.command()
@click.option("-o", "--output", nargs=2, type=click.Path(dir_okay=False), required=True,
              metavar="COB.hm SPARSE.hm")
@click.argument("hm_file", type=click.Path(exists=True, dir_okay=False))
@pass_client
def sparsify(client, output, hm_file):
    """Factor a formula into a {0,+-1} core and a change-of-basis triple."""
    data = client.post("/sparsify", {"hm": _read_text(hm_file)})
    cob_path, sparse_path = output
    with open(cob_path, "w", encoding="utf-8") as fh:
        fh.write(data["cob"])
    with open(sparse_path, "w", encoding="utf-8") as fh:
        fh.write(data["sparse"])
    click.echo(
        f"core additions {data['core_additions']}, core gamma21 {data['core_gamma21']:.6f}, "
        f"improved={data['improved']}"
    )


@main.command()
@click.argument("mode", type=click.Choice(["naive", "optimize", "kernel", "transpose"]))
@click.argument("matrix_file", type=click.Path(exists=True, dir_okay=False))
@pass_client
def slp(client, mode, matrix_file):
    """Emit a straight-line program for a matrix of coefficient tokens."""
    data = client.post("/slp", {"matrix": _read_text(matrix_file), "mode": mode})
    click.echo(data["program"])
    click.echo(
        f"# adds={data['adds']} scales={data['scales']} muls={data['muls']} halvings={data['halvings']}"
    )


@main.command()
@click.option("--alg", default="strassen", show_default=True)
@click.option("--sparse", is_flag=True, help="Use the alternative-basis pipeline.")
@click.option("--cutoff", default=1, show_default=True, type=int)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
@click.argument("a_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("b_file", type=click.Path(exists=True, dir_okay=False))
@pass_client
def multiply(client, alg, sparse, cutoff, output, a_file, b_file):
    """Multiply two matrix files with a catalog algorithm."""
    A = read_mat(a_file)
    B = read_mat(b_file)
    data = client.post(
        "/multiply",
        {"a": A.tolist(), "b": B.tolist(), "algorithm": alg, "sparse": sparse, "cutoff": cutoff},
    )
    import numpy as np

    write_mat(np.asarray(data["c"]), output)
    click.echo(f"wrote {output}")


@main.command()
@click.option("--algs", default="strassen,conventional", show_default=True)
@click.option("--dists", default="normal", show_default=True)
@click.option("--sizes", default="32,64,128,256,512", show_default=True)
@click.option("--seeds", default=11, show_default=True, type=int)
@click.option("--cutoff", default=1, show_default=True, type=int)
@click.option("--cond", default=1e12, show_default=True, type=float)
@click.option("--master-seed", default=0, show_default=True, type=int)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
@click.option("--summary", type=click.Path(dir_okay=False), help="Also write the median summary.")
@pass_client
def bench(client, algs, dists, sizes, seeds, cutoff, cond, master_seed, output, summary):
    """Accuracy benchmark; writes one CSV row per (alg, dist, n, seed)."""
    payload = {
        "algs": [a.strip() for a in algs.split(",") if a.strip()],
        "dists": [d.strip() for d in dists.split(",") if d.strip()],
        "sizes": [int(s) for s in sizes.split(",") if s.strip()],
        "seeds": seeds,
        "cutoff": cutoff,
        "cond": cond,
        "master_seed": master_seed,
    }
    data = client.post("/bench", payload)
    with open(output, "w", encoding="utf-8") as fh:
        fh.write(data["csv"])
    click.echo(f"wrote {output}")
    if summary:
        with open(summary, "w", encoding="utf-8") as fh:
            fh.write(data["summary_csv"])
        click.echo(f"wrote {summary}")


@main.command()
@pass_client
def tables(client):
    """Recompute the published growth/weight values with pass/fail marks."""
    click.echo(client.get("/tables")["text"], nl=False)


if __name__ == "__main__":
    main()
