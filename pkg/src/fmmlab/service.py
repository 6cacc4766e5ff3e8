"""FastAPI service exposing the laboratory's operations.

Every endpoint is a stateless wrapper over the core package; the CLI in
:mod:`fmmlab.cli` drives this app in process, and ``fmm serve`` runs it
under uvicorn for remote clients.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__, bench, orbit, schemas
from .catalog import BRENT_VALID_NAMES, catalog, catalog_names
from .coeff import CoeffParseError
from .growth import BoundParams, gamma21, gamma_q1inf, growth_report, kappa_mm, q0
from .hm import HMFormatError, HMRep, dumps_hm, reads_hm, validate_brent
from .isotropy import apply, param_isotropy, search_rotations
from .isotropy import _count_canonical_rows, _count_nonzeros
from .matrices import parse_matrix
from .recursion import RecursionConfig, rec_multiply, sparse_multiply
from .slp import compile_bilinear, count_ops, cse_optimize, from_matrix_naive, kernel_decompose, transpose_slp
from .sparsify import core_additions, sparsify_cob

app = FastAPI(
    title="fmmlab",
    version=__version__,
    description="Laboratory for fast and numerically accurate 2x2-block "
    "recursive matrix multiplication.",
)


def _parse_hm(text: str) -> HMRep:
    try:
        return reads_hm(text)
    except (HMFormatError, CoeffParseError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/catalog", response_model=list[schemas.CatalogEntry])
def catalog_index():
    out = []
    for name in catalog_names():
        rep = catalog(name)
        out.append(
            schemas.CatalogEntry(
                name=name,
                rank=rep.r,
                brent_valid=name in BRENT_VALID_NAMES,
                gamma21=gamma21(rep),
            )
        )
    return out


@app.get("/catalog/{name}", response_model=schemas.HMResponse)
def catalog_entry(name: str):
    try:
        rep = catalog(name)
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    return schemas.HMResponse(hm=dumps_hm(rep), gamma21=gamma21(rep))


@app.post("/validate", response_model=schemas.ValidateResponse)
def validate(req: schemas.HMText):
    rep = _parse_hm(req.hm)
    report = validate_brent(rep)
    failure = list(report.first_failure) if report.first_failure else None
    return schemas.ValidateResponse(
        valid=report.valid, first_failure=failure, max_residual=report.max_residual
    )


@app.post("/gamma", response_model=schemas.GammaResponse)
def gamma(req: schemas.HMText):
    rep = _parse_hm(req.hm)
    rpt = growth_report(rep)
    return schemas.GammaResponse(name=rep.name, **rpt.__dict__)


@app.post("/bound", response_model=schemas.BoundResponse)
def bound(req: schemas.BoundRequest):
    rep = _parse_hm(req.hm)
    params = BoundParams(k0=req.k0, ell=req.ell)
    try:
        kappa = kappa_mm(rep, params, norm=req.norm)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return schemas.BoundResponse(
        kappa=kappa,
        gamma=gamma_q1inf(rep, 1 if req.norm == "inf" else 2),
        q0=q0(rep),
        k0=req.k0,
        ell=req.ell,
        norm=req.norm,
    )


@app.post("/orbit/apply", response_model=schemas.OrbitApplyResponse)
def orbit_apply(req: schemas.OrbitApplyRequest):
    rep = _parse_hm(req.hm)
    from fractions import Fraction

    try:
        if req.exact:
            try:
                rho, xi = Fraction(req.rho), Fraction(req.xi)
            except ValueError as exc:
                raise HTTPException(
                    status_code=422,
                    detail="exact backend needs rational rho and xi (like 9/8, -1/2)",
                ) from exc
            g = param_isotropy(rho, xi, backend="exact")
            out = apply(g, rep)
            return schemas.OrbitApplyResponse(hm=dumps_hm(out), gamma21=gamma21(out), exact=True)
        g = param_isotropy(float(Fraction(req.rho)), float(Fraction(req.xi)), backend="float")
        out = apply(g, rep.to_float())
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return schemas.OrbitApplyResponse(
        matrices=[np.asarray(c).tolist() for c in out.components()],
        gamma21=gamma21(out),
        exact=False,
    )


@app.post("/orbit/optimize", response_model=schemas.OptimizeOrbitResponse)
def orbit_optimize(req: schemas.OptimizeOrbitRequest):
    pt = orbit.minimize_gamma_orbit(starts=req.starts, tol=req.tol)
    return schemas.OptimizeOrbitResponse(rho=pt.rho, xi=pt.xi, gamma=pt.gamma)


@app.post("/frobenius/optimize", response_model=schemas.FrobeniusResponse)
def frobenius_optimize(req: schemas.FrobeniusRequest):
    point, value = orbit.minimize_frobenius(starts=req.starts, tol=req.tol)
    grad = orbit.frobenius_gradient(*point)
    return schemas.FrobeniusResponse(
        point=[float(x) for x in point],
        value=value,
        gradient_norm=float(np.linalg.norm(grad)),
    )


@app.post("/approx", response_model=schemas.HMResponse)
def approx(req: schemas.ApproxRequest):
    if req.order < 1:
        raise HTTPException(status_code=422, detail="order must be >= 1")
    rep = orbit.dyadic_approx_rep(req.order)
    return schemas.HMResponse(hm=dumps_hm(rep), gamma21=gamma21(rep))


@app.post("/sparsify-rot", response_model=schemas.SparsifyRotResponse)
def sparsify_rot(req: schemas.SparsifyRotRequest):
    rep = _parse_hm(req.hm).to_float()
    out = search_rotations(rep, objective=req.objective, budget=req.budget)
    return schemas.SparsifyRotResponse(
        matrices=[np.asarray(c).tolist() for c in out.components()],
        nnz=_count_nonzeros(out),
        canonical_rows=_count_canonical_rows(out),
        gamma21=gamma21(out),
    )


@app.post("/sparsify", response_model=schemas.SparsifyResponse)
def sparsify(req: schemas.HMText):
    rep = _parse_hm(req.hm)
    try:
        result = sparsify_cob(rep)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return schemas.SparsifyResponse(
        cob=dumps_hm(result.cob),
        sparse=dumps_hm(result.sparse),
        improved=result.improved,
        core_additions=core_additions(result.sparse),
        core_gamma21=gamma21(result.sparse),
    )


@app.post("/slp", response_model=schemas.SlpResponse)
def slp_transform(req: schemas.SlpRequest):
    try:
        M = parse_matrix(req.matrix)
    except (CoeffParseError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    if req.mode == "naive":
        prog = from_matrix_naive(M)
    elif req.mode == "optimize":
        prog = cse_optimize(M)
    elif req.mode == "kernel":
        prog = kernel_decompose(M)
    else:
        prog = transpose_slp(from_matrix_naive(M))
    c = count_ops(prog)
    return schemas.SlpResponse(
        program=str(prog), adds=c.adds, scales=c.scales, muls=c.muls, halvings=c.halvings
    )


@app.post("/slp/compile", response_model=schemas.SlpResponse)
def slp_compile(req: schemas.CompileRequest):
    rep = _parse_hm(req.hm)
    prog = compile_bilinear(rep, req.strategy)
    c = count_ops(prog)
    return schemas.SlpResponse(
        program=str(prog), adds=c.adds, scales=c.scales, muls=c.muls, halvings=c.halvings
    )


@app.post("/multiply", response_model=schemas.MultiplyResponse)
def multiply(req: schemas.MultiplyRequest):
    A = np.asarray(req.a, dtype=np.float64)
    B = np.asarray(req.b, dtype=np.float64)
    try:
        if req.sparse:
            C = sparse_multiply(A, B, RecursionConfig("schwartzopt", req.cutoff, "alternative"))
        elif req.algorithm == "conventional":
            from .recursion import conventional_multiply

            C = conventional_multiply(A, B)
        else:
            C = rec_multiply(A, B, RecursionConfig(req.algorithm, req.cutoff))
    except (KeyError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return schemas.MultiplyResponse(c=C.tolist())


@app.post("/bench", response_model=schemas.BenchResponse)
def bench_run(req: schemas.BenchRequest):
    try:
        records = bench.run_bench(
            req.algs,
            req.dists,
            req.sizes,
            seeds=req.seeds,
            cutoff=req.cutoff,
            cond=req.cond,
            master_seed=req.master_seed,
        )
    except (KeyError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return schemas.BenchResponse(
        csv=bench.records_to_csv(records), summary_csv=bench.summary_to_csv(records)
    )


@app.get("/tables", response_model=schemas.TablesResponse)
def tables():
    return schemas.TablesResponse(text=bench.report_tables())
