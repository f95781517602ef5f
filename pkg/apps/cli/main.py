import argparse
import csv
import itertools
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, TextIO

import numpy as np
from pydantic import BaseModel


def _ensure_core_on_path() -> None:
    repo_root = Path(__file__).resolve().parents[2]
    core_path = repo_root / "packages" / "core"
    if str(core_path) not in sys.path:
        sys.path.insert(0, str(core_path))


_ensure_core_on_path()

from codec import parse_field, parse_poly  # noqa: E402
from errors import USAGE_ERRORS, BudgetExceeded, MaxkerError, PreconditionError  # noqa: E402
from families import (  # noqa: E402
    DegreeN2Seed,
    derive_degree_n_minus_2,
    enumerate_max_kernel,
    gaussian_binomial,
    verify_table,
)
from gf import field_info, subfield_elements  # noqa: E402
from linpoly import (  # noqa: E402
    LinearizedPoly,
    SubspaceBasis,
    adjoint,
    annihilator,
    count_roots,
    evaluate,
    kernel_basis,
    kernel_dimension,
    random_poly,
)
from maxkernel import (  # noqa: E402
    METHODS,
    is_maximum_kernel,
    lift_to_extension,
    max_kernel_report,
    norm_necessary,
    splitting_field_degree,
    transfer_verdicts,
)
from mrd import gabidulin_code, verify_mrd  # noqa: E402
from schemas import (  # noqa: E402
    CheckMaxResult,
    DeriveResult,
    EnumerateResult,
    ErrorResult,
    EvalResult,
    FieldInfo,
    KernelResult,
    MRDResult,
    PolyResult,
    SplittingResult,
    TableDegreeResult,
    TableRowResult,
    TransferResult,
    TransferSweepResult,
    VerifyTableResult,
)
from settings import Settings, load_settings  # noqa: E402

try:  # noqa: E402
    from db import Run, Witness, get_session, init_db, save_run  # type: ignore
    _DB_AVAILABLE = True
except Exception:  # noqa: BLE001
    Run = Witness = None  # type: ignore[assignment]
    get_session = init_db = save_run = None  # type: ignore[assignment]
    _DB_AVAILABLE = False


logger = logging.getLogger("maxker")


def _emit(model: BaseModel, fmt: str, stdout: TextIO, text: Callable[[BaseModel], str]) -> None:
    if fmt == "json":
        print(model.model_dump_json(), file=stdout)
    else:
        print(text(model), file=stdout)


def _ints(text: str) -> list[int]:
    body = text.strip().strip("[]")
    try:
        return [int(tok) for tok in body.split(",") if tok.strip()]
    except ValueError as exc:
        raise PreconditionError(f"lista de enteros inválida: {text!r}") from exc


def _persist(args: argparse.Namespace, settings: Settings, command: str, field: str, params: dict, summary: dict, witnesses) -> Optional[int]:
    if not getattr(args, "save", False):
        return None
    if not _DB_AVAILABLE or save_run is None:
        logger.error("DB no disponible. Instala SQLAlchemy para usar --save.")
        return None
    try:
        return save_run(command, field, params, summary, witnesses, db_url=settings.db_url)
    except Exception as exc:  # noqa: BLE001
        logger.error("No se pudo guardar la ejecución '%s': %s", command, exc)
        return None


# --- subcomandos --------------------------------------------------------


def run_field_info(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    ctx = parse_field(args.field)
    info = FieldInfo(**field_info(ctx))
    _emit(info, args.format, stdout, lambda m: f"F_{m.q}^{m.n} = {m.field} (orden {m.order}, módulo {m.modulus_poly})")
    return 0


def _poly_from_args(args: argparse.Namespace) -> LinearizedPoly:
    ctx = parse_field(args.field)
    if getattr(args, "random", None) is not None:
        rng = np.random.default_rng(args.seed)
        return random_poly(ctx, getattr(args, "s", 1) or 1, args.random, rng)
    if not args.poly:
        raise PreconditionError("se requiere --poly")
    return parse_poly(ctx, args.poly)


def run_eval(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    f = _poly_from_args(args)
    value = evaluate(f, args.z)
    result = EvalResult(poly=str(f), z=args.z, value=int(value))
    _emit(result, args.format, stdout, lambda m: f"f({m.z}) = {m.value}")
    return 0


def run_kernel(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    f = _poly_from_args(args)
    basis = kernel_basis(f)
    result = KernelResult(
        poly=str(f),
        degree=f.degree,
        kernel_dim=basis.dim,
        basis=basis.as_ints(),
        max_kernel=f.degree >= 0 and basis.dim == f.degree,
    )
    _emit(result, args.format, stdout, lambda m: f"dim ker = {m.kernel_dim} (sigma-grado {m.degree}); base {m.basis}")
    return 0


def run_check_max(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    f = _poly_from_args(args)
    if args.method == "all":
        report = max_kernel_report(f)
        for method, verdict in report.verdicts.items():
            logger.debug("%s: %s", method, verdict)
        if len(set(report.verdicts.values())) != 1:
            logger.error("Los métodos discrepan para %s: %s", f, report.verdicts)
        verdict, b_identity = report.max_kernel, report.b_is_identity
    else:
        verdict = is_maximum_kernel(f, args.method)
        b_identity = verdict if args.method == "matrix" else None
    result = CheckMaxResult(
        poly=str(f),
        method=args.method,
        max_kernel=verdict,
        B_is_identity=b_identity,
        kernel_dim=kernel_dimension(f),
        norm_condition=norm_necessary(f) if f.degree > 0 else None,
    )
    _emit(result, args.format, stdout, lambda m: f"{m.poly}: {'núcleo máximo' if m.max_kernel else 'sin núcleo máximo'} (dim {m.kernel_dim})")
    return 0


def _splitting_text(r: SplittingResult) -> str:
    if r.roots_in_extension is None:
        return f"m = {r.splitting_degree}: {r.roots_in_base} raíces en la base"
    return f"m = {r.splitting_degree}: {r.roots_in_extension} raíces en {r.extension_field}, {r.roots_in_base} en la base"


def run_splitting_field(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    f = _poly_from_args(args)
    m = splitting_field_degree(f, settings.order_cap)
    roots_big: Optional[int] = None
    extension_field: Optional[str] = None
    if not args.no_count:
        lifted = lift_to_extension(f, m, settings.extension_cap)
        roots_big = lifted.ctx.q ** kernel_dimension(lifted)
        extension_field = lifted.ctx.spec
    result = SplittingResult(
        poly=str(f),
        splitting_degree=m,
        extension_field=extension_field,
        roots_in_extension=roots_big,
        roots_in_base=count_roots(f),
        extension=f.s != 1,
    )
    _emit(result, args.format, stdout, _splitting_text)
    return 0


def run_adjoint(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    g = adjoint(_poly_from_args(args))
    result = PolyResult(poly=str(g), degree=g.degree, kernel_dim=kernel_dimension(g))
    _emit(result, args.format, stdout, lambda m: m.poly)
    return 0


def run_annihilator(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    ctx = parse_field(args.field)
    U = SubspaceBasis(ctx, ctx.GF(_ints(args.basis)))
    f = annihilator(U)
    result = PolyResult(poly=str(f), degree=f.degree, kernel_dim=kernel_dimension(f))
    _emit(result, args.format, stdout, lambda m: m.poly)
    return 0


def run_enumerate(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    ctx = parse_field(args.field)
    polys = enumerate_max_kernel(
        ctx,
        args.s,
        args.k,
        budget=settings.budget,
        workers=args.workers,
        strategy=args.strategy,
        method=args.method,
    )
    witnesses = [str(f) for f in polys]
    run_id = _persist(
        args,
        settings,
        "enumerate",
        ctx.spec,
        {"s": args.s, "k": args.k, "strategy": args.strategy},
        {"count": len(witnesses)},
        [(w, args.k) for w in witnesses],
    )
    result = EnumerateResult(
        field=ctx.spec,
        s=args.s,
        k=args.k,
        strategy=args.strategy,
        count=len(witnesses),
        gaussian_binomial=gaussian_binomial(ctx.n, args.k, ctx.q),
        witnesses=witnesses,
        run_id=run_id,
    )
    _emit(result, args.format, stdout, lambda m: "\n".join(m.witnesses + [f"# {m.count} polinomios ([n,k]_q = {m.gaussian_binomial})"]))
    return 0


def run_verify_table(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    report = verify_table(args.table, args.q, s=args.s, budget=settings.budget, workers=args.workers)
    rows = [
        TableRowResult(row=r.table_id.label, s=r.table_id.s, k=r.table_id.k, solutions=r.solutions, all_max_kernel=r.all_max_kernel)
        for r in report.rows
    ]
    degrees = [TableDegreeResult(s=d.s, k=d.k, max_kernel=d.max_kernel, union=d.union, equal=d.equal) for d in report.degrees]
    for d in report.degrees:
        if not d.equal:
            logger.error("s=%d k=%d: faltan %s, sobran %s", d.s, d.k, d.missing, d.extra)
    run_id = _persist(
        args,
        settings,
        "verify-table",
        report.field,
        {"table": args.table, "q": args.q, "s": args.s},
        {"passed": report.passed, "degrees": [d.model_dump() for d in degrees]},
        [],
    )
    result = VerifyTableResult(table=args.table, field=report.field, passed=report.passed, rows=rows, degrees=degrees, run_id=run_id)

    def text(m: BaseModel) -> str:
        lines = [f"{r.row}: {r.solutions} soluciones, {'ok' if r.all_max_kernel else 'FALLA'}" for r in m.rows]
        lines += [f"s={d.s} k={d.k}: {d.union}/{d.max_kernel} {'ok' if d.equal else 'FALLA'}" for d in m.degrees]
        return "\n".join(lines)

    _emit(result, args.format, stdout, text)
    return 0 if report.passed else 1


def run_derive_n2(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    ctx = parse_field(args.field)
    seed = DegreeN2Seed(ctx, args.s, args.a0, args.an3)
    f, closing = derive_degree_n_minus_2(seed)
    result = DeriveResult(
        field=ctx.spec,
        s=args.s,
        a0=args.a0,
        a_n3=args.an3,
        poly=str(f),
        closing=closing,
        max_kernel=is_maximum_kernel(f, "matrix"),
    )
    _emit(result, args.format, stdout, lambda m: f"{m.poly}: cierre {'ok' if m.closing else 'no'}")
    return 0


def run_mrd_verify(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    ctx = parse_field(args.field)
    report = verify_mrd(gabidulin_code(ctx, args.k, args.s), budget=settings.budget)
    run_id = _persist(
        args,
        settings,
        "mrd-verify",
        ctx.spec,
        {"k": args.k, "s": args.s},
        {"is_mrd": report.is_mrd, "min_rank": report.min_rank},
        [(report.worst, report.max_kernel_dim)] if report.worst else [],
    )
    result = MRDResult(
        field=ctx.spec,
        k=args.k,
        s=args.s,
        is_mrd=report.is_mrd,
        max_kernel_dim=report.max_kernel_dim,
        min_rank=report.min_rank,
        worst=report.worst,
        codewords_checked=report.codewords_checked,
        degree_bound_holds=report.degree_bound_holds,
        run_id=run_id,
    )
    _emit(result, args.format, stdout, lambda m: f"MRD={m.is_mrd}: rango mínimo {m.min_rank}, dim máx {m.max_kernel_dim} ({m.codewords_checked} palabras)")
    return 0


def run_transfer_check(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> int:
    ctx = parse_field(args.field)
    if args.coeffs is not None:
        coeffs = _ints(args.coeffs)
        f_max, g_max = transfer_verdicts(ctx, coeffs, args.s, args.t, args.m)
        result = TransferResult(field=ctx.spec, m=args.m, s=args.s, t=args.t, coeffs=coeffs, verdict_s=f_max, verdict_t=g_max, agree=f_max == g_max)
        _emit(result, args.format, stdout, lambda r: f"q^{r.s}: {r.verdict_s}, q^{r.t}: {r.verdict_t}")
        return 0
    if args.k is None:
        raise PreconditionError("se requiere --coeffs o --k")
    sub = [int(v) for v in subfield_elements(ctx, args.m)]
    if len(sub) ** args.k > settings.budget:
        raise BudgetExceeded(len(sub) ** args.k, settings.budget)
    disagreements: list[list[int]] = []
    checked = 0
    for combo in itertools.product(sub, repeat=args.k):
        f_max, g_max = transfer_verdicts(ctx, combo, args.s, args.t, args.m)
        checked += 1
        if f_max != g_max:
            disagreements.append(list(combo))
    result = TransferSweepResult(
        field=ctx.spec,
        m=args.m,
        s=args.s,
        t=args.t,
        k=args.k,
        checked=checked,
        disagreements=disagreements,
        agree=not disagreements,
    )
    _emit(result, args.format, stdout, lambda r: f"{r.checked} casos, {len(r.disagreements)} discrepancias")
    return 0 if result.agree else 1


def run_history(limit: int, export_path: Optional[str], db_url: str, stdout: TextIO) -> int:
    if not _DB_AVAILABLE or not get_session or not Run or not Witness:  # type: ignore[truthy-bool]
        logger.error("DB no disponible. Instala SQLAlchemy y asegúrate de que packages/core/db.py esté accesible.")
        return 1
    init_db(db_url)  # type: ignore[misc]

    if export_path:
        try:
            import pandas as pd  # type: ignore
        except Exception as ie:  # noqa: BLE001
            logger.error("Pandas requerido para exportar: %s", ie)
            return 1

        session = get_session(db_url)  # type: ignore[misc]
        try:
            rows = (
                session.query(Run.id, Run.command, Run.field, Witness.poly, Witness.kernel_dim, Run.created_at)  # type: ignore[union-attr]
                .join(Witness, Witness.run_id == Run.id)  # type: ignore[union-attr]
                .order_by(Run.id.desc(), Witness.id)  # type: ignore[union-attr]
                .all()
            )
            df = pd.DataFrame(
                [
                    {
                        "run": r[0],
                        "comando": r[1],
                        "cuerpo": r[2],
                        "polinomio": r[3],
                        "dim": r[4],
                        "timestamp": r[5].isoformat() if hasattr(r[5], "isoformat") else str(r[5]),
                    }
                    for r in rows
                ]
            )
            if export_path.lower().endswith(".csv"):
                df.to_csv(export_path, index=False)
            elif export_path.lower().endswith(".parquet"):
                try:
                    df.to_parquet(export_path, index=False)
                except Exception as pe:  # noqa: BLE001
                    logger.error("Para Parquet instala 'pyarrow' o 'fastparquet': %s", pe)
                    return 1
            else:
                logger.error("Extensión no soportada para export: usa .csv o .parquet")
                return 1
            logger.info("Testigos exportados a %s (%d filas)", export_path, len(df))
        except Exception as exc:  # noqa: BLE001
            logger.error("Error exportando histórico: %s", exc)
            return 1
        finally:
            session.close()

    writer = csv.writer(stdout)
    writer.writerow(["id", "comando", "cuerpo", "testigos", "timestamp"])
    session = get_session(db_url)  # type: ignore[misc]
    try:
        q = session.query(Run).order_by(Run.id.desc())  # type: ignore[union-attr]
        if limit and limit > 0:
            q = q.limit(limit)
        for run in q.all():
            ts = run.created_at
            ts_str = ts.isoformat() if hasattr(ts, "isoformat") else str(ts)
            writer.writerow([run.id, run.command, run.field, len(run.witnesses), ts_str])
    except Exception as exc:  # noqa: BLE001
        logger.error("Error consultando histórico: %s", exc)
        return 1
    finally:
        session.close()
    return 0


# --- parser -------------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--debug", action="store_true", default=argparse.SUPPRESS, help="Habilita logging DEBUG a stderr")
    common.add_argument("--format", choices=("text", "json"), default="text", help="Formato de salida (default text)")
    common.add_argument("--seed", type=int, default=0, help="Semilla para muestreos aleatorios")
    common.add_argument("--budget", type=int, help="Máximo de casos en barridos (MAXKER_BUDGET)")
    common.add_argument("--order-cap", dest="order_cap", type=int, help="Tope para el orden de B (MAXKER_ORDER_CAP)")
    common.add_argument("--db", dest="db_url", help="URL de la base de datos (MAXKER_DB_URL)")
    return common


def _add_poly_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--field", required=True, help="Cuerpo p^e^n[/módulo]")
    p.add_argument("--poly", help='Polinomio "s=<int>;a=[a_0,...,a_k]"')
    p.add_argument("--random", type=int, metavar="K", help="Usa un polinomio mónico aleatorio de sigma-grado K (con --seed)")
    p.add_argument("--s", type=int, default=1, help="s para --random (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxker", description="q^s-polinomios con núcleo máximo")
    parser.add_argument(
        "--debug", action="store_true", help="Habilita logging DEBUG a stderr"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()

    p = subparsers.add_parser("field-info", parents=[common], help="Describe un cuerpo finito")
    p.add_argument("--field", required=True, help="Cuerpo p^e^n[/módulo]")

    p = subparsers.add_parser("eval", parents=[common], help="Evalúa f en un elemento")
    _add_poly_args(p)
    p.add_argument("--z", type=int, required=True, help="Elemento (codificación entera)")

    p = subparsers.add_parser("kernel", parents=[common], help="Base del núcleo de f")
    _add_poly_args(p)

    p = subparsers.add_parser("check-max", parents=[common], help="¿Tiene f núcleo máximo?")
    _add_poly_args(p)
    p.add_argument("--method", choices=METHODS + ("all",), default="matrix", help="Criterio (default matrix)")

    p = subparsers.add_parser("splitting-field", parents=[common], help="Grado del cuerpo de descomposición")
    _add_poly_args(p)
    p.add_argument("--no-count", dest="no_count", action="store_true", help="No contar raíces en la extensión")

    p = subparsers.add_parser("adjoint", parents=[common], help="Adjunta de f")
    _add_poly_args(p)

    p = subparsers.add_parser("annihilator", parents=[common], help="Polinomio con núcleo dado")
    p.add_argument("--field", required=True, help="Cuerpo p^e^n[/módulo]")
    p.add_argument("--basis", required=True, help="Elementos separados por comas")

    p = subparsers.add_parser("enumerate", parents=[common], help="Enumera polinomios mónicos con núcleo máximo")
    p.add_argument("--field", required=True, help="Cuerpo p^e^n[/módulo]")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--strategy", choices=("auto", "exhaustive", "seeds"), default="auto")
    p.add_argument("--method", choices=METHODS, default="recursion")
    p.add_argument("--workers", type=int, default=1, help="Procesos para el barrido (default 1)")
    p.add_argument("--save", action="store_true", help="Guarda la ejecución en la base de datos")

    p = subparsers.add_parser("verify-table", parents=[common], help="Compara una tabla con la enumeración")
    p.add_argument("--table", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--s", type=int, help="Restringe a un s de la tabla")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--save", action="store_true", help="Guarda la ejecución en la base de datos")

    p = subparsers.add_parser("derive-n2", parents=[common], help="Polinomio de sigma-grado n-2 desde (a_0, a_{n-3})")
    p.add_argument("--field", required=True, help="Cuerpo p^e^n[/módulo]")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--a0", type=int, required=True)
    p.add_argument("--an3", type=int, required=True)

    p = subparsers.add_parser("mrd-verify", parents=[common], help="Verifica el código de Gabidulin G_{k,s}")
    p.add_argument("--field", required=True, help="Cuerpo p^e^n[/módulo]")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--save", action="store_true", help="Guarda la ejecución en la base de datos")

    p = subparsers.add_parser("transfer-check", parents=[common], help="Compara q^s y q^t sobre F_{q^{nm}}")
    p.add_argument("--field", required=True, help="Cuerpo ambiente F_{q^{nm}}")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--coeffs", help="a_0,...,a_{k-1} en F_{q^m}")
    p.add_argument("--k", type=int, help="Recorre todos los a_0..a_{k-1} en F_{q^m}")

    p = subparsers.add_parser("history", parents=[common], help="Mostrar/Exportar histórico de ejecuciones")
    p.add_argument(
        "-n",
        "--limit",
        type=int,
        default=10,
        help="Número de ejecuciones recientes a imprimir (default 10)",
    )
    p.add_argument(
        "--export",
        dest="export_path",
        help="Exporta todos los testigos a CSV o Parquet (según extensión)",
    )

    return parser


_HANDLERS = {
    "field-info": run_field_info,
    "eval": run_eval,
    "kernel": run_kernel,
    "check-max": run_check_max,
    "splitting-field": run_splitting_field,
    "adjoint": run_adjoint,
    "annihilator": run_annihilator,
    "enumerate": run_enumerate,
    "verify-table": run_verify_table,
    "derive-n2": run_derive_n2,
    "mrd-verify": run_mrd_verify,
    "transfer-check": run_transfer_check,
}


def _report_error(exc: MaxkerError, fmt: str, stdout: TextIO) -> None:
    if fmt == "json":
        print(ErrorResult(error=exc.code, detail=exc.detail).model_dump_json(), file=stdout)
    logger.error("%s: %s", exc.code, exc.detail)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.debug else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    fmt = getattr(args, "format", "text")

    try:
        settings = load_settings(budget=args.budget, order_cap=args.order_cap, db_url=args.db_url)
        if args.command == "history":
            return run_history(limit=args.limit, export_path=args.export_path, db_url=settings.db_url, stdout=sys.stdout)
        handler = _HANDLERS.get(args.command)
        if handler is None:
            parser.print_help()
            return 2
        return handler(args, settings, sys.stdout)
    except USAGE_ERRORS as exc:
        _report_error(exc, fmt, sys.stdout)
        return 2
    except MaxkerError as exc:
        _report_error(exc, fmt, sys.stdout)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
