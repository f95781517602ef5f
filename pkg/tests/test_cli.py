import json
import sys
from pathlib import Path

# Ensure project root is importable
ROOT = Path(__file__).resolve().parents[1]
CORE_DIR = ROOT / "packages" / "core"
if str(ROOT) not in sys.path:
    # Add repo root so apps.cli.main can be imported as a module
    sys.path.insert(0, str(ROOT))
if str(CORE_DIR) not in sys.path:
    sys.path.insert(0, str(CORE_DIR))

from apps.cli.main import main  # noqa: E402
from codec import parse_field, parse_poly  # noqa: E402


def run_json(capsys, argv):
    rc = main(argv + ["--format", "json"])
    out = capsys.readouterr().out
    return rc, json.loads(out)


def test_check_max_binomial(capsys):
    rc, data = run_json(capsys, ["check-max", "--field", "2^1^4/19", "--poly", "s=1;a=[1,0,1]", "--method", "matrix"])
    assert rc == 0
    assert data["max_kernel"] is True
    assert data["B_is_identity"] is True
    assert data["kernel_dim"] == 2


def test_check_max_non_monic_binomial(capsys):
    # 15 = alpha^12 con alpha^4 = alpha + 1; x + alpha^12 x^{q^2} tiene 4 raíces
    rc, data = run_json(capsys, ["check-max", "--field", "2^1^4/19", "--poly", "s=1;a=[1,0,15]"])
    assert rc == 0
    assert data["max_kernel"] is True
    assert data["kernel_dim"] == 2


def test_check_max_all_methods(capsys):
    rc, data = run_json(capsys, ["check-max", "--field", "2^1^4", "--poly", "s=1;a=[2,1]", "--method", "all"])
    assert rc == 0
    assert data["method"] == "all"


def test_kernel_of_trace_polynomial(capsys):
    rc, data = run_json(capsys, ["kernel", "--field", "2^1^4/19", "--poly", "s=1;a=[1,1,1,1]"])
    assert rc == 0
    assert data["kernel_dim"] == 3
    assert len(data["basis"]) == 3
    assert data["max_kernel"] is True


def test_eval_at_zero(capsys):
    rc, data = run_json(capsys, ["eval", "--field", "3^1^3", "--poly", "s=1;a=[2,5,1]", "--z", "0"])
    assert rc == 0
    assert data["value"] == 0


def test_printed_polynomials_round_trip(capsys):
    rc, data = run_json(capsys, ["adjoint", "--field", "2^1^6", "--poly", "s=1;a=[3,0,7,1]"])
    assert rc == 0
    ctx = parse_field("2^1^6")
    assert str(parse_poly(ctx, data["poly"])) == data["poly"]


def test_annihilator_command(capsys):
    rc, data = run_json(capsys, ["annihilator", "--field", "2^1^4", "--basis", "1,2"])
    assert rc == 0
    assert data["degree"] == 2 and data["kernel_dim"] == 2


def test_enumerate_is_deterministic(capsys):
    argv = ["enumerate", "--field", "2^1^4", "--k", "2"]
    rc1, first = run_json(capsys, argv)
    rc2, second = run_json(capsys, argv)
    assert rc1 == rc2 == 0
    assert first == second
    assert first["count"] == first["gaussian_binomial"] == 35
    assert len(first["witnesses"]) == 35


def test_random_poly_uses_seed(capsys):
    argv = ["check-max", "--field", "2^1^5", "--random", "2", "--seed", "4"]
    _, first = run_json(capsys, argv)
    _, second = run_json(capsys, argv)
    assert first["poly"] == second["poly"]


def test_splitting_field_desk_instance(capsys):
    ctx = parse_field("3^1^2")
    g = int(ctx.GF.primitive_element)
    rc, data = run_json(capsys, ["splitting-field", "--field", ctx.spec, "--poly", f"s=1;a=[{g},2]"])
    assert rc == 0
    assert data["splitting_degree"] == 2
    assert data["roots_in_extension"] == 3
    assert data["roots_in_base"] == 1


def test_derive_n2_command(capsys):
    rc, data = run_json(capsys, ["derive-n2", "--field", "2^1^4", "--a0", "1", "--an3", "0"])
    assert rc == 0
    assert data["closing"] is True and data["max_kernel"] is True


def test_verify_table_one(capsys):
    rc, data = run_json(capsys, ["verify-table", "--table", "1", "--q", "2"])
    assert rc == 0
    assert data["passed"] is True
    assert len(data["rows"]) == 4


def test_mrd_verify_command(capsys):
    rc, data = run_json(capsys, ["mrd-verify", "--field", "2^1^4", "--k", "2", "--s", "1"])
    assert rc == 0
    assert data["is_mrd"] is True and data["min_rank"] == 3
    assert data["degree_bound_holds"] is True


def test_transfer_check_sweep(capsys):
    rc, data = run_json(capsys, ["transfer-check", "--field", "2^1^6", "--m", "2", "--s", "1", "--t", "5", "--k", "2"])
    assert rc == 0
    assert data["checked"] == 16 and data["agree"] is True


def test_bad_field_spec_exits_2_with_error_json(capsys):
    rc, data = run_json(capsys, ["field-info", "--field", "4^1^2"])
    assert rc == 2
    assert data["error"] == "bad-field-spec"


def test_bad_poly_spec_exits_2(capsys):
    rc, data = run_json(capsys, ["kernel", "--field", "2^1^4", "--poly", "s=1;a=[99]"])
    assert rc == 2
    assert data["error"] == "bad-poly-spec"


def test_budget_exceeded_exits_1(capsys):
    rc, data = run_json(capsys, ["enumerate", "--field", "2^1^6", "--k", "3", "--budget", "100"])
    assert rc == 1
    assert data["error"] == "budget-exceeded"


def test_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("MAXKER_BUDGET", "100")
    rc, data = run_json(capsys, ["enumerate", "--field", "2^1^6", "--k", "3"])
    assert rc == 1
    assert data["error"] == "budget-exceeded"


def test_usage_error_exits_2(capsys):
    assert main(["check-max", "--poly", "s=1;a=[1]"]) == 2
    assert main(["no-such-command"]) == 2


def test_domain_error_logged_in_text_mode(capsys, caplog):
    caplog.clear()
    rc = main(["check-max", "--field", "2^1^4", "--poly", "s=1;a=[0]"])
    assert rc == 1
    assert any("precondition" in rec.message for rec in caplog.records)


def test_field_info_text(capsys):
    rc = main(["field-info", "--field", "2^1^4"])
    assert rc == 0
    assert "2^1^4/19" in capsys.readouterr().out


def test_mrd_verify_over_budget_reports_budget_code(capsys):
    rc, data = run_json(capsys, ["mrd-verify", "--field", "2^1^4", "--k", "3", "--budget", "10"])
    assert rc == 1
    assert data["error"] == "budget-exceeded"


def test_transfer_sweep_over_budget_reports_budget_code(capsys):
    rc, data = run_json(capsys, ["transfer-check", "--field", "2^1^6", "--m", "2", "--s", "1", "--t", "5", "--k", "2", "--budget", "3"])
    assert rc == 1
    assert data["error"] == "budget-exceeded"


def test_splitting_field_without_count(capsys):
    ctx = parse_field("3^1^2")
    g = int(ctx.GF.primitive_element)
    rc, data = run_json(capsys, ["splitting-field", "--field", ctx.spec, "--poly", f"s=1;a=[{g},2]", "--no-count"])
    assert rc == 0
    assert data["splitting_degree"] == 2
    assert data["roots_in_extension"] is None
    assert data["extension_field"] is None
