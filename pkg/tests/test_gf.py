import sys
from pathlib import Path

import numpy as np
import pytest

# Ensure core package is importable without installation
ROOT = Path(__file__).resolve().parents[1]
CORE_DIR = ROOT / "packages" / "core"
if str(CORE_DIR) not in sys.path:
    sys.path.insert(0, str(CORE_DIR))

from codec import format_field, parse_field, parse_poly  # noqa: E402
from errors import FieldMismatchError, FieldSpecError, PolySpecError, PreconditionError  # noqa: E402
from gf import (  # noqa: E402
    decode,
    embed,
    encode,
    fq_coordinates,
    from_fq_coordinates,
    frobenius_q,
    in_subfield,
    make_field,
    norm_to,
    subfield_elements,
    trace_to,
)
from settings import DEFAULT_BUDGET, load_settings  # noqa: E402


def test_default_modulus_is_lexicographically_least():
    ctx = make_field(2, 1, 4)
    assert ctx.modulus == 19  # x^4 + x + 1
    assert ctx.spec == "2^1^4/19"
    assert ctx.order == 16 and ctx.q == 2


def test_field_spec_round_trip():
    ctx = parse_field("2^1^4/19")
    assert parse_field(format_field(ctx)) == ctx
    assert parse_field("3^1^2") == make_field(3, 1, 2)


@pytest.mark.parametrize(
    "text",
    ["", "2^4", "4^1^2", "2^1^4/17", "2^1^4/7", "x^1^4", "2^0^3"],
)
def test_bad_field_specs_raise(text):
    with pytest.raises(FieldSpecError):
        parse_field(text)


def test_non_monic_modulus_rejected():
    # 2x^2 + 1 sobre F_3
    with pytest.raises(FieldSpecError):
        make_field(3, 1, 2, [1, 0, 2])


def test_encode_decode_and_range():
    ctx = make_field(2, 1, 4)
    z = decode(ctx, 11)
    assert encode(ctx, z) == 11
    with pytest.raises(PreconditionError):
        decode(ctx, 16)


def test_frobenius_n_is_identity_and_norm_trace_in_base():
    ctx = make_field(2, 2, 3)
    z = ctx.elements()
    assert np.array_equal(frobenius_q(ctx, z, ctx.n), z)
    assert in_subfield(ctx, norm_to(ctx, z), 1)
    assert in_subfield(ctx, trace_to(ctx, z), 1)


def test_subfield_elements_count_and_membership():
    ctx = make_field(2, 1, 6)
    for m in (1, 2, 3, 6):
        sub = subfield_elements(ctx, m)
        assert sub.size == ctx.q**m
        assert in_subfield(ctx, sub, m)
    with pytest.raises(PreconditionError):
        subfield_elements(ctx, 4)


@pytest.mark.parametrize("p,e,n", [(2, 1, 4), (2, 2, 2), (3, 1, 3), (3, 2, 2)])
def test_fq_coordinates_round_trip(p, e, n):
    ctx = make_field(p, e, n)
    z = ctx.elements()
    coords = fq_coordinates(ctx, z)
    assert coords.shape == (ctx.order, n)
    assert in_subfield(ctx, coords, 1)
    assert np.array_equal(from_fq_coordinates(ctx, coords), z)


def test_embed_is_a_ring_homomorphism():
    small = make_field(2, 1, 2)
    big = make_field(2, 1, 4)
    a = small.elements()
    b = a[::-1]
    assert np.array_equal(embed(small, big, a + b), embed(small, big, a) + embed(small, big, b))
    assert np.array_equal(embed(small, big, a * b), embed(small, big, a) * embed(small, big, b))
    assert in_subfield(big, embed(small, big, a), 2)


def test_embed_rejects_incompatible_fields():
    with pytest.raises(FieldMismatchError):
        embed(make_field(2, 1, 3), make_field(2, 1, 4), make_field(2, 1, 3).one)


def test_parse_poly_and_errors():
    ctx = make_field(2, 1, 4)
    f = parse_poly(ctx, "s=1;a=[1,1,1,1]")
    assert f.degree == 3
    assert parse_poly(ctx, str(f)) == f
    for bad in ("s=1;a=[16]", "s=0;a=[1]", "s=1;a=[]", "a=[1]", "s=1;a=[x]"):
        with pytest.raises(PolySpecError):
            parse_poly(ctx, bad)
    with pytest.raises(PolySpecError):
        parse_poly(ctx, "s=2;a=[1,1]")  # gcd(2, 4) != 1


def test_parse_poly_accepts_zero_polynomial():
    ctx = make_field(2, 1, 4)
    f = parse_poly(ctx, "s=1;a=[0]")
    assert f.is_zero and f.degree == -1


def test_load_settings_reads_environment():
    settings = load_settings({"MAXKER_BUDGET": "1024", "MAXKER_DB_URL": "sqlite:///x.db"})
    assert settings.budget == 1024
    assert settings.db_url == "sqlite:///x.db"
    assert load_settings({}).budget == DEFAULT_BUDGET
    assert load_settings({"MAXKER_BUDGET": "5"}, budget=7).budget == 7


def test_load_settings_invalid_value_raises():
    with pytest.raises(PreconditionError):
        load_settings({"MAXKER_BUDGET": "cero"})
