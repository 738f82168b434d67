import pytest
from hypothesis import given, strategies as st

from mscr.errors import FieldError, ZeroInverseError
from mscr.field import FieldElement, FieldSpec, field_add, field_inv, field_mul, field_pow, is_irreducible_gf2

from oracle import RefField

SMALL_FIELDS = [
    FieldSpec.prime(2),
    FieldSpec.prime(3),
    FieldSpec.prime(5),
    FieldSpec.prime(7),
    FieldSpec.prime(11),
    FieldSpec.prime(13),
    FieldSpec.binary(1),
    FieldSpec.binary(2),
    FieldSpec.binary(3),
    FieldSpec.binary(4),
]


def ref_for(f):
    return RefField(f.order, f.poly if f.kind == "binary" else None)


@pytest.mark.parametrize("f", SMALL_FIELDS, ids=str)
def test_tables_match_reference_arithmetic(f):
    ref = ref_for(f)
    for x in range(f.order):
        for y in range(f.order):
            assert f.add(x, y) == ref.add(x, y)
            assert f.mul(x, y) == ref.mul(x, y)
            assert f.sub(x, y) == ref.sub(x, y)
        if x:
            assert f.inv(x) == ref.inv(x)


@pytest.mark.parametrize("f", SMALL_FIELDS, ids=str)
def test_field_axioms_exhaustive(f):
    els = range(f.order)
    for x in els:
        assert f.add(x, 0) == x
        assert f.mul(x, 1) == x
        assert f.add(x, f.neg(x)) == 0
        if x:
            assert f.mul(x, f.inv(x)) == 1
        for y in els:
            assert f.add(x, y) == f.add(y, x)
            assert f.mul(x, y) == f.mul(y, x)
            for z in els:
                assert f.mul(x, f.add(y, z)) == f.add(f.mul(x, y), f.mul(x, z))


def test_gf256_against_reference():
    f = FieldSpec.default()
    ref = RefField(256, 0x11D)
    for x in range(0, 256, 7):
        for y in range(256):
            assert f.mul(x, y) == ref.mul(x, y)
    assert f.omega == 2
    seen = {f.omega_pow(e) for e in range(255)}
    assert len(seen) == 255


def test_gf7_examples():
    f = FieldSpec.prime(7, 3)
    assert f.add(3, 5) == 1
    assert f.pow(3, 2) == 2
    assert f.inv(3) == 5
    for x in range(7):
        assert f.add(x, 0) == x


def test_char2_self_sum():
    f = FieldSpec.default()
    for x in range(256):
        assert f.add(x, x) == 0


def test_pow_zero_exponent_and_negative():
    for f in SMALL_FIELDS:
        for x in range(1, f.order):
            assert f.pow(x, 0) == 1
            assert f.pow(x, -1) == f.inv(x)
            assert f.mul(f.pow(x, -3), f.pow(x, 3)) == 1


def test_pow_exponent_mod_order():
    f = FieldSpec.prime(13)
    for x in range(1, 13):
        assert f.pow(x, 5) == f.pow(x, 5 + 12)


def test_inverse_of_zero_raises():
    f = FieldSpec.prime(7)
    with pytest.raises(ZeroInverseError):
        f.inv(0)
    with pytest.raises(ZeroDivisionError):
        f.div(3, 0)


def test_element_wrappers_and_mixed_fields():
    f7, f5 = FieldSpec.prime(7, 3), FieldSpec.prime(5)
    x, y = FieldElement(f7, 3), FieldElement(f7, 5)
    assert field_add(x, y) == FieldElement(f7, 1)
    assert field_mul(x, y) == FieldElement(f7, 1)
    assert field_inv(x) == FieldElement(f7, 5)
    assert field_pow(x, 2) == FieldElement(f7, 2)
    with pytest.raises(FieldError):
        field_add(x, FieldElement(f5, 1))


@pytest.mark.parametrize(
    "text,order,kind",
    [("7", 7, "prime"), ("gf7", 7, "prime"), ("GF(2^8)", 256, "binary"), ("256", 256, "binary"), ("2^4:0x13", 16, "binary")],
)
def test_parse(text, order, kind):
    f = FieldSpec.parse(text)
    assert (f.order, f.kind) == (order, kind)


def test_rejects_bad_fields():
    with pytest.raises(FieldError):
        FieldSpec.prime(9)
    with pytest.raises(FieldError):
        FieldSpec.binary(4, 0x11)  # x^4 + 1 is reducible
    with pytest.raises(FieldError):
        FieldSpec.prime(7, 2)  # 2 has order 3 mod 7
    with pytest.raises(FieldError):
        FieldSpec.parse("6")


def test_irreducibility_check():
    assert is_irreducible_gf2(0x11D)
    assert is_irreducible_gf2(0x13)
    assert not is_irreducible_gf2(0x11)


def test_dict_round_trip():
    for f in SMALL_FIELDS + [FieldSpec.default()]:
        assert FieldSpec.from_dict(f.to_dict()) == f


@given(st.integers(1, 255), st.integers(1, 255), st.integers(-600, 600))
def test_gf256_exponent_laws(x, y, e):
    f = FieldSpec.default()
    assert f.pow(f.mul(x, y), e) == f.mul(f.pow(x, e), f.pow(y, e))
    assert f.div(f.mul(x, y), y) == x
