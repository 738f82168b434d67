import itertools
import random

import pytest

from mscr.code import (
    ROLE_A,
    ROLE_B,
    ROLE_R,
    CodeParams,
    DeviceBlock,
    build_code,
    change_of_variables,
    decode,
    encode,
    generator_table,
    systematic_view,
)
from mscr.errors import FieldUnsuitable, ParameterError
from mscr.field import FieldSpec
from mscr.linalg import Matrix, mat_rank

from conftest import blocks_of
from oracle import RefField, cramer_solve_2x2, encode_ref


def test_params_derived_quantities():
    p = CodeParams(5, 3)
    assert (p.alpha, p.M, p.redundancy_count) == (3, 6, 3)
    assert CodeParams.for_helpers(5) == CodeParams(7, 5)


@pytest.mark.parametrize("kw", [dict(n=5, d=3, k=3), dict(n=4, d=3), dict(n=5, d=2), dict(n=6, d=3, t=3), dict(n=6, d=3)])
def test_params_rejected(kw):
    with pytest.raises(ParameterError):
        CodeParams(**kw)


def test_generator_table_gf7(code7):
    assert code7.device(0).coeffs == ((1, 0),) * 3
    assert code7.device(1).coeffs == ((0, 1),) * 3
    # redundancy 0: omega^j for j = 0, 1, 2 with omega = 3
    assert code7.device(2).coeffs == ((1, 1), (1, 3), (1, 2))
    assert [d.role for d in code7.devices] == [ROLE_A, ROLE_B, ROLE_R, ROLE_R, ROLE_R]


def test_encode_examples(code7):
    assert all(b.symbols == (0, 0, 0) for b in encode(code7, [0] * 6))
    assert encode(code7, [1, 0, 0, 0, 0, 0])[2].symbols == (1, 0, 0)
    assert encode(code7, [1, 2, 3, 4, 5, 6])[2].symbols == (5, 3, 1)


def test_encode_matches_reference(code7, code256):
    rng = random.Random(3)
    for code, ref in [(code7, RefField(7)), (code256, RefField(256, 0x11D))]:
        for _ in range(20):
            data = [rng.randrange(code.field.order) for _ in range(6)]
            expect = encode_ref(ref, code.field.omega, 5, 3, data)
            assert [list(b.symbols) for b in encode(code, data)] == expect


def test_encode_length_checked(code7):
    with pytest.raises(ValueError):
        encode(code7, [1, 2, 3])


def test_decode_systematic_passthrough(code7, data7):
    bl = encode(code7, data7)
    assert decode(code7, [bl[0], bl[1]]) == data7


def test_decode_redundancy_pair(code7, data7):
    bl = encode(code7, data7)
    assert decode(code7, [bl[2], bl[3]]) == [1, 2, 3, 4, 5, 6]


def test_decode_all_pairs_agree_with_cramer(code7):
    ref = RefField(7)
    rng = random.Random(5)
    for _ in range(10):
        data = [rng.randrange(7) for _ in range(6)]
        bl = encode(code7, data)
        for i, j in itertools.combinations(range(5), 2):
            assert decode(code7, [bl[i], bl[j]]) == data
            assert decode(code7, [bl[j], bl[i]]) == data
            # independent per-coordinate solve
            for c in range(3):
                m = (code7.device(i).coeffs[c], code7.device(j).coeffs[c])
                a_c, b_c = cramer_solve_2x2(ref, m, (bl[i].symbols[c], bl[j].symbols[c]))
                assert (a_c, b_c) == (data[c], data[3 + c])


def test_decode_errors(code7, data7):
    bl = encode(code7, data7)
    with pytest.raises(ValueError):
        decode(code7, [bl[2], bl[2]])
    with pytest.raises(ValueError):
        decode(code7, [bl[0], DeviceBlock(1, (1, 2))])
    with pytest.raises(ValueError):
        decode(code7, [bl[0]])


def test_change_of_variables_identity_for_systematic_pair(code7):
    eq = change_of_variables(code7, (0, 1))
    for m in range(5):
        assert eq.coeffs[m] == code7.device(m).coeffs


def test_change_of_variables_devices_1_2(code7):
    # one systematic and one redundancy device become the a', b' pair
    eq = change_of_variables(code7, (1, 2))
    assert eq.coeffs[1] == ((1, 0),) * 3
    assert eq.coeffs[2] == ((0, 1),) * 3


def test_change_of_variables_reencodes_all_pairs(code7):
    rng = random.Random(7)
    data = [rng.randrange(7) for _ in range(6)]
    blocks = blocks_of(code7, data)
    for f1, f2 in itertools.permutations(range(5), 2):
        eq = change_of_variables(code7, (f1, f2))
        a_new, b_new = blocks[f1], blocks[f2]
        for m in range(5):
            assert eq.reencode(m, a_new, b_new) == blocks[m]
            assert eq.original_coeffs(m) == code7.device(m).coeffs


def test_systematic_view(code7):
    view = systematic_view(code7)
    eye = Matrix.identity(code7.field, 3)
    assert view[0] == (eye, Matrix.zeros(code7.field, 3, 3))
    assert view[2] == (eye, Matrix.diag(code7.field, [1, 3, 2]))
    for m in range(2, 5):
        assert mat_rank(view[m][1]) == 3


@pytest.mark.parametrize(
    "field,n,d",
    [
        (FieldSpec.default(), 5, 3),
        (FieldSpec.default(), 7, 5),
        (FieldSpec.default(), 6, 4),
        (FieldSpec.prime(7, 3), 7, 5),
        (FieldSpec.prime(7, 3), 6, 4),
        (FieldSpec.prime(5), 5, 3),
        (FieldSpec.binary(3), 5, 3),
    ],
    ids=str,
)
def test_build_code_validates(field, n, d):
    code = build_code(CodeParams(n, d), field)
    assert code.validated == "exhaustive"


def test_field_too_small_is_reported():
    with pytest.raises(FieldUnsuitable) as info:
        build_code(CodeParams(5, 3), FieldSpec.binary(2))
    assert len(info.value.failure) >= 1


def test_field_too_small_for_mds():
    # GF(3) has only 4 projective points per coordinate, fewer than n = 5 devices
    with pytest.raises(FieldUnsuitable):
        build_code(CodeParams(5, 3), FieldSpec.prime(3), validate="none")


def test_generator_table_shapes():
    devs = generator_table(CodeParams(7, 5), FieldSpec.default())
    assert len(devs) == 7 and all(len(d.coeffs) == 5 for d in devs)
    assert all(w != 0 for d in devs[2:] for _, w in d.coeffs)
