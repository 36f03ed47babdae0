import numpy as np
import pytest

from minlift.imaging import (
    GRAD_NORM_SQ_BOUND,
    DenoiseParams,
    FormatError,
    add_gaussian_noise,
    build_denoise_problem,
    dense_gradient_matrix,
    discrete_gradient_adjoint,
    discrete_gradient_apply,
    gradient_map,
    load_pgm,
    phantom,
    save_pgm,
    solve_identity_plus_DtD,
)
from minlift.operators import UsageError


def test_gradient_2x2_example():
    # image [[a, b], [c, d]]: horizontal (b-a, 0, d-c, 0), vertical (c-a, d-b, 0, 0)
    u = np.array([1.0, 2.0, 3.0, 5.0])  # a, b, c, d
    got = discrete_gradient_apply(u)
    assert np.allclose(got, [1.0, 0.0, 2.0, 0.0, 2.0, 3.0, 0.0, 0.0])


def test_gradient_constant_image_is_zero():
    assert np.allclose(discrete_gradient_apply(np.full(9, 0.7)), 0.0)


def test_gradient_rejects_non_square_length():
    with pytest.raises(UsageError):
        discrete_gradient_apply(np.ones(5))
    with pytest.raises(UsageError):
        discrete_gradient_adjoint(np.ones(9))


def test_adjoint_identity_exact():
    rng = np.random.default_rng(0)
    for M in (2, 3, 5):
        u = rng.standard_normal(M * M)
        y = rng.standard_normal(2 * M * M)
        lhs = float(discrete_gradient_apply(u) @ y)
        rhs = float(u @ discrete_gradient_adjoint(y))
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


def test_matrix_free_matches_dense():
    rng = np.random.default_rng(1)
    for M in (2, 3, 4):
        D = dense_gradient_matrix(M)
        u = rng.standard_normal(M * M)
        y = rng.standard_normal(2 * M * M)
        assert np.allclose(discrete_gradient_apply(u), D @ u, atol=1e-12)
        assert np.allclose(discrete_gradient_adjoint(y), D.T @ y, atol=1e-12)


def test_gradient_norm_bound():
    for M in (2, 4, 8, 16):
        D = gradient_map(M)
        assert D.operator_norm() ** 2 <= GRAD_NORM_SQ_BOUND + 1e-9
    # the bound is asymptotically tight
    assert gradient_map(32).operator_norm() ** 2 > 7.5


def test_solve_identity_plus_DtD():
    rng = np.random.default_rng(2)
    for M in (2, 4):
        m = M * M
        A = np.eye(m) + dense_gradient_matrix(M).T @ dense_gradient_matrix(M)
        rhs = rng.standard_normal(m)
        assert np.allclose(solve_identity_plus_DtD(rhs), np.linalg.solve(A, rhs),
                           atol=1e-9)


def test_add_gaussian_noise_deterministic_and_clipped():
    img = phantom(16)
    n1 = add_gaussian_noise(img, 0.05, seed=3)
    n2 = add_gaussian_noise(img, 0.05, seed=3)
    assert np.array_equal(n1, n2)
    assert not np.array_equal(n1, add_gaussian_noise(img, 0.05, seed=4))
    assert n1.min() >= 0.0 and n1.max() <= 1.0
    assert np.array_equal(add_gaussian_noise(img, 0.0, seed=3), img)
    big = add_gaussian_noise(np.full((64, 64), 0.5), 0.05, seed=0)
    assert abs(np.std(big - 0.5) - 0.05) < 0.005  # no clipping at sigma=0.05 mid-gray
    with pytest.raises(UsageError):
        add_gaussian_noise(img, -0.1, seed=0)


def test_pgm_roundtrip(tmp_path):
    img = phantom(12)
    for binary in (True, False):
        path = tmp_path / ("img_p5.pgm" if binary else "img_p2.pgm")
        save_pgm(img, path, binary=binary)
        back = load_pgm(path)
        assert back.shape == img.shape
        # quantization to 255 levels bounds the roundtrip error by half a level
        assert np.max(np.abs(back - img)) <= 0.5 / 255.0 + 1e-12


def test_pgm_quantization_round_half_up(tmp_path):
    img = np.full((2, 2), 0.5)  # 127.5 rounds up to 128
    path = tmp_path / "half.pgm"
    save_pgm(img, path)
    assert np.allclose(load_pgm(path) * 255.0, 128.0)


def test_pgm_comments_and_whitespace(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P2\n# a comment\n2 2 # inline\n255\n0 64\n128 255\n")
    img = load_pgm(path)
    assert np.allclose(img * 255.0, [[0, 64], [128, 255]])


def test_pgm_malformed(tmp_path):
    cases = {
        "magic.pgm": b"P6\n2 2\n255\n\x00\x00\x00\x00",
        "nonsquare.pgm": b"P2\n2 3\n255\n0 0 0 0 0 0\n",
        "maxval.pgm": b"P2\n2 2\n65535\n0 0 0 0\n",
        "trunc.pgm": b"P5\n2 2\n255\n\x00\x00",
        "range.pgm": b"P2\n2 2\n255\n0 0 0 999\n",
        "alpha.pgm": b"P2\n2 x\n255\n0 0 0 0\n",
    }
    for name, payload in cases.items():
        p = tmp_path / name
        p.write_bytes(payload)
        with pytest.raises(FormatError):
            load_pgm(p)


def test_save_pgm_rejects_non_square():
    with pytest.raises(UsageError):
        save_pgm(np.zeros((2, 3)), "/dev/null")


def test_phantom_properties():
    img = phantom(64)
    assert img.shape == (64, 64)
    assert img.min() >= 0.0 and img.max() <= 1.0
    assert img[0, 0] == 0.0  # corners outside the head
    assert img[32, 32] > 0.0  # interior is lit
    # deterministic
    assert np.array_equal(img, phantom(64))


def test_denoise_params_validation():
    DenoiseParams()  # defaults are valid
    with pytest.raises(UsageError):
        DenoiseParams(lambda2=-1.0)
    with pytest.raises(UsageError):
        DenoiseParams(gamma=1.5)
    with pytest.raises(UsageError):
        DenoiseParams(max_iter=0)


def test_build_denoise_problem_structure():
    noisy = add_gaussian_noise(phantom(8), 0.05, seed=0)
    prob = build_denoise_problem(noisy, DenoiseParams())
    assert prob.n == 3
    assert prob.d1 == 64 and prob.d2 == 128
    assert np.isclose(prob.norm_C(), np.sqrt(8.0))
    assert prob.strong_modulus() == DenoiseParams().lambda1  # min(l1, 1/l4)
    tags = [s.tag for s in prob.f_specs] + [s.tag for s in prob.g_specs]
    assert tags == ["quadratic-shift", "scaled-square", "iso-plus-square", "scaled-square"]
    with pytest.raises(UsageError):
        build_denoise_problem(np.zeros((2, 3)), DenoiseParams())
