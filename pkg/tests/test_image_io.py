import cv2
import numpy as np
import pytest

from imagecore.image_io import CorruptImageError, UnsupportedFormatError, load_image, save_image, to_bytes
from imagecore.image_types import RgbImage


def write_png(path, rgb: np.ndarray) -> None:
    assert cv2.imwrite(str(path), np.ascontiguousarray(rgb[..., ::-1]))


class TestLoadImage:

    def test_white_png(self, tmp_path) -> None:
        path = tmp_path / "white.png"
        write_png(path, np.full((1, 1, 3), 255, dtype=np.uint8))
        img = load_image(str(path))
        assert img.shape == (1, 1)
        np.testing.assert_array_equal(img.stack(), np.ones((1, 1, 3)))

    def test_black_png(self, tmp_path) -> None:
        path = tmp_path / "black.png"
        write_png(path, np.zeros((1, 1, 3), dtype=np.uint8))
        np.testing.assert_array_equal(load_image(str(path)).stack(), np.zeros((1, 1, 3)))

    def test_png_channel_order(self, tmp_path) -> None:
        path = tmp_path / "red.png"
        write_png(path, np.array([[[255, 0, 51]]], dtype=np.uint8))
        img = load_image(str(path))
        assert (img.r[0, 0], img.g[0, 0], img.b[0, 0]) == (1.0, 0.0, 0.2)

    def test_sixteen_bit_png(self, tmp_path) -> None:
        path = tmp_path / "deep.png"
        write_png(path, np.array([[[65535, 0, 32768]]], dtype=np.uint16))
        img = load_image(str(path))
        assert img.b[0, 0] == pytest.approx(32768 / 65535)

    def test_gray_png_is_expanded(self, tmp_path) -> None:
        path = tmp_path / "gray.png"
        assert cv2.imwrite(str(path), np.array([[0, 102]], dtype=np.uint8))
        img = load_image(str(path))
        np.testing.assert_array_equal(img.r, img.b)
        assert img.g[0, 1] == pytest.approx(0.4)

    def test_ppm_fixture(self, tmp_path) -> None:
        samples = [0, 51, 102, 153, 204, 255, 1, 2, 3, 254, 128, 64]
        path = tmp_path / "fixture.ppm"
        path.write_bytes(b"P6\n2 2\n255\n" + bytes(samples))
        img = load_image(str(path))
        expected = np.array(samples, dtype=np.float64).reshape(2, 2, 3) / 255.0
        np.testing.assert_array_equal(img.stack(), expected)

    def test_ppm_header_comments(self, tmp_path) -> None:
        path = tmp_path / "commented.ppm"
        path.write_bytes(b"P6\n# written by hand\n2 1\n# maxval next\n255\n" + bytes([10, 20, 30, 40, 50, 60]))
        img = load_image(str(path))
        assert img.shape == (1, 2)
        assert img.b[0, 1] == pytest.approx(60 / 255)

    def test_sixteen_bit_ppm(self, tmp_path) -> None:
        path = tmp_path / "deep.ppm"
        path.write_bytes(b"P6 1 1 1023\n" + np.array([1023, 0, 512], dtype=">u2").tobytes())
        img = load_image(str(path))
        np.testing.assert_allclose(img.stack()[0, 0], [1.0, 0.0, 512 / 1023])

    def test_missing_file(self, tmp_path) -> None:
        with pytest.raises(FileNotFoundError):
            load_image(str(tmp_path / "nope.png"))

    def test_unsupported_format(self, tmp_path) -> None:
        path = tmp_path / "image.gif"
        path.write_bytes(b"GIF89a" + bytes(16))
        with pytest.raises(UnsupportedFormatError):
            load_image(str(path))

    def test_ascii_ppm_is_unsupported(self, tmp_path) -> None:
        path = tmp_path / "ascii.ppm"
        path.write_bytes(b"P3\n1 1\n255\n0 0 0\n")
        with pytest.raises(UnsupportedFormatError):
            load_image(str(path))

    def test_truncated_ppm(self, tmp_path) -> None:
        path = tmp_path / "short.ppm"
        path.write_bytes(b"P6\n2 2\n255\n" + bytes(5))
        with pytest.raises(CorruptImageError, match="Truncated"):
            load_image(str(path))

    @pytest.mark.parametrize("header", [b"P6\n2\n", b"P6\n0 2\n255\n", b"P6\n2 2\n70000\n", b"P6\nx y\n"])
    def test_corrupt_ppm_header(self, tmp_path, header) -> None:
        path = tmp_path / "corrupt.ppm"
        path.write_bytes(header + bytes(12))
        with pytest.raises(CorruptImageError):
            load_image(str(path))

    def test_corrupt_png(self, tmp_path) -> None:
        path = tmp_path / "corrupt.png"
        path.write_bytes(b"\x89PNG\r\n\x1a\n" + b"garbage" * 4)
        with pytest.raises(CorruptImageError):
            load_image(str(path))


class TestSaveImage:

    def test_half_is_stored_as_128(self) -> None:
        img = RgbImage.from_array(np.full((1, 1, 3), 0.5))
        assert to_bytes(img)[0, 0, 0] == 128

    def test_round_trip_within_half_a_level(self, tmp_path, rng) -> None:
        img = RgbImage.from_array(rng.random((9, 7, 3)))
        path = tmp_path / "round.png"
        save_image(img, str(path))
        back = load_image(str(path))
        assert back.shape == (9, 7)
        assert np.max(np.abs(back.stack() - img.stack())) <= 1.0 / 510.0 + 1e-12

    def test_written_file_is_png(self, tmp_path) -> None:
        path = tmp_path / "out.png"
        save_image(RgbImage.from_gray(np.zeros((2, 2))), str(path))
        assert path.read_bytes().startswith(b"\x89PNG")

    def test_unwritable_destination(self, tmp_path) -> None:
        with pytest.raises(OSError):
            save_image(RgbImage.from_gray(np.zeros((2, 2))), str(tmp_path / "missing" / "out.png"))
