import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from apps.table_detection.exceptions import (
    CorruptImageException,
    ImageNotFoundException,
    OutOfBoundsException,
    UnsupportedFormatException,
)
from apps.table_detection.raster import (
    BinaryImage,
    GrayImage,
    Rect,
    TableCategory,
    crop,
    load_binary,
    load_gray,
    luminance,
    render_overlay,
    save_binary,
    save_gray,
)


class RasterIOTest(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def test_load_plain_graymap(self):
        path = self.tmp / "tiny.pgm"
        path.write_bytes(b"P2\n2 1\n255\n0 255\n")
        image = load_gray(path)
        self.assertEqual((image.width, image.height), (2, 1))
        self.assertEqual(image.values(), [0, 255])

    def test_load_raw_graymap(self):
        path = self.tmp / "raw.pgm"
        path.write_bytes(b"P5\n3 2\n255\n" + bytes([0, 10, 20, 30, 40, 255]))
        self.assertEqual(load_gray(path).values(), [0, 10, 20, 30, 40, 255])

    def test_color_pixel_uses_rounded_luminance(self):
        path = self.tmp / "color.ppm"
        path.write_bytes(b"P3\n2 1\n255\n100 200 50 255 255 255\n")
        self.assertEqual(load_gray(path).values(), [153, 255])

    def test_luminance_formula(self):
        rgb = np.array([[[100, 200, 50], [255, 255, 255], [0, 0, 0]]], dtype=np.uint8)
        self.assertEqual(luminance(rgb).tolist(), [[153, 255, 0]])

    def test_missing_file(self):
        with self.assertRaises(ImageNotFoundException) as ctx:
            load_gray(self.tmp / "nada.pgm")
        self.assertIsInstance(ctx.exception, FileNotFoundError)
        self.assertTrue(str(ctx.exception).startswith("FileNotFound"))

    def test_unknown_signature_is_unsupported(self):
        path = self.tmp / "texto.pgm"
        path.write_text("isto não é uma imagem")
        with self.assertRaises(UnsupportedFormatException):
            load_gray(path)

    def test_truncated_pixels_are_corrupt(self):
        path = self.tmp / "curta.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(3))
        with self.assertRaises(CorruptImageException):
            load_gray(path)

    def test_gray_round_trip(self):
        rng = np.random.default_rng(3)
        image = GrayImage(rng.integers(0, 256, size=(17, 23), dtype=np.uint8))
        path = save_gray(image, self.tmp / "gray.pgm")
        self.assertTrue(path.read_bytes().startswith(b"P5"))
        self.assertEqual(load_gray(path), image)

    def test_binary_round_trip(self):
        rng = np.random.default_rng(5)
        image = BinaryImage(rng.integers(0, 2, size=(9, 13), dtype=np.uint8))
        path = save_binary(image, self.tmp / "bits.pbm")
        self.assertTrue(path.read_bytes().startswith(b"P4"))
        self.assertEqual(load_binary(path), image)

    def test_binary_reader_rejects_graymap(self):
        path = save_gray(GrayImage.blank(4, 4), self.tmp / "g.pgm")
        with self.assertRaises(UnsupportedFormatException):
            load_binary(path)


class ImageTypesTest(SimpleTestCase):
    def test_from_values_checks_pixel_count(self):
        with self.assertRaises(CorruptImageException):
            GrayImage.from_values(2, 2, [0, 1, 2])

    def test_binary_rejects_other_values(self):
        with self.assertRaises(ValueError):
            BinaryImage.from_rows([[0, 2]])

    def test_images_are_read_only(self):
        image = GrayImage.blank(3, 3)
        with self.assertRaises(ValueError):
            image.data[0, 0] = 0

    def test_rect_geometry(self):
        a = Rect(0, 0, 10, 10)
        b = Rect(5, 5, 10, 10)
        self.assertEqual(a.intersection_area(b), 25)
        self.assertEqual(a.union(b), Rect(0, 0, 15, 15))
        self.assertEqual(a.translate(dy=4), Rect(0, 4, 10, 10))
        self.assertTrue(a.fits(10, 10))
        self.assertFalse(b.fits(14, 20))

    def test_rect_rejects_empty(self):
        with self.assertRaises(ValueError):
            Rect(0, 0, 0, 3)


class CropTest(SimpleTestCase):
    def test_full_rect_is_identity(self):
        image = BinaryImage.from_rows([[1, 0, 1], [0, 0, 1]])
        self.assertEqual(crop(image, Rect(0, 0, 3, 2)), image)

    def test_single_pixel(self):
        image = BinaryImage(np.ones((4, 4), dtype=np.uint8))
        self.assertEqual(crop(image, Rect(0, 0, 1, 1)).values(), [1])

    def test_checkerboard_window(self):
        board = BinaryImage.from_rows(
            [[1 if (x + y) % 2 == 0 else 0 for x in range(3)] for y in range(3)]
        )
        window = crop(board, Rect(1, 0, 2, 2))
        self.assertEqual((window.width, window.height), (2, 2))
        self.assertEqual(window.values(), [0, 1, 1, 0])

    def test_out_of_bounds(self):
        with self.assertRaises(OutOfBoundsException):
            crop(BinaryImage.blank(3, 3), Rect(2, 2, 2, 2))


class OverlayTest(SimpleTestCase):
    def setUp(self):
        self.gray = GrayImage(np.full((8, 10), 200, dtype=np.uint8))

    def test_no_regions_is_identity(self):
        self.assertEqual(render_overlay(self.gray, []), self.gray)

    def test_full_page_category_a_border(self):
        out = render_overlay(self.gray, [(Rect(0, 0, 10, 8), TableCategory.A)]).data
        edges = (out[0], out[1], out[-1], out[-2], out[:, 0], out[:, 1], out[:, -1], out[:, -2])
        for edge in edges:
            self.assertTrue((edge == 0).all())
        self.assertTrue((out[2:-2, 2:-2] == 200).all())

    def test_disjoint_regions_keep_interiors(self):
        regions = [
            (Rect(0, 0, 5, 8), TableCategory.B),
            (Rect(5, 0, 5, 8), TableCategory.C),
        ]
        out = render_overlay(self.gray, regions).data
        self.assertEqual(out[0, 0], 64)
        self.assertEqual(out[0, 9], 128)
        self.assertTrue((out[2:6, 2] == 200).all())
        self.assertTrue((out[2:6, 7] == 200).all())
        # A entrada não é alterada
        self.assertTrue((self.gray.data == 200).all())

    def test_overlay_out_of_bounds(self):
        with self.assertRaises(OutOfBoundsException):
            render_overlay(self.gray, [(Rect(5, 5, 6, 6), TableCategory.A)])
