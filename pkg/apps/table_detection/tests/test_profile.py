import numpy as np
from django.test import SimpleTestCase

from apps.table_detection.exceptions import EmptyBandException
from apps.table_detection.profile import (
    Gap,
    ProfileConfig,
    analyze_gaps,
    build_page,
    horizontal_projection,
    runs,
    segment_lines,
    vertical_projection,
)
from apps.table_detection.raster import BinaryImage

from .factories import binary_with_blocks


class RunsTest(SimpleTestCase):
    def test_runs(self):
        self.assertEqual(runs([0, 1, 1, 0, 1]), [(1, 2), (4, 4)])
        self.assertEqual(runs([1, 1, 1]), [(0, 2)])
        self.assertEqual(runs([]), [])
        self.assertEqual(runs([0, 0]), [])


class SegmentLinesTest(SimpleTestCase):
    def test_close_bands_merge(self):
        profile = [0, 3, 3, 0, 0, 0, 2, 0, 1, 0]
        self.assertEqual(segment_lines(profile, ProfileConfig()), [(1, 2), (6, 8)])

    def test_noise_floor(self):
        cfg = ProfileConfig(row_noise_floor=2)
        self.assertEqual(segment_lines([1, 5, 1, 0, 0, 0, 1], cfg), [(1, 1)])

    def test_noise_floor_zero_matches_one(self):
        profile = [0, 1, 0, 0, 4]
        self.assertEqual(
            segment_lines(profile, ProfileConfig(row_noise_floor=0)),
            segment_lines(profile, ProfileConfig(row_noise_floor=1)),
        )

    def test_empty_profile(self):
        self.assertEqual(segment_lines([0, 0, 0], ProfileConfig()), [])


class AnalyzeGapsTest(SimpleTestCase):
    def setUp(self):
        row = [0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 0]
        self.binary = BinaryImage.from_rows([row, row])

    def test_gaps_between_outer_ink(self):
        line = analyze_gaps(self.binary, (0, 1), ProfileConfig(), index=4)
        self.assertEqual(line.index, 4)
        self.assertEqual((line.x_left, line.x_right), (1, 12))
        self.assertEqual(line.gaps, (Gap(3, 2), Gap(8, 3)))
        self.assertEqual(line.gap_count, 2)
        self.assertEqual(line.max_word_space, 3)
        self.assertEqual(line.height, 2)

    def test_min_gap_width(self):
        line = analyze_gaps(self.binary, (0, 1), ProfileConfig(min_gap_px=3))
        self.assertEqual(line.gaps, (Gap(8, 3),))
        self.assertEqual(line.gaps[0].x_end, 10)

    def test_column_blank_only_if_blank_in_every_row(self):
        binary = BinaryImage.from_rows([[1, 0, 0, 0, 1], [1, 0, 1, 0, 1]])
        line = analyze_gaps(binary, (0, 1), ProfileConfig(min_gap_px=1))
        self.assertEqual(line.gaps, (Gap(1, 1), Gap(3, 1)))

    def test_line_without_gaps(self):
        binary = BinaryImage.from_rows([[0, 1, 1, 1, 0]])
        line = analyze_gaps(binary, (0, 0), ProfileConfig())
        self.assertEqual(line.gap_count, 0)
        self.assertEqual(line.max_word_space, 0)

    def test_empty_band(self):
        with self.assertRaises(EmptyBandException):
            analyze_gaps(BinaryImage.blank(5, 5), (1, 3), ProfileConfig())

    def random_band(self, rng, height=6, width=60):
        data = (rng.random((height, width)) < 0.15).astype(np.uint8)
        data[:, rng.random(width) < 0.4] = 0
        data[rng.integers(0, height), rng.integers(0, width)] = 1
        return data

    def test_left_padding_shifts_gaps_only(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            data = self.random_band(rng)
            pad = int(rng.integers(1, 20))
            cfg = ProfileConfig(min_gap_px=int(rng.integers(1, 4)))
            padded = np.hstack([np.zeros((data.shape[0], pad), dtype=np.uint8), data])
            band = (0, data.shape[0] - 1)

            line = analyze_gaps(BinaryImage(data), band, cfg)
            shifted = analyze_gaps(BinaryImage(padded), band, cfg)
            self.assertEqual(shifted.gap_count, line.gap_count)
            self.assertEqual(shifted.max_word_space, line.max_word_space)
            self.assertEqual(shifted.x_left, line.x_left + pad)
            self.assertEqual(
                shifted.gaps, tuple(Gap(g.x_start + pad, g.width) for g in line.gaps)
            )

    def test_vertical_reordering_within_band(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            data = self.random_band(rng)
            shuffled = rng.permuted(data, axis=0)
            band = (0, data.shape[0] - 1)
            self.assertEqual(
                analyze_gaps(BinaryImage(shuffled), band, ProfileConfig()),
                analyze_gaps(BinaryImage(data), band, ProfileConfig()),
            )


class BuildPageTest(SimpleTestCase):
    def test_lines_in_order(self):
        binary = binary_with_blocks(
            60,
            40,
            [(5, 2, 10, 5), (20, 2, 10, 5), (5, 15, 40, 6), (5, 30, 3, 2), (30, 30, 3, 2)],
        )
        lines = build_page(binary, ProfileConfig())
        bands = [(line.y_top, line.y_bottom) for line in lines]
        self.assertEqual(bands, [(2, 6), (15, 20), (30, 31)])
        self.assertEqual([line.index for line in lines], [0, 1, 2])
        self.assertEqual([line.gap_count for line in lines], [1, 0, 1])
        self.assertEqual(lines[2].max_word_space, 22)

    def test_projection_conservation(self):
        rng = np.random.default_rng(11)
        binary = BinaryImage(rng.integers(0, 2, size=(31, 47), dtype=np.uint8))
        self.assertEqual(int(horizontal_projection(binary).sum()), binary.ink_count)
        self.assertEqual(int(vertical_projection(binary).sum()), binary.ink_count)
