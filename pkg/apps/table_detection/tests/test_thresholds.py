import random

from django.test import SimpleTestCase

from apps.table_detection.exceptions import AlphaOutOfRangeException, NoTextLineException
from apps.table_detection.thresholds import (
    DEFAULT_ALPHA_LH,
    DEFAULT_ALPHA_WS,
    compute_thresholds,
    select_standard_line,
    validate_alphas,
)

from .factories import make_line, stack_lines


def random_page(rng):
    """Página aleatória com pelo menos uma linha com lacunas."""
    specs = []
    for _ in range(rng.randint(1, 25)):
        height = rng.randint(1, 40)
        gaps = [rng.randint(1, 30) for _ in range(rng.randint(0, 12))]
        specs.append((height, gaps))
    if all(not gaps for _, gaps in specs):
        specs[rng.randrange(len(specs))] = (rng.randint(1, 40), [rng.randint(1, 30)])
    return stack_lines(specs)


class StandardLineTest(SimpleTestCase):
    def test_most_gaps_wins(self):
        lines = stack_lines([(10, [3]), (12, [4, 5, 6]), (9, [7, 8])])
        self.assertEqual(select_standard_line(lines), 1)

    def test_tie_goes_to_topmost(self):
        lines = stack_lines([(10, [3]), (12, [4, 5]), (9, [7, 8])])
        self.assertEqual(select_standard_line(lines), 1)

    def test_ignored_lines_are_skipped(self):
        lines = stack_lines([(10, [3, 3, 3, 3]), (12, [4, 5])])
        self.assertEqual(select_standard_line(lines, ignored={0}), 1)

    def test_no_line_with_gaps(self):
        with self.assertRaises(NoTextLineException):
            select_standard_line(stack_lines([(10, []), (30, [])]))
        with self.assertRaises(NoTextLineException):
            select_standard_line([])


class ComputeThresholdsTest(SimpleTestCase):
    def test_defaults(self):
        lines = stack_lines([(14, [2]), (10, [4, 6, 3]), (20, [])])
        th = compute_thresholds(lines)
        self.assertEqual(th.standard_line_index, 1)
        self.assertEqual((th.ws_std, th.lh_std), (6, 10))
        self.assertEqual(th.ws, DEFAULT_ALPHA_WS * 6)
        self.assertEqual(th.lh, DEFAULT_ALPHA_LH * 10)

    def test_real_valued_thresholds(self):
        th = compute_thresholds(stack_lines([(7, [3, 3])]), alpha_ws=1.5, alpha_lh=1.25)
        self.assertEqual(th.ws, 4.5)
        self.assertEqual(th.lh, 8.75)

    def test_round_trip_dict(self):
        th = compute_thresholds(stack_lines([(7, [3, 5])]))
        self.assertEqual(type(th).from_dict(th.to_dict()), th)

    def test_scaling_lines_scales_thresholds(self):
        base = stack_lines([(9, [4, 2]), (11, [6])])
        scaled = [
            make_line(line.index, line.height * 3, [gap.width * 3 for gap in line.gaps])
            for line in base
        ]
        a, b = compute_thresholds(base), compute_thresholds(scaled)
        self.assertAlmostEqual(b.ws, 3 * a.ws)
        self.assertAlmostEqual(b.lh, 3 * a.lh)


class AlphaRangeTest(SimpleTestCase):
    def test_closed_boundaries_rejected(self):
        for alpha_ws, alpha_lh in ((1.0, 1.25), (2.0, 1.25), (1.5, 1.0), (1.5, 1.5)):
            with self.assertRaises(AlphaOutOfRangeException):
                validate_alphas(alpha_ws, alpha_lh)

    def test_compute_validates(self):
        with self.assertRaises(AlphaOutOfRangeException) as ctx:
            compute_thresholds(stack_lines([(7, [3])]), alpha_ws=2.0)
        self.assertIn("AlphaOutOfRange", str(ctx.exception))

    def test_interior_values_accepted(self):
        validate_alphas(1.0001, 1.4999)
        validate_alphas(1.9999, 1.0001)


class ThresholdBoundsFuzzTest(SimpleTestCase):
    """ws e lh ficam estritamente entre 1x e 2x (ws) ou 1.5x (lh) da linha padrão."""

    def test_strict_bounds_on_fuzzed_pages(self):
        rng = random.Random(2024)
        for _ in range(200):
            lines = random_page(rng)
            alpha_ws = rng.uniform(1.001, 1.999)
            alpha_lh = rng.uniform(1.001, 1.499)
            th = compute_thresholds(lines, alpha_ws, alpha_lh)
            self.assertLess(th.ws_std, th.ws)
            self.assertLess(th.ws, 2 * th.ws_std)
            self.assertLess(th.lh_std, th.lh)
            self.assertLess(th.lh, 1.5 * th.lh_std)
            standard = lines[th.standard_line_index]
            self.assertEqual(standard.gap_count, max(line.gap_count for line in lines))
