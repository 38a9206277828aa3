import json
import random

import numpy as np
from django.test import SimpleTestCase

from apps.table_detection.config import RunConfig
from apps.table_detection.detector import (
    DetectionReport,
    DetectorConfig,
    LineClass,
    ReportStatus,
    classify_lines,
    config_fingerprint,
    detect,
    header_footer_excluded,
    merge_regions,
    run_pipeline,
)
from apps.table_detection.evaluator import iou
from apps.table_detection.raster import GrayImage, TableCategory
from apps.table_detection.synth import (
    PageSpec,
    Paragraph,
    RunningHeader,
    TableC,
    desk_page_spec,
    generate,
)
from apps.table_detection.thresholds import PageThresholds

from .factories import make_line, stack_lines

T = LineClass.TEXT
A = LineClass.TYPE_A_BLOCK
COL = LineClass.COLUMNAR_CANDIDATE
RULE = LineClass.RULE_LINE


def thresholds(ws, lh):
    return PageThresholds(
        standard_line_index=0, ws_std=1, lh_std=1, ws=ws, lh=lh, alpha_ws=1.5, alpha_lh=1.25
    )


def reference_class(lh_x, gaps_x, ws_x, ws_prev, ws_next, ws, lh):
    """Transcrição direta das regras de classificação, linha a linha."""
    if lh_x >= 3 * lh and gaps_x == 0:
        return "type_a_block"
    if ws_x > ws and lh_x <= lh:
        return "columnar_candidate"
    wide_above = ws_prev is not None and ws_prev > ws
    wide_below = ws_next is not None and ws_next > ws
    if gaps_x == 0 and lh_x < lh and (wide_above or wide_below):
        return "rule_line"
    return "text"


def line_with(rng, index, height, gap_count, ws):
    widths = [ws] + [rng.randint(1, ws) for _ in range(gap_count - 1)] if gap_count else []
    rng.shuffle(widths)
    return make_line(index, height, widths)


class ClassifyLinesTest(SimpleTestCase):
    def test_examples(self):
        th = thresholds(ws=6.0, lh=10.0)
        lines = stack_lines(
            [
                (12, [3, 3, 3]),  # texto alto
                (35, []),  # bloco tipo A (LH >= 30)
                (10, [8, 2]),  # candidata colunar
                (2, []),  # régua: vizinha de cima tem WS > ws
                (9, [2, 2]),  # texto
            ]
        )
        self.assertEqual(classify_lines(lines, th), [T, A, COL, RULE, T])

    def test_boundaries(self):
        th = thresholds(ws=6.0, lh=10.0)
        lines = stack_lines([(30, []), (10, [6]), (10, [7]), (11, [7])])
        # LH == 3*lh sem lacunas é bloco A; WS == ws não é candidata; LH == lh ainda é
        self.assertEqual(classify_lines(lines, th), [A, T, COL, T])

    def test_rule_line_at_page_edges(self):
        th = thresholds(ws=6.0, lh=10.0)
        self.assertEqual(classify_lines(stack_lines([(2, []), (8, [9])]), th), [RULE, COL])
        self.assertEqual(classify_lines(stack_lines([(8, [9]), (2, [])]), th), [COL, RULE])
        self.assertEqual(classify_lines(stack_lines([(2, [])]), th), [T])

    def test_agrees_with_reference_on_random_tuples(self):
        rng = random.Random(7)
        for _ in range(10_000):
            ws = rng.choice([float(rng.randint(1, 20)), rng.uniform(1.0, 20.0)])
            lh = rng.choice([float(rng.randint(1, 30)), rng.uniform(1.0, 30.0)])
            lh_x = rng.randint(1, 100)
            gaps_x = rng.choice([0, 0, rng.randint(1, 6)])
            ws_x = rng.randint(1, 40) if gaps_x else 0

            page, ws_prev, ws_next = [], None, None
            if rng.random() < 0.8:
                g = rng.randint(0, 4)
                ws_prev = rng.randint(1, 40) if g else 0
                page.append(line_with(rng, 0, rng.randint(1, 40), g, ws_prev))
            position = len(page)
            page.append(line_with(rng, position, lh_x, gaps_x, ws_x))
            if rng.random() < 0.8:
                g = rng.randint(0, 4)
                ws_next = rng.randint(1, 40) if g else 0
                page.append(line_with(rng, position + 1, rng.randint(1, 40), g, ws_next))

            got = classify_lines(page, thresholds(ws, lh))[position].value
            expected = reference_class(lh_x, gaps_x, ws_x, ws_prev, ws_next, ws, lh)
            self.assertEqual(got, expected, (lh_x, gaps_x, ws_x, ws_prev, ws_next, ws, lh))


class MergeRegionsTest(SimpleTestCase):
    def regions(self, classes, **cfg):
        lines = stack_lines([(10, [2])] * len(classes))
        return merge_regions(classes, lines, DetectorConfig(**cfg))

    def test_columnar_run_is_type_c(self):
        (region,) = self.regions([T, COL, COL, COL, T])
        self.assertEqual(region.category, TableCategory.C)
        self.assertEqual(region.line_indices, (1, 2, 3))
        self.assertEqual(region.rule_line_count, 0)

    def test_two_rules_make_type_b(self):
        (region,) = self.regions([RULE, COL, RULE, COL, COL, RULE])
        self.assertEqual(region.category, TableCategory.B)
        self.assertEqual(region.rule_line_count, 3)
        self.assertEqual(region.line_indices, (0, 1, 2, 3, 4, 5))

    def test_single_rule_is_dropped(self):
        (region,) = self.regions([COL, RULE, COL, COL])
        self.assertEqual(region.category, TableCategory.C)
        self.assertEqual(region.line_indices, (0, 2, 3))
        self.assertEqual(region.rule_line_count, 0)

    def test_interior_text_tolerance(self):
        (region,) = self.regions([COL, COL, T, COL])
        self.assertEqual(region.line_indices, (0, 1, 3))
        self.assertEqual(self.regions([COL, COL, T, COL], max_interior_text_lines=0), [])
        self.assertEqual(self.regions([COL, COL, T, T, COL, COL]), [])

    def test_short_runs_discarded(self):
        self.assertEqual(self.regions([COL, COL, T, T]), [])
        self.assertEqual(len(self.regions([COL, COL], min_table_lines=2)), 1)

    def test_type_a_block_alone(self):
        regions = self.regions([T, A, COL, COL, COL])
        self.assertEqual([r.category for r in regions], [TableCategory.A, TableCategory.C])
        self.assertEqual(regions[0].line_indices, (1,))

    def test_region_rect_covers_members(self):
        lines = [
            make_line(0, 10, [30], y_top=5, x_left=20),
            make_line(1, 10, [40], y_top=20, x_left=10),
            make_line(2, 10, [25], y_top=35, x_left=15),
        ]
        (region,) = merge_regions([COL, COL, COL], lines, DetectorConfig())
        self.assertEqual(region.rect.x, 10)
        self.assertEqual(region.rect.y, 5)
        self.assertEqual(region.rect.bottom, 45)
        self.assertEqual(region.rect.right, max(line.x_right for line in lines) + 1)

    def test_length_mismatch(self):
        with self.assertRaises(ValueError):
            merge_regions([T], [], DetectorConfig())


class HeaderFooterTest(SimpleTestCase):
    TABLE_ROWS = 4

    def test_excluded_positions(self):
        lines = [make_line(0, 10, y_top=0), make_line(1, 10, y_top=50), make_line(2, 10, y_top=92)]
        self.assertEqual(header_footer_excluded(lines, 100, 0.1), {0, 2})
        self.assertEqual(header_footer_excluded(lines, 100, 0.0), set())

    def header_over_table_page(self):
        spec = PageSpec(
            seed=5,
            blocks=[
                RunningHeader(n_lines=1),
                TableC(rows=self.TABLE_ROWS, cols=3),
                Paragraph(n_lines=6),
            ],
        )
        gray, truth = generate(spec)
        (entry,) = truth.entries
        return gray, entry.rect

    def test_running_header_merges_into_table(self):
        gray, table_rect = self.header_over_table_page()
        report = detect(gray, RunConfig())
        self.assertEqual(report.lines[0].line_class, COL)
        (region,) = report.regions
        self.assertEqual(region.line_indices, tuple(range(self.TABLE_ROWS + 1)))
        self.assertLess(iou(region.rect, table_rect), 0.5)

    def test_exclusion_restores_table_rect(self):
        gray, table_rect = self.header_over_table_page()
        run_config = RunConfig(detector=DetectorConfig(header_footer_exclusion_frac=0.08))
        report = detect(gray, run_config)
        self.assertIn("header_footer_excluded:1", report.diagnostics)

        (region,) = report.regions
        self.assertEqual(region.category, TableCategory.C)
        self.assertEqual(region.line_indices, tuple(range(1, self.TABLE_ROWS + 1)))
        self.assertEqual((region.rect.x, region.rect.y), (table_rect.x, table_rect.y))
        self.assertGreaterEqual(iou(region.rect, table_rect), 0.5)

        classes = [line.line_class for line in report.lines]
        self.assertEqual(classes, [T] + [COL] * self.TABLE_ROWS + [T] * 6)


class PipelineTest(SimpleTestCase):
    def test_blank_page_reports_no_text_line(self):
        report = detect(GrayImage.blank(200, 100), RunConfig(), page_id="branca")
        self.assertEqual(report.status, ReportStatus.NO_TEXT_LINE)
        self.assertEqual(report.diagnostics, ["NoTextLine"])
        self.assertEqual(report.regions, [])
        self.assertIsNone(report.thresholds)
        self.assertEqual(report.to_dict()["status"], "no_text_line")

    def test_type_c_page(self):
        spec = PageSpec(
            seed=3, blocks=[Paragraph(n_lines=3), TableC(rows=5, cols=3, col_gap_px=27)]
        )
        gray, truth = generate(spec)
        result = run_pipeline(gray, RunConfig(), page_id="c")
        (region,) = result.report.regions
        self.assertEqual(region.category, TableCategory.C)
        self.assertEqual(len(region.line_indices), 5)
        self.assertEqual(region.rect.x, truth.entries[0].rect.x)
        self.assertEqual(region.rect.y, truth.entries[0].rect.y)
        self.assertEqual(result.binary.width, gray.width)

    def test_report_json_round_trip(self):
        gray, _ = generate(desk_page_spec("B", 11))
        report = detect(gray, RunConfig(), page_id="b")
        data = json.loads(report.to_json())
        self.assertEqual(data["schema"], 1)
        self.assertEqual(DetectionReport.from_dict(data).to_json(), report.to_json())

    def test_fingerprint_tracks_config(self):
        self.assertEqual(config_fingerprint(RunConfig()), RunConfig().fingerprint)
        self.assertNotEqual(RunConfig().fingerprint, RunConfig(alpha_ws=1.6).fingerprint)
        blank_report = detect(GrayImage.blank(200, 100), RunConfig())
        self.assertEqual(blank_report.config_fingerprint, RunConfig().fingerprint)

    def test_determinism(self):
        gray, _ = generate(desk_page_spec("A", 21))
        self.assertEqual(detect(gray, RunConfig()).to_json(), detect(gray, RunConfig()).to_json())

    def test_translation_shifts_regions(self):
        gray, _ = generate(desk_page_spec("C", 4))
        k = 17
        padded = GrayImage(np.vstack([np.full((k, gray.width), 255, np.uint8), gray.data]))
        before = detect(gray, RunConfig()).regions
        after = detect(padded, RunConfig()).regions
        self.assertTrue(before)
        self.assertEqual([r.rect.translate(dy=k) for r in before], [r.rect for r in after])
        self.assertEqual([r.category for r in before], [r.category for r in after])

    def test_larger_alpha_never_adds_columnar_lines(self):
        gray, _ = generate(desk_page_spec("C", 8))
        counts = []
        for alpha_ws in (1.1, 1.3, 1.5, 1.7, 1.9):
            report = detect(gray, RunConfig(alpha_ws=alpha_ws))
            counts.append(sum(1 for line in report.lines if line.line_class is COL))
        self.assertEqual(counts, sorted(counts, reverse=True))
