import json
import os
import tempfile
import unittest

import numpy as np

from trajlab._const import ATTR_RESOLVED_CONFIG, HMM_DEFAULT_FILE
from trajlab._core import Dataset, Scene, Trajectory
from trajlab._exceptions import DataError, DatasetIOError, EmptyDatasetError, ParseError
from trajlab._io import (
    attach_state_log, format_dataset, parse_dataset, read_json,
    read_package_json, read_signal_csv, read_state_log, write_csv,
    write_dataset, write_json_report, write_state_log)

BAD_ROWS = [
    ("0\t0\t0\t1.0\n", 1),
    ("0\t0\t0\t1.0\t2.0\n0\tx\t1\t1.0\t2.0\n", 2),
    ("0\t0\t0\t1.0\t2.0\n", 1),
    ("0\t0\t0\t1\t1\n0\t0\t1\t2\t2\n0\t0\t3\t3\t3\n", 1),
    ("0\t0\t0\t1\t1\n0\t0\t0\t2\t2\n", 1),
]


class DatasetFileTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write(self, name, text):
        with open(self.path(name), 'w', encoding='utf-8') as handle:
            handle.write(text)
        return self.path(name)

    def test_write_then_parse(self):
        points = np.array([[0.1, 0.2], [1.5, -3.25], [2.0, 1e-7]])
        d = Dataset((Scene(((3, Trajectory(points, dt=0.4, obs_len=2, pred_len=1,
                                           frame0=10)),), scene_id=2),), label='demo')
        write_dataset(d, self.path('d.tsv'))
        parsed = parse_dataset(self.path('d.tsv'))
        self.assertEqual(parsed.label, 'demo')
        self.assertEqual(parsed.keys(), [(2, 3)])
        t = parsed.trajectories()[0]
        np.testing.assert_array_equal(t.points, points)
        self.assertEqual((t.obs_len, t.pred_len, t.frame0), (2, 1, 10))
        self.assertIsInstance(t.frame0, int)
        self.assertAlmostEqual(t.dt, 0.4)

    def test_mixed_splits_survive(self):
        short = Trajectory(np.arange(10.0).reshape(5, 2), obs_len=2, pred_len=3)
        long_ = Trajectory(np.arange(40.0).reshape(20, 2), frame0=4)
        d = Dataset((Scene(((0, short), (1, long_))),), label='mixed')
        text = format_dataset(d)
        self.assertIn("# split: 0 0 2 3\n", text)
        self.assertNotIn("# obs_len", text)
        parsed = parse_dataset(self.write('mixed.tsv', text))
        self.assertEqual(parsed, d)
        self.assertEqual([(t.obs_len, t.pred_len) for t in parsed.trajectories()],
                         [(2, 3), (8, 12)])

    def test_frames_are_integers(self):
        d = Dataset.from_trajectories([Trajectory([[0.5, 0.0], [1.0, 1.0]], frame0=7.0)])
        t = d.trajectories()[0]
        self.assertIsInstance(t.frame0, int)
        self.assertEqual(format_dataset(d).splitlines()[-1], "0\t0\t8\t1\t1")
        with self.assertRaises(DataError):
            Trajectory([[0.0, 0.0], [1.0, 1.0]], frame0=2.5)
        with self.assertRaises(ParseError):
            parse_dataset(self.write('half.tsv', "0\t0\t0.5\t1\t1\n0\t0\t1.5\t2\t2\n"))
        with self.assertRaises(ParseError):
            parse_dataset(self.write('split.tsv', "# split: 0 0 two 3\n0\t0\t0\t1\t1\n"))

    def test_rows_sorted_by_frame(self):
        path = self.write('d.tsv', "1\t0\t2\t5\t5\n1\t0\t0\t1\t1\n1\t0\t1\t3\t3\n")
        t = parse_dataset(path).trajectories()[0]
        np.testing.assert_array_equal(t.points[:, 0], [1.0, 3.0, 5.0])

    def test_label_defaults_to_file_name(self):
        path = self.write('eth.tsv', "0\t0\t0\t1\t1\n0\t0\t1\t2\t2\n")
        self.assertEqual(parse_dataset(path).label, 'eth')

    def test_parse_errors(self):
        for text, lineno in BAD_ROWS:
            with self.subTest(text=text):
                with self.assertRaises(ParseError) as ctx:
                    parse_dataset(self.write('bad.tsv', text))
                self.assertEqual(ctx.exception.line, lineno)

    def test_missing_file(self):
        with self.assertRaises(DatasetIOError):
            parse_dataset(self.path('nope.tsv'))

    def test_empty_write(self):
        with self.assertRaises(EmptyDatasetError):
            write_dataset(Dataset(()), self.path('empty.tsv'))

    def test_format_is_deterministic(self):
        d = Dataset.from_trajectories([Trajectory([[0.0, 0.0], [1.0, 1.0]])], label='a')
        self.assertEqual(format_dataset(d), format_dataset(d))
        self.assertTrue(format_dataset(d).startswith("# label: a\n"))


class ReportFileTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_report_echoes_config(self):
        path = os.path.join(self.tmp.name, 'r.json')
        write_json_report(path, {'ade': np.float64(0.5)}, resolved_config={'k': 20})
        document = read_json(path)
        self.assertEqual(document['ade'], 0.5)
        self.assertEqual(document[ATTR_RESOLVED_CONFIG], {'k': 20})

    def test_csv(self):
        path = os.path.join(self.tmp.name, 't.csv')
        write_csv(path, ('a', 'b'), [(1, 2.5), (2, 3.0)])
        with open(path, encoding='utf-8') as handle:
            self.assertEqual(handle.read(), "a,b\n1,2.5\n2,3\n")

    def test_signal_csv(self):
        path = os.path.join(self.tmp.name, 's.csv')
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write("t,y\n0.0,1.0\n0.5,2.0\n")
        samples = read_signal_csv(path)
        self.assertEqual(len(samples), 2)
        self.assertEqual(samples[1][0], 0.5)
        np.testing.assert_array_equal(samples[1][1], [2.0])

    def test_signal_csv_bad_row(self):
        path = os.path.join(self.tmp.name, 's.csv')
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write("0.0,1.0\n0.5\n")
        with self.assertRaises(ParseError):
            read_signal_csv(path)

    def test_state_log(self):
        t = Trajectory([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        scene = Scene(((0, t),), scene_id=1, state_log={0: ('walk', 'wait', 'walk')})
        d = Dataset((scene,))
        path = os.path.join(self.tmp.name, 'states.json')
        write_state_log(d, path)
        log = read_state_log(path)
        self.assertEqual(log, {1: {0: ('walk', 'wait', 'walk')}})
        attached = attach_state_log(Dataset((Scene(((0, t),), scene_id=1),)), log)
        self.assertEqual(attached.scenes[0].state_log, {0: ('walk', 'wait', 'walk')})

    def test_shipped_defaults(self):
        document = read_package_json(HMM_DEFAULT_FILE)
        self.assertEqual(len(document['transition']), 5)
        json.dumps(document)
