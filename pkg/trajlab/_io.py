""" This module implements reading and writing of datasets, reports and tables"""
import csv
import importlib.resources
import json
import logging
import os
from collections import defaultdict
from dataclasses import replace

import numpy as np

from trajlab._const import (
    ATTR_RESOLVED_CONFIG, DATA_PACKAGE, DEFAULT_OBS_LEN, DEFAULT_PRED_LEN)
from trajlab._core import Dataset, Scene, Trajectory
from trajlab._exceptions import DataError, DatasetIOError, EmptyDatasetError, ParseError

LOGGER = logging.getLogger(__name__)

FORMAT_TSV = 'tsv'
COMMENT_PREFIX = '#'
FIELD_SEPARATOR = '\t'
FIELD_COUNT = 5

META_LABEL = 'label'
META_OBS_LEN = 'obs_len'
META_PRED_LEN = 'pred_len'
META_SPLIT = 'split'

FRAME_SPACING_RTOL = 1e-9


def _format_number(value):
    value = float(value)
    if value.is_integer() and abs(value) < 2 ** 53:
        return "%d" % value
    return repr(value)


def _parse_meta(line, lineno, meta, splits):
    key, sep, value = line[1:].partition(':')
    key = key.strip()
    if sep and key in (META_LABEL, META_OBS_LEN, META_PRED_LEN):
        meta[key] = value.strip()
    elif sep and key == META_SPLIT:
        # scene_id agent_id obs_len pred_len
        try:
            scene_id, agent_id, obs_len, pred_len = (int(v) for v in value.split())
        except ValueError:
            raise ParseError("invalid split line %r" % value.strip(), lineno) from None
        splits[(scene_id, agent_id)] = (obs_len, pred_len)


def _parse_row(line, lineno):
    fields = line.split(FIELD_SEPARATOR)
    if len(fields) != FIELD_COUNT:
        raise ParseError("expected %d tab-separated fields, got %d"
                         % (FIELD_COUNT, len(fields)), lineno)
    try:
        scene_id = int(fields[0])
        agent_id = int(fields[1])
        frame, x, y = (float(v) for v in fields[2:])
    except ValueError as err:
        raise ParseError("non-numeric field (%s)" % err, lineno) from None
    if not (np.isfinite(frame) and np.isfinite(x) and np.isfinite(y)):
        raise ParseError("non-finite value", lineno)
    return scene_id, agent_id, frame, x, y


def _build_trajectory(key, rows, obs_len, pred_len):
    rows.sort(key=lambda row: row[1])
    frames = np.array([row[1] for row in rows])
    if len(rows) < 2:
        raise ParseError("scene %d agent %d has a single point" % key, rows[0][0])
    steps = np.diff(frames)
    if np.any(steps <= 0):
        raise ParseError("scene %d agent %d has repeated frames" % key, rows[0][0])
    if not np.allclose(steps, steps[0], rtol=FRAME_SPACING_RTOL, atol=0.0):
        raise ParseError("scene %d agent %d has non-uniform frame spacing" % key,
                         rows[0][0])
    if not float(frames[0]).is_integer():
        raise ParseError("scene %d agent %d starts between frames" % key, rows[0][0])
    points = [(row[2], row[3]) for row in rows]
    return Trajectory(points, dt=float(steps[0]), obs_len=obs_len,
                      pred_len=pred_len, frame0=int(frames[0]))


def parse_dataset(path, format=FORMAT_TSV):
    """Reads a ``scene_id agent_id frame x y`` TSV file into a Dataset"""
    if format != FORMAT_TSV:
        raise DataError("unsupported dataset format %r" % format)
    meta, splits = {}, {}
    grouped = defaultdict(list)
    try:
        with open(path, encoding='utf-8', newline='') as handle:
            for lineno, raw in enumerate(handle, start=1):
                line = raw.rstrip('\n').rstrip('\r')
                if not line.strip():
                    continue
                if line.startswith(COMMENT_PREFIX):
                    _parse_meta(line, lineno, meta, splits)
                    continue
                scene_id, agent_id, frame, x, y = _parse_row(line, lineno)
                grouped[(scene_id, agent_id)].append((lineno, frame, x, y))
    except OSError as err:
        raise DatasetIOError("unable to read %s <%s>" % (path, err)) from err

    try:
        obs_len = int(meta.get(META_OBS_LEN, DEFAULT_OBS_LEN))
        pred_len = int(meta.get(META_PRED_LEN, DEFAULT_PRED_LEN))
    except ValueError:
        raise ParseError("invalid split metadata %r" % meta) from None
    label = meta.get(META_LABEL, os.path.splitext(os.path.basename(str(path)))[0])

    by_scene = defaultdict(list)
    for key in sorted(grouped):
        split = splits.get(key, (obs_len, pred_len))
        by_scene[key[0]].append((key[1], _build_trajectory(key, grouped[key], *split)))
    scenes = tuple(
        Scene(tuple(entries), frame0=min(t.frame0 for _, t in entries), scene_id=scene_id)
        for scene_id, entries in sorted(by_scene.items()))
    LOGGER.debug("Parsed %d trajectories in %d scenes from %s",
                 sum(len(s) for s in scenes), len(scenes), path)
    return Dataset(scenes, label=label)


def format_dataset(d):
    """TSV text of ``d``; scenes, agents and frames in ascending order"""
    obs_lens = {t.obs_len for t in d.trajectories()}
    pred_lens = {t.pred_len for t in d.trajectories()}
    lines = []
    if d.label:
        lines.append("# %s: %s" % (META_LABEL, d.label))
    uniform = len(obs_lens) == 1 and len(pred_lens) == 1
    if uniform:
        lines.append("# %s: %d" % (META_OBS_LEN, obs_lens.pop()))
        lines.append("# %s: %d" % (META_PRED_LEN, pred_lens.pop()))
    for scene in sorted(d.scenes, key=lambda s: s.scene_id):
        for agent_id, traj in sorted(scene.trajectories, key=lambda e: e[0]):
            if not uniform:
                lines.append("# %s: %d %d %d %d" % (META_SPLIT, scene.scene_id, agent_id,
                                                   traj.obs_len, traj.pred_len))
            for i, (x, y) in enumerate(traj.points):
                lines.append(FIELD_SEPARATOR.join((
                    "%d" % scene.scene_id,
                    "%d" % agent_id,
                    _format_number(traj.frame(i)),
                    _format_number(x),
                    _format_number(y))))
    return "\n".join(lines) + "\n"


def write_dataset(d, path):
    if len(d) == 0:
        raise EmptyDatasetError("refusing to write an empty dataset")
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(format_dataset(d))
    except OSError as err:
        raise DatasetIOError("unable to write %s <%s>" % (path, err)) from err
    LOGGER.info("Wrote %d trajectories to %s", len(d), path)


def _jsonable(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    raise TypeError("%r is not JSON serializable" % (value,))


def dumps_json(payload):
    return json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n"


def write_json_report(path, payload, resolved_config=None):
    """Writes ``payload`` as JSON, echoing the run configuration"""
    document = dict(payload)
    if resolved_config is not None:
        document[ATTR_RESOLVED_CONFIG] = resolved_config
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(dumps_json(document))
    except OSError as err:
        raise DatasetIOError("unable to write %s <%s>" % (path, err)) from err


def read_json(path):
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except OSError as err:
        raise DatasetIOError("unable to read %s <%s>" % (path, err)) from err
    except ValueError as err:
        raise DataError("invalid JSON in %s <%s>" % (path, err)) from err


def write_csv(path, header, rows):
    try:
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([_format_number(v) if isinstance(v, (float, np.floating))
                                 else v for v in row])
    except OSError as err:
        raise DatasetIOError("unable to write %s <%s>" % (path, err)) from err


def read_signal_csv(path):
    """Reads ``t,y1[,y2...]`` rows; a non-numeric first row is a header"""
    samples = []
    try:
        with open(path, encoding='utf-8', newline='') as handle:
            for lineno, row in enumerate(csv.reader(handle), start=1):
                if not row:
                    continue
                try:
                    values = [float(v) for v in row]
                except ValueError:
                    if lineno == 1:
                        continue
                    raise ParseError("non-numeric signal row", lineno) from None
                if len(values) < 2:
                    raise ParseError("signal row needs t and at least one value", lineno)
                samples.append((values[0], np.array(values[1:])))
    except OSError as err:
        raise DatasetIOError("unable to read %s <%s>" % (path, err)) from err
    return samples


def write_state_log(d, path):
    """Sidecar JSON with one (scene, agent, frame, state) record per frame"""
    records = []
    for scene in d.scenes:
        if scene.state_log is None:
            continue
        for agent_id, traj in scene.trajectories:
            for i, state in enumerate(scene.state_log.get(agent_id, ())):
                records.append({
                    'scene_id': scene.scene_id,
                    'agent_id': agent_id,
                    'frame': traj.frame(i),
                    'state': str(getattr(state, 'value', state)),
                })
    write_json_report(path, {'states': records})


def read_state_log(path):
    """Maps scene_id to {agent_id: tuple of state names} ordered by frame"""
    document = read_json(path)
    collected = defaultdict(lambda: defaultdict(list))
    try:
        for record in document['states']:
            collected[int(record['scene_id'])][int(record['agent_id'])].append(
                (float(record['frame']), record['state']))
    except (KeyError, TypeError, ValueError) as err:
        raise DataError("malformed state log %s <%s>" % (path, err)) from err
    return {
        scene_id: {agent_id: tuple(state for _, state in sorted(rows))
                   for agent_id, rows in agents.items()}
        for scene_id, agents in collected.items()}


def attach_state_log(d, log):
    scenes = tuple(replace(scene, state_log=log.get(scene.scene_id)) for scene in d.scenes)
    return Dataset(scenes, label=d.label)


def read_package_json(name):
    """Loads one of the editable JSON defaults shipped in ``trajlab/data``"""
    resource = importlib.resources.files(DATA_PACKAGE) / 'data' / name
    return json.loads(resource.read_text(encoding='utf-8'))
