# -*- coding: utf-8 -*-
"""
    trajlab.cli
    ~~~~~~~~~~~

    ``trajlab`` command line: one subcommand per pipeline stage. Datasets
    travel as TSV, reports as JSON (with the resolved run configuration
    under ``resolved_config``) and tables as CSV.

    Exit codes: 0 success, 1 usage error, 2 data or I/O error.

    :license: BSD, see LICENSE for more details.
"""

# python imports
import argparse
import logging
import sys

# custom imports
from trajlab._analysis import TRAJECTORY_ROW_HEADER, profile, trajectory_rows
from trajlab._cluster import NormKind, bbox_cluster, kmedoids
from trajlab._const import (
    ACTIVATION_IDENTITY, ACTIVATION_SINE, DEFAULT_K, DEFAULT_OMEGA0,
    DEFAULT_STANDARDIZATION, INIT_SIREN, PREDICTOR_CONSTANT_VELOCITY,
    PREDICTOR_LINEAR_FIT, PREDICTOR_STATIONARY)
from trajlab._core import Dataset, SeededRng
from trajlab._evalbase import EVAL_ROW_HEADER, Predictor, eval_rows, run_eval
from trajlab._exceptions import ConfigError, TrajlabError
from trajlab._genkin import (
    CurveSpec, NewtonSpec, NoisyNewtonSpec, gen_batch, gen_curve, gen_newton,
    gen_noisy)
from trajlab._hmm import SceneConfig, simulate_scene
from trajlab._io import (
    parse_dataset, read_json, read_signal_csv, write_csv, write_dataset,
    write_json_report, write_state_log)
from trajlab._metrics import EvalConfig
from trajlab._neural import INITIALIZERS, Mlp, fit_signal
from trajlab._rlsim import (
    AgentProfile, LearningCurve, RlEnvConfig, TrainConfig, rollout_dataset, train)
from trajlab._synsdd import MixSpec, ProfileTarget, gen_synsdd, mix, rt_augment

# local constants
LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

PREDICTOR_NAMES = {
    'cv': PREDICTOR_CONSTANT_VELOCITY,
    'linfit': PREDICTOR_LINEAR_FIT,
    'stationary': PREDICTOR_STATIONARY,
}

CLUSTER_ROW_HEADER = ('index', 'scene_id', 'agent_id', 'cluster', 'is_medoid')
BBOX_ROW_HEADER = ('index', 'scene_id', 'agent_id', 'bin_x', 'bin_y')
LOSS_ROW_HEADER = ('epoch', 'loss')


class UsageError(Exception):
    """Bad command line; maps to exit code 1"""


class _Parser(argparse.ArgumentParser):

    def error(self, message):
        raise UsageError("%s: %s" % (self.prog, message))


def _generate_hmm(config, count, rng):
    cfg = SceneConfig.from_dict(config) if config else SceneConfig.default()
    scenes = [simulate_scene(cfg, rng.derive(i), scene_id=i) for i in range(count)]
    return Dataset(tuple(scenes), label='hmm'), cfg


def _generate_with(parse, generator, label):
    def run(config, count, rng):
        spec = parse(config)
        return gen_batch(generator, spec, count, rng, label=label), spec
    return run


GENERATORS = {
    'newton': _generate_with(NewtonSpec.from_dict, gen_newton, 'newton'),
    'noisy': _generate_with(NoisyNewtonSpec.from_dict, gen_noisy, 'noisy'),
    'curve': _generate_with(CurveSpec.from_dict, gen_curve, 'curve'),
    'hmm': _generate_hmm,
}


def cmd_generate(args):
    config = read_json(args.spec) if args.spec else {}
    dataset, spec = GENERATORS[args.kind](config, args.count, SeededRng(args.seed))
    write_dataset(dataset, args.out)
    if args.states:
        write_state_log(dataset, args.states)
    return {'kind': args.kind, 'count': args.count, 'seed': args.seed,
            'spec': spec.to_dict()}, {'trajectories': len(dataset)}


def cmd_synth(args):
    target = (ProfileTarget.from_dict(read_json(args.target)) if args.target
              else ProfileTarget.default())
    dataset = gen_synsdd(target, args.count, SeededRng(args.seed))
    write_dataset(dataset, args.out)
    return ({'target': target.to_dict(), 'count': args.count, 'seed': args.seed},
            profile(dataset).to_dict())


def cmd_mix(args):
    spec = MixSpec(parse_dataset(args.base), parse_dataset(args.synth),
                   args.fraction, args.seed)
    dataset = mix(spec)
    write_dataset(dataset, args.out)
    return spec.to_dict(), {'trajectories': len(dataset)}


def cmd_augment(args):
    dataset = parse_dataset(args.input)
    augmented = rt_augment(dataset, args.n_rot, SeededRng(args.seed),
                           translate=not args.no_translate)
    write_dataset(augmented, args.out)
    return ({'input': args.input, 'n_rot': args.n_rot, 'seed': args.seed,
             'translate': not args.no_translate},
            {'trajectories': len(augmented)})


def cmd_analyze(args):
    dataset = parse_dataset(args.input)
    if args.csv:
        write_csv(args.csv, TRAJECTORY_ROW_HEADER, trajectory_rows(dataset))
    return {'input': args.input}, profile(dataset).to_dict()


def cmd_classify(args):
    dataset = parse_dataset(args.input)
    write_csv(args.out, TRAJECTORY_ROW_HEADER, trajectory_rows(dataset))
    return {'input': args.input}, {'trajectories': len(dataset)}


def cmd_cluster(args):
    dataset = parse_dataset(args.input)
    result = kmedoids(dataset, args.k, NormKind(args.norm), SeededRng(args.seed),
                      n_init=args.n_init)
    keys = dataset.keys()
    write_csv(args.out, CLUSTER_ROW_HEADER,
              [(i,) + keys[i] + (cluster, int(is_medoid))
               for i, cluster, is_medoid in result.rows()])
    return ({'input': args.input, 'k': args.k, 'norm': args.norm, 'seed': args.seed,
             'n_init': args.n_init},
            dict(result.summary(), medoids=list(result.medoids)))


def cmd_bbox_cluster(args):
    dataset = parse_dataset(args.input)
    bins = bbox_cluster(dataset, (args.width, args.height))
    keys = dataset.keys()
    rows = sorted((i,) + keys[i] + key for key, members in bins.items() for i in members)
    write_csv(args.out, BBOX_ROW_HEADER, rows)
    return ({'input': args.input, 'width': args.width, 'height': args.height},
            {'bins': {"%dx%d" % key: len(members) for key, members in bins.items()}})


def cmd_eval(args):
    dataset = parse_dataset(args.input)
    cfg = EvalConfig(args.k, args.std, args.legacy_scale_bug, args.decoupled)
    predictor = Predictor(PREDICTOR_NAMES[args.predictor], args.k, args.jitter)
    report = run_eval(dataset, predictor, cfg, SeededRng(args.seed))
    if args.csv:
        write_csv(args.csv, EVAL_ROW_HEADER, eval_rows(dataset, report))
    return ({'input': args.input, 'predictor': predictor.to_dict(), 'eval': cfg.to_dict(),
             'seed': args.seed}, report.to_dict())


def cmd_rl_train(args):
    env = RlEnvConfig.from_dict(read_json(args.env)) if args.env else RlEnvConfig()
    agent = AgentProfile.from_dict(read_json(args.profile))
    cfg = TrainConfig(iterations=args.iters, episodes_per_iter=args.episodes,
                      lr=args.lr, seed=args.seed)
    net, curve = train(env, agent, cfg)
    write_csv(args.curve, LearningCurve.HEADER, curve.rows())
    if args.policy:
        write_json_report(args.policy, net.to_dict())
    if args.export:
        write_dataset(rollout_dataset(net, env, agent, SeededRng(args.seed).derive(2),
                                      count=args.rollouts), args.export)
    last = curve.points[-1]
    return ({'env': env.to_dict(), 'profile': agent.to_dict(), 'train': cfg.to_dict()},
            {'final_mean_return': last.mean_return,
             'final_mean_distance': last.mean_final_dist})


def _layer_sizes(text):
    try:
        sizes = [int(part) for part in text.split(',')]
    except ValueError:
        raise ConfigError("layers must be comma separated widths, got %r" % text) from None
    if len(sizes) < 2 or min(sizes) < 1:
        raise ConfigError("layers need at least input and output widths >= 1")
    return sizes


def cmd_siren_fit(args):
    samples = read_signal_csv(args.signal)
    sizes = _layer_sizes(args.layers)
    net = Mlp.build(sizes, hidden=ACTIVATION_SINE, output=ACTIVATION_IDENTITY,
                    omega0=args.omega0)
    net = INITIALIZERS[args.init](net, SeededRng(args.seed))
    result = fit_signal(net, samples, args.epochs, args.lr)
    write_csv(args.curve, LOSS_ROW_HEADER, list(enumerate(result.losses)))
    if args.model:
        write_json_report(args.model, result.mlp.to_dict())
    return ({'signal': args.signal, 'layers': sizes, 'epochs': args.epochs, 'lr': args.lr,
             'omega0': args.omega0, 'init': args.init, 'seed': args.seed},
            {'final_loss': result.final_loss, 'final_lr': result.lr})


def _add_report(sub):
    sub.add_argument('--report', help="JSON report with the resolved configuration")


def build_parser():
    parser = _Parser(prog='trajlab', description="Trajectory dataset toolkit")
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="-v for info, -vv for debug logging")
    commands = parser.add_subparsers(dest='command', parser_class=_Parser)
    commands.required = True

    sub = commands.add_parser('generate', help="generate a synthetic dataset")
    sub.add_argument('--kind', choices=sorted(GENERATORS), required=True)
    sub.add_argument('--spec', help="JSON generator spec (defaults when omitted)")
    sub.add_argument('--count', type=int, default=1)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--out', required=True)
    sub.add_argument('--states', help="state log sidecar JSON (hmm only)")
    _add_report(sub)
    sub.set_defaults(handler=cmd_generate)

    sub = commands.add_parser('synth', help="statistics-matched synthetic dataset")
    sub.add_argument('--target', help="profile target JSON (shipped default when omitted)")
    sub.add_argument('--count', type=int, required=True)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--out', required=True)
    _add_report(sub)
    sub.set_defaults(handler=cmd_synth)

    sub = commands.add_parser('mix', help="mix synthetic into base trajectories")
    sub.add_argument('--base', required=True)
    sub.add_argument('--synth', required=True)
    sub.add_argument('--fraction', type=float, required=True)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--out', required=True)
    _add_report(sub)
    sub.set_defaults(handler=cmd_mix)

    sub = commands.add_parser('augment', help="rotation/translation augmentation")
    sub.add_argument('--in', dest='input', required=True)
    sub.add_argument('--n-rot', dest='n_rot', type=int, default=1)
    sub.add_argument('--no-translate', action='store_true')
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--out', required=True)
    _add_report(sub)
    sub.set_defaults(handler=cmd_augment)

    sub = commands.add_parser('analyze', help="unique points, classes and AbScore stats")
    sub.add_argument('--in', dest='input', required=True)
    sub.add_argument('--report', required=True)
    sub.add_argument('--csv', help="per-trajectory rows")
    sub.set_defaults(handler=cmd_analyze)

    sub = commands.add_parser('classify', help="per-trajectory class table")
    sub.add_argument('--in', dest='input', required=True)
    sub.add_argument('--out', required=True)
    _add_report(sub)
    sub.set_defaults(handler=cmd_classify)

    sub = commands.add_parser('cluster', help="k-medoids clustering")
    sub.add_argument('--in', dest='input', required=True)
    sub.add_argument('--k', type=int, required=True)
    sub.add_argument('--norm', choices=[kind.value for kind in NormKind],
                     default=NormKind.FROBENIUS.value)
    sub.add_argument('--n-init', dest='n_init', type=int, default=4)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--out', required=True)
    _add_report(sub)
    sub.set_defaults(handler=cmd_cluster)

    sub = commands.add_parser('bbox-cluster', help="bin trajectories by bounding box size")
    sub.add_argument('--in', dest='input', required=True)
    sub.add_argument('--width', type=float, required=True)
    sub.add_argument('--height', type=float, required=True)
    sub.add_argument('--out', required=True)
    _add_report(sub)
    sub.set_defaults(handler=cmd_bbox_cluster)

    sub = commands.add_parser('eval', help="baseline prediction and ADE/FDE")
    sub.add_argument('--in', dest='input', required=True)
    sub.add_argument('--predictor', choices=sorted(PREDICTOR_NAMES), default='cv')
    sub.add_argument('--k', type=int, default=DEFAULT_K)
    sub.add_argument('--jitter', type=float, default=0.0)
    sub.add_argument('--decoupled', action='store_true')
    sub.add_argument('--std', type=float, default=DEFAULT_STANDARDIZATION)
    sub.add_argument('--legacy-scale-bug', dest='legacy_scale_bug', action='store_true')
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--report', required=True)
    sub.add_argument('--csv', help="per-trajectory errors")
    sub.set_defaults(handler=cmd_eval)

    sub = commands.add_parser('rl-train', help="train the policy-gradient agent")
    sub.add_argument('--env', help="environment JSON")
    sub.add_argument('--profile', required=True, help="agent profile JSON")
    sub.add_argument('--iters', type=int, default=TrainConfig.iterations)
    sub.add_argument('--episodes', type=int, default=TrainConfig.episodes_per_iter)
    sub.add_argument('--lr', type=float, default=TrainConfig.lr)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--curve', required=True)
    sub.add_argument('--policy', help="trained network JSON")
    sub.add_argument('--export', help="TSV of learner rollouts")
    sub.add_argument('--rollouts', type=int, default=1)
    _add_report(sub)
    sub.set_defaults(handler=cmd_rl_train)

    sub = commands.add_parser('siren-fit', help="fit a sine network to a signal")
    sub.add_argument('--signal', required=True, help="CSV of t,y rows")
    sub.add_argument('--layers', default='1,64,64,64,1')
    sub.add_argument('--epochs', type=int, default=4000)
    sub.add_argument('--lr', type=float, default=1e-4)
    sub.add_argument('--omega0', type=float, default=DEFAULT_OMEGA0)
    sub.add_argument('--init', choices=sorted(INITIALIZERS), default=INIT_SIREN)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--curve', required=True)
    sub.add_argument('--model', help="fitted network JSON")
    _add_report(sub)
    sub.set_defaults(handler=cmd_siren_fit)

    return parser


def _configure_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        parser.print_usage(sys.stderr)
        sys.stderr.write("%s\n" % err)
        return EXIT_USAGE
    _configure_logging(args.verbose)
    try:
        resolved, payload = args.handler(args)
        report = getattr(args, 'report', None)
        if report:
            resolved = dict(resolved, command=args.command)
            write_json_report(report, payload, resolved_config=resolved)
    except (TrajlabError, OSError) as err:
        LOGGER.error("%s failed: %s", args.command, err)
        return EXIT_DATA
    return EXIT_OK
