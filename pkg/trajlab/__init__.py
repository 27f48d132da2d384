# -*- coding: utf-8 -*-
"""
    trajlab
    ~~~~~~~

    Trajectory dataset toolkit: abruptness and displacement metrics,
    qualitative classification, clustering, kinematic and interaction
    generators, small networks, a policy-gradient pedestrian and
    statistics-matched synthetic datasets.

    :license: BSD, see LICENSE for more details.
"""
# flake8: noqa

from trajlab._core import Point2, Rect, Trajectory, Scene, Dataset, SeededRng, tight_bbox
from trajlab._const import (
    # Qualitative classes
    CLASS_STATIONARY, CLASS_BOUNDED_SMALL, CLASS_FLYING_SMALL,
    CLASS_BOUNDED_LARGE, CLASS_FLYING_LARGE, CLASS_LOOP, CLASS_HAPHAZARD,
    CLASS_BACKTRACKER, CLASS_LINEAR, CLASS_UNCLASSIFIED, QUAL_CLASSES,
    # Trajectory shape
    DEFAULT_OBS_LEN, DEFAULT_PRED_LEN, DEFAULT_DT,
    # Baseline predictors
    PREDICTOR_CONSTANT_VELOCITY, PREDICTOR_LINEAR_FIT, PREDICTOR_STATIONARY,
    # Attributes of reports
    ATTR_RESOLVED_CONFIG,
    ATTR_ADE,
    ATTR_FDE,
    ATTR_PER_CLASS,
)
from trajlab._exceptions import (
    TrajlabError,
    DataError,
    ParseError,
    EmptyDatasetError,
    LengthMismatchError,
    TrajectoryLengthError,
    MissingStateLogError,
    InsufficientPoolError,
    DatasetIOError,
    ConfigError,
    InvalidTransitionError,
    OverlappingAgentsError,
    InfeasibleTargetError,
    NeuralError,
    ShapeMismatchError,
    BackwardBeforeForwardError,
    NonFiniteOutputError,
    SynthesisError)
from trajlab._io import (
    parse_dataset, format_dataset, write_dataset, write_json_report, read_json,
    write_csv, read_signal_csv, write_state_log, read_state_log, attach_state_log)
from trajlab._metrics import (
    turn_score, abscore, AbScoreReport, ade, fde, displacement_errors,
    EvalConfig, EvalReport, evaluate)
from trajlab._analysis import (
    ClassifierThresholds, DatasetProfile, unique_points, circular_variance,
    classify, profile, trajectory_rows)
from trajlab._cluster import (
    NormKind, Clustering, traj_distance, distance_matrix, kmedoids, bbox_cluster)
from trajlab._genkin import (
    Range2, NewtonSpec, NoiseSpec, NoisyNewtonSpec, CurveSpec, gen_newton,
    add_noise, gen_noisy, gen_curve, gen_batch)
from trajlab._hmm import (
    HmmState, HmmAgentConfig, SceneConfig, HmmSceneSimulator,
    validate_transition, default_transition, sample_chain,
    stationary_distribution, simulate_scene, estimate_state_occupancy)
from trajlab._neural import (
    Layer, Gradients, Mlp, FitResult, siren_init, default_init, forward,
    backward, sgd_step, mse_loss, fit_signal)
from trajlab._rlsim import (
    AgentProfile, AgentState, RlEnvConfig, EpisodeLog, TrainConfig,
    LearningCurve, reward_fn, episode_rewards, featurize, gaussian_logprob,
    gaussian_score, policy_act, run_episode, policy_loss, policy_gradient,
    reinforce_update, train, rollout_dataset)
from trajlab._synsdd import (
    ProfileTarget, MixSpec, feasible_unique_counts, allocate, gen_synsdd,
    rt_augment, mix)
from trajlab._evalbase import Predictor, predict, run_eval, eval_rows
