# -*- coding: utf-8 -*-
""" Command line of the ARIS-ISAC experiments: ``train``, ``eval`` and ``compare``. """
import argparse
import logging
import os
import random

import numpy as np
import torch

from .configuration_utils import ConfigError, ExperimentConfig, db_to_linear, load_config, parse_overrides
from .experiment import compare_schemes, run_experiment

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(name)s - %(funcName)s - %(message)s'

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2

DEFAULT_EVAL_DIR = os.path.join('output', 'eval')


def seed_everything(seed=1029):
    random.seed(seed)
    os.environ['PYTHONHASHSEED'] = str(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)
    if torch.cuda.is_available():
        torch.cuda.manual_seed_all(seed)
    torch.backends.cudnn.deterministic = True


def set_logger(log_file=None, clean=False):
    """ Root logger writing to the console and, when given, to ``log_file``. """
    root = logging.getLogger()
    root.setLevel(logging.DEBUG)
    formatter = logging.Formatter(LOG_FORMAT, datefmt='%m/%d/%Y %H:%M:%S')
    if not any(isinstance(h, logging.StreamHandler) and not isinstance(h, logging.FileHandler)
               for h in root.handlers):
        ch = logging.StreamHandler()
        ch.setLevel(logging.INFO)
        ch.setFormatter(formatter)
        root.addHandler(ch)
    if log_file is not None:
        fh = logging.FileHandler(log_file, mode='w' if clean else 'a', encoding='utf-8')
        fh.setFormatter(formatter)
        root.addHandler(fh)
    return root


def build_parser():
    parser = argparse.ArgumentParser(prog='aris_isac',
                                     description="Trajectory and beamforming experiments for ARIS-assisted ISAC")
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, help="JSON configuration file")
    common.add_argument('--scheme', default=None, help="proposed, fixed-ris or no-nsp")
    common.add_argument('--seed', type=int, default=None, help="master seed")
    common.add_argument('--episodes', type=int, default=None, help="training episodes (E_max)")
    common.add_argument('--gamma', type=float, default=None, help="discount factor")
    common.add_argument('--out', default=None, help="output directory")
    common.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                        help="override any configuration key, e.g. --set p_ap_dbm=40")

    subparsers.add_parser('train', parents=[common], help="train the agent, then evaluate it")
    eval_parser = subparsers.add_parser('eval', parents=[common], help="evaluate a saved checkpoint")
    eval_parser.add_argument('--checkpoint', required=True, help="checkpoint directory written by train")
    compare_parser = subparsers.add_parser('compare', parents=[common], help="compare schemes over seeds")
    compare_parser.add_argument('--schemes', nargs='+', default=['proposed', 'fixed-ris', 'no-nsp'])
    compare_parser.add_argument('--num-seeds', type=int, default=5)
    compare_parser.add_argument('--sinr-db', nargs='+', type=float, default=None,
                                help="sweep of Gamma_th values in dB")
    compare_parser.add_argument('--workers', type=int, default=None, help="worker processes, 1 runs in-process")
    return parser


def resolve_config(args):
    """ Command-line configuration. ``eval`` starts from the configuration saved with the checkpoint,
        so only the flags given explicitly change the evaluated scenario.
    """
    overrides = parse_overrides(args.set)
    for key, value in (('scheme', args.scheme), ('seed', args.seed), ('episodes', args.episodes),
                       ('gamma', args.gamma), ('output_dir', args.out)):
        if value is not None:
            overrides[key] = value
    base = None
    if args.command == 'eval':
        base = ExperimentConfig.from_pretrained(args.checkpoint)
        if base is not None:
            base.output_dir = DEFAULT_EVAL_DIR
    return load_config(args.config, overrides, base=base)


def _prepare_output(config):
    if not os.path.exists(config.output_dir):
        os.makedirs(config.output_dir)
    set_logger(os.path.join(config.output_dir, 'log.txt'), clean=True)
    seed_everything(config.seed)


def command_train(args, config):
    _prepare_output(config)
    result = run_experiment(config, output_dir=config.output_dir)
    logger.info("Final reward %.6g, final SEE %.6g m^2", result.final_reward(), result.final_see)


def command_eval(args, config):
    _prepare_output(config)
    result = run_experiment(config, checkpoint=args.checkpoint, output_dir=config.output_dir)
    logger.info("Evaluation reward %.6g, final SEE %.6g m^2", result.eval_reward, result.final_see)


def command_compare(args, config):
    if args.num_seeds < 1:
        raise ConfigError("Invalid value for '--num-seeds': must be >= 1, got {}".format(args.num_seeds))
    _prepare_output(config)
    thresholds = [config.sinr_threshold] if args.sinr_db is None else [db_to_linear(v) for v in args.sinr_db]
    base = config.to_dict()
    configs = [ExperimentConfig.from_dict(dict(base, scheme=s, sinr_threshold=t))
               for s in args.schemes for t in thresholds]
    seeds = range(config.seed, config.seed + args.num_seeds)
    summary = compare_schemes(configs, seeds, output_dir=config.output_dir, max_workers=args.workers)
    logger.info("Summary:\n%s", summary.to_string(index=False))


COMMANDS = {'train': command_train, 'eval': command_eval, 'compare': command_compare}


def run(argv=None):
    """ Parse ``argv`` and run the command. Returns the process exit code. """
    args = build_parser().parse_args(argv)
    set_logger()
    try:
        config = resolve_config(args)
        COMMANDS[args.command](args, config)
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIG_ERROR
    except Exception as e:
        logger.exception("Run failed: %s", e)
        return EXIT_RUNTIME_ERROR
    return EXIT_OK
