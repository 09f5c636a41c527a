__version__ = "0.1.0"
from .geometry import (DegenerateGeometryError, Position3, Velocity2, MapSpec,
                       advance, in_bounds, distance, doa_sine)
from .channel import (ChannelParams, StaticScattering, ChannelSet, ap_ris_channel, ris_user_channel,
                      steering, two_way_gain, si_channel, clutter_response, target_response, realize_channels)
from .beamforming import (NspDegenerateError, LinkBudget, BeamformingSolution, effective_user_channel, sinr,
                          align_phases_to_target, optimize_phases_and_beamformers, nsp_receive_beamformer,
                          matched_receive_beamformer, residual_interference_power,
                          interference_power_before_receiver)
from .sensing import (NoEchoError, SingularGeometryError, SensingParams, MeasurementSet, FisherResult,
                      LocationEstimate, variance_from_snr, measurement_variance, sample_measurement,
                      fim_distances, coordinate_fim, mle_localize)
from .environment import SchemeId, Scene, MdpState, StepOutcome, IsacEnvironment
from .modeling_ddpg import (CONFIG_NAME, WEIGHTS_NAME, DdpgConfig, ActorNetwork, CriticNetwork, DdpgModel,
                            soft_update)
from .optimization import ConstantNoiseSchedule, ExponentialNoiseSchedule, explore, build_optimizers
from .agent import (Transition, ReplayBuffer, TrainConfig, TrainingHistory, td_target, critic_loss,
                    actor_objective, update, evaluate_policy, train)
from .configuration_utils import ConfigError, ExperimentConfig, load_config, parse_overrides
from .experiment import ResultTrace, run_experiment, compare_schemes
