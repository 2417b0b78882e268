"""Opportunistic localization from reflective-surface configurations.

Subpackages: geometry (deployment and channels), control (configuration
selection, noise, quantization, rate), phasestats (noisy-phase statistics),
fisher (information and accuracy bounds), learn (datasets and estimators),
cli (command-line front end). The numeric hot kernels run on a compiled
extension when available; ``backend_name()`` reports which one is active.
"""
from ._backend import BACKEND as _BACKEND
from .control import (ElementPmf, Precoder, RisConfig, achievable_rate,
                      angdiff, apply_phase_noise, coherent_config,
                      grid_search_estimator, ideal_config, mrt_precoder,
                      quantize_config, quantized_element_pmf, sigma_from_snr)
from .fisher import (AoaResult, AreaMetricParams, FiMapResult, aoa_baseline,
                     area_metric, average_element_information, crb_accuracy,
                     element_fi_binary, element_fi_general, fi_map,
                     pmf_log_gradient, total_fi)
from .geometry import (ChannelSet, NlosScene, PathLossParams, RisLayout,
                       Scenario, Visibility, array_response,
                       assemble_channels, build_upa_layout,
                       classify_visibility, make_scene, mirror_image,
                       path_gain, vec3)
from .learn import (AreaSpec, Dataset, EvalReport, Hyperparams, MlpModel,
                    area_grid, encode_features, evaluate_localization,
                    fi_rank_features, generate_dataset,
                    gradient_accuracy_estimate, mlp_forward, mlp_train,
                    op_count, param_count, select_and_retrain,
                    train_config_regressor, train_error_predictor)
from .phasestats import (PhaseDistParams, erf, gaussian_approx_pdf,
                         ks_distance, marginal_theta_pdf, rayleigh_pdf,
                         sample_phase)

__version__ = "0.1.0"


def backend_name():
    """Active kernel backend: "compiled" or "python"."""
    return _BACKEND
