"""Dataset synthesis, dense-network training and accuracy estimation.

The localizer is a fully connected network (tanh hidden layers, identity
output) trained with mini-batch gradient descent with adaptive moments on
mean squared position error. Inputs are standardized over the training split
and targets scaled to [-1, 1]; both transformations are stored with the model
and undone at inference. All randomness flows through explicit seeds.
"""
from dataclasses import dataclass, field

import numpy as np

from .control import TWO_PI, wrap_pm_pi
from .errors import InvalidArgumentError, NumericFailureError, TrainingFailureError
from .fisher import _ScenarioKernel
from .geometry import Visibility, mirror_image


@dataclass(frozen=True)
class AreaSpec:
    """Axis-aligned service rectangle at a fixed UE height."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    z: float = 1.5

    def __post_init__(self):
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise InvalidArgumentError("area extents must be positive")


def area_grid(area, step):
    """Cell-centre grid covering the area; degenerates to the single centre
    point when the step exceeds an extent."""
    if step <= 0:
        raise InvalidArgumentError("grid step must be positive")

    def centers(lo, hi):
        n = max(1, int(np.floor((hi - lo) / step + 1e-9)))
        return lo + (np.arange(n) + 0.5) * ((hi - lo) / n if n == 1 else step)

    xs = centers(area.x_min, area.x_max)
    ys = centers(area.y_min, area.y_max)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel(), np.full(xx.size, area.z)])


@dataclass(frozen=True)
class Dataset:
    """Feature rows paired with the generating UE positions.

    The train/test partition is a pure function of (row count, split_seed,
    train_fraction), so column-subset views keep identical row splits.
    """

    positions: np.ndarray   # (R, 3)
    features: np.ndarray    # (R, F)
    split_seed: int = 0
    train_fraction: float = 0.75

    def __post_init__(self):
        if self.positions.shape[0] != self.features.shape[0]:
            raise InvalidArgumentError("positions and features row counts differ")
        if not 0 < self.train_fraction < 1:
            raise InvalidArgumentError("train_fraction must be in (0, 1)")

    @property
    def n_rows(self):
        return self.positions.shape[0]

    def _permutation(self):
        return np.random.default_rng(self.split_seed).permutation(self.n_rows)

    def train_indices(self):
        perm = self._permutation()
        return perm[:int(round(self.n_rows * self.train_fraction))]

    def test_indices(self):
        perm = self._permutation()
        return perm[int(round(self.n_rows * self.train_fraction)):]

    def subset_features(self, columns):
        return Dataset(self.positions, self.features[:, columns],
                       split_seed=self.split_seed, train_fraction=self.train_fraction)


def _encode_phase_matrix(phases, quantized, q_bits):
    """Feature encoding of configuration phases, vectorized over rows.

    One-bit lattices map {0, pi} to {+1, -1}; everything else is the wrapped
    radian value in (-pi, pi].
    """
    if quantized and q_bits == 1:
        m = np.floor(phases / np.pi + 0.5).astype(np.int64) % 2
        return (1 - 2 * m).astype(float)
    return wrap_pm_pi(phases)


def encode_features(config, mode):
    """Feature vector of one configuration; ``mode`` is "binary" or "continuous"."""
    if mode == "binary":
        if not (config.quantized and config.q_bits == 1):
            raise InvalidArgumentError("binary encoding needs a 1-bit quantized configuration")
        return _encode_phase_matrix(config.phases[None, :], True, 1)[0]
    if mode == "continuous":
        return _encode_phase_matrix(config.phases[None, :], False, 0)[0]
    raise InvalidArgumentError(f"unknown encoding mode: {mode!r}")


def generate_dataset(scenario, area, grid_step, noise_sigma, examples_per_point=1,
                     rng_seed=0, train_fraction=0.75):
    """Synthesize (configuration, position) rows over a grid of UE positions.

    Each grid point contributes ``examples_per_point`` rows: the noiseless
    coherent configuration plus independent phase noise, quantized when the
    scenario uses a discrete lattice. Positions excluded by the obstacle
    scene are dropped; reflected ones use their image-path configuration.
    Deterministic for a given seed.
    """
    if examples_per_point < 1:
        raise InvalidArgumentError("examples_per_point must be at least 1")
    grid = area_grid(area, grid_step)
    kern = _ScenarioKernel(scenario)

    if scenario.scene is not None:
        vis = np.array([kern.visibility(u) for u in grid])
        keep = vis != Visibility.EXCLUDED
        grid = grid[keep]
        vis = vis[keep]
        u_ru = grid.copy()
        for i in np.flatnonzero(vis == Visibility.REFLECTED):
            u_ru[i] = mirror_image(scenario.scene, grid[i])
    else:
        u_ru = grid
    if grid.shape[0] == 0:
        raise InvalidArgumentError("no usable grid points in the area")

    theta_star = kern.phases(u_ru, grid)  # (P, N)
    q = scenario.quantization_bits
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed))
    blocks, pos_blocks = [], []
    for _ in range(examples_per_point):
        noisy = theta_star + noise_sigma * rng.standard_normal(theta_star.shape)
        noisy %= TWO_PI
        if q >= 1:
            n_bins = 1 << q
            delta = TWO_PI / n_bins
            m = np.floor(noisy / delta + 0.5).astype(np.int64) % n_bins
            blocks.append(_encode_phase_matrix(delta * m, True, q))
        else:
            blocks.append(_encode_phase_matrix(noisy, False, 0))
        pos_blocks.append(grid)
    return Dataset(positions=np.concatenate(pos_blocks),
                   features=np.concatenate(blocks),
                   split_seed=rng_seed, train_fraction=train_fraction)


@dataclass
class Hyperparams:
    lr: float = 1e-3
    batch: int = 64
    max_epochs: int = 2000
    patience: int = 20
    min_rel_delta: float = 1e-4
    seed: int = 0
    val_fraction: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class MlpModel:
    """Dense network: weights[k] has shape (L_{k+1}, L_k); hidden activations
    are hyperbolic tangents, the output is linear. Normalization statistics
    are optional and applied by ``predict``."""

    layer_sizes: list
    weights: list
    biases: list
    input_mean: np.ndarray | None = None
    input_std: np.ndarray | None = None
    target_center: np.ndarray | None = None
    target_halfspan: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_parameters(self):
        return param_count(self.layer_sizes)


def param_count(layer_sizes):
    return int(sum(layer_sizes[k] * layer_sizes[k + 1] + layer_sizes[k + 1]
                   for k in range(len(layer_sizes) - 1)))


@dataclass(frozen=True)
class OpCount:
    multiplications: int
    additions: int
    activations: int


def op_count(layer_sizes):
    """Inference operation counts for a linear-output dense network."""
    if len(layer_sizes) < 2:
        raise InvalidArgumentError("a network needs at least input and output layers")
    links = sum(layer_sizes[k] * layer_sizes[k + 1] for k in range(len(layer_sizes) - 1))
    hidden = sum(layer_sizes[1:-1])
    return OpCount(multiplications=int(links), additions=int(links), activations=int(hidden))


def mlp_init(layer_sizes, rng):
    """Uniform initialization in +-sqrt(6 / (fan_in + fan_out))."""
    weights, biases = [], []
    for k in range(len(layer_sizes) - 1):
        fan_in, fan_out = layer_sizes[k], layer_sizes[k + 1]
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, (fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(layer_sizes=list(layer_sizes), weights=weights, biases=biases)


def mlp_forward(model, x):
    """Raw network function (no normalization): tanh hidden, identity output."""
    x = np.asarray(x, float)
    single = x.ndim == 1
    z = x[None, :] if single else x
    if z.shape[1] != model.layer_sizes[0]:
        raise InvalidArgumentError(f"input width {z.shape[1]} does not match layer size "
                                   f"{model.layer_sizes[0]}")
    last = len(model.weights) - 1
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = z @ w.T + b
        if k != last:
            z = np.tanh(z)
    return z[0] if single else z


def _forward_cached(model, x):
    acts = [x]
    z = x
    last = len(model.weights) - 1
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = z @ w.T + b
        if k != last:
            z = np.tanh(z)
        acts.append(z)
    return acts


def mlp_loss_and_grads(model, x, y):
    """Mean squared error over batch and outputs, with its parameter gradients."""
    x = np.atleast_2d(np.asarray(x, float))
    y = np.atleast_2d(np.asarray(y, float))
    acts = _forward_cached(model, x)
    out = acts[-1]
    diff = out - y
    loss = float(np.mean(diff * diff))
    scale = 2.0 / diff.size
    delta = scale * diff
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    for k in range(len(model.weights) - 1, -1, -1):
        a_prev = acts[k]
        grads_w[k] = delta.T @ a_prev
        grads_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ model.weights[k]) * (1.0 - acts[k] * acts[k])
    return loss, grads_w, grads_b


def predict(model, x):
    """Network output in physical units, applying the stored normalization."""
    x = np.atleast_2d(np.asarray(x, float))
    if model.input_mean is not None:
        x = (x - model.input_mean) / model.input_std
    out = mlp_forward(model, x)
    if model.target_center is not None:
        out = out * model.target_halfspan + model.target_center
    return out


def train_regressor(x, y, layer_sizes, hp=None):
    """Fit a dense network to (x, y) pairs; returns the normalized model.

    Training stops when the validation MSE has not improved by
    ``min_rel_delta`` (relative) for ``patience`` consecutive epochs, or at
    ``max_epochs``. The best-validation parameters are restored. A NaN loss
    aborts with diagnostics.
    """
    hp = hp or Hyperparams()
    x = np.asarray(x, float)
    y = np.atleast_2d(np.asarray(y, float))
    if y.shape[0] == 1 and x.shape[0] != 1:
        y = y.T
    if x.shape[0] != y.shape[0] or x.shape[0] == 0:
        raise InvalidArgumentError("x and y must pair a nonempty set of rows")
    if list(layer_sizes)[0] != x.shape[1] or list(layer_sizes)[-1] != y.shape[1]:
        raise InvalidArgumentError("layer sizes must match data widths")

    ss = np.random.SeedSequence(hp.seed)
    init_rng, shuffle_rng, val_rng = (np.random.default_rng(s) for s in ss.spawn(3))

    n = x.shape[0]
    n_val = int(round(hp.val_fraction * n)) if n >= 20 else 0
    order = val_rng.permutation(n)
    val_idx, fit_idx = order[:n_val], order[n_val:]
    if n_val == 0:
        val_idx = fit_idx

    mean = x[fit_idx].mean(axis=0)
    std = x[fit_idx].std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    lo, hi = y[fit_idx].min(axis=0), y[fit_idx].max(axis=0)
    center = (hi + lo) / 2.0
    halfspan = np.maximum((hi - lo) / 2.0, 1e-12)

    xs = (x - mean) / std
    ys = (y - center) / halfspan
    model = mlp_init(layer_sizes, init_rng)

    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    step = 0

    def val_mse():
        diff = mlp_forward(model, xs[val_idx]) - ys[val_idx]
        return float(np.mean(diff * diff))

    best = np.inf
    best_params = None
    stall = 0
    epochs_run = 0
    for epoch in range(hp.max_epochs):
        epochs_run = epoch + 1
        perm = shuffle_rng.permutation(fit_idx.size)
        for start in range(0, fit_idx.size, hp.batch):
            rows = fit_idx[perm[start:start + hp.batch]]
            loss, gw, gb = mlp_loss_and_grads(model, xs[rows], ys[rows])
            if not np.isfinite(loss):
                raise TrainingFailureError(
                    f"loss became non-finite at epoch {epoch}, step {step} (lr={hp.lr})")
            step += 1
            bc1 = 1.0 - hp.beta1 ** step
            bc2 = 1.0 - hp.beta2 ** step
            for k in range(len(model.weights)):
                m_w[k] = hp.beta1 * m_w[k] + (1 - hp.beta1) * gw[k]
                v_w[k] = hp.beta2 * v_w[k] + (1 - hp.beta2) * gw[k] * gw[k]
                model.weights[k] -= hp.lr * (m_w[k] / bc1) / (np.sqrt(v_w[k] / bc2) + hp.eps)
                m_b[k] = hp.beta1 * m_b[k] + (1 - hp.beta1) * gb[k]
                v_b[k] = hp.beta2 * v_b[k] + (1 - hp.beta2) * gb[k] * gb[k]
                model.biases[k] -= hp.lr * (m_b[k] / bc1) / (np.sqrt(v_b[k] / bc2) + hp.eps)
        current = val_mse()
        if current < best * (1.0 - hp.min_rel_delta):
            best = current
            best_params = ([w.copy() for w in model.weights], [b.copy() for b in model.biases])
            stall = 0
        else:
            stall += 1
            if stall >= hp.patience:
                break
    if best_params is not None:
        model.weights, model.biases = best_params

    model.input_mean = mean
    model.input_std = std
    model.target_center = center
    model.target_halfspan = halfspan
    model.meta = {"seed": hp.seed, "epochs_run": epochs_run, "best_val_mse": best}
    return model


def mlp_train(dataset, layer_sizes, hp=None):
    """Train the position estimator on the dataset's training split."""
    idx = dataset.train_indices()
    return train_regressor(dataset.features[idx], dataset.positions[idx, :2], layer_sizes, hp)


def _rolling(series, window):
    if series.size < window:
        window = series.size
    view = np.lib.stride_tricks.sliding_window_view(series, window)
    med = np.median(view, axis=1)
    q75, q25 = np.percentile(view, [75, 25], axis=1)
    return med, q75 - q25


@dataclass
class EvalReport:
    mean_error: float
    errors: np.ndarray
    distances: np.ndarray
    radial_errors: np.ndarray
    azimuth_errors: np.ndarray
    rolling_distance: np.ndarray
    rolling_radial_median: np.ndarray
    rolling_radial_iqr: np.ndarray
    rolling_azimuth_median: np.ndarray
    rolling_azimuth_iqr: np.ndarray


def evaluate_localization(model, dataset, ris_position, window=100):
    """Test-split localization report with polar error decomposition.

    Errors are planar distances between true and estimated positions. The
    radial error is the absolute difference of distances to the surface and
    the azimuth error the wrapped bearing difference; both are reported
    against the true surface distance with a rolling median and interquartile
    range.
    """
    from .control import angdiff

    idx = dataset.test_indices()
    if idx.size == 0:
        raise InvalidArgumentError("dataset has no test rows")
    truth = dataset.positions[idx, :2]
    est = predict(model, dataset.features[idx])
    errors = np.linalg.norm(est - truth, axis=1)
    r = np.asarray(ris_position, float)[:2]
    d_true = np.linalg.norm(truth - r, axis=1)
    d_est = np.linalg.norm(est - r, axis=1)
    radial = np.abs(d_est - d_true)
    az_true = np.arctan2(truth[:, 1] - r[1], truth[:, 0] - r[0])
    az_est = np.arctan2(est[:, 1] - r[1], est[:, 0] - r[0])
    azimuth = angdiff(az_est, az_true)

    order = np.argsort(d_true, kind="stable")
    d_sorted = d_true[order]
    rad_med, rad_iqr = _rolling(radial[order], window)
    az_med, az_iqr = _rolling(azimuth[order], window)
    dist_med, _ = _rolling(d_sorted, window)
    return EvalReport(
        mean_error=float(errors.mean()),
        errors=errors, distances=d_true,
        radial_errors=radial, azimuth_errors=azimuth,
        rolling_distance=dist_med,
        rolling_radial_median=rad_med, rolling_radial_iqr=rad_iqr,
        rolling_azimuth_median=az_med, rolling_azimuth_iqr=az_iqr)


def fi_rank_features(avg_info, order, seed=None):
    """Feature permutation by average information; ties stay index-ordered."""
    avg_info = np.asarray(avg_info, float)
    if order == "descending":
        return np.argsort(-avg_info, kind="stable")
    if order == "ascending":
        return np.argsort(avg_info, kind="stable")
    if order == "random":
        return np.random.default_rng(seed).permutation(avg_info.size)
    raise InvalidArgumentError(f"unknown ranking order: {order!r}")


@dataclass(frozen=True)
class ReductionPoint:
    k: int
    mean_error: float
    layer_sizes: list
    ops: OpCount
    n_parameters: int


def select_and_retrain(dataset, ranking, k_list, hidden_sizes, hp=None):
    """Error-versus-input-count curve for a feature ranking.

    For each k the first k ranked features feed a network with the given
    hidden sizes; the mean test error and inference operation counts are
    recorded. Row splits are shared across k values.
    """
    ranking = np.asarray(ranking)
    out = []
    for k in k_list:
        if k < 1 or k > dataset.features.shape[1]:
            raise InvalidArgumentError(f"cannot select {k} of {dataset.features.shape[1]} features")
        sub = dataset.subset_features(ranking[:k])
        layers = [int(k), *list(hidden_sizes), 2]
        model = mlp_train(sub, layers, hp)
        idx = sub.test_indices()
        est = predict(model, sub.features[idx])
        err = float(np.linalg.norm(est - sub.positions[idx, :2], axis=1).mean())
        out.append(ReductionPoint(k=int(k), mean_error=err, layer_sizes=layers,
                                  ops=op_count(layers), n_parameters=param_count(layers)))
    return out


def train_config_regressor(dataset, hidden_sizes, hp=None):
    """Surrogate of the configuration process: position in, features out."""
    idx = dataset.train_indices()
    layers = [2, *list(hidden_sizes), dataset.features.shape[1]]
    return train_regressor(dataset.positions[idx, :2], dataset.features[idx], layers, hp)


def mlp_jacobian(model, x):
    """Jacobian of ``predict`` at one input, physical units on both sides."""
    x = np.asarray(x, float).reshape(-1)
    if model.input_mean is not None:
        z = (x - model.input_mean) / model.input_std
        tangent = np.diag(1.0 / model.input_std)
    else:
        z = x
        tangent = np.eye(x.size)
    last = len(model.weights) - 1
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = w @ z + b
        tangent = w @ tangent
        if k != last:
            z = np.tanh(z)
            tangent = (1.0 - z * z)[:, None] * tangent
    if model.target_halfspan is not None:
        tangent = model.target_halfspan[:, None] * tangent
    return tangent


def gradient_accuracy_estimate(config_fn, u_hat, calibration_c=1.0, fd_step=1e-3):
    """Accuracy proxy from the local sensitivity of the configuration map.

    The Jacobian of the position-to-configuration function at the estimate is
    evaluated analytically through a surrogate network or by central
    differences through a callable; the returned value is
    ``calibration_c * sqrt(tr(gram^-1))`` of its D x D Gram matrix. A
    rank-deficient Gram matrix yields the unlocalizable marker (inf).
    """
    u = np.asarray(u_hat, float).reshape(-1)[:2]
    if isinstance(config_fn, MlpModel):
        jac = mlp_jacobian(config_fn, u)
    else:
        cols = []
        for d in range(2):
            e = np.zeros(2)
            e[d] = fd_step
            cols.append((np.asarray(config_fn(u + e), float) -
                         np.asarray(config_fn(u - e), float)) / (2 * fd_step))
        jac = np.stack(cols, axis=1)
    gram = jac.T @ jac
    eig = np.linalg.eigvalsh(gram)
    if eig[0] <= 0 or eig[-1] / eig[0] >= 1e12:
        return np.inf
    return float(calibration_c * np.sqrt(np.trace(np.linalg.inv(gram))))


def fit_error_calibration(raw_estimates, actual_errors):
    """Scale factor making the mean predicted error equal the mean actual one."""
    raw = np.asarray(raw_estimates, float)
    act = np.asarray(actual_errors, float)
    finite = np.isfinite(raw)
    if not finite.any() or raw[finite].mean() <= 0:
        raise NumericFailureError("cannot calibrate on degenerate raw estimates")
    return float(act[finite].mean() / raw[finite].mean())


def train_error_predictor(features, abs_errors, hidden_sizes, hp=None):
    """Regressor from configuration features to the error magnitude."""
    features = np.asarray(features, float)
    abs_errors = np.asarray(abs_errors, float).reshape(-1, 1)
    layers = [features.shape[1], *list(hidden_sizes), 1]
    return train_regressor(features, abs_errors, layers, hp)


# ---------------------------------------------------------------------------
# Text serialization: datasets as CSV, models as labelled float arrays.

def save_dataset_csv(dataset, path):
    n_feat = dataset.features.shape[1]
    header = "ux,uy," + ",".join(f"f_{i + 1}" for i in range(n_feat))
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for pos, feat in zip(dataset.positions, dataset.features):
            row = [f"{pos[0]:.17g}", f"{pos[1]:.17g}"] + [f"{v:.17g}" for v in feat]
            fh.write(",".join(row) + "\n")


def load_dataset_csv(path, ue_z=1.5, split_seed=0, train_fraction=0.75):
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    data = np.atleast_2d(data)
    positions = np.column_stack([data[:, 0], data[:, 1], np.full(data.shape[0], ue_z)])
    return Dataset(positions=positions, features=data[:, 2:],
                   split_seed=split_seed, train_fraction=train_fraction)


def save_model(model, path):
    """Structured text: layer sizes, then row-major weight and bias arrays and
    normalization vectors, 17 significant digits."""
    def fmt(arr):
        return " ".join(f"{v:.17g}" for v in np.asarray(arr, float).ravel())

    with open(path, "w") as fh:
        fh.write("layers " + " ".join(str(s) for s in model.layer_sizes) + "\n")
        for k, (w, b) in enumerate(zip(model.weights, model.biases)):
            fh.write(f"W{k} {fmt(w)}\n")
            fh.write(f"b{k} {fmt(b)}\n")
        for name in ("input_mean", "input_std", "target_center", "target_halfspan"):
            arr = getattr(model, name)
            if arr is not None:
                fh.write(f"{name} {fmt(arr)}\n")


def load_model(path):
    entries = {}
    layer_sizes = None
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "layers":
                layer_sizes = [int(v) for v in parts[1:]]
            else:
                entries[parts[0]] = np.array([float(v) for v in parts[1:]])
    if layer_sizes is None:
        raise InvalidArgumentError(f"{path} is not a model file (missing 'layers' line)")
    weights, biases = [], []
    for k in range(len(layer_sizes) - 1):
        shape = (layer_sizes[k + 1], layer_sizes[k])
        weights.append(entries[f"W{k}"].reshape(shape))
        biases.append(entries[f"b{k}"])
    model = MlpModel(layer_sizes=layer_sizes, weights=weights, biases=biases)
    for name in ("input_mean", "input_std", "target_center", "target_halfspan"):
        if name in entries:
            setattr(model, name, entries[name])
    return model
