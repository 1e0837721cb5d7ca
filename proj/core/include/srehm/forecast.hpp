#ifndef SREHM_FORECAST_HPP
#define SREHM_FORECAST_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace srehm {

/// Single-input LSTM with forget/input/candidate/output gates and a scalar affine readout.
///
/// Every gate matrix is hidden x (hidden + 1), row-major, acting on the concatenation
/// [previous hidden output, current input].
struct LstmParams {
    int hidden = 8;
    int window = 12;  // input window length used for training and prediction

    std::vector<double> w_forget, w_input, w_cand, w_output;
    std::vector<double> b_forget, b_input, b_cand, b_output;
    std::vector<double> w_proj;
    double b_proj = 0.0;

    static LstmParams zeros(int hidden, int window);
    /// Uniform(-scale, scale) weights, zero biases; deterministic in `seed`.
    static LstmParams random(int hidden, int window, std::uint64_t seed, double scale = 0.1);

    std::size_t size() const;
    /// Flattened in the order: forget, input, candidate, output gate (weights then bias), projection.
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
    /// Throws InvalidArgument on inconsistent shapes or non-finite entries.
    void validate() const;
};

struct LstmState {
    std::vector<double> cell;
    std::vector<double> hidden;

    static LstmState zero(int hidden);
};

struct StepResult {
    LstmState state;
    double prediction = 0.0;  // clamped to [0,1]
};

/// One recurrent step. Throws InvalidArgument for non-finite parameters or input outside [0,1].
StepResult lstm_step(const LstmParams& params, const LstmState& state, double input);

/// Squared error of the unclamped readout after feeding `inputs` from a zero state.
double window_loss(const LstmParams& params, std::span<const double> inputs, double target);

/// Backpropagation-through-time gradient of window_loss, flattened like LstmParams::flatten().
std::vector<double> window_gradient(const LstmParams& params, std::span<const double> inputs, double target,
                                    double* loss = nullptr);

/// Mean one-step-ahead squared error over every length-`window` slice of the series.
/// With `residual` the target is the change from the last value in the slice.
double series_loss(const LstmParams& params, std::span<const double> series, bool residual = false);

struct TrainConfig {
    int epochs = 15;
    double learning_rate = 0.05;
    double clip_norm = 1.0;
    bool residual = false;  // fit the one-step change instead of the next value
};

struct TrainReport {
    std::vector<double> loss;  // loss before training, then after each epoch
};

/// Full-batch gradient descent with gradient-norm clipping. A step that would raise the
/// loss is rejected and retried at half the rate, so the reported loss never increases.
/// Throws InvalidArgument when the series is not longer than the window.
LstmParams train(const LstmParams& params, std::span<const double> series, const TrainConfig& config,
                 TrainReport* report = nullptr);

/// Runs the last `window` values (or all, if fewer) from a zero state; clamped to [0,1].
double predict_next(const LstmParams& params, std::span<const double> recent);

struct FailureEstimate {
    int pm_id = 0;
    double predicted_cpu = 0.0;
    double predicted_mem = 0.0;
    bool eta_star = false;
    double threshold = 0.85;
};

inline constexpr double kDefaultOverloadThreshold = 0.85;

/// Contention flag: true when the larger of the two predictions strictly exceeds the threshold.
bool estimate_failure(double predicted_cpu, double predicted_mem, double threshold = kDefaultOverloadThreshold);

struct ForecastConfig {
    int hidden = 8;
    int window = 12;
    double learning_rate = 0.05;
    double clip_norm = 1.0;
    int epochs = 15;
    int retrain_every = 24;
    int history = 288;
};

/// Forecaster for one utilization series. The LSTM is trained on one-step changes and the
/// prediction is the last observation plus the predicted change. Falls back to the last observed value until
/// the first training, which happens once more than `window` observations exist and
/// then every `retrain_every` slots on the trailing `history` observations.
class ResourcePredictor {
public:
    ResourcePredictor(const ForecastConfig& config, std::uint64_t seed);

    /// Trains if a retraining is due at `slot`; `history` holds observations of slots [0, slot).
    void update(std::span<const double> history, std::size_t slot);
    /// Prediction for the slot following `history`; 0 with no history.
    double predict(std::span<const double> history) const;

    bool trained() const { return trained_; }
    const LstmParams& params() const { return params_; }

private:
    bool due(std::size_t slot) const;

    ForecastConfig config_;
    LstmParams params_;
    bool trained_ = false;
};

}  // namespace srehm

#endif  // SREHM_FORECAST_HPP
