#include "srehm/forecast.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "srehm/error.hpp"

namespace srehm {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t in_size(const LstmParams& p) { return static_cast<std::size_t>(p.hidden) + 1; }

// Visits the parameter blocks in flatten() order.
template <typename P, typename Fn>
void for_each_block(P& p, Fn&& fn) {
    fn(p.w_forget);
    fn(p.b_forget);
    fn(p.w_input);
    fn(p.b_input);
    fn(p.w_cand);
    fn(p.b_cand);
    fn(p.w_output);
    fn(p.b_output);
    fn(p.w_proj);
}

struct StepCache {
    std::vector<double> z;  // [h_prev, x]
    std::vector<double> f, i, g, o;
    std::vector<double> c_prev, c, tanh_c;
};

void affine(const std::vector<double>& w, const std::vector<double>& b, const std::vector<double>& z,
            std::vector<double>& out) {
    const std::size_t rows = b.size();
    const std::size_t cols = z.size();
    out.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = b[r];
        const double* row = w.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * z[c];
        out[r] = acc;
    }
}

// Forward step without validation; fills the cache used by backpropagation.
void forward_step(const LstmParams& p, const std::vector<double>& h_prev, const std::vector<double>& c_prev,
                  double x, StepCache& k) {
    const auto H = static_cast<std::size_t>(p.hidden);
    k.z.assign(h_prev.begin(), h_prev.end());
    k.z.push_back(x);
    affine(p.w_forget, p.b_forget, k.z, k.f);
    affine(p.w_input, p.b_input, k.z, k.i);
    affine(p.w_cand, p.b_cand, k.z, k.g);
    affine(p.w_output, p.b_output, k.z, k.o);
    k.c_prev = c_prev;
    k.c.resize(H);
    k.tanh_c.resize(H);
    for (std::size_t j = 0; j < H; ++j) {
        k.f[j] = sigmoid(k.f[j]);
        k.i[j] = sigmoid(k.i[j]);
        k.g[j] = std::tanh(k.g[j]);
        k.o[j] = sigmoid(k.o[j]);
        k.c[j] = k.f[j] * c_prev[j] + k.i[j] * k.g[j];
        k.tanh_c[j] = std::tanh(k.c[j]);
    }
}

std::vector<double> hidden_of(const StepCache& k) {
    std::vector<double> h(k.c.size());
    for (std::size_t j = 0; j < h.size(); ++j) h[j] = k.o[j] * k.tanh_c[j];
    return h;
}

double readout(const LstmParams& p, const std::vector<double>& h) {
    return std::inner_product(h.begin(), h.end(), p.w_proj.begin(), p.b_proj);
}

// Runs a window from the zero state; returns the unclamped readout.
double run_window(const LstmParams& p, std::span<const double> inputs, std::vector<StepCache>* caches) {
    const auto H = static_cast<std::size_t>(p.hidden);
    std::vector<double> h(H, 0.0), c(H, 0.0);
    StepCache local;
    if (caches) caches->resize(inputs.size());
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        StepCache& k = caches ? (*caches)[t] : local;
        forward_step(p, h, c, inputs[t], k);
        h = hidden_of(k);
        c = k.c;
    }
    return readout(p, h);
}

LstmParams zero_like(const LstmParams& p) { return LstmParams::zeros(p.hidden, p.window); }

double window_gradient_into(const LstmParams& p, std::span<const double> inputs, double target, LstmParams& g) {
    const auto H = static_cast<std::size_t>(p.hidden);
    const std::size_t Z = in_size(p);
    std::vector<StepCache> caches;
    const double y = run_window(p, inputs, &caches);
    const double err = y - target;
    const double dy = 2.0 * err;

    std::vector<double> h_last = caches.empty() ? std::vector<double>(H, 0.0) : hidden_of(caches.back());
    for (std::size_t j = 0; j < H; ++j) g.w_proj[j] += dy * h_last[j];
    g.b_proj += dy;

    std::vector<double> dh(H), dc(H, 0.0);
    for (std::size_t j = 0; j < H; ++j) dh[j] = dy * p.w_proj[j];

    std::vector<double> da_f(H), da_i(H), da_g(H), da_o(H), dz(Z);
    for (std::size_t t = caches.size(); t-- > 0;) {
        const StepCache& k = caches[t];
        for (std::size_t j = 0; j < H; ++j) {
            const double tc = k.tanh_c[j];
            da_o[j] = dh[j] * tc * k.o[j] * (1.0 - k.o[j]);
            dc[j] += dh[j] * k.o[j] * (1.0 - tc * tc);
            da_f[j] = dc[j] * k.c_prev[j] * k.f[j] * (1.0 - k.f[j]);
            da_i[j] = dc[j] * k.g[j] * k.i[j] * (1.0 - k.i[j]);
            da_g[j] = dc[j] * k.i[j] * (1.0 - k.g[j] * k.g[j]);
        }
        std::fill(dz.begin(), dz.end(), 0.0);
        auto accumulate = [&](const std::vector<double>& w, std::vector<double>& gw, std::vector<double>& gb,
                              const std::vector<double>& da) {
            for (std::size_t r = 0; r < H; ++r) {
                gb[r] += da[r];
                const double* wr = w.data() + r * Z;
                double* gr = gw.data() + r * Z;
                for (std::size_t c = 0; c < Z; ++c) {
                    gr[c] += da[r] * k.z[c];
                    dz[c] += wr[c] * da[r];
                }
            }
        };
        accumulate(p.w_forget, g.w_forget, g.b_forget, da_f);
        accumulate(p.w_input, g.w_input, g.b_input, da_i);
        accumulate(p.w_cand, g.w_cand, g.b_cand, da_g);
        accumulate(p.w_output, g.w_output, g.b_output, da_o);
        for (std::size_t j = 0; j < H; ++j) {
            dh[j] = dz[j];
            dc[j] *= k.f[j];
        }
    }
    return err * err;
}

double target_at(std::span<const double> series, std::size_t next, bool residual) {
    return residual ? series[next] - series[next - 1] : series[next];
}

double batch_gradient(const LstmParams& p, std::span<const double> series, bool residual, LstmParams& g) {
    const auto L = static_cast<std::size_t>(p.window);
    const std::size_t windows = series.size() - L;
    double loss = 0.0;
    for (std::size_t s = 0; s < windows; ++s) {
        loss += window_gradient_into(p, series.subspan(s, L), target_at(series, s + L, residual), g);
    }
    const double scale = 1.0 / static_cast<double>(windows);
    for_each_block(g, [&](std::vector<double>& v) {
        for (double& x : v) x *= scale;
    });
    g.b_proj *= scale;
    return loss * scale;
}

void check_series(const LstmParams& p, std::span<const double> series) {
    if (series.size() <= static_cast<std::size_t>(p.window)) {
        throw InvalidArgument("training series of length " + std::to_string(series.size()) +
                              " is not longer than the window " + std::to_string(p.window));
    }
}

}  // namespace

LstmParams LstmParams::zeros(int hidden, int window) {
    if (hidden < 1 || window < 1) throw InvalidArgument("LSTM hidden size and window must be >= 1");
    LstmParams p;
    p.hidden = hidden;
    p.window = window;
    const auto H = static_cast<std::size_t>(hidden);
    const std::size_t W = H * (H + 1);
    for (auto* w : {&p.w_forget, &p.w_input, &p.w_cand, &p.w_output}) w->assign(W, 0.0);
    for (auto* b : {&p.b_forget, &p.b_input, &p.b_cand, &p.b_output}) b->assign(H, 0.0);
    p.w_proj.assign(H, 0.0);
    p.b_proj = 0.0;
    return p;
}

LstmParams LstmParams::random(int hidden, int window, std::uint64_t seed, double scale) {
    LstmParams p = zeros(hidden, window);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (auto* w : {&p.w_forget, &p.w_input, &p.w_cand, &p.w_output, &p.w_proj}) {
        for (double& x : *w) x = dist(rng);
    }
    return p;
}

std::size_t LstmParams::size() const {
    std::size_t n = 1;  // b_proj
    for_each_block(*this, [&](const std::vector<double>& v) { n += v.size(); });
    return n;
}

std::vector<double> LstmParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(size());
    for_each_block(*this, [&](const std::vector<double>& v) { flat.insert(flat.end(), v.begin(), v.end()); });
    flat.push_back(b_proj);
    return flat;
}

void LstmParams::assign(std::span<const double> flat) {
    if (flat.size() != size()) throw InvalidArgument("flat parameter vector has the wrong length");
    std::size_t at = 0;
    for_each_block(*this, [&](std::vector<double>& v) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), v.size(), v.begin());
        at += v.size();
    });
    b_proj = flat[at];
}

void LstmParams::validate() const {
    if (hidden < 1 || window < 1) throw InvalidArgument("LSTM hidden size and window must be >= 1");
    const auto H = static_cast<std::size_t>(hidden);
    for (const auto* w : {&w_forget, &w_input, &w_cand, &w_output}) {
        if (w->size() != H * (H + 1)) throw InvalidArgument("LSTM gate matrix has inconsistent shape");
    }
    for (const auto* b : {&b_forget, &b_input, &b_cand, &b_output, &w_proj}) {
        if (b->size() != H) throw InvalidArgument("LSTM bias/projection has inconsistent shape");
    }
    bool finite = std::isfinite(b_proj);
    for_each_block(*this, [&](const std::vector<double>& v) {
        finite = finite && std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    });
    if (!finite) throw InvalidArgument("LSTM parameters contain non-finite values");
}

LstmState LstmState::zero(int hidden) {
    const auto H = static_cast<std::size_t>(hidden);
    return {std::vector<double>(H, 0.0), std::vector<double>(H, 0.0)};
}

StepResult lstm_step(const LstmParams& params, const LstmState& state, double input) {
    params.validate();
    if (!(input >= 0.0 && input <= 1.0)) throw InvalidArgument("LSTM input must lie in [0,1]");
    const auto H = static_cast<std::size_t>(params.hidden);
    if (state.cell.size() != H || state.hidden.size() != H) throw InvalidArgument("LSTM state has wrong size");
    StepCache k;
    forward_step(params, state.hidden, state.cell, input, k);
    StepResult out;
    out.state.cell = k.c;
    out.state.hidden = hidden_of(k);
    out.prediction = std::clamp(readout(params, out.state.hidden), 0.0, 1.0);
    return out;
}

double window_loss(const LstmParams& params, std::span<const double> inputs, double target) {
    const double err = run_window(params, inputs, nullptr) - target;
    return err * err;
}

std::vector<double> window_gradient(const LstmParams& params, std::span<const double> inputs, double target,
                                    double* loss) {
    params.validate();
    LstmParams g = zero_like(params);
    const double l = window_gradient_into(params, inputs, target, g);
    if (loss) *loss = l;
    return g.flatten();
}

double series_loss(const LstmParams& params, std::span<const double> series, bool residual) {
    check_series(params, series);
    const auto L = static_cast<std::size_t>(params.window);
    const std::size_t windows = series.size() - L;
    double loss = 0.0;
    for (std::size_t s = 0; s < windows; ++s) {
        loss += window_loss(params, series.subspan(s, L), target_at(series, s + L, residual));
    }
    return loss / static_cast<double>(windows);
}

LstmParams train(const LstmParams& params, std::span<const double> series, const TrainConfig& config,
                 TrainReport* report) {
    params.validate();
    check_series(params, series);
    if (config.epochs < 0 || !(config.learning_rate > 0.0) || !(config.clip_norm > 0.0)) {
        throw InvalidArgument("invalid training configuration");
    }
    LstmParams current = params;
    double loss = series_loss(current, series, config.residual);
    if (report) report->loss.assign(1, loss);

    constexpr int kMaxHalvings = 8;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        LstmParams grad = zero_like(current);
        batch_gradient(current, series, config.residual, grad);
        std::vector<double> g = grad.flatten();
        const double norm = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
        if (!(norm > 0.0)) {
            if (report) report->loss.push_back(loss);
            continue;
        }
        const double clip = norm > config.clip_norm ? config.clip_norm / norm : 1.0;
        const std::vector<double> theta = current.flatten();

        double rate = config.learning_rate;
        bool accepted = false;
        for (int attempt = 0; attempt <= kMaxHalvings && !accepted; ++attempt, rate *= 0.5) {
            std::vector<double> next(theta.size());
            for (std::size_t j = 0; j < theta.size(); ++j) next[j] = theta[j] - rate * clip * g[j];
            LstmParams candidate = current;
            candidate.assign(next);
            const double next_loss = series_loss(candidate, series, config.residual);
            if (std::isfinite(next_loss) && next_loss <= loss) {
                current = std::move(candidate);
                loss = next_loss;
                accepted = true;
            }
        }
        if (report) report->loss.push_back(loss);
    }
    return current;
}

double predict_next(const LstmParams& params, std::span<const double> recent) {
    const auto L = static_cast<std::size_t>(params.window);
    if (recent.size() > L) recent = recent.subspan(recent.size() - L);
    return std::clamp(run_window(params, recent, nullptr), 0.0, 1.0);
}

bool estimate_failure(double predicted_cpu, double predicted_mem, double threshold) {
    return std::max(predicted_cpu, predicted_mem) > threshold;
}

ResourcePredictor::ResourcePredictor(const ForecastConfig& config, std::uint64_t seed)
    : config_(config), params_(LstmParams::random(config.hidden, config.window, seed)) {
    if (config.retrain_every < 1 || config.history <= config.window) {
        throw InvalidArgument("forecast retrain cadence must be >= 1 and history longer than the window");
    }
}

bool ResourcePredictor::due(std::size_t slot) const {
    const auto L = static_cast<std::size_t>(config_.window);
    if (slot <= L) return false;
    if (!trained_) return true;
    return (slot - L - 1) % static_cast<std::size_t>(config_.retrain_every) == 0;
}

void ResourcePredictor::update(std::span<const double> history, std::size_t slot) {
    if (!due(slot) || history.size() <= static_cast<std::size_t>(config_.window)) return;
    const auto keep = std::min(history.size(), static_cast<std::size_t>(config_.history));
    auto recent = history.subspan(history.size() - keep);
    params_ = train(params_, recent, {config_.epochs, config_.learning_rate, config_.clip_norm, true});
    trained_ = true;
}

double ResourcePredictor::predict(std::span<const double> history) const {
    if (history.empty()) return 0.0;
    const double last = std::clamp(history.back(), 0.0, 1.0);
    if (!trained_) return last;
    const auto L = static_cast<std::size_t>(params_.window);
    if (history.size() > L) history = history.subspan(history.size() - L);
    return std::clamp(last + run_window(params_, history, nullptr), 0.0, 1.0);
}

}  // namespace srehm
