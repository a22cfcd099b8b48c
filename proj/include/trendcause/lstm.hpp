#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "trendcause/error.hpp"
#include "trendcause/random.hpp"
#include "trendcause/series.hpp"

namespace tc::lstm {

enum class FeatureSet { CasesOnly, CasesPlusRestaurant, CasesPlusBar };

constexpr std::string_view to_string(FeatureSet fs) {
    switch (fs) {
        case FeatureSet::CasesOnly: return "baseline";
        case FeatureSet::CasesPlusRestaurant: return "restaurant";
        case FeatureSet::CasesPlusBar: return "bar";
    }
    return "unknown";
}

constexpr int feature_count(FeatureSet fs) { return fs == FeatureSet::CasesOnly ? 1 : 2; }

/// Windowed one-step-ahead samples. inputs[s] is W×features (row = day,
/// column 0 = cases); targets[s] is the cases value on sample_dates[s], the day
/// after the window.
struct SupervisedSet {
    std::vector<Eigen::MatrixXd> inputs;
    Eigen::VectorXd targets;
    std::vector<Date> sample_dates;
    int window = 0;
    int features = 0;

    std::size_t size() const noexcept { return inputs.size(); }

    SupervisedSet subset(std::size_t first, std::size_t count) const {
        SupervisedSet out;
        out.window = window;
        out.features = features;
        out.inputs.assign(inputs.begin() + static_cast<std::ptrdiff_t>(first),
                          inputs.begin() + static_cast<std::ptrdiff_t>(first + count));
        out.targets = targets.segment(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
        out.sample_dates.assign(sample_dates.begin() + static_cast<std::ptrdiff_t>(first),
                                sample_dates.begin() + static_cast<std::ptrdiff_t>(first + count));
        return out;
    }
};

inline SupervisedSet make_windows(const RegionDataset& dataset, int window, FeatureSet feature_set) {
    if (window < 1) throw Error(ErrorKind::DomainError, "window must be >= 1");
    const TimeSeries* extra = nullptr;
    if (feature_set == FeatureSet::CasesPlusRestaurant) {
        if (!dataset.restaurant) throw Error(ErrorKind::ShapeMismatch, dataset.region + " has no restaurant series");
        extra = &*dataset.restaurant;
    } else if (feature_set == FeatureSet::CasesPlusBar) {
        if (!dataset.bar) throw Error(ErrorKind::ShapeMismatch, dataset.region + " has no bar series");
        extra = &*dataset.bar;
    }
    const auto n = dataset.cases.size();
    const auto w = static_cast<std::size_t>(window);
    if (n <= w)
        throw Error(ErrorKind::SeriesTooShort, dataset.region + ": " + std::to_string(n) +
                                                   " days cannot fill a window of " + std::to_string(window));
    SupervisedSet out;
    out.window = window;
    out.features = feature_count(feature_set);
    out.targets.resize(static_cast<Eigen::Index>(n - w));
    for (std::size_t s = 0; s + w < n; ++s) {
        Eigen::MatrixXd sample(window, out.features);
        for (std::size_t t = 0; t < w; ++t) {
            sample(static_cast<Eigen::Index>(t), 0) = dataset.cases[s + t];
            if (extra) sample(static_cast<Eigen::Index>(t), 1) = (*extra)[s + t];
        }
        out.inputs.push_back(std::move(sample));
        out.targets(static_cast<Eigen::Index>(s)) = dataset.cases[s + w];
        out.sample_dates.push_back(dataset.cases.dates()[s + w]);
    }
    return out;
}

/// Chronological split at floor(0.7 · count); no shuffling.
inline std::pair<SupervisedSet, SupervisedSet> split_70_30(const SupervisedSet& set) {
    if (set.size() < 10)
        throw Error(ErrorKind::TooFewSamples, "split needs >= 10 samples, have " + std::to_string(set.size()));
    const auto cut = set.size() * 7 / 10;
    return {set.subset(0, cut), set.subset(cut, set.size() - cut)};
}

/**
 * Offsets of every parameter block inside the flat parameter vector.
 *
 * Layout, bottom layer first; for each layer of input size I and hidden size H:
 *   w_in   4H×I, column-major, row blocks in gate order i, f, g, o
 *   w_rec  4H×H, column-major, same gate order
 *   bias   4H, same gate order
 * followed by the dense head: weights (H_top), then one bias.
 */
struct Layout {
    struct Layer {
        int input = 0;
        int hidden = 0;
        Eigen::Index w_in = 0;
        Eigen::Index w_rec = 0;
        Eigen::Index bias = 0;
    };
    std::vector<Layer> layers;
    Eigen::Index dense_w = 0;
    Eigen::Index dense_b = 0;
    Eigen::Index size = 0;

    static Layout make(int features, const std::vector<int>& hidden) {
        Layout out;
        Eigen::Index at = 0;
        int input = features;
        for (int h : hidden) {
            Layer layer{input, h, 0, 0, 0};
            layer.w_in = at;
            at += 4 * h * input;
            layer.w_rec = at;
            at += 4 * h * h;
            layer.bias = at;
            at += 4 * h;
            out.layers.push_back(layer);
            input = h;
        }
        out.dense_w = at;
        at += input;
        out.dense_b = at;
        at += 1;
        out.size = at;
        return out;
    }

    int top_hidden() const { return layers.back().hidden; }
};

struct NetworkConfig {
    std::vector<int> hidden = {32, 32, 32};
    int window = 7;
    int features = 1;
    double dropout = 0.2;
    std::uint64_t seed = 42;
    /// Inputs are divided by, and predictions multiplied by, this factor, so
    /// the cell sees unit-scale data while callers work on the 0..100 scale.
    double value_scale = 100.0;
};

/**
 * Stacked LSTM with inverted dropout after every layer and a linear head on
 * the final timestep of the top layer.
 */
struct LstmNetwork {
    Layout layout;
    Eigen::VectorXd params;
    std::vector<double> dropout_rates;  ///< one per layer
    int window = 0;
    int features = 0;
    std::vector<int> hidden;
    std::uint64_t seed = 0;
    double value_scale = 100.0;

    std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(params.size()); }

    Eigen::Map<const Eigen::MatrixXd> w_in(std::size_t l) const {
        const auto& L = layout.layers[l];
        return {params.data() + L.w_in, 4 * L.hidden, L.input};
    }
    Eigen::Map<const Eigen::MatrixXd> w_rec(std::size_t l) const {
        const auto& L = layout.layers[l];
        return {params.data() + L.w_rec, 4 * L.hidden, L.hidden};
    }
    Eigen::Map<const Eigen::VectorXd> bias(std::size_t l) const {
        const auto& L = layout.layers[l];
        return {params.data() + L.bias, 4 * L.hidden};
    }
    Eigen::Map<const Eigen::VectorXd> dense_w() const {
        return {params.data() + layout.dense_w, layout.top_hidden()};
    }
    double dense_b() const { return params(layout.dense_b); }
};

/// Seeded initialization: weights ~ U(−1/√fan_in, 1/√fan_in) with
/// fan_in = input + hidden for gate weights and H_top for the head; forget-gate
/// biases 1, all other biases 0.
inline LstmNetwork init_network(const NetworkConfig& config) {
    if (config.hidden.empty()) throw Error(ErrorKind::InvalidConfig, "network needs at least one layer");
    for (int h : config.hidden)
        if (h < 1) throw Error(ErrorKind::InvalidConfig, "hidden sizes must be positive");
    if (config.window < 1 || config.features < 1)
        throw Error(ErrorKind::InvalidConfig, "window and features must be positive");
    if (!(config.dropout >= 0.0 && config.dropout < 1.0))
        throw Error(ErrorKind::InvalidConfig, "dropout must lie in [0, 1)");
    if (!(config.value_scale > 0.0)) throw Error(ErrorKind::InvalidConfig, "value_scale must be positive");

    LstmNetwork net;
    net.layout = Layout::make(config.features, config.hidden);
    net.params = Eigen::VectorXd::Zero(net.layout.size);
    net.dropout_rates.assign(config.hidden.size(), config.dropout);
    net.window = config.window;
    net.features = config.features;
    net.hidden = config.hidden;
    net.seed = config.seed;
    net.value_scale = config.value_scale;

    Rng rng(config.seed);
    auto fill = [&](Eigen::Index offset, Eigen::Index count, double bound) {
        for (Eigen::Index i = 0; i < count; ++i) net.params(offset + i) = rng.uniform(-bound, bound);
    };
    for (const auto& L : net.layout.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(L.input + L.hidden));
        fill(L.w_in, 4 * L.hidden * L.input, bound);
        fill(L.w_rec, 4 * L.hidden * L.hidden, bound);
        net.params.segment(L.bias + L.hidden, L.hidden).setOnes();
    }
    fill(net.layout.dense_w, net.layout.top_hidden(), 1.0 / std::sqrt(static_cast<double>(net.layout.top_hidden())));
    return net;
}

/// Intermediate values of one batched forward pass, kept for backprop.
struct ForwardCache {
    struct Step {
        Eigen::MatrixXd input;  ///< layer input at t (I × N)
        Eigen::MatrixXd i, f, g, o, c, h;  ///< H × N
        Eigen::MatrixXd mask;   ///< dropout multiplier (empty when inactive)
        Eigen::MatrixXd out;    ///< h ⊙ mask
    };
    std::vector<std::vector<Step>> layers;  ///< [layer][t]
    Eigen::RowVectorXd output;              ///< unit-scale predictions (1 × N)
    Eigen::Index batch = 0;
};

namespace detail {

// Both nonlinearities go through Eigen's vectorized exp; tanh(x) = 2σ(2x) − 1.
template <class Derived>
Eigen::MatrixXd sigmoid(const Eigen::MatrixBase<Derived>& z) {
    return (1.0 + (-z.array()).exp()).inverse().matrix();
}

template <class Derived>
Eigen::MatrixXd tanh(const Eigen::MatrixBase<Derived>& z) {
    return (2.0 / (1.0 + (-2.0 * z.array()).exp()) - 1.0).matrix();
}

inline void check_sample(const LstmNetwork& net, const Eigen::MatrixXd& sample) {
    if (sample.rows() != net.window || sample.cols() != net.features)
        throw Error(ErrorKind::ShapeMismatch,
                    "sample is " + std::to_string(sample.rows()) + "×" + std::to_string(sample.cols()) +
                        ", network expects " + std::to_string(net.window) + "×" + std::to_string(net.features));
}

// Per-timestep input matrices (features × N) on the unit scale.
inline std::vector<Eigen::MatrixXd> batch_inputs(const LstmNetwork& net, const std::vector<Eigen::MatrixXd>& samples) {
    const auto n = static_cast<Eigen::Index>(samples.size());
    std::vector<Eigen::MatrixXd> steps(static_cast<std::size_t>(net.window), Eigen::MatrixXd(net.features, n));
    for (Eigen::Index s = 0; s < n; ++s) {
        const auto& sample = samples[static_cast<std::size_t>(s)];
        check_sample(net, sample);
        for (int t = 0; t < net.window; ++t)
            steps[static_cast<std::size_t>(t)].col(s) = sample.row(t).transpose() / net.value_scale;
    }
    return steps;
}

}  // namespace detail

/**
 * Batched forward pass. Gates per timestep:
 *   i = σ(W_i x + U_i h + b_i), f = σ(...), g = tanh(...), o = σ(...)
 *   c_t = f ⊙ c_{t−1} + i ⊙ g,  h_t = o ⊙ tanh(c_t),  h_0 = c_0 = 0.
 * When `dropout_rng` is non-null each layer's output is multiplied by an
 * inverted-dropout mask (0 or 1/(1−d)) drawn in order layer, timestep, then
 * column-major over units × samples. Null means inference: no dropout.
 */
inline ForwardCache forward_batch(const LstmNetwork& net, const std::vector<Eigen::MatrixXd>& samples,
                                  Rng* dropout_rng) {
    ForwardCache cache;
    cache.batch = static_cast<Eigen::Index>(samples.size());
    const Eigen::Index n = cache.batch;
    std::vector<Eigen::MatrixXd> inputs = detail::batch_inputs(net, samples);
    cache.layers.resize(net.layout.layers.size());
    for (std::size_t l = 0; l < net.layout.layers.size(); ++l) {
        const int hsize = net.layout.layers[l].hidden;
        const auto w_in = net.w_in(l);
        const auto w_rec = net.w_rec(l);
        const auto b = net.bias(l);
        const double rate = net.dropout_rates[l];
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(hsize, n);
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(hsize, n);
        auto& steps = cache.layers[l];
        steps.resize(static_cast<std::size_t>(net.window));
        for (int t = 0; t < net.window; ++t) {
            auto& st = steps[static_cast<std::size_t>(t)];
            st.input = std::move(inputs[static_cast<std::size_t>(t)]);
            Eigen::MatrixXd z = w_in * st.input;
            z.noalias() += w_rec * h;
            z.colwise() += b;
            st.i = detail::sigmoid(z.topRows(hsize));
            st.f = detail::sigmoid(z.middleRows(hsize, hsize));
            st.g = detail::tanh(z.middleRows(2 * hsize, hsize));
            st.o = detail::sigmoid(z.bottomRows(hsize));
            c = st.f.cwiseProduct(c) + st.i.cwiseProduct(st.g);
            h = st.o.cwiseProduct(detail::tanh(c));
            st.c = c;
            st.h = h;
            if (dropout_rng && rate > 0.0) {
                st.mask.resize(hsize, n);
                const double keep_scale = 1.0 / (1.0 - rate);
                for (Eigen::Index k = 0; k < st.mask.size(); ++k)
                    st.mask.data()[k] = dropout_rng->uniform() < rate ? 0.0 : keep_scale;
                st.out = h.cwiseProduct(st.mask);
            } else {
                st.out = h;
            }
            inputs[static_cast<std::size_t>(t)] = st.out;
        }
    }
    const auto& top = cache.layers.back().back().out;
    cache.output = (net.dense_w().transpose() * top).array() + net.dense_b();
    return cache;
}

struct ForwardResult {
    double prediction = 0.0;  ///< on the caller's (0..100) scale
    ForwardCache cache;
};

/// Single-sample forward. training=true draws dropout masks from `rng`.
inline ForwardResult forward(const LstmNetwork& net, const Eigen::MatrixXd& sample, bool training,
                             Rng* rng = nullptr) {
    if (training && !rng) throw Error(ErrorKind::DomainError, "training forward needs a dropout stream");
    ForwardResult out;
    out.cache = forward_batch(net, {sample}, training ? rng : nullptr);
    out.prediction = out.cache.output(0) * net.value_scale;
    return out;
}

/// Predictions for every sample, inference mode.
inline Eigen::VectorXd predict(const LstmNetwork& net, const std::vector<Eigen::MatrixXd>& samples) {
    if (samples.empty()) return {};
    return forward_batch(net, samples, nullptr).output.transpose() * net.value_scale;
}

/**
 * Mean-squared error on the unit scale, L = (1/N) Σ (ŷ/s − y/s)², and its
 * gradient with respect to the flat parameter vector, by backpropagation
 * through time over the cached forward pass.
 */
inline double loss_and_gradient(const LstmNetwork& net, const std::vector<Eigen::MatrixXd>& samples,
                                const Eigen::VectorXd& targets, Rng* dropout_rng, Eigen::VectorXd& grad) {
    if (samples.empty()) throw Error(ErrorKind::TooFewSamples, "empty training batch");
    if (targets.size() != static_cast<Eigen::Index>(samples.size()))
        throw Error(ErrorKind::ShapeMismatch, "targets and samples differ in length");
    const ForwardCache cache = forward_batch(net, samples, dropout_rng);
    const Eigen::Index n = cache.batch;
    const Eigen::RowVectorXd err = cache.output - targets.transpose() / net.value_scale;
    const double loss = err.squaredNorm() / static_cast<double>(n);

    grad = Eigen::VectorXd::Zero(net.layout.size);
    const Eigen::RowVectorXd d_out = (2.0 / static_cast<double>(n)) * err;
    const auto& top = cache.layers.back().back().out;
    grad.segment(net.layout.dense_w, net.layout.top_hidden()) = top * d_out.transpose();
    grad(net.layout.dense_b) = d_out.sum();

    // d_above[t]: gradient w.r.t. this layer's (masked) output at timestep t.
    std::vector<Eigen::MatrixXd> d_above(static_cast<std::size_t>(net.window));
    for (int t = 0; t < net.window; ++t)
        d_above[static_cast<std::size_t>(t)] = Eigen::MatrixXd::Zero(net.layout.top_hidden(), n);
    d_above.back() = net.dense_w() * d_out;

    for (std::size_t l = net.layout.layers.size(); l-- > 0;) {
        const auto& L = net.layout.layers[l];
        const int hsize = L.hidden;
        const auto& steps = cache.layers[l];
        const auto w_in = net.w_in(l);
        const auto w_rec = net.w_rec(l);
        Eigen::Map<Eigen::MatrixXd> g_in(grad.data() + L.w_in, 4 * hsize, L.input);
        Eigen::Map<Eigen::MatrixXd> g_rec(grad.data() + L.w_rec, 4 * hsize, hsize);
        Eigen::Map<Eigen::VectorXd> g_bias(grad.data() + L.bias, 4 * hsize);

        Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(hsize, n);
        Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(hsize, n);
        Eigen::MatrixXd dz(4 * hsize, n);
        std::vector<Eigen::MatrixXd> d_below(static_cast<std::size_t>(net.window));
        for (int t = net.window - 1; t >= 0; --t) {
            const auto& st = steps[static_cast<std::size_t>(t)];
            Eigen::MatrixXd dh = d_above[static_cast<std::size_t>(t)];
            if (st.mask.size() != 0) dh = dh.cwiseProduct(st.mask);
            dh += dh_next;
            const Eigen::ArrayXXd tanh_c = detail::tanh(st.c).array();
            const Eigen::ArrayXXd dc = dh.array() * st.o.array() * (1.0 - tanh_c.square()) + dc_next.array();
            const Eigen::ArrayXXd c_prev = t > 0 ? Eigen::ArrayXXd(steps[static_cast<std::size_t>(t - 1)].c.array())
                                                 : Eigen::ArrayXXd::Zero(hsize, n).eval();
            dz.topRows(hsize) = (dc * st.g.array() * st.i.array() * (1.0 - st.i.array())).matrix();
            dz.middleRows(hsize, hsize) = (dc * c_prev * st.f.array() * (1.0 - st.f.array())).matrix();
            dz.middleRows(2 * hsize, hsize) = (dc * st.i.array() * (1.0 - st.g.array().square())).matrix();
            dz.bottomRows(hsize) = (dh.array() * tanh_c * st.o.array() * (1.0 - st.o.array())).matrix();
            dc_next = (dc * st.f.array()).matrix();

            g_in.noalias() += dz * st.input.transpose();
            if (t > 0) g_rec.noalias() += dz * steps[static_cast<std::size_t>(t - 1)].h.transpose();
            g_bias += dz.rowwise().sum();
            dh_next.noalias() = w_rec.transpose() * dz;
            if (l > 0) d_below[static_cast<std::size_t>(t)].noalias() = w_in.transpose() * dz;
        }
        d_above = std::move(d_below);
    }
    return loss;
}

struct TrainOptions {
    int epochs = 150;
    double learning_rate = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double clip_norm = 5.0;
};

struct TrainResult {
    LstmNetwork network;
    std::vector<double> losses;  ///< training loss per epoch (unit scale, with dropout)
};

/**
 * Full-batch BPTT with Adam and global gradient-norm clipping. Dropout masks
 * come from a stream seeded by the network seed, so identical (network, data,
 * options) give bitwise-identical results.
 */
inline TrainResult train(LstmNetwork net, const SupervisedSet& train_set, const TrainOptions& options = {}) {
    if (train_set.size() == 0) throw Error(ErrorKind::TooFewSamples, "empty training set");
    if (options.epochs < 0) throw Error(ErrorKind::InvalidConfig, "epochs must be >= 0");
    Rng dropout_rng(derive_seed(net.seed, 1));
    Eigen::VectorXd m = Eigen::VectorXd::Zero(net.params.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(net.params.size());
    Eigen::VectorXd grad;
    TrainResult out;
    double b1_pow = 1.0;
    double b2_pow = 1.0;
    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
        const double loss = loss_and_gradient(net, train_set.inputs, train_set.targets, &dropout_rng, grad);
        if (!std::isfinite(loss) || !grad.allFinite())
            throw Error(ErrorKind::NumericalDivergence,
                        "non-finite loss or gradient at epoch " + std::to_string(epoch));
        out.losses.push_back(loss);
        const double norm = grad.norm();
        if (norm > options.clip_norm) grad *= options.clip_norm / norm;
        b1_pow *= options.beta1;
        b2_pow *= options.beta2;
        m = options.beta1 * m + (1.0 - options.beta1) * grad;
        v = options.beta2 * v + (1.0 - options.beta2) * grad.cwiseAbs2();
        const double step = options.learning_rate / (1.0 - b1_pow);
        const double v_corr = 1.0 / (1.0 - b2_pow);
        net.params.array() -= step * m.array() / ((v.array() * v_corr).sqrt() + options.epsilon);
        if (!net.params.allFinite())
            throw Error(ErrorKind::NumericalDivergence, "non-finite parameters at epoch " + std::to_string(epoch));
    }
    out.network = std::move(net);
    return out;
}

inline double rmse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals) {
    if (predictions.size() != actuals.size())
        throw Error(ErrorKind::ShapeMismatch, "predictions and actuals differ in length");
    if (predictions.size() == 0) throw Error(ErrorKind::TooFewSamples, "RMSE of an empty set");
    return std::sqrt((predictions - actuals).squaredNorm() / static_cast<double>(predictions.size()));
}

struct ForecastEvaluation {
    Eigen::VectorXd predictions;
    Eigen::VectorXd actuals;
    std::vector<Date> dates;
    int n_test = 0;
    double rmse = 0.0;
    int split_index = 0;  ///< index of the first test sample in the full set
};

inline ForecastEvaluation evaluate(const LstmNetwork& net, const SupervisedSet& test_set, int split_index = 0) {
    if (test_set.size() == 0) throw Error(ErrorKind::TooFewSamples, "empty test set");
    ForecastEvaluation out;
    out.predictions = predict(net, test_set.inputs);
    out.actuals = test_set.targets;
    out.dates = test_set.sample_dates;
    out.n_test = static_cast<int>(test_set.size());
    out.rmse = rmse(out.predictions, out.actuals);
    out.split_index = split_index;
    return out;
}

/**
 * Largest relative disagreement between the backprop gradient and central
 * finite differences (step h) over every parameter, with dropout off:
 * |a − n| / max(|a|, |n|, 1e-6). The floor sits above the finite-difference
 * roundoff (~1e-16 · L / h) so gradients that are numerically zero compare
 * absolutely.
 */
inline double gradient_check(const LstmNetwork& net, const Eigen::MatrixXd& sample, double target, double h = 1e-5) {
    const std::vector<Eigen::MatrixXd> batch{sample};
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, target);
    Eigen::VectorXd analytic;
    loss_and_gradient(net, batch, y, nullptr, analytic);
    LstmNetwork probe = net;
    Eigen::VectorXd scratch;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < probe.params.size(); ++k) {
        const double saved = probe.params(k);
        probe.params(k) = saved + h;
        const double up = loss_and_gradient(probe, batch, y, nullptr, scratch);
        probe.params(k) = saved - h;
        const double down = loss_and_gradient(probe, batch, y, nullptr, scratch);
        probe.params(k) = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::fabs(analytic(k)), std::fabs(numeric), 1e-6});
        worst = std::max(worst, std::fabs(analytic(k) - numeric) / denom);
    }
    return worst;
}

/// Serialized form: topology plus the flat parameter vector in Layout order.
inline nlohmann::json to_json(const LstmNetwork& net) {
    nlohmann::json j;
    j["format"] = "trendcause-lstm-v1";
    j["gate_order"] = "i,f,g,o";
    j["window"] = net.window;
    j["features"] = net.features;
    j["hidden"] = net.hidden;
    j["dropout"] = net.dropout_rates;
    j["seed"] = net.seed;
    j["value_scale"] = net.value_scale;
    j["params"] = std::vector<double>(net.params.data(), net.params.data() + net.params.size());
    return j;
}

inline LstmNetwork from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "trendcause-lstm-v1")
        throw Error(ErrorKind::ParseError, "not a trendcause-lstm-v1 document");
    LstmNetwork net;
    net.window = j.at("window").get<int>();
    net.features = j.at("features").get<int>();
    net.hidden = j.at("hidden").get<std::vector<int>>();
    net.dropout_rates = j.at("dropout").get<std::vector<double>>();
    net.seed = j.at("seed").get<std::uint64_t>();
    net.value_scale = j.at("value_scale").get<double>();
    net.layout = Layout::make(net.features, net.hidden);
    const auto values = j.at("params").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != net.layout.size ||
        net.dropout_rates.size() != net.hidden.size())
        throw Error(ErrorKind::ShapeMismatch, "parameter count does not match the declared topology");
    net.params = Eigen::Map<const Eigen::VectorXd>(values.data(), net.layout.size);
    return net;
}

}  // namespace tc::lstm
