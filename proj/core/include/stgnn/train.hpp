#pragma once

#include "stgnn/data.hpp"
#include "stgnn/error.hpp"
#include "stgnn/graph.hpp"
#include "stgnn/metrics.hpp"
#include "stgnn/model.hpp"
#include "stgnn/parameter.hpp"
#include "stgnn/rng.hpp"

#include <chrono>
#include <concepts>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace stgnn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct TrainConfig {
    double lr = 1e-3;
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    std::uint64_t seed = 42;
    AdamConfig adam;
    std::size_t early_stop_patience = 10;
    double grad_clip_norm = 5.0;

    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochRecord {
    std::size_t epoch = 0; // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double wall_ms = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;

    /// Equality of everything except wall-clock timings.
    bool same_trajectory(const TrainLog& other) const;
};

/// `epoch,train_loss,val_loss,wall_ms` with one row per epoch.
std::string train_log_csv(const TrainLog& log, bool include_timing = true);
std::string train_log_json(const TrainLog& log);

double global_grad_norm(const std::vector<NamedParameter>& params);
/// Rescales every gradient so the global norm is at most max_norm; returns the pre-clip norm.
double clip_gradients(const std::vector<NamedParameter>& params, double max_norm);
/// One Adam update with bias correction; `step` counts from 1.
void adam_step(const std::vector<NamedParameter>& params, double lr, const AdamConfig& adam,
               std::size_t step);

template <class M>
concept Trainable = std::copy_constructible<M> &&
    requires(M& m, const M& cm, const NormalizedAdjacency& adj, const WindowSample& s) {
        { m.parameters() } -> std::same_as<std::vector<NamedParameter>>;
        { accumulate_gradients(m, adj, s, 1.0) } -> std::same_as<double>;
        { sample_loss(cm, adj, s) } -> std::same_as<double>;
        { predict_sample(cm, adj, s) } -> std::same_as<std::vector<Matrix>>;
    };

template <class M>
struct TrainResult {
    M best_model;
    TrainLog log;
};

/// Optional per-epoch observer (progress printing).
using EpochCallback = std::function<void(const EpochRecord&)>;

template <Trainable M>
double mean_loss(const M& model, const NormalizedAdjacency& adj,
                 const std::vector<WindowSample>& samples) {
    double sum = 0.0;
    for (const auto& s : samples) {
        sum += sample_loss(model, adj, s);
    }
    return sum / static_cast<double>(samples.size());
}

/// Mini-batch Adam over a seed-shuffled sample order with global-norm
/// clipping and early stopping on validation loss. Returns the parameters
/// of the epoch with the lowest validation loss.
template <Trainable M>
TrainResult<M> train(M model, const NormalizedAdjacency& adj,
                     const std::vector<WindowSample>& train_samples,
                     const std::vector<WindowSample>& val_samples, const TrainConfig& cfg,
                     const EpochCallback& on_epoch = {}) {
    cfg.validate();
    if (train_samples.empty() || val_samples.empty()) {
        throw empty_input_error("train: training and validation sets must be non-empty");
    }
    RngStream rng(cfg.seed);
    std::vector<std::size_t> order(train_samples.size());
    std::size_t step = 0;

    TrainResult<M> result{model, {}};
    result.log.best_val_loss = std::numeric_limits<double>::infinity();

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }

        const auto params = model.parameters();
        double epoch_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t b = 0; b < order.size(); b += cfg.batch_size, ++batch_index) {
            const std::size_t e = std::min(order.size(), b + cfg.batch_size);
            const double scale = 1.0 / static_cast<double>(e - b);
            zero_grads(params);
            double batch_sum = 0.0;
            try {
                for (std::size_t i = b; i < e; ++i) {
                    batch_sum += accumulate_gradients(model, adj, train_samples[order[i]], scale);
                }
            } catch (const numeric_error& err) {
                throw numeric_error("train: epoch " + std::to_string(epoch) + " batch " +
                                    std::to_string(batch_index) + ": " + err.what());
            }
            if (!std::isfinite(batch_sum)) {
                throw numeric_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                    " batch " + std::to_string(batch_index));
            }
            epoch_sum += batch_sum;
            clip_gradients(params, cfg.grad_clip_norm);
            adam_step(params, cfg.lr, cfg.adam, ++step);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = epoch_sum / static_cast<double>(order.size());
        try {
            rec.val_loss = mean_loss(model, adj, val_samples);
        } catch (const numeric_error& err) {
            throw numeric_error("train: epoch " + std::to_string(epoch) + " validation: " +
                                err.what());
        }
        if (!std::isfinite(rec.val_loss)) {
            throw numeric_error("train: non-finite validation loss at epoch " +
                                std::to_string(epoch));
        }
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - started)
                          .count();
        result.log.epochs.push_back(rec);
        if (on_epoch) {
            on_epoch(rec);
        }

        if (rec.val_loss < result.log.best_val_loss) {
            result.log.best_val_loss = rec.val_loss;
            result.log.best_epoch = epoch;
            result.best_model = model;
        } else if (epoch - result.log.best_epoch >= cfg.early_stop_patience) {
            break;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Evaluation

struct PredictionRow {
    std::size_t t_origin = 0;
    std::size_t horizon_step = 0; // 1-based
    std::size_t node = 0;
    std::size_t feature = 0;
    double pred = 0.0;  // raw scale
    double truth = 0.0; // raw scale
};

struct Evaluation {
    MetricReport report;
    std::vector<PredictionRow> rows;
};

/// Inverts predictions and targets to raw scale and computes overall and
/// per-horizon-step metrics. `preds[s]` belongs to `samples[s]`.
Evaluation evaluate_predictions(const std::vector<std::vector<Matrix>>& preds,
                                const std::vector<WindowSample>& samples, const Scaler& scaler);

template <Trainable M>
Evaluation evaluate(const M& model, const NormalizedAdjacency& adj,
                    const std::vector<WindowSample>& samples, const Scaler& scaler) {
    if (samples.empty()) {
        throw empty_input_error("evaluate: no samples");
    }
    std::vector<std::vector<Matrix>> preds;
    preds.reserve(samples.size());
    for (const auto& s : samples) {
        preds.push_back(predict_sample(model, adj, s));
    }
    return evaluate_predictions(preds, samples, scaler);
}

Evaluation evaluate_persistence(const std::vector<WindowSample>& samples, const Scaler& scaler);

/// `t_origin,horizon_step,node,feature,pred,truth` with round-trip precision.
std::string predictions_csv(const Evaluation& eval);

} // namespace stgnn
