#include "stgnn/train.hpp"

#include "stgnn/baselines.hpp"

#include <json.hpp>

#include <cstdio>

namespace stgnn {

using nlohmann::json;

void TrainConfig::validate() const {
    if (!(lr >= 0.0) || !std::isfinite(lr)) {
        // lr = 0 is accepted: it freezes the parameters, which tests rely on
        throw config_error("train.lr must be a finite non-negative number");
    }
    if (epochs == 0) throw config_error("train.epochs must be at least 1");
    if (batch_size == 0) throw config_error("train.batch_size must be at least 1");
    if (early_stop_patience == 0) throw config_error("train.early_stop_patience must be at least 1");
    if (!(grad_clip_norm > 0.0)) throw config_error("train.grad_clip_norm must be positive");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
        throw config_error("train.adam betas must lie in [0, 1)");
    }
    if (!(adam.eps > 0.0)) throw config_error("train.adam.eps must be positive");
}

bool TrainLog::same_trajectory(const TrainLog& other) const {
    if (best_epoch != other.best_epoch || epochs.size() != other.epochs.size() ||
        best_val_loss != other.best_val_loss) {
        return false;
    }
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        if (epochs[i].epoch != other.epochs[i].epoch ||
            epochs[i].train_loss != other.epochs[i].train_loss ||
            epochs[i].val_loss != other.epochs[i].val_loss) {
            return false;
        }
    }
    return true;
}

namespace {

std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string train_log_csv(const TrainLog& log, bool include_timing) {
    std::string out = "epoch,train_loss,val_loss,wall_ms\n";
    for (const auto& e : log.epochs) {
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", include_timing ? e.wall_ms : 0.0);
        out += std::to_string(e.epoch) + "," + exact(e.train_loss) + "," + exact(e.val_loss) + "," +
               ms + "\n";
    }
    return out;
}

std::string train_log_json(const TrainLog& log) {
    json j;
    j["epochs_run"] = log.epochs.size();
    j["best_epoch"] = log.best_epoch;
    j["best_val_loss"] = log.best_val_loss;
    if (!log.epochs.empty()) {
        j["first_val_loss"] = log.epochs.front().val_loss;
        j["final_val_loss"] = log.epochs.back().val_loss;
        j["final_train_loss"] = log.epochs.back().train_loss;
    }
    return j.dump(2) + "\n";
}

double global_grad_norm(const std::vector<NamedParameter>& params) {
    double sq = 0.0;
    for (const auto& p : params) {
        sq += squared_norm(p.param->grad);
    }
    return std::sqrt(sq);
}

double clip_gradients(const std::vector<NamedParameter>& params, double max_norm) {
    const double norm = global_grad_norm(params);
    if (norm > max_norm) {
        const double factor = max_norm / norm;
        for (const auto& p : params) {
            p.param->grad.scale_in_place(factor);
        }
    }
    return norm;
}

void adam_step(const std::vector<NamedParameter>& params, double lr, const AdamConfig& adam,
               std::size_t step) {
    const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(step));
    for (const auto& np : params) {
        Parameter& p = *np.param;
        auto value = p.value.values();
        auto grad = p.grad.values();
        auto m = p.adam_m.values();
        auto v = p.adam_v.values();
        for (std::size_t i = 0; i < value.size(); ++i) {
            m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * grad[i];
            v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            value[i] -= lr * m_hat / (std::sqrt(v_hat) + adam.eps);
        }
    }
}

Evaluation evaluate_predictions(const std::vector<std::vector<Matrix>>& preds,
                                const std::vector<WindowSample>& samples, const Scaler& scaler) {
    if (samples.empty()) {
        throw empty_input_error("evaluate: no samples");
    }
    if (preds.size() != samples.size()) {
        throw dimension_error("evaluate: prediction count does not match sample count");
    }
    const std::size_t horizon = samples[0].targets.size();
    MetricAccumulator overall;
    std::vector<MetricAccumulator> per(horizon);
    Evaluation ev;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& targets = samples[s].targets;
        if (targets.size() != horizon || preds[s].size() != horizon) {
            throw dimension_error("evaluate: inconsistent horizon across samples");
        }
        for (std::size_t j = 0; j < horizon; ++j) {
            if (!preds[s][j].same_shape(targets[j])) {
                throw dimension_error("evaluate: prediction " + preds[s][j].shape_string() +
                                      " vs target " + targets[j].shape_string());
            }
            const Matrix raw_pred = scaler.invert(preds[s][j]);
            const Matrix raw_truth = scaler.invert(targets[j]);
            for (std::size_t i = 0; i < raw_pred.rows(); ++i) {
                for (std::size_t f = 0; f < raw_pred.cols(); ++f) {
                    per[j].add(raw_pred(i, f), raw_truth(i, f));
                    ev.rows.push_back(
                        {samples[s].t_origin, j + 1, i, f, raw_pred(i, f), raw_truth(i, f)});
                }
            }
        }
    }
    for (const auto& acc : per) {
        overall.merge(acc);
        ev.report.per_horizon.push_back(acc.finish());
    }
    static_cast<Metrics&>(ev.report) = overall.finish();
    return ev;
}

Evaluation evaluate_persistence(const std::vector<WindowSample>& samples, const Scaler& scaler) {
    std::vector<std::vector<Matrix>> preds;
    preds.reserve(samples.size());
    for (const auto& s : samples) {
        preds.push_back(persistence_predict(s));
    }
    return evaluate_predictions(preds, samples, scaler);
}

std::string predictions_csv(const Evaluation& eval) {
    std::string out = "t_origin,horizon_step,node,feature,pred,truth\n";
    for (const auto& r : eval.rows) {
        out += std::to_string(r.t_origin) + "," + std::to_string(r.horizon_step) + "," +
               std::to_string(r.node) + "," + std::to_string(r.feature) + "," + exact(r.pred) +
               "," + exact(r.truth) + "\n";
    }
    return out;
}

} // namespace stgnn
