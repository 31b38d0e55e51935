#include "stgnn/baselines.hpp"
#include "stgnn/error.hpp"
#include "stgnn/train.hpp"

#include "test_support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <limits>

using namespace stgnn;
using namespace stgnn::testing;

namespace {

struct TinyData {
    NormalizedAdjacency adj;
    Scaler scaler;
    DatasetSplit split;
};

TinyData tiny_data(std::size_t k = 4, std::size_t h = 1) {
    const auto out = tiny_synth(4, 160);
    TinyData d;
    d.adj = normalize(out.graph);
    auto split = chronological_split(make_windows(out.series, k, h, 1, 1));
    d.scaler = fit_scaler(out.series, covered_end(split.train));
    for (auto* part : {&split.train, &split.val, &split.test})
        for (auto& s : *part) s = d.scaler.apply(s);
    d.split = std::move(split);
    return d;
}

ModelConfig tiny_model(std::size_t k = 4, std::size_t h = 1) {
    ModelConfig c;
    c.d_hidden_gcn = 6;
    c.d_hidden_gru = 6;
    c.window = k;
    c.horizon = h;
    // relu without bias can start fully dead at this width on [0,1] inputs
    c.gcn_activation = Activation::tanh;
    return c;
}

TrainConfig quick(std::size_t epochs = 4) {
    TrainConfig t;
    t.epochs = epochs;
    t.batch_size = 16;
    t.lr = 5e-3;
    return t;
}

// Stub whose predictions are the targets themselves.
struct Oracle {
    std::vector<NamedParameter> parameters() { return {}; }
};
double accumulate_gradients(Oracle&, const NormalizedAdjacency&, const WindowSample&, double) { return 0.0; }
double sample_loss(const Oracle&, const NormalizedAdjacency&, const WindowSample&) { return 0.0; }
std::vector<Matrix> predict_sample(const Oracle&, const NormalizedAdjacency&, const WindowSample& s) {
    return s.targets;
}

} // namespace

TEST_SUITE("optimizer") {

TEST_CASE("config validation") {
    TrainConfig t;
    CHECK_NOTHROW(t.validate());
    t.lr = 0.0;
    CHECK_NOTHROW(t.validate());
    t.lr = -1.0;
    CHECK_THROWS_AS(t.validate(), config_error);
    t = TrainConfig{};
    t.early_stop_patience = 0;
    CHECK_THROWS_AS(t.validate(), config_error);
    t = TrainConfig{};
    t.batch_size = 0;
    CHECK_THROWS_AS(t.validate(), config_error);
}

TEST_CASE("clipping bounds the global norm") {
    RngStream rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        Parameter a(Matrix(3, 4)), b(Matrix(1, 5));
        a.grad = random_matrix(3, 4, rng, -10, 10);
        b.grad = random_matrix(1, 5, rng, -10, 10);
        const std::vector<NamedParameter> ps{{"a", &a}, {"b", &b}};
        const double before = global_grad_norm(ps);
        const double max_norm = rng.uniform(0.1, 30.0);
        const Matrix a0 = a.grad;
        CHECK(clip_gradients(ps, max_norm) == before);
        CHECK(global_grad_norm(ps) <= max_norm + 1e-9);
        if (before <= max_norm) CHECK(a.grad == a0);
    }
}

TEST_CASE("adam with zero gradients leaves parameters unchanged") {
    RngStream rng(2);
    Parameter p(random_matrix(3, 3, rng));
    const Matrix v = p.value;
    const std::vector<NamedParameter> ps{{"p", &p}};
    for (std::size_t step = 1; step <= 5; ++step) adam_step(ps, 1e-2, AdamConfig{}, step);
    CHECK(p.value == v);
}

TEST_CASE("first adam step moves each entry by about lr against the gradient sign") {
    Parameter p(Matrix{{1.0, -1.0}});
    p.grad = Matrix{{0.3, -2.0}};
    adam_step({{"p", &p}}, 0.01, AdamConfig{}, 1);
    CHECK(p.value(0, 0) == doctest::Approx(0.99).epsilon(1e-6));
    CHECK(p.value(0, 1) == doctest::Approx(-0.99).epsilon(1e-6));
}

} // TEST_SUITE

TEST_SUITE("train") {

TEST_CASE("lr = 0 leaves parameters bitwise unchanged") {
    const TinyData d = tiny_data();
    const StgnnModel m = StgnnModel::init(tiny_model(), 3);
    TrainConfig t = quick(3);
    t.lr = 0.0;
    auto r = train(m, d.adj, d.split.train, d.split.val, t);
    StgnnModel copy = m;
    const auto before = copy.parameters();
    const auto after = r.best_model.parameters();
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i].param->value == after[i].param->value);
}

TEST_CASE("same seed and data give the same log and parameters") {
    const TinyData d = tiny_data();
    const StgnnModel m = StgnnModel::init(tiny_model(), 3);
    auto a = train(m, d.adj, d.split.train, d.split.val, quick());
    auto b = train(m, d.adj, d.split.train, d.split.val, quick());
    CHECK(a.log.same_trajectory(b.log));
    CHECK(train_log_csv(a.log, false) == train_log_csv(b.log, false));
    const auto pa = a.best_model.parameters(), pb = b.best_model.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].param->value == pb[i].param->value);

    TrainConfig other = quick();
    other.seed = 7;
    auto c = train(m, d.adj, d.split.train, d.split.val, other);
    CHECK(!a.log.same_trajectory(c.log));
}

TEST_CASE("training reduces validation loss and keeps the best epoch") {
    const TinyData d = tiny_data();
    auto r = train(StgnnModel::init(tiny_model(), 1), d.adj, d.split.train, d.split.val, quick(15));
    REQUIRE(!r.log.epochs.empty());
    CHECK(r.log.best_val_loss < r.log.epochs.front().val_loss);
    double min_val = std::numeric_limits<double>::infinity();
    for (const auto& e : r.log.epochs) min_val = std::min(min_val, e.val_loss);
    CHECK(r.log.best_val_loss == min_val);
    CHECK(r.log.epochs[r.log.best_epoch - 1].val_loss == min_val);
    CHECK(mean_loss(r.best_model, d.adj, d.split.val) == r.log.best_val_loss);
}

TEST_CASE("early stopping triggers after patience epochs without improvement") {
    const TinyData d = tiny_data();
    TrainConfig t = quick(50);
    t.lr = 0.0; // val loss never improves after epoch 1
    t.early_stop_patience = 3;
    auto r = train(StgnnModel::init(tiny_model(), 1), d.adj, d.split.train, d.split.val, t);
    CHECK(r.log.best_epoch == 1);
    CHECK(r.log.epochs.size() == 4);
}

TEST_CASE("empty inputs are rejected") {
    const TinyData d = tiny_data();
    CHECK_THROWS_AS(train(StgnnModel::init(tiny_model(), 1), d.adj, {}, d.split.val, quick()),
                    empty_input_error);
}

TEST_CASE("a diverging run reports the epoch and batch") {
    const TinyData d = tiny_data();
    StgnnModel m = StgnnModel::init(tiny_model(), 1);
    m.decoder.w.assign(Matrix(m.decoder.w.rows(), m.decoder.w.cols(), 1e200));
    try {
        train(m, d.adj, d.split.train, d.split.val, quick());
        FAIL("expected numeric_error");
    } catch (const numeric_error& e) {
        CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
    }
}

TEST_CASE("mlp trains through the same loop") {
    const TinyData d = tiny_data();
    MlpConfig c{4, 3, 8, 1, 1};
    auto r = train(MlpBaseline::init(c, 2), d.adj, d.split.train, d.split.val, quick(10));
    CHECK(r.log.best_val_loss < r.log.epochs.front().val_loss);
}

TEST_CASE("log formats") {
    TrainLog log;
    log.epochs = {{1, 0.5, 0.25, 12.5}, {2, 0.125, 0.0625, 3.0}};
    log.best_epoch = 2;
    log.best_val_loss = 0.0625;
    CHECK(train_log_csv(log, false) == "epoch,train_loss,val_loss,wall_ms\n1,0.5,0.25,0.000\n2,0.125,0.0625,0.000\n");
    CHECK(train_log_csv(log).find("12.5") != std::string::npos);
    const auto j = nlohmann::json::parse(train_log_json(log));
    CHECK(j["best_epoch"] == 2);
    CHECK(j["epochs_run"] == 2);
}

} // TEST_SUITE

TEST_SUITE("evaluate") {

TEST_CASE("perfect predictions give zero metrics") {
    const TinyData d = tiny_data(4, 3);
    const Evaluation e = evaluate(Oracle{}, d.adj, d.split.test, d.scaler);
    CHECK(e.report.mse == 0.0);
    CHECK(e.report.rmse == 0.0);
    CHECK(e.report.mae == 0.0);
    CHECK(e.report.mape_percent == 0.0);
}

TEST_CASE("per-horizon MAE combines to the overall MAE") {
    const TinyData d = tiny_data(4, 3);
    const StgnnModel m = StgnnModel::init(tiny_model(4, 3), 5);
    const Evaluation e = evaluate(m, d.adj, d.split.test, d.scaler);
    REQUIRE(e.report.per_horizon.size() == 3);
    double weighted = 0.0;
    std::size_t n = 0;
    for (const auto& h : e.report.per_horizon) {
        weighted += h.mae * static_cast<double>(h.n_points);
        n += h.n_points;
    }
    CHECK(n == e.report.n_points);
    CHECK(std::abs(weighted / static_cast<double>(n) - e.report.mae) <= 1e-12);
    CHECK(e.rows.size() == e.report.n_points);
}

TEST_CASE("metrics are computed in raw space") {
    const TinyData d = tiny_data(4, 1);
    const StgnnModel m = StgnnModel::init(tiny_model(4, 1), 5);
    const Evaluation e = evaluate(m, d.adj, d.split.test, d.scaler);
    const auto& s0 = d.split.test.front();
    const auto pred = predict_sample(m, d.adj, s0);
    CHECK(e.rows.front().truth == doctest::Approx(d.scaler.invert(s0.targets[0](0, 0), 0, 0)));
    CHECK(e.rows.front().pred == doctest::Approx(d.scaler.invert(pred[0](0, 0), 0, 0)));
}

TEST_CASE("persistence through the evaluator") {
    const TinyData d = tiny_data(4, 2);
    const Evaluation e = evaluate_persistence(d.split.test, d.scaler);
    CHECK(e.report.per_horizon.size() == 2);
    CHECK(e.report.mae > 0.0);
    CHECK(predictions_csv(e).rfind("t_origin,horizon_step,node,feature,pred,truth\n", 0) == 0);
}

} // TEST_SUITE
