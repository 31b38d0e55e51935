#include "commands.hpp"

#include "stgnn/baselines.hpp"
#include "stgnn/error.hpp"
#include "stgnn/io.hpp"
#include "stgnn/metrics.hpp"
#include "stgnn/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

namespace stgnn::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::uint64_t init_seed(const RunConfig& cfg) { return splitmix64(cfg.train.seed); }

void check_compatible(const NodeSeries& series, const TopologyGraph& graph, const ModelConfig& m) {
    if (graph.n_nodes != series.n_nodes() || graph.node_ids != series.node_ids) {
        throw validation_error("graph nodes do not match series nodes (" +
                               std::to_string(graph.n_nodes) + " vs " +
                               std::to_string(series.n_nodes()) + ")");
    }
    if (m.n_features != series.n_features()) {
        throw config_error("data/model mismatch: series has " +
                           std::to_string(series.n_features()) + " features, model.n_features is " +
                           std::to_string(m.n_features));
    }
}

ModelConfig config_of(const AnyModel& model) {
    if (const auto* s = std::get_if<StgnnModel>(&model)) {
        return s->config;
    }
    const MlpConfig& m = std::get<MlpBaseline>(model).config;
    ModelConfig c;
    c.window = m.window;
    c.n_features = m.n_features;
    c.horizon = m.horizon;
    c.d_out = m.d_out;
    return c;
}

} // namespace

PreparedData prepare_data(const RunConfig& cfg, const std::optional<Scaler>& fixed_scaler) {
    PreparedData d;
    d.series = read_series(cfg.series_path());
    d.graph = read_graph(cfg.graph_path());
    check_compatible(d.series, d.graph, cfg.model);
    d.adj = normalize(d.graph, cfg.model.normalization);

    auto windows = make_windows(d.series, cfg.model.window, cfg.model.horizon, cfg.data.stride,
                                cfg.model.d_out);
    DatasetSplit raw = chronological_split(std::move(windows), cfg.data.split);
    if (fixed_scaler) {
        if (fixed_scaler->n_nodes != d.series.n_nodes() ||
            fixed_scaler->n_features != d.series.n_features()) {
            throw dimension_error("checkpoint scaler does not match the series shape");
        }
        d.scaler = *fixed_scaler;
    } else {
        d.scaler = fit_scaler(d.series, covered_end(raw.train), cfg.data.scaler_scope);
    }
    auto scale_all = [&](std::vector<WindowSample>& v) {
        for (auto& s : v) s = d.scaler.apply(s);
    };
    scale_all(raw.train);
    scale_all(raw.val);
    scale_all(raw.test);
    d.split = std::move(raw);
    return d;
}

TrainOutcome train_configured(const RunConfig& cfg, const PreparedData& data, std::ostream* progress) {
    EpochCallback cb;
    if (progress != nullptr) {
        cb = [progress](const EpochRecord& r) {
            *progress << "epoch " << r.epoch << " train_loss " << fmt(r.train_loss) << " val_loss "
                      << fmt(r.val_loss) << std::endl;
        };
    }
    switch (cfg.model_kind) {
    case ModelChoice::stgnn: {
        auto r = train(StgnnModel::init(cfg.model, init_seed(cfg)), data.adj, data.split.train,
                       data.split.val, cfg.train, cb);
        return {std::move(r.best_model), std::move(r.log)};
    }
    case ModelChoice::mlp: {
        auto r = train(MlpBaseline::init(cfg.mlp_config(), init_seed(cfg)), data.adj,
                       data.split.train, data.split.val, cfg.train, cb);
        return {std::move(r.best_model), std::move(r.log)};
    }
    case ModelChoice::persistence:
        break;
    }
    throw config_error("the persistence baseline has no parameters to train");
}

const std::vector<WindowSample>& split_by_name(const PreparedData& data, const std::string& name) {
    if (name == "train") return data.split.train;
    if (name == "val") return data.split.val;
    if (name == "test") return data.split.test;
    throw config_error("split must be train, val or test, got '" + name + "'");
}

Evaluation evaluate_model(const AnyModel& model, const PreparedData& data,
                          const std::vector<WindowSample>& samples) {
    return std::visit([&](const auto& m) { return evaluate(m, data.adj, samples, data.scaler); },
                      model);
}

std::vector<SweepPoint> run_sweep(const RunConfig& cfg, SweepKind kind,
                                  const std::vector<std::size_t>& settings, std::size_t jobs,
                                  const std::filesystem::path& log_dir) {
    if (settings.empty()) {
        throw config_error("sweep: no settings requested");
    }
    std::vector<SweepPoint> points(settings.size());
    std::vector<std::exception_ptr> failures(settings.size());

    auto run_point = [&](std::size_t idx) {
        try {
            RunConfig pc = cfg;
            const std::size_t s = settings[idx];
            if (kind == SweepKind::depth) {
                if (s < 1 || s > 6) throw config_error("sweep depth must lie in 1..6");
                pc.model.n_gcn_layers = s;
            } else {
                if (s < 1) throw config_error("sweep horizon must be at least 1");
                pc.model.horizon = s;
            }
            pc.validate();
            const PreparedData data = prepare_data(pc);
            SweepPoint p;
            p.setting = s;
            if (pc.model_kind == ModelChoice::persistence) {
                p.mae = evaluate_persistence(data.split.test, data.scaler).report.mae;
            } else {
                TrainOutcome t = train_configured(pc, data);
                p.mae = evaluate_model(t.model, data, data.split.test).report.mae;
                p.log = std::move(t.log);
                const auto dir = log_dir / ((kind == SweepKind::depth ? "depth_" : "horizon_") +
                                            std::to_string(s));
                atomic_write(dir / "trainlog.csv", train_log_csv(p.log, false));
                atomic_write(dir / "trainlog.json", train_log_json(p.log));
            }
            points[idx] = std::move(p);
        } catch (...) {
            failures[idx] = std::current_exception();
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, settings.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < settings.size(); ++i) run_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < settings.size(); i = next++) run_point(i);
            });
        }
        for (auto& t : pool) t.join();
    }
    for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    return points;
}

std::string sweep_csv(SweepKind kind, const std::vector<SweepPoint>& points) {
    std::string out = kind == SweepKind::depth ? "depth,mae,paper_reported_mae\n"
                                               : "horizon,mae,paper_reported_mae\n";
    for (const auto& p : points) {
        std::string ref;
        if (kind == SweepKind::depth) {
            if (p.setting == kReferenceBestDepth) ref = fmt(kReferenceBestDepthMae);
        } else {
            for (const auto& r : kReferenceHorizonMae) {
                if (r.horizon == p.setting) ref = fmt(r.mae);
            }
        }
        out += std::to_string(p.setting) + "," + fmt(p.mae) + "," + ref + "\n";
    }
    return out;
}

std::string table_csv(const std::string& method, const MetricReport& report) {
    std::string out = metrics_csv_header() + metrics_csv_row(method, report);
    for (const auto& r : kReferenceTable) {
        Metrics m;
        m.mse = r.mse;
        m.rmse = r.rmse;
        m.mape_percent = r.mape;
        m.mae = r.mae;
        out += metrics_csv_row(std::string("paper-reported:") + r.method, m);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::string model;
};

void add_common(CLI::App* sub, CommonOptions& o) {
    sub->add_option("--config", o.config_path, "Run configuration JSON file")->check(CLI::ExistingFile);
    sub->add_option("--set", o.overrides, "Override a config key, e.g. --set train.epochs=5")
        ->take_all();
    sub->add_option("--out-dir", o.out_dir, "Output directory (overrides output_dir)");
}

RunConfig resolve(const CommonOptions& o) {
    std::vector<std::string> overrides = o.overrides;
    if (!o.out_dir.empty()) overrides.push_back("output_dir=\"" + o.out_dir + "\"");
    if (!o.model.empty()) overrides.push_back("model_kind=\"" + o.model + "\"");
    return load_run_config(o.config_path, overrides);
}

Checkpoint load_for(const RunConfig& cfg, const std::string& path) {
    return load_checkpoint(path.empty() ? cfg.output_dir / "checkpoint.json"
                                        : std::filesystem::path(path));
}

RunConfig with_checkpoint_model(RunConfig cfg, const Checkpoint& ckpt) {
    const ModelConfig m = config_of(ckpt.model);
    cfg.model.window = m.window;
    cfg.model.horizon = m.horizon;
    cfg.model.d_out = m.d_out;
    cfg.model.n_features = m.n_features;
    if (std::holds_alternative<StgnnModel>(ckpt.model)) {
        cfg.model = m;
    }
    return cfg;
}

std::vector<std::size_t> parse_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (part.empty()) throw config_error("malformed list '" + s + "'");
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw config_error("malformed list entry '" + part + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spatiotemporal GNN traffic forecasting for distributed backends", "stgnn"};
    app.require_subcommand(1);

    CommonOptions synth_o, ingest_o, train_o, eval_o, predict_o, depth_o, horizon_o;
    std::string csv_path;
    double bin_width = 0.0;
    bool record_timing = false;
    std::string eval_ckpt, eval_split = "test", dump_path;
    std::string predict_ckpt, predict_out;
    std::string depths_arg, horizons_arg;
    std::size_t depth_jobs = 1, horizon_jobs = 1;
    const std::vector<std::string> model_names = {"stgnn", "mlp", "persistence"};

    auto* synth = app.add_subcommand("synth", "Generate a synthetic propagation trace and its graph");
    add_common(synth, synth_o);

    auto* ingest = app.add_subcommand("ingest", "Bin a resource-usage CSV into a series cache and graph");
    add_common(ingest, ingest_o);
    ingest->add_option("--csv", csv_path, "Usage CSV (overrides ingest.csv)");
    ingest->add_option("--bin-width", bin_width, "Bin width in seconds (overrides ingest.bin_width)");

    auto* train_cmd = app.add_subcommand("train", "Train a model and write checkpoint and training log");
    add_common(train_cmd, train_o);
    train_cmd->add_option("--model", train_o.model, "Model kind")->check(CLI::IsMember(model_names));
    train_cmd->add_flag("--record-timing", record_timing,
                        "Write measured wall_ms into trainlog.csv (otherwise 0, keeping the file deterministic)");

    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint (or persistence) on a split");
    add_common(eval, eval_o);
    eval->add_option("--model", eval_o.model, "Model kind")->check(CLI::IsMember(model_names));
    eval->add_option("--checkpoint", eval_ckpt, "Checkpoint path (default <out-dir>/checkpoint.json)");
    eval->add_option("--split", eval_split, "train, val or test")
        ->check(CLI::IsMember({"train", "val", "test"}));
    eval->add_option("--dump-predictions", dump_path, "Write raw-scale predictions CSV here");

    auto* predict_cmd = app.add_subcommand("predict", "Forecast from the most recent window of the series");
    add_common(predict_cmd, predict_o);
    predict_cmd->add_option("--checkpoint", predict_ckpt, "Checkpoint path (default <out-dir>/checkpoint.json)");
    predict_cmd->add_option("--output", predict_out, "Output CSV (default <out-dir>/predictions.csv)");

    auto* depth = app.add_subcommand("sweep-depth", "Test MAE versus number of GCN layers");
    add_common(depth, depth_o);
    depth->add_option("--model", depth_o.model, "Model kind")->check(CLI::IsMember(model_names));
    depth->add_option("--depths", depths_arg, "Comma-separated depths in 1..6 (overrides sweep.depths)");
    depth->add_option("--jobs", depth_jobs, "Parallel sweep workers")->check(CLI::PositiveNumber);

    auto* horizon = app.add_subcommand("sweep-horizon", "Test MAE versus prediction horizon");
    add_common(horizon, horizon_o);
    horizon->add_option("--model", horizon_o.model, "Model kind")->check(CLI::IsMember(model_names));
    horizon->add_option("--horizons", horizons_arg, "Comma-separated horizons (overrides sweep.horizons)");
    horizon->add_option("--jobs", horizon_jobs, "Parallel sweep workers")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        if (!app.get_subcommands().empty()) err << app.get_subcommands().front()->help();
        return kExitUsage;
    }

    try {
        if (synth->parsed()) {
            const RunConfig cfg = resolve(synth_o);
            const SynthOutput s = synth_generate(cfg.synth);
            const auto gpath = cfg.graph_path();
            const auto spath = cfg.series_path();
            write_graph(s.graph, gpath);
            write_series(s.series, spath);
            out << "N=" << s.series.n_nodes() << " T=" << s.series.n_steps()
                << " d=" << s.series.n_features() << "\n"
                << "graph: " << gpath.string() << "\nseries: " << spath.string() << "\n";
        } else if (ingest->parsed()) {
            RunConfig cfg = resolve(ingest_o);
            if (!csv_path.empty()) cfg.ingest.csv = csv_path;
            if (bin_width > 0.0) cfg.ingest.bin_width = bin_width;
            if (cfg.ingest.csv.empty()) throw config_error("ingest: no CSV given (--csv or ingest.csv)");
            IngestOptions opts;
            opts.bin_width_s = cfg.ingest.bin_width;
            opts.columns = cfg.ingest.columns;
            opts.node_filter = cfg.ingest.node_filter;
            const NodeSeries series = ingest_usage_csv(cfg.ingest.csv, opts);
            const auto spath = cfg.series_path();
            write_series(series, spath);
            out << "N=" << series.n_nodes() << " T=" << series.n_steps()
                << " d=" << series.n_features() << "\nseries: " << spath.string() << "\n";
            if (cfg.ingest.graph != GraphSource::none) {
                TopologyGraph g;
                if (cfg.ingest.graph == GraphSource::correlation) {
                    g = build_correlation_graph(series, cfg.ingest.tau, cfg.ingest.max_degree);
                } else {
                    if (cfg.ingest.attributes_csv.empty()) {
                        throw config_error("ingest: colocation graph needs ingest.attributes_csv");
                    }
                    g = build_colocation_graph(
                        series.node_ids, read_attribute_csv(cfg.ingest.attributes_csv,
                                                            cfg.ingest.attribute_id_col,
                                                            cfg.ingest.attribute_col));
                }
                write_graph(g, cfg.graph_path());
                out << "graph: " << cfg.graph_path().string() << " (" << g.edges.size()
                    << " edges)\n";
            }
        } else if (train_cmd->parsed()) {
            const RunConfig cfg = resolve(train_o);
            const PreparedData data = prepare_data(cfg);
            TrainOutcome t = train_configured(cfg, data, &out);
            save_checkpoint({t.model, data.scaler, cfg.train.seed}, cfg.output_dir / "checkpoint.json");
            atomic_write(cfg.output_dir / "trainlog.csv", train_log_csv(t.log, record_timing));
            atomic_write(cfg.output_dir / "trainlog.json", train_log_json(t.log));
            out << "best val loss " << fmt(t.log.best_val_loss) << " at epoch " << t.log.best_epoch
                << "\ncheckpoint: " << (cfg.output_dir / "checkpoint.json").string() << "\n";
        } else if (eval->parsed()) {
            RunConfig cfg = resolve(eval_o);
            Evaluation ev;
            std::string method = to_string(cfg.model_kind);
            if (cfg.model_kind == ModelChoice::persistence) {
                const PreparedData data = prepare_data(cfg);
                ev = evaluate_persistence(split_by_name(data, eval_split), data.scaler);
            } else {
                const Checkpoint ckpt = load_for(cfg, eval_ckpt);
                cfg = with_checkpoint_model(cfg, ckpt);
                const PreparedData data = prepare_data(cfg, ckpt.scaler);
                method = model_kind(ckpt.model);
                ev = evaluate_model(ckpt.model, data, split_by_name(data, eval_split));
            }
            const auto json_path = cfg.output_dir / ("metrics_" + eval_split + ".json");
            const auto csv_out = cfg.output_dir / ("table_" + eval_split + ".csv");
            atomic_write(json_path, report_to_json(ev.report, method));
            atomic_write(csv_out, table_csv(method, ev.report));
            if (!dump_path.empty()) atomic_write(dump_path, predictions_csv(ev));
            out << method << " " << eval_split << ": mse " << fmt(ev.report.mse) << " rmse "
                << fmt(ev.report.rmse) << " mae " << fmt(ev.report.mae) << " mape "
                << fmt(ev.report.mape_percent) << "%\n"
                << "report: " << json_path.string() << "\ntable: " << csv_out.string() << "\n";
        } else if (predict_cmd->parsed()) {
            RunConfig cfg = resolve(predict_o);
            const Checkpoint ckpt = load_for(cfg, predict_ckpt);
            cfg = with_checkpoint_model(cfg, ckpt);
            const NodeSeries series = read_series(cfg.series_path());
            const TopologyGraph graph = read_graph(cfg.graph_path());
            check_compatible(series, graph, cfg.model);
            if (series.n_steps() < cfg.model.window) {
                throw empty_input_error("predict: series shorter than the model window");
            }
            const auto adj = normalize(graph, cfg.model.normalization);
            std::vector<Matrix> window;
            for (std::size_t t = series.n_steps() - cfg.model.window; t < series.n_steps(); ++t) {
                window.push_back(ckpt.scaler.apply(series.values[t]));
            }
            const std::vector<Matrix> pred = std::visit(
                [&](const auto& m) {
                    using M = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<M, StgnnModel>) {
                        return predict(m, adj, window);
                    } else {
                        return mlp_predict(m, window);
                    }
                },
                ckpt.model);
            std::string csv = "horizon_step,node_id,feature,value\n";
            for (std::size_t j = 0; j < pred.size(); ++j) {
                const Matrix raw = ckpt.scaler.invert(pred[j]);
                for (std::size_t i = 0; i < raw.rows(); ++i) {
                    for (std::size_t f = 0; f < raw.cols(); ++f) {
                        char buf[40];
                        std::snprintf(buf, sizeof buf, "%.17g", raw(i, f));
                        csv += std::to_string(j + 1) + "," + series.node_ids[i] + "," +
                               series.feature_names[f] + "," + buf + "\n";
                    }
                }
            }
            const auto path = predict_out.empty() ? cfg.output_dir / "predictions.csv"
                                                  : std::filesystem::path(predict_out);
            atomic_write(path, csv);
            out << "predictions: " << path.string() << "\n";
        } else if (depth->parsed() || horizon->parsed()) {
            const bool is_depth = depth->parsed();
            const RunConfig cfg = resolve(is_depth ? depth_o : horizon_o);
            const std::string& arg = is_depth ? depths_arg : horizons_arg;
            std::vector<std::size_t> settings =
                arg.empty() ? (is_depth ? cfg.sweep.depths : cfg.sweep.horizons) : parse_list(arg);
            const SweepKind kind = is_depth ? SweepKind::depth : SweepKind::horizon;
            const std::string stem = is_depth ? "sweep_depth" : "sweep_horizon";
            const auto points = run_sweep(cfg, kind, settings, is_depth ? depth_jobs : horizon_jobs,
                                          cfg.output_dir / stem);
            const std::string csv = sweep_csv(kind, points);
            atomic_write(cfg.output_dir / (stem + ".csv"), csv);
            out << csv << "csv: " << (cfg.output_dir / (stem + ".csv")).string() << "\n";
        }
    } catch (const numeric_error& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const stgnn::error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

} // namespace stgnn::cli
