#include "covq/cli.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "covq/config.hpp"
#include "covq/covert.hpp"
#include "covq/detect.hpp"
#include "covq/errors.hpp"
#include "covq/experiment.hpp"
#include "covq/exponent.hpp"
#include "covq/json_io.hpp"
#include "covq/model.hpp"
#include "covq/parallel.hpp"
#include "covq/sim.hpp"

namespace covq::cli {
namespace {

// Binds string-valued flags to config keys. After parsing, every flag the
// user actually passed overwrites the corresponding key of the file config.
class FlagMap {
public:
    CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key,
                     const std::string& help) {
        CLI::Option* opt = app->add_option(flag, storage_[key], help);
        bound_.emplace_back(opt, key);
        return opt;
    }

    void apply(KeyValueConfig& cfg) const {
        for (const auto& [opt, key] : bound_) {
            if (opt->count() > 0) cfg.set(key, storage_.at(key));
        }
    }

private:
    std::map<std::string, std::string> storage_;
    std::vector<std::pair<CLI::Option*, std::string>> bound_;
};

struct Common {
    std::string config_path;
    std::string output = "json";
    bool strict = false;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
};

void add_common(CLI::App* sub, Common& common, FlagMap& flags, bool with_rates = true) {
    sub->add_option("--config", common.config_path, "key = value config file; flags override it");
    sub->add_flag("--strict", common.strict, "treat mu <= lambda_w + lambda_b as an error");
    if (with_rates) {
        flags.add(sub, "--lambda-w", "lambda_w", "Willie arrival rate");
        flags.add(sub, "--lambda-b", "lambda_b", "Nillie arrival rate (H1 only)");
        flags.add(sub, "--mu", "mu", "service rate");
    }
}

KeyValueConfig merged_config(const Common& common, const FlagMap& flags) {
    KeyValueConfig cfg;
    if (!common.config_path.empty()) {
        try {
            cfg = KeyValueConfig::load(common.config_path);
        } catch (const ParseError&) {
            throw;
        } catch (const InputError& e) {
            throw InvalidArgument(e.what());
        }
    }
    flags.apply(cfg);
    return cfg;
}

/// "exact" or "monte-carlo" (also "monte_carlo"); defaults to exact whenever
/// the hypotheses differ.
std::string method_of(const KeyValueConfig& cfg, const ModelParams& params) {
    std::string method = cfg.raw("method").value_or(params.lambda_b > 0.0 ? "exact" : "monte-carlo");
    if (method == "monte_carlo") method = "monte-carlo";
    if (method != "exact" && method != "monte-carlo") {
        throw InvalidArgument("method must be exact or monte-carlo");
    }
    return method;
}

std::uint64_t require_u64(const KeyValueConfig& cfg, const std::string& key) {
    auto v = cfg.get_u64(key);
    if (!v) throw InvalidArgument("missing required value '" + key + "'");
    return *v;
}

ModelParams checked_params(const KeyValueConfig& cfg, const Common& common, std::ostream& err) {
    const ModelParams params = params_from_config(cfg, ModelParams{0.0, 0.0, 1.0});
    const ValidationReport report = check(params, common.strict);
    if (!report.valid) throw InvalidArgument(report.message);
    if (!report.stable_regime) err << "warning: " << report.message << '\n';
    return params;
}

std::uint64_t random_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

/// Explicit seed from the config, or a fresh one that is reported on stderr.
RngSeed resolve_seed(const KeyValueConfig& cfg, std::ostream& err, bool& generated) {
    RngSeed seed;
    generated = false;
    if (auto v = cfg.get_u64("seed")) {
        seed.seed = *v;
    } else {
        seed.seed = random_seed();
        generated = true;
        err << "seed: " << seed.seed << " (generated)\n";
    }
    seed.stream_id = cfg.get_u64("stream_id").value_or(0);
    return seed;
}

void check_output_format(const std::string& output, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (output == a) return;
    }
    throw InvalidArgument("unsupported --output '" + output + "' for this command");
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Context& ctx, const Common& common, const FlagMap& flags,
                 const std::string& out_path, const std::string& trace_path) {
    check_output_format(common.output, {"json", "text"});
    const KeyValueConfig cfg = merged_config(common, flags);
    const ModelParams params = checked_params(cfg, common, ctx.err);
    const std::uint64_t n = require_u64(cfg, "n");
    if (n == 0) throw InvalidArgument("n must be >= 1");
    const Hypothesis hyp = parse_hypothesis(cfg.raw("hyp").value_or("h0"));
    const std::string format = cfg.raw("format").value_or("text");
    if (format != "text" && format != "binary") throw InvalidArgument("format must be text or binary");
    SimOptions options;
    options.burn_in = cfg.get_u64("burn_in").value_or(1);
    bool generated = false;
    const RngSeed seed = resolve_seed(cfg, ctx.err, generated);

    ObservationSequence obs;
    if (!trace_path.empty()) {
        SimTrace trace = simulate_trace(params, hyp, n, seed, options);
        std::ofstream tout(trace_path, std::ios::binary);
        if (!tout) throw InputError("cannot open '" + trace_path + "' for writing");
        write_trace_csv(trace, tout);
        obs = std::move(trace.sequence);
    } else {
        obs = simulate_sequence(params, hyp, n, seed, options);
    }

    std::ostream* summary = &ctx.out;
    if (out_path.empty()) {
        if (format == "binary") throw InvalidArgument("binary format needs --out");
        write_text(obs, ctx.out);
        summary = &ctx.err;
    } else {
        save_sequence(obs, out_path, format == "binary" ? SequenceFormat::Binary : SequenceFormat::Text);
    }

    if (common.output == "json") {
        Json j;
        j["n"] = obs.n();
        j["hypothesis"] = std::string(to_string(hyp));
        j["busy_count"] = obs.busy_count();
        j["busy_fraction"] = obs.busy_fraction();
        j["params"] = to_json(params);
        j["seed"] = to_json(seed);
        j["seed_generated"] = generated;
        j["burn_in"] = options.burn_in;
        *summary << j.dump(2) << '\n';
    } else {
        *summary << "n=" << obs.n() << " busy_fraction=" << format_double(obs.busy_fraction())
                 << " seed=" << seed.seed << '\n';
    }
    return kExitOk;
}

int cmd_detect(const Context& ctx, const Common& common, const FlagMap& flags,
               const std::string& input) {
    check_output_format(common.output, {"json", "csv"});
    const KeyValueConfig cfg = merged_config(common, flags);
    const ModelParams params = checked_params(cfg, common, ctx.err);
    const double threshold = cfg.get_double("threshold").value_or(0.0);
    const InitialMode mode = parse_initial_mode(cfg.raw("initial_mode").value_or("stationary"));

    if (!input.empty()) {
        const ObservationSequence obs = load_sequence(input);
        const auto p = transition_matrix(params, Hypothesis::H0);
        const auto q = transition_matrix(params, Hypothesis::H1);
        const LlrResult result = decide(obs, p, q, threshold, mode);
        if (common.output == "csv") {
            ctx.out << "n,llr,decision,threshold\n"
                    << obs.n() << ',' << format_double(result.llr) << ','
                    << to_string(result.decision) << ',' << format_double(threshold) << '\n';
        } else {
            Json j = to_json(result);
            j["n"] = obs.n();
            ctx.out << j.dump(2) << '\n';
        }
        return kExitOk;
    }

    auto n = cfg.get_u64("n");
    if (!n) throw InvalidArgument("detect needs --input FILE or --n N");
    const std::string method = method_of(cfg, params);
    ErrorProbabilities e;
    std::optional<RngSeed> seed;
    if (method == "exact") {
        e = exact_error_probabilities(params, *n, threshold, mode);
    } else {
        bool generated = false;
        seed = resolve_seed(cfg, ctx.err, generated);
        MonteCarloOptions opts;
        opts.threads = static_cast<unsigned>(cfg.get_u64("threads").value_or(default_thread_count()));
        opts.mode = mode;
        e = monte_carlo_error(params, *n, threshold, cfg.get_u64("trials").value_or(10000), *seed, opts);
    }
    Json rec = error_record(params, *n, threshold, e);
    if (common.output == "csv") {
        bool first = true;
        for (const auto& [key, value] : rec.items()) {
            ctx.out << (first ? "" : ",") << key;
            first = false;
        }
        ctx.out << '\n';
        first = true;
        for (const auto& [key, value] : rec.items()) {
            ctx.out << (first ? "" : ",") << value.dump();
            first = false;
        }
        ctx.out << '\n';
    } else {
        if (seed) rec["seed"] = to_json(*seed);
        ctx.out << rec.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_exponent(const Context& ctx, const Common& common, const FlagMap& flags, bool self_check) {
    check_output_format(common.output, {"json", "csv"});
    const KeyValueConfig cfg = merged_config(common, flags);
    const ModelParams base = checked_params(cfg, common, ctx.err);
    const double tol = cfg.get_double("tol").value_or(kDefaultMinimizerTol);

    std::vector<ModelParams> points;
    if (auto grid = cfg.get_double_list("sweep_lambda_b")) {
        for (double lb : *grid) points.push_back({base.lambda_w, lb, base.mu});
    } else {
        points.push_back(base);
    }

    std::vector<ExponentReport> reports;
    for (const auto& p : points) reports.push_back(exponent_report(p, tol));

    if (common.output == "csv") {
        ctx.out << "lambda_w,lambda_b,mu,v,i_err_closed,i_err_numeric,i_err_taylor\n";
        for (const auto& r : reports) {
            ctx.out << format_double(r.params.lambda_w) << ',' << format_double(r.params.lambda_b) << ','
                    << format_double(r.params.mu) << ',' << format_double(r.v_closed) << ','
                    << format_double(r.i_err_closed) << ',' << format_double(r.i_err_numeric) << ','
                    << format_double(r.i_err_taylor) << '\n';
        }
    } else if (reports.size() == 1) {
        ctx.out << to_json(reports.front()).dump(2) << '\n';
    } else {
        Json arr = Json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        ctx.out << arr.dump(2) << '\n';
    }

    if (self_check) {
        for (const auto& r : reports) {
            if (r.small_rate_limit || r.params.lambda_b == 0.0) continue;
            const double dv = std::abs(r.v_closed - r.v_numeric);
            const double di = std::abs(r.i_err_closed - r.i_err_numeric);
            if (dv >= 1e-8 || di >= 1e-10) {
                ctx.err << "self-check failed at lambda_b=" << format_double(r.params.lambda_b)
                        << ": |dv|=" << dv << " |dI|=" << di << '\n';
                return kExitNumeric;
            }
        }
    }
    return kExitOk;
}

int cmd_bound(const Context& ctx, const Common& common, const FlagMap& flags) {
    check_output_format(common.output, {"json", "csv"});
    const KeyValueConfig cfg = merged_config(common, flags);
    const double mu = cfg.get_double("mu").value_or(1.0);
    const auto lw = cfg.get_double("lambda_w");
    if (!lw) throw InvalidArgument("missing required value 'lambda_w'");
    if (!(mu > 0.0)) throw InvalidArgument("mu must be > 0");
    const double lambda_w = *lw / mu;
    CovertnessSpec spec = covertness_from_config(cfg);
    if (!cfg.contains("n")) throw InvalidArgument("missing required value 'n'");
    spec.validate();

    const CovertBound bound = max_covert_rate(lambda_w, spec);
    const auto n_values = cfg.get_u64_list("n_values").value_or(std::vector<std::uint64_t>{spec.n});
    const auto table = scaling_table(lambda_w, spec.epsilon, spec.k, n_values);

    if (common.output == "csv") {
        write_scaling_csv(table, ctx.out);
        return kExitOk;
    }
    Json j;
    j["lambda_w"] = lambda_w;
    j["epsilon"] = spec.epsilon;
    j["N"] = spec.n;
    j["k"] = {{"family", std::string(to_string(spec.k.family))}, {"k0", spec.k.k0}, {"alpha", spec.k.alpha}};
    j["max_covert_rate"] = to_json(bound);
    j["scaling_table"] = Json::array();
    for (const auto& row : table) j["scaling_table"].push_back(to_json(row));
    if (auto lb = cfg.get_double("lambda_b")) {
        const ModelParams params{lambda_w, *lb, 1.0};
        params.validate();
        j["covertness"] = {{"lambda_b", *lb},
                           {"taylor", to_json(covertness_check(params, spec, ExponentMode::Taylor))},
                           {"closed", to_json(covertness_check(params, spec, ExponentMode::Closed))}};
    }
    ctx.out << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_campaign(const Context& ctx, const Common& common, const FlagMap& flags,
                 const std::string& out_prefix) {
    check_output_format(common.output, {"json", "csv"});
    KeyValueConfig cfg = merged_config(common, flags);
    checked_params(cfg, common, ctx.err);
    if (!cfg.contains("n_grid")) throw InvalidArgument("missing required value 'n_grid'");
    bool generated = false;
    const RngSeed seed = resolve_seed(cfg, ctx.err, generated);
    cfg.set("seed", std::to_string(seed.seed));
    const CampaignConfig campaign = campaign_from_config(cfg);
    const auto threads = static_cast<unsigned>(cfg.get_u64("threads").value_or(default_thread_count()));
    if (threads == 0) throw InvalidArgument("threads must be >= 1");

    const ExperimentResult result = run_campaign(campaign, threads);
    if (!out_prefix.empty()) {
        persist(result, out_prefix + ".json");
        persist_csv(result, out_prefix + ".csv");
        ctx.err << "wrote " << out_prefix << ".json and " << out_prefix << ".csv\n";
    } else if (common.output == "csv") {
        write_rows_csv(result, ctx.out);
    } else {
        ctx.out << to_json_string(result);
    }
    return kExitOk;
}

int cmd_sweep(const Context& ctx, const Common& common, const FlagMap& flags) {
    check_output_format(common.output, {"json", "csv"});
    const KeyValueConfig cfg = merged_config(common, flags);
    const ModelParams params = checked_params(cfg, common, ctx.err);
    const std::uint64_t n = require_u64(cfg, "n");

    std::vector<double> thresholds;
    if (auto list = cfg.get_double_list("thresholds")) {
        thresholds = *list;
    } else {
        const double lo = cfg.get_double("gamma_min").value_or(-1.0);
        const double hi = cfg.get_double("gamma_max").value_or(1.0);
        const std::uint64_t steps = cfg.get_u64("gamma_steps").value_or(21);
        if (steps < 2 || !(hi > lo)) throw InvalidArgument("need gamma_max > gamma_min and gamma_steps >= 2");
        for (std::uint64_t i = 0; i < steps; ++i) {
            thresholds.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
        }
    }

    const std::string method = method_of(cfg, params);
    SweepOptions opts;
    opts.use_exact_when_feasible = method == "exact";
    opts.threads = static_cast<unsigned>(cfg.get_u64("threads").value_or(default_thread_count()));
    opts.mode = parse_initial_mode(cfg.raw("initial_mode").value_or("stationary"));
    RngSeed seed;
    if (method == "monte-carlo") {
        bool generated = false;
        seed = resolve_seed(cfg, ctx.err, generated);
    }
    const auto rows = threshold_sweep(params, n, thresholds, cfg.get_u64("trials").value_or(10000), seed, opts);

    if (common.output == "csv") {
        write_sweep_csv(rows, ctx.out);
        return kExitOk;
    }
    Json j;
    j["params"] = to_json(params);
    j["n"] = n;
    j["method"] = method;
    j["rows"] = Json::array();
    for (const auto& r : rows) j["rows"].push_back(to_json(r));
    ctx.out << j.dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"covq: covert queueing analysis for a bufferless M/M/1/1 server"};
    app.require_subcommand(1);

    Common common;
    FlagMap flags;
    std::string out_path, trace_path, input_path;
    bool self_check = false;
    const Context ctx{out, err};

    auto* simulate = app.add_subcommand("simulate", "simulate a busy/idle sequence");
    add_common(simulate, common, flags);
    flags.add(simulate, "--n", "n", "number of recorded arrivals");
    flags.add(simulate, "--seed", "seed", "64-bit RNG seed");
    flags.add(simulate, "--stream", "stream_id", "RNG stream id");
    flags.add(simulate, "--hyp", "hyp", "h0 or h1");
    flags.add(simulate, "--burn-in", "burn_in", "leading arrivals discarded (default 1)");
    flags.add(simulate, "--format", "format", "text or binary sequence file");
    simulate->add_option("--out", out_path, "sequence file (stdout if omitted)");
    simulate->add_option("--trace", trace_path, "also write the arrival trace CSV here");
    simulate->add_option("--output", common.output, "summary format: json or text");

    auto* detect = app.add_subcommand("detect", "run the LLR detector or compute error probabilities");
    add_common(detect, common, flags);
    detect->add_option("--input", input_path, "sequence file to classify");
    flags.add(detect, "--threshold", "threshold", "LLR threshold in nats (default 0)");
    flags.add(detect, "--initial", "initial_mode", "stationary or conditioned");
    flags.add(detect, "--n", "n", "sequence length for error probabilities");
    flags.add(detect, "--method", "method", "exact or monte-carlo");
    flags.add(detect, "--trials", "trials", "Monte Carlo trials per hypothesis");
    flags.add(detect, "--seed", "seed", "64-bit RNG seed");
    flags.add(detect, "--stream", "stream_id", "RNG stream id");
    flags.add(detect, "--threads", "threads", "worker threads");
    detect->add_option("--output", common.output, "json or csv");

    auto* exponent = app.add_subcommand("exponent", "error exponent report");
    add_common(exponent, common, flags);
    flags.add(exponent, "--tol", "tol", "minimiser tolerance on u");
    flags.add(exponent, "--sweep-lambda-b", "sweep_lambda_b", "comma-separated lambda_b values");
    exponent->add_flag("--self-check", self_check, "exit 4 if closed form and numeric disagree");
    exponent->add_option("--output", common.output, "json or csv");

    auto* bound = app.add_subcommand("bound", "largest covert Nillie rate and its scaling in N");
    add_common(bound, common, flags);
    flags.add(bound, "--epsilon", "epsilon", "covertness slack in (0, 1)");
    flags.add(bound, "--n", "n", "observations N");
    flags.add(bound, "--k-family", "k_family", "constant or power");
    flags.add(bound, "--k0", "k0", "K(N) scale");
    flags.add(bound, "--alpha", "alpha", "K(N) = k0 N^-alpha for the power family");
    flags.add(bound, "--n-values", "n_values", "N values for the scaling table");
    bound->add_option("--output", common.output, "json or csv");

    auto* campaign = app.add_subcommand("campaign", "error-probability campaign over an n grid");
    add_common(campaign, common, flags);
    flags.add(campaign, "--n-grid", "n_grid", "comma list or start:step:stop");
    flags.add(campaign, "--trials", "trials_per_point", "Monte Carlo trials per point");
    flags.add(campaign, "--threshold", "threshold", "LLR threshold in nats");
    flags.add(campaign, "--seed", "seed", "master seed");
    flags.add(campaign, "--stream", "stream_id", "master stream id");
    flags.add(campaign, "--use-exact", "use_exact", "true/false: exact binomial rows when possible");
    flags.add(campaign, "--initial", "initial_mode", "stationary or conditioned");
    flags.add(campaign, "--threads", "threads", "worker threads (default $COVQ_THREADS)");
    campaign->add_option("--out", out_path, "write PREFIX.json and PREFIX.csv");
    campaign->add_option("--output", common.output, "stdout format when --out is absent: json or csv");

    auto* sweep = app.add_subcommand("sweep", "error trade-off across LLR thresholds");
    add_common(sweep, common, flags);
    flags.add(sweep, "--n", "n", "sequence length");
    flags.add(sweep, "--thresholds", "thresholds", "comma-separated thresholds");
    flags.add(sweep, "--gamma-min", "gamma_min", "grid start");
    flags.add(sweep, "--gamma-max", "gamma_max", "grid end");
    flags.add(sweep, "--gamma-steps", "gamma_steps", "grid points");
    flags.add(sweep, "--method", "method", "exact or monte-carlo");
    flags.add(sweep, "--trials", "trials", "Monte Carlo trials per hypothesis");
    flags.add(sweep, "--seed", "seed", "64-bit RNG seed");
    flags.add(sweep, "--threads", "threads", "worker threads");
    flags.add(sweep, "--initial", "initial_mode", "stationary or conditioned");
    sweep->add_option("--output", common.output, "json or csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(ctx, common, flags, out_path, trace_path);
        if (*detect) return cmd_detect(ctx, common, flags, input_path);
        if (*exponent) return cmd_exponent(ctx, common, flags, self_check);
        if (*bound) return cmd_bound(ctx, common, flags);
        if (*campaign) return cmd_campaign(ctx, common, flags, out_path);
        if (*sweep) return cmd_sweep(ctx, common, flags);
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitUsage;
}

}  // namespace covq::cli
