#include "covq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "covq/errors.hpp"
#include "covq/json_io.hpp"
#include "covq/parallel.hpp"

namespace covq {

unsigned default_thread_count() {
    if (const char* env = std::getenv("COVQ_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void CampaignConfig::validate() const {
    params.validate();
    if (n_grid.empty()) throw InvalidArgument("n_grid must not be empty");
    if (n_grid.front() == 0) throw InvalidArgument("n_grid values must be >= 1");
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
        if (n_grid[i] <= n_grid[i - 1]) throw InvalidArgument("n_grid must be strictly increasing");
    }
    if (trials_per_point == 0) throw InvalidArgument("trials_per_point must be >= 1");
    if (!std::isfinite(threshold)) throw InvalidArgument("threshold must be finite");
}

std::string_view to_string(Method method) {
    return method == Method::Exact ? "exact" : "monte_carlo";
}

std::optional<double> fit_log_slope(const std::vector<ExperimentRow>& rows,
                                    const std::function<double(const ExperimentRow&)>& field) {
    std::vector<double> xs, ys;
    for (const auto& row : rows) {
        const double p = field(row);
        const double floor = row.method == Method::MonteCarlo
                                 ? 1.0 / static_cast<double>(row.trials)
                                 : std::numeric_limits<double>::min();
        if (!(p >= 10.0 * floor)) continue;
        xs.push_back(static_cast<double>(row.n));
        ys.push_back(std::log(p));
    }
    if (xs.size() < 3) return std::nullopt;
    const double count = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= count;
    my /= count;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

ExperimentResult run_campaign(const CampaignConfig& cfg, unsigned threads) {
    cfg.validate();
    ExperimentResult result;
    result.params = cfg.params;
    result.threshold = cfg.threshold;
    result.mode = cfg.mode;

    const bool exact = cfg.use_exact_when_feasible && cfg.params.lambda_b > 0.0;
    for (std::uint64_t n : cfg.n_grid) {
        ExperimentRow row;
        row.n = n;
        row.seed = derive(cfg.master_seed, {n});
        ErrorProbabilities e;
        if (exact) {
            e = exact_error_probabilities(cfg.params, n, cfg.threshold, cfg.mode);
            row.method = Method::Exact;
        } else {
            MonteCarloOptions opts;
            opts.threads = threads;
            opts.mode = cfg.mode;
            e = monte_carlo_error(cfg.params, n, cfg.threshold, cfg.trials_per_point, row.seed, opts);
            row.method = Method::MonteCarlo;
        }
        row.p_f = e.p_f;
        row.p_m = e.p_m;
        row.p_e = e.p_e;
        row.se_f = e.se_f;
        row.se_m = e.se_m;
        row.trials = e.trials;
        result.rows.push_back(row);
    }

    result.fitted_slope_f = fit_log_slope(result.rows, [](const ExperimentRow& r) { return r.p_f; });
    result.fitted_slope_m = fit_log_slope(result.rows, [](const ExperimentRow& r) { return r.p_m; });
    result.fitted_slope_e = fit_log_slope(result.rows, [](const ExperimentRow& r) { return r.p_e; });
    result.exponent_ref = exponent_report(cfg.params);
    return result;
}

std::vector<SweepRow> threshold_sweep(const ModelParams& params, std::size_t n,
                                      const std::vector<double>& thresholds, std::uint64_t trials,
                                      RngSeed seed, const SweepOptions& options) {
    params.validate();
    if (n == 0) throw InvalidArgument("n must be >= 1");
    if (thresholds.empty()) throw InvalidArgument("threshold list must not be empty");
    const bool exact = options.use_exact_when_feasible && params.lambda_b > 0.0;
    std::vector<SweepRow> rows;
    rows.reserve(thresholds.size());
    for (double gamma : thresholds) {
        ErrorProbabilities e;
        if (exact) {
            e = exact_error_probabilities(params, n, gamma, options.mode);
        } else {
            MonteCarloOptions opts;
            opts.threads = options.threads;
            opts.mode = options.mode;
            e = monte_carlo_error(params, n, gamma, trials, seed, opts);
        }
        rows.push_back({gamma, e.p_f, e.p_m, e.p_e});
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "threshold,p_f,p_m,p_e\n";
    for (const auto& r : rows) {
        out << format_double(r.threshold) << ',' << format_double(r.p_f) << ','
            << format_double(r.p_m) << ',' << format_double(r.p_e) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

class Reader {
public:
    explicit Reader(std::string path) : path_(std::move(path)) {}

    const Json& field(const Json& obj, const std::string& key) const {
        if (!obj.is_object()) throw ParseError("expected an object", 0, path_);
        const auto it = obj.find(key);
        if (it == obj.end()) throw ParseError("missing required field", 0, join(key));
        return *it;
    }

    double number(const Json& obj, const std::string& key) const {
        const Json& v = field(obj, key);
        if (!v.is_number()) throw ParseError("expected a number", 0, join(key));
        return v.get<double>();
    }

    std::optional<double> optional_number(const Json& obj, const std::string& key) const {
        const Json& v = field(obj, key);
        if (v.is_null()) return std::nullopt;
        if (!v.is_number()) throw ParseError("expected a number or null", 0, join(key));
        return v.get<double>();
    }

    std::uint64_t unsigned_integer(const Json& obj, const std::string& key) const {
        const Json& v = field(obj, key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ParseError("expected a non-negative integer", 0, join(key));
        }
        return v.get<std::uint64_t>();
    }

    std::string string(const Json& obj, const std::string& key) const {
        const Json& v = field(obj, key);
        if (!v.is_string()) throw ParseError("expected a string", 0, join(key));
        return v.get<std::string>();
    }

    bool boolean(const Json& obj, const std::string& key) const {
        const Json& v = field(obj, key);
        if (!v.is_boolean()) throw ParseError("expected a boolean", 0, join(key));
        return v.get<bool>();
    }

    Reader child(const std::string& key) const { return Reader(join(key)); }

private:
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    std::string path_;
};

ModelParams read_params(const Json& j, const Reader& r) {
    return {r.number(j, "lambda_w"), r.number(j, "lambda_b"), r.number(j, "mu")};
}

RngSeed read_seed(const Json& j, const Reader& r) {
    return {r.unsigned_integer(j, "seed"), r.unsigned_integer(j, "stream_id")};
}

ExponentReport read_exponent(const Json& j, const Reader& r) {
    ExponentReport rep;
    rep.params = read_params(r.field(j, "params"), r.child("params"));
    rep.v_closed = r.number(j, "v_closed");
    rep.v_numeric = r.number(j, "v_numeric");
    rep.i_err_closed = r.number(j, "i_err_closed");
    rep.i_err_numeric = r.number(j, "i_err_numeric");
    rep.i_err_taylor = r.number(j, "i_err_taylor");
    const Json& abcd = r.field(j, "abcd");
    const Reader ra = r.child("abcd");
    rep.abcd = {ra.number(abcd, "A"), ra.number(abcd, "B"), ra.number(abcd, "C"), ra.number(abcd, "D")};
    const Json& abc = r.field(j, "abc_small");
    const Reader rs = r.child("abc_small");
    rep.abc_small = {rs.number(abc, "a"), rs.number(abc, "b"), rs.number(abc, "c")};
    rep.small_rate_limit = r.boolean(j, "small_rate_limit");
    rep.iterations = static_cast<int>(r.unsigned_integer(j, "iterations"));
    return rep;
}

Method parse_method(const std::string& text, const std::string& field) {
    if (text == "exact") return Method::Exact;
    if (text == "monte_carlo") return Method::MonteCarlo;
    throw ParseError("unknown method '" + text + "'", 0, field);
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

std::string to_json_string(const ExperimentResult& result) {
    return to_json(result).dump(2) + "\n";
}

ExperimentResult from_json_string(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character.
        throw ParseError("malformed JSON", line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), "");
    }
    const Reader r("");
    const auto version = r.unsigned_integer(j, "version");
    if (version != static_cast<std::uint64_t>(kResultFormatVersion)) {
        throw VersionError(static_cast<int>(version), kResultFormatVersion);
    }
    if (r.string(j, "format") != "covq.experiment") {
        throw ParseError("not an experiment result", 0, "format");
    }

    ExperimentResult result;
    result.params = read_params(r.field(j, "params"), r.child("params"));
    result.threshold = r.number(j, "threshold");
    try {
        result.mode = parse_initial_mode(r.string(j, "initial_mode"));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), 0, "initial_mode");
    }
    const Json& rows = r.field(j, "rows");
    if (!rows.is_array()) throw ParseError("expected an array", 0, "rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Reader rr("rows[" + std::to_string(i) + "]");
        const Json& jr = rows[i];
        ExperimentRow row;
        row.n = rr.unsigned_integer(jr, "n");
        row.p_f = rr.number(jr, "p_f");
        row.p_m = rr.number(jr, "p_m");
        row.p_e = rr.number(jr, "p_e");
        row.se_f = rr.number(jr, "se_f");
        row.se_m = rr.number(jr, "se_m");
        row.trials = rr.unsigned_integer(jr, "trials");
        row.seed = read_seed(rr.field(jr, "seed"), rr.child("seed"));
        row.method = parse_method(rr.string(jr, "method"), "rows[" + std::to_string(i) + "].method");
        result.rows.push_back(row);
    }
    result.fitted_slope_f = r.optional_number(j, "fitted_slope_f");
    result.fitted_slope_m = r.optional_number(j, "fitted_slope_m");
    result.fitted_slope_e = r.optional_number(j, "fitted_slope_e");
    result.exponent_ref = read_exponent(r.field(j, "exponent_ref"), r.child("exponent_ref"));
    return result;
}

void persist(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    out << to_json_string(result);
    if (!out) throw InputError("failed writing '" + path + "'");
}

ExperimentResult load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open result file '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

void write_rows_csv(const ExperimentResult& result, std::ostream& out) {
    out << "n,p_f,p_m,p_e,se_f,se_m,trials\n";
    for (const auto& r : result.rows) {
        out << r.n << ',' << format_double(r.p_f) << ',' << format_double(r.p_m) << ','
            << format_double(r.p_e) << ',' << format_double(r.se_f) << ',' << format_double(r.se_m)
            << ',' << r.trials << '\n';
    }
}

void persist_csv(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    write_rows_csv(result, out);
}

CampaignConfig campaign_from_config(const KeyValueConfig& cfg) {
    CampaignConfig c;
    c.params = params_from_config(cfg, c.params);
    if (auto v = cfg.get_u64_list("n_grid")) c.n_grid = *v;
    if (auto v = cfg.get_u64("trials_per_point")) c.trials_per_point = *v;
    if (auto v = cfg.get_double("threshold")) c.threshold = *v;
    if (auto v = cfg.get_u64("seed")) c.master_seed.seed = *v;
    if (auto v = cfg.get_u64("stream_id")) c.master_seed.stream_id = *v;
    if (auto v = cfg.get_bool("use_exact")) c.use_exact_when_feasible = *v;
    if (auto v = cfg.raw("initial_mode")) {
        try {
            c.mode = parse_initial_mode(*v);
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what(), 0, "initial_mode");
        }
    }
    return c;
}

}  // namespace covq
