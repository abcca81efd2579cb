#include "covq/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "covq/errors.hpp"

namespace covq {
namespace {

constexpr std::uint64_t kTagStreamLabel = 0x7461677374726561ull;  // "tagstrea"
constexpr std::array<char, 8> kMagic = {'C', 'O', 'V', 'Q', 'S', 'E', 'Q', '1'};

// Inverse-CDF draw; avoids std::exponential_distribution so streams are
// identical across standard libraries.
inline double exponential(PhiloxEngine& eng, double rate) {
    return -std::log1p(-eng.uniform()) / rate;
}

template <class Sink>
void run_server(const ModelParams& params, Hypothesis hyp, std::size_t total, RngSeed seed,
                Sink&& sink) {
    const double rate = hyp == Hypothesis::H0 ? params.lambda_w : params.lambda_w + params.lambda_b;
    PhiloxEngine eng(seed);
    double clock = 0.0;
    double residual = 0.0;  // remaining service of the job in progress
    for (std::size_t j = 0; j < total; ++j) {
        const double gap = exponential(eng, rate);
        clock += gap;
        residual -= gap;
        const bool busy = residual > 0.0;
        if (!busy) residual = exponential(eng, params.mu);
        sink(j, clock, busy);
    }
}

void check_inputs(const ModelParams& params, std::size_t n) {
    params.validate();
    if (n == 0) throw InvalidArgument("n must be >= 1");
}

}  // namespace

std::size_t ObservationSequence::busy_count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double ObservationSequence::busy_fraction() const {
    return bits.empty() ? 0.0 : static_cast<double>(busy_count()) / static_cast<double>(bits.size());
}

std::size_t SimTrace::nillie_count() const {
    return static_cast<std::size_t>(std::count(origin.begin(), origin.end(), JobOrigin::Nillie));
}

ObservationSequence simulate_sequence(const ModelParams& params, Hypothesis hyp, std::size_t n,
                                      RngSeed seed, const SimOptions& options) {
    check_inputs(params, n);
    ObservationSequence obs;
    obs.bits.resize(n);
    const std::size_t skip = options.burn_in;
    run_server(params, hyp, n + skip, seed, [&](std::size_t j, double, bool busy) {
        if (j >= skip) obs.bits[j - skip] = busy ? 1 : 0;
    });
    return obs;
}

SimTrace simulate_trace(const ModelParams& params, Hypothesis hyp, std::size_t n, RngSeed seed,
                        const SimOptions& options) {
    check_inputs(params, n);
    SimTrace trace;
    trace.arrival_times.reserve(n);
    trace.origin.reserve(n);
    trace.served.reserve(n);
    trace.sequence.bits.reserve(n);

    PhiloxEngine tags({seed.seed, derive_stream(seed.stream_id, {kTagStreamLabel})});
    const double nillie_share =
        hyp == Hypothesis::H1 ? params.lambda_b / (params.lambda_w + params.lambda_b) : 0.0;
    const std::size_t skip = options.burn_in;

    run_server(params, hyp, n + skip, seed, [&](std::size_t j, double clock, bool busy) {
        if (j < skip) return;
        trace.arrival_times.push_back(clock);
        trace.origin.push_back(tags.uniform() < nillie_share ? JobOrigin::Nillie : JobOrigin::Willie);
        trace.served.push_back(busy ? 0 : 1);
        trace.sequence.bits.push_back(busy ? 1 : 0);
    });
    return trace;
}

CountMatrix empirical_transition_counts(const ObservationSequence& obs) {
    if (obs.n() < 2) throw InvalidArgument("transition counts need at least 2 observations");
    CountMatrix counts{};
    for (std::size_t j = 1; j < obs.n(); ++j) ++counts[obs.bits[j - 1]][obs.bits[j]];
    return counts;
}

TransitionMatrix normalize_counts(const CountMatrix& counts) {
    TransitionMatrix m;
    for (int i = 0; i < 2; ++i) {
        const double total = static_cast<double>(counts[i][0] + counts[i][1]);
        if (total == 0.0) continue;
        m.rows[i] = {static_cast<double>(counts[i][0]) / total,
                     static_cast<double>(counts[i][1]) / total};
    }
    return m;
}

void write_text(const ObservationSequence& obs, std::ostream& out) {
    std::string line(obs.n(), '0');
    for (std::size_t j = 0; j < obs.n(); ++j) line[j] = obs.bits[j] ? '1' : '0';
    out << line << '\n';
}

ObservationSequence read_text(std::istream& in) {
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    while (!content.empty() && (content.back() == '\n' || content.back() == '\r')) content.pop_back();
    if (content.empty()) throw InputError("empty observation sequence");
    ObservationSequence obs;
    obs.bits.reserve(content.size());
    for (std::size_t j = 0; j < content.size(); ++j) {
        const char c = content[j];
        if (c != '0' && c != '1') {
            throw InputError("invalid character in observation sequence at position " +
                             std::to_string(j + 1));
        }
        obs.bits.push_back(c == '1' ? 1 : 0);
    }
    return obs;
}

void write_binary(const ObservationSequence& obs, std::ostream& out) {
    out.write(kMagic.data(), kMagic.size());
    std::array<char, 8> header{};
    const std::uint64_t n = obs.n();
    for (int i = 0; i < 8; ++i) header[i] = static_cast<char>((n >> (8 * i)) & 0xFF);
    out.write(header.data(), header.size());
    std::vector<char> packed((obs.n() + 7) / 8, 0);
    for (std::size_t j = 0; j < obs.n(); ++j) {
        if (obs.bits[j]) packed[j / 8] = static_cast<char>(packed[j / 8] | (1 << (j % 8)));
    }
    out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
}

ObservationSequence read_binary(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw InputError("not a binary observation sequence (bad magic)");
    }
    std::array<unsigned char, 8> header{};
    if (!in.read(reinterpret_cast<char*>(header.data()), header.size())) {
        throw InputError("truncated binary sequence header");
    }
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(header[i]) << (8 * i);
    if (n == 0) throw InputError("empty observation sequence");
    std::vector<char> packed((n + 7) / 8);
    if (!in.read(packed.data(), static_cast<std::streamsize>(packed.size()))) {
        throw InputError("truncated binary sequence payload");
    }
    ObservationSequence obs;
    obs.bits.resize(n);
    for (std::size_t j = 0; j < n; ++j) obs.bits[j] = (static_cast<unsigned char>(packed[j / 8]) >> (j % 8)) & 1u;
    return obs;
}

void save_sequence(const ObservationSequence& obs, const std::string& path, SequenceFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    if (format == SequenceFormat::Binary) {
        write_binary(obs, out);
    } else {
        write_text(obs, out);
    }
    if (!out) throw InputError("failed writing '" + path + "'");
}

ObservationSequence load_sequence(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open sequence file '" + path + "'");
    std::array<char, 8> probe{};
    in.read(probe.data(), probe.size());
    const bool binary = in.gcount() == static_cast<std::streamsize>(probe.size()) && probe == kMagic;
    in.clear();
    in.seekg(0);
    return binary ? read_binary(in) : read_text(in);
}

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
    out << "time,origin,served\n";
    for (std::size_t j = 0; j < trace.arrival_times.size(); ++j) {
        out << format_double(trace.arrival_times[j]) << ','
            << (trace.origin[j] == JobOrigin::Nillie ? "nillie" : "willie") << ','
            << static_cast<int>(trace.served[j]) << '\n';
    }
}

}  // namespace covq
