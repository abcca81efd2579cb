#include "covq/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "covq/errors.hpp"

namespace covq {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(trim(item));
    return parts;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    try {
        std::size_t used = 0;
        out = std::stod(text, &used);
        return used == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_u64(const std::string& text, std::uint64_t& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !text.empty();
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected 'key = value'", line_no, "");
        }
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no, "");
        if (cfg.entries_.count(key) != 0) throw ParseError("duplicate key", line_no, key);
        cfg.entries_[key] = std::move(value);
        cfg.lines_[key] = line_no;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    return parse(in);
}

void KeyValueConfig::set(const std::string& key, std::string value) {
    entries_[key] = std::move(value);
    lines_.erase(key);
}

std::optional<std::string> KeyValueConfig::raw(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::size_t KeyValueConfig::line_of(const std::string& key) const {
    const auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
    const auto value = raw(key);
    if (!value) return std::nullopt;
    double out = 0.0;
    if (!parse_double(*value, out)) throw ParseError("not a number", line_of(key), key);
    return out;
}

std::optional<std::uint64_t> KeyValueConfig::get_u64(const std::string& key) const {
    const auto value = raw(key);
    if (!value) return std::nullopt;
    std::uint64_t out = 0;
    if (!parse_u64(*value, out)) {
        throw ParseError("not a non-negative integer", line_of(key), key);
    }
    return out;
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
    const auto value = raw(key);
    if (!value) return std::nullopt;
    if (*value == "true" || *value == "1" || *value == "yes") return true;
    if (*value == "false" || *value == "0" || *value == "no") return false;
    throw ParseError("not a boolean", line_of(key), key);
}

std::optional<std::vector<double>> KeyValueConfig::get_double_list(const std::string& key) const {
    const auto value = raw(key);
    if (!value) return std::nullopt;
    std::vector<double> out;
    for (const auto& item : split(*value, ',')) {
        double x = 0.0;
        if (!parse_double(item, x)) throw ParseError("bad list element '" + item + "'", line_of(key), key);
        out.push_back(x);
    }
    return out;
}

std::optional<std::vector<std::uint64_t>> KeyValueConfig::get_u64_list(const std::string& key) const {
    const auto value = raw(key);
    if (!value) return std::nullopt;
    std::vector<std::uint64_t> out;
    if (value->find(':') != std::string::npos) {
        const auto parts = split(*value, ':');
        std::uint64_t start = 0, step = 0, stop = 0;
        if (parts.size() != 3 || !parse_u64(parts[0], start) || !parse_u64(parts[1], step) ||
            !parse_u64(parts[2], stop) || step == 0) {
            throw ParseError("expected range 'start:step:stop'", line_of(key), key);
        }
        for (std::uint64_t n = start; n <= stop; n += step) out.push_back(n);
        return out;
    }
    for (const auto& item : split(*value, ',')) {
        std::uint64_t x = 0;
        if (!parse_u64(item, x)) throw ParseError("bad list element '" + item + "'", line_of(key), key);
        out.push_back(x);
    }
    return out;
}

void KeyValueConfig::write(std::ostream& out) const {
    for (const auto& [key, value] : entries_) out << key << " = " << value << '\n';
}

}  // namespace covq
