#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace covq {

/// Flat `key = value` configuration. Blank lines and lines starting with
/// '#' are ignored; keys are case-sensitive and may appear once.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig parse_string(const std::string& text);
    static KeyValueConfig load(const std::string& path);

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    void set(const std::string& key, std::string value);

    /// Raw value lookup; nullopt when the key is absent.
    std::optional<std::string> raw(const std::string& key) const;

    // Typed getters throw ParseError naming the key and its source line.
    std::optional<double> get_double(const std::string& key) const;
    std::optional<std::uint64_t> get_u64(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
    std::optional<std::vector<double>> get_double_list(const std::string& key) const;
    /// Accepts either a comma list ("100,200,400") or a range "start:step:stop".
    std::optional<std::vector<std::uint64_t>> get_u64_list(const std::string& key) const;

    void write(std::ostream& out) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::size_t line_of(const std::string& key) const;

    std::map<std::string, std::string> entries_;
    std::map<std::string, std::size_t> lines_;
};

}  // namespace covq
