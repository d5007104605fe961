#ifndef DEPHASE_CONFIG_HPP
#define DEPHASE_CONFIG_HPP

// Flat key-value configuration files.
//
//   # comment
//   n_sites  = 12
//   J        = 1.0
//   delta    = 0.5
//   j2       = 1.0
//   hz       = 0.2
//   boundary = open        # or periodic
//
// Keys are case-sensitive; a key may appear once. Unknown keys are rejected by
// the consumer that validates the schema, not by the parser.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dephase/core.hpp"
#include "dephase/lattice_model.hpp"

namespace dephase {

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in) {
        KeyValueConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            if (cfg.values_.count(key))
                throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static KeyValueConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        return parse(in);
    }

    static KeyValueConfig parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& entries() const { return values_; }

    std::optional<std::string> get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<double> get_double(const std::string& key) const {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        return to_double(key, *s);
    }

    std::optional<long long> get_int(const std::string& key) const {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        long long v = 0;
        auto [p, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
        if (ec != std::errc() || p != s->data() + s->size())
            throw ConfigError("key '" + key + "': expected an integer, got '" + *s + "'");
        return v;
    }

    /// Comma-separated integer list, e.g. "2,4,6".
    std::optional<std::vector<int>> get_int_list(const std::string& key) const {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        std::vector<int> out;
        std::stringstream ss(*s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            int v = 0;
            auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (item.empty() || ec != std::errc() || p != item.data() + item.size())
                throw ConfigError("key '" + key + "': bad integer list '" + *s + "'");
            out.push_back(v);
        }
        return out;
    }

    std::optional<std::vector<double>> get_double_list(const std::string& key) const {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        std::vector<double> out;
        std::stringstream ss(*s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
        return out;
    }

    /// Rejects keys outside `allowed`.
    void require_known(const std::set<std::string>& allowed) const {
        for (const auto& [k, v] : values_)
            if (!allowed.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }

private:
    static std::string trim(const std::string& s) {
        auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
        auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
        return b < e ? std::string(b, e) : std::string();
    }

    static double to_double(const std::string& key, const std::string& s) {
        try {
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
        }
    }

    std::map<std::string, std::string> values_;
};

inline const std::set<std::string>& hamiltonian_keys() {
    static const std::set<std::string> keys{"n_sites", "J", "delta", "j2", "hz", "boundary"};
    return keys;
}

/// Reads the Hamiltonian keys; missing keys keep the defaults in `base`.
inline HamiltonianSpec hamiltonian_spec_from_config(const KeyValueConfig& cfg,
                                                    HamiltonianSpec base = {}) {
    if (auto v = cfg.get_int("n_sites")) base.n_sites = static_cast<int>(*v);
    if (auto v = cfg.get_double("J")) base.J = *v;
    if (auto v = cfg.get_double("delta")) base.delta = *v;
    if (auto v = cfg.get_double("j2")) base.j2 = *v;
    if (auto v = cfg.get_double("hz")) base.hz = *v;
    if (auto v = cfg.get_string("boundary")) {
        try {
            base.boundary = parse_boundary(*v);
        } catch (const ArgumentError& e) {
            throw ConfigError(e.what());
        }
    }
    try {
        base.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid Hamiltonian config: ") + e.what());
    }
    return base;
}

} // namespace dephase

#endif // DEPHASE_CONFIG_HPP
