#include "hartree/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace hartree {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin])))
        ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1])))
        --end;
    return s.substr(begin, end - begin);
}

bool valid_identifier(const std::string& s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return false;
    return true;
}

} // namespace

void KeyValueConfig::insert(const std::string& key, const std::string& value,
                            const std::string& origin) {
    if (values_.count(key))
        throw ConfigError(origin + ": duplicate key '" + key + "' (first set at " +
                          origins_.at(key) + ")");
    values_[key] = value;
    origins_[key] = origin;
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text, const std::string& origin) {
    KeyValueConfig config;
    std::istringstream stream(text);
    std::string line, section;
    int line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const std::string where = origin + ":" + std::to_string(line_number);
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#' || body[0] == ';')
            continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError(where + ": malformed section header '" + body + "'");
            section = trim(body.substr(1, body.size() - 2));
            if (!valid_identifier(section))
                throw ConfigError(where + ": invalid section name '" + section + "'");
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + body + "'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (!valid_identifier(key))
            throw ConfigError(where + ": invalid key '" + key + "'");
        if (value.empty())
            throw ConfigError(where + ": empty value for key '" + key + "'");
        config.insert(section.empty() ? key : section + "." + key, value, where);
    }
    return config;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream file(path);
    if (!file)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << file.rdbuf();
    return parse_text(text.str(), path);
}

void KeyValueConfig::apply_override(const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    std::string section, leaf = key;
    const std::size_t dot = key.find('.');
    if (dot != std::string::npos) {
        section = trim(key.substr(0, dot));
        leaf = trim(key.substr(dot + 1));
        if (!valid_identifier(section))
            throw ConfigError("override '" + assignment + "': invalid section '" + section + "'");
    }
    if (!valid_identifier(leaf))
        throw ConfigError("override '" + assignment + "': invalid key '" + leaf + "'");
    if (value.empty())
        throw ConfigError("override '" + assignment + "': empty value");
    values_[key] = value;
    origins_[key] = "override '" + assignment + "'";
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::where(const std::string& key) const {
    auto it = origins_.find(key);
    return it == origins_.end() ? std::string("<unset>") : it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    try {
        std::size_t used = 0;
        const double value = std::stod(it->second, &used);
        if (used != it->second.size())
            throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ConfigError(where(key) + ": '" + it->second + "' is not a number (key '" + key +
                          "')");
    }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    try {
        std::size_t used = 0;
        const int value = std::stoi(it->second, &used);
        if (used != it->second.size())
            throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ConfigError(where(key) + ": '" + it->second + "' is not an integer (key '" + key +
                          "')");
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "on" || v == "yes" || v == "1")
        return true;
    if (v == "false" || v == "off" || v == "no" || v == "0")
        return false;
    throw ConfigError(where(key) + ": '" + it->second + "' is not a boolean (key '" + key + "')");
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key,
                                              const std::vector<int>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    std::vector<int> values;
    std::stringstream stream(it->second);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        try {
            std::size_t used = 0;
            values.push_back(std::stoi(item, &used));
            if (used != item.size())
                throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ConfigError(where(key) + ": '" + item + "' is not an integer (in list key '" +
                              key + "')");
        }
    }
    if (values.empty())
        throw ConfigError(where(key) + ": empty list for key '" + key + "'");
    return values;
}

const std::map<std::string, std::vector<std::string>>& config_schema() {
    static const std::map<std::string, std::vector<std::string>> schema = {
        {"", {"scenario"}},
        {"grid", {"dimension", "points", "half_length"}},
        {"potential", {"family", "depth", "width", "lattice_wavevector"}},
        {"interaction", {"family", "mass", "width", "mollifier_index", "mollifier_indices", "sign"}},
        {"initial", {"family", "amplitude", "width", "wavevector"}},
        {"time", {"dt", "t_end", "stride"}},
        {"output", {"directory", "csv", "snapshots"}},
        {"tolerances",
         {"boundary_mass_max", "fit_t_min", "fit_t_max", "dt_fit_t_min", "dt_fit_t_max"}},
        {"scenario", {"epsilon", "c_coeff", "t0", "corpus_size", "pair_count", "band_limit",
                      "seed", "workers"}},
    };
    return schema;
}

void validate_against_schema(const KeyValueConfig& config) {
    const auto& schema = config_schema();
    for (const auto& [key, value] : config.entries()) {
        (void)value;
        std::string section, leaf = key;
        const std::size_t dot = key.find('.');
        if (dot != std::string::npos) {
            section = key.substr(0, dot);
            leaf = key.substr(dot + 1);
        }
        const auto section_it = schema.find(section);
        if (section_it == schema.end())
            throw ConfigError(config.where(key) + ": unknown section '" + section + "'");
        const auto& allowed = section_it->second;
        if (std::find(allowed.begin(), allowed.end(), leaf) == allowed.end())
            throw ConfigError(config.where(key) + ": unknown key '" + key + "'");
    }
}

} // namespace hartree
