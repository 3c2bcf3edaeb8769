#pragma once

// Strict line-oriented config: `key = value` pairs grouped under `[section]`
// headers, full-line comments with '#' or ';', UTF-8. Every key must belong
// to the documented schema; unknown or duplicate keys fail with the file name
// and line number before any computation runs.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hartree {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class KeyValueConfig {
  public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_text(const std::string& text, const std::string& origin);

    // Applies a CLI override of the form "section.key=value" (or "key=value"
    // for the top level). Overrides replace file values and are validated
    // against the same schema.
    void apply_override(const std::string& assignment);

    bool has(const std::string& dotted_key) const;
    std::string get_string(const std::string& dotted_key, const std::string& fallback) const;
    double get_double(const std::string& dotted_key, double fallback) const;
    int get_int(const std::string& dotted_key, int fallback) const;
    bool get_bool(const std::string& dotted_key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& dotted_key,
                                  const std::vector<int>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

    // Context string ("file:line" or "override") for error messages.
    std::string where(const std::string& dotted_key) const;

  private:
    void insert(const std::string& key, const std::string& value, const std::string& where);

    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> origins_;
};

// Keys accepted per section; load-time validation rejects everything else.
// Exposed for the documentation test that keeps README and parser in sync.
const std::map<std::string, std::vector<std::string>>& config_schema();

// Throws ConfigError naming the first unknown key, with its origin.
void validate_against_schema(const KeyValueConfig& config);

} // namespace hartree
