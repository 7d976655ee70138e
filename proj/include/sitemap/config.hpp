#pragma once

#include <map>
#include <string>

namespace sitemap {

// key=value lines, '#' comments, blank lines ignored. Duplicate keys keep the
// last value.
std::map<std::string, std::string> parse_key_value_file(const std::string& path);
std::map<std::string, std::string> parse_key_value_text(const std::string& text,
                                                        const std::string& origin);

// Typed lookups; missing key returns fallback, malformed value throws
// ConfigError naming the key.
double kv_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback);
long long kv_int(const std::map<std::string, std::string>& kv, const std::string& key,
                 long long fallback);
bool kv_bool(const std::map<std::string, std::string>& kv, const std::string& key, bool fallback);
std::string kv_string(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::string& fallback);

// Throws ConfigError when kv contains a key outside `known`.
void kv_reject_unknown(const std::map<std::string, std::string>& kv,
                       std::initializer_list<const char*> known, const std::string& origin);

} // namespace sitemap
