#pragma once

#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cleb/error.hpp"

namespace cleb {

/// Parsed form of the `kind:key=value,key=value` strings used on the command
/// line. A bare token after a key=value pair is appended to that value, so
/// `means=0.5,0.6,0.4` keeps its commas. A body without any '=' (for example
/// `paths:graph.txt`) is stored as `argument`.
struct SpecString {
  std::string kind;
  std::string argument;
  std::map<std::string, std::string> params;

  bool has(const std::string& key) const { return params.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback = {}) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }

  double number(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw DomainError("missing parameter '" + key + "' in '" + kind + "'");
    return parse_double(it->second, key);
  }

  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  long integer(const std::string& key) const {
    const double v = number(key);
    const long r = static_cast<long>(v);
    if (static_cast<double>(r) != v) throw DomainError("parameter '" + key + "' must be an integer");
    return r;
  }

  static double parse_double(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size())
      throw DomainError("cannot parse '" + text + "' as a number for '" + what + "'");
    return v;
  }

  static std::vector<double> parse_list(const std::string& text, char sep = ',') {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t pos = text.find(sep, start);
      const std::string token = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
      if (!token.empty()) out.push_back(parse_double(token, "list"));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return out;
  }
};

inline SpecString parse_spec(std::string_view text) {
  SpecString spec;
  const std::size_t colon = text.find(':');
  spec.kind = std::string(text.substr(0, colon));
  if (spec.kind.empty()) throw DomainError("empty spec string");
  if (colon == std::string_view::npos) return spec;
  const std::string body(text.substr(colon + 1));
  if (body.find('=') == std::string::npos) {
    spec.argument = body;
    return spec;
  }
  std::string last_key;
  std::size_t start = 0;
  while (start <= body.size()) {
    const std::size_t pos = body.find(',', start);
    const std::string token = body.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    const std::size_t eq = token.find('=');
    if (eq != std::string::npos) {
      last_key = token.substr(0, eq);
      spec.params[last_key] = token.substr(eq + 1);
    } else if (!token.empty()) {
      if (last_key.empty()) throw DomainError("malformed spec string '" + std::string(text) + "'");
      spec.params[last_key] += "," + token;
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return spec;
}

}  // namespace cleb
