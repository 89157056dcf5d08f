#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "softenlf.hpp"

namespace testing_support {

inline std::string corpus_path(const std::string& name) { return std::string(SOFTEN_CORPUS_DIR) + "/" + name; }

inline std::string read_corpus(const std::string& name) {
  std::ifstream in(corpus_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + corpus_path(name));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline soften::Diagram prelude() {
  soften::Diagram d;
  soften::parse_into(d, soften::kPreludeText, std::string(soften::kPreludeFile));
  return d;
}

/// Prelude followed by the given corpus files, in order.
template <class... Names>
soften::Diagram load(const Names&... names) {
  soften::Diagram d = prelude();
  (soften::parse_into(d, read_corpus(names), names), ...);
  return d;
}

/// Prelude plus inline source text.
inline soften::Diagram with_prelude(const std::string& text) {
  soften::Diagram d = prelude();
  soften::parse_into(d, text, "<test>");
  return d;
}

inline soften::Expr parse(const std::string& text, std::vector<std::string> scope = {}) {
  return soften::parse_expression(text, std::move(scope));
}

inline soften::Context context(const soften::Diagram&, std::vector<std::pair<std::string, std::string>> entries) {
  std::vector<soften::ContextEntry> out;
  std::vector<std::string> scope;
  for (auto& [name, type] : entries) {
    out.push_back({name, soften::parse_expression(type, scope)});
    scope.push_back(name);
  }
  return soften::Context(std::move(out));
}

inline std::vector<std::string> scope_of(const soften::Context& ctx) { return ctx.names(); }

}  // namespace testing_support
