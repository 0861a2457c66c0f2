#include "foe/model.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "foe/errors.hpp"

namespace foe {

void validate_model(const FoeModel& model) {
  if (model.patch_side < 1) {
    throw std::invalid_argument("model: patch side must be >= 1");
  }
  const std::size_t area = static_cast<std::size_t>(model.patch_area());
  for (const Expert& e : model.experts) {
    if (!std::isfinite(e.alpha) || e.alpha <= 0.0) {
      throw std::invalid_argument("model: expert weight must be finite and > 0");
    }
    if (e.filter.size() != area) {
      throw std::invalid_argument("model: filter length does not match patch side");
    }
    for (double c : e.filter) {
      if (!std::isfinite(c)) throw std::invalid_argument("model: non-finite filter coefficient");
    }
  }
}

namespace {

// Whitespace-insensitive token reader that tracks 1-based line numbers.
struct TokenReader {
  const std::string& text;
  std::size_t pos = 0;
  std::size_t line = 1;

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << "model: " << what << " at line " << line;
    throw ParseError(msg.str(), line);
  }

  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
      if (text[pos] == '\n') ++line;
      ++pos;
    }
  }

  bool next_token(std::string& out) {
    skip_space();
    if (pos >= text.size()) return false;
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    out = text.substr(start, pos - start);
    return true;
  }

  long read_int(const char* what) {
    std::string tok;
    if (!next_token(tok)) fail(std::string("expected ") + what);
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size()) fail(std::string("bad ") + what + " '" + tok + "'");
    return v;
  }

  double read_real(const char* what) {
    std::string tok;
    if (!next_token(tok)) fail(std::string("expected ") + what);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) fail(std::string("bad ") + what + " '" + tok + "'");
    return v;
  }
};

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

FoeModel parse_model(const std::string& text) {
  TokenReader in{text};
  std::string magic;
  if (!in.next_token(magic) || magic != "FOE") in.fail("expected magic 'FOE'");

  const long m = in.read_int("patch side");
  if (m < 1 || m > 64) in.fail("patch side out of range [1, 64]");
  const long k = in.read_int("expert count");
  if (k < 0 || k > 4096) in.fail("expert count out of range [0, 4096]");

  FoeModel model;
  model.patch_side = static_cast<int>(m);
  model.experts.reserve(static_cast<std::size_t>(k));
  const long area = m * m;
  for (long i = 0; i < k; ++i) {
    Expert e;
    e.alpha = in.read_real("expert weight");
    if (!std::isfinite(e.alpha) || e.alpha <= 0.0) {
      in.fail("expert weight must be finite and > 0");
    }
    e.filter.reserve(static_cast<std::size_t>(area));
    for (long j = 0; j < area; ++j) {
      const double c = in.read_real("filter coefficient");
      if (!std::isfinite(c)) in.fail("non-finite filter coefficient");
      e.filter.push_back(c);
    }
    model.experts.push_back(std::move(e));
  }

  std::string extra;
  if (in.next_token(extra)) in.fail("trailing token '" + extra + "'");
  validate_model(model);
  return model;
}

std::string serialize_model(const FoeModel& model) {
  validate_model(model);
  std::string out = "FOE\n";
  out += std::to_string(model.patch_side) + " " + std::to_string(model.expert_count()) + "\n";
  for (const Expert& e : model.experts) {
    out += format_real(e.alpha) + "\n";
    for (std::size_t j = 0; j < e.filter.size(); ++j) {
      if (j > 0) out += ' ';
      out += format_real(e.filter[j]);
    }
    out += '\n';
  }
  return out;
}

FoeModel builtin_model(const std::string& name) {
  if (name == "diff2x2") {
    FoeModel model;
    model.patch_side = 2;
    model.experts = {
        {1.0, {1.0, -1.0, 0.0, 0.0}},   // horizontal difference
        {1.0, {1.0, 0.0, -1.0, 0.0}},   // vertical difference
        {1.0, {1.0, 0.0, 0.0, -1.0}},   // diagonal difference
    };
    return model;
  }
  throw std::invalid_argument("unknown builtin model '" + name + "'");
}

}  // namespace foe
