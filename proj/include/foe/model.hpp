#pragma once

#include <string>
#include <vector>

namespace foe {

// One expert of the prior: a weight and an m x m linear filter, row-major.
struct Expert {
  double alpha = 0.0;
  std::vector<double> filter;
};

// Fields-of-Experts filter bank. The trained coefficients come from external
// sources; this type only stores them.
struct FoeModel {
  int patch_side = 1;           // m
  std::vector<Expert> experts;  // size K

  int expert_count() const { return static_cast<int>(experts.size()); }
  int patch_area() const { return patch_side * patch_side; }
};

// Throws std::invalid_argument unless: patch_side >= 1, every filter has
// exactly patch_side^2 finite coefficients, and every alpha is finite and > 0.
void validate_model(const FoeModel& model);

// Parses the FOE text format (see serialize_model). Throws ParseError with a
// 1-based line number on malformed input; a parsed model always satisfies
// validate_model.
FoeModel parse_model(const std::string& text);

// Canonical text form:
//
//   FOE
//   <m> <K>
//   <alpha_1>
//   <b_1 coefficients, m*m of them, space separated>
//   ...
//
// Reals are printed with 17 significant digits, so parse_model on the output
// reproduces the model value-exactly. Tokens after the first line may be
// separated by arbitrary whitespace on input.
std::string serialize_model(const FoeModel& model);

// Built-in stand-in filter banks for testing and demos. These are NOT trained
// FoE filters; published trained banks can be supplied as model files.
//   "diff2x2": m=2, K=3, unit alphas, filters
//              (1,-1,0,0), (1,0,-1,0), (1,0,0,-1)
// Throws std::invalid_argument for unknown names.
FoeModel builtin_model(const std::string& name);

}  // namespace foe
