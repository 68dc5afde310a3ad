#pragma once

#include "parisi/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace parisi {

// Configuration-level failure: the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Plain key-value model file shared by all tools:
//   xi.kind  = sk | mixture
//   xi.terms = <beta>            (sk)  |  p:beta_p, p:beta_p, ... (mixture)
//   phi.kind = logcosh | tabulated:<csv path>
//   field.h  = <real>
//   step.m   = comma/space separated reals   (optional)
//   step.q   = comma/space separated reals   (optional)
// '#' starts a comment. Unknown keys are configuration errors.
struct ParsedModel {
    ModelSpec model;
    std::optional<StepOrderParameter> step;
};

ParsedModel parse_model_file(const std::string& path);
ParsedModel parse_model_text(const std::string& text, const std::string& origin = "<inline>");

std::vector<double> parse_real_list(const std::string& text);

// GridFunction CSV: two header lines (slopes, column names) then x,value rows.
std::string gridfunction_to_csv(const GridFunction& f);
GridFunction gridfunction_from_csv(const std::string& text);
GridFunction load_gridfunction_csv(const std::string& path);

}  // namespace parisi
