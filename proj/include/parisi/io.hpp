#pragma once

#include "parisi/lmnorm.hpp"
#include "parisi/optimize.hpp"
#include "parisi/parisi_eval.hpp"
#include "parisi/probes_report.hpp"

#include "json.hpp"

#include <string>

namespace parisi {

using json = nlohmann::ordered_json;

json to_json(const EvalReport& r);
json to_json(const GradientReport& r);
json to_json(const ProbeReport& r);  // one probe -> one JSON-lines object
json to_json(const MinimizeResult& r);
json to_json(const StepOrderParameter& s);

std::string history_csv(const MinimizeResult& r);

// write-temp-then-rename so report files are never observed half-written
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace parisi
