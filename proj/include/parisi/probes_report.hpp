#pragma once

#include <optional>
#include <string>
#include <vector>

namespace parisi {

// Outcome of one inequality probe. Asserted probes fail when worst_slack
// drops below -tolerance; Reported probes record findings and never fail
// (their subject is an open question, not a proved theorem).
struct ProbeReport {
    enum class Verdict { Asserted, Reported };

    std::string probe_name;
    int instances = 0;
    double worst_slack = 0.0;  // most negative margin observed
    std::optional<std::string> violating_instance;
    Verdict verdict = Verdict::Asserted;
    bool passed = true;

    std::vector<double> slacks;  // per-instance, for distribution dumps
};

}  // namespace parisi
