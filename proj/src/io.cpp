#include "parisi/io.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace parisi {

json to_json(const StepOrderParameter& s) {
    return json{{"m", s.m}, {"q", s.q}};
}

json to_json(const EvalReport& r) {
    return json{
        {"p_value", r.p_value},
        {"parisi_value", r.parisi_value},
        {"refinement_error", r.refinement_error},
        {"grid", {{"half_width", r.grid.half_width}, {"n_points", r.grid.n_points}}},
    };
}

json to_json(const GradientReport& r) {
    json j{{"dq", r.dq}, {"dm", r.dm}, {"u_values", r.u_values}};
    if (!r.dm_fd_fallback.empty()) j["dm_fd_fallback"] = r.dm_fd_fallback;
    return j;
}

json to_json(const ProbeReport& r) {
    json j{
        {"probe_name", r.probe_name},
        {"instances", r.instances},
        {"worst_slack", r.worst_slack},
        {"verdict", r.verdict == ProbeReport::Verdict::Asserted ? "Asserted" : "Reported"},
    };
    if (r.violating_instance)
        j["violating_instance"] = *r.violating_instance;
    else
        j["violating_instance"] = nullptr;
    j["passed"] = r.passed;
    return j;
}

json to_json(const MinimizeResult& r) {
    return json{
        {"value", r.value},
        {"step", to_json(r.step)},
        {"iterations", r.iterations},
        {"kkt_residual", r.kkt_residual},
        {"start_values", r.start_values},
        {"minimizer_dispersion", r.minimizer_dispersion},
        {"line_search_stalled", r.line_search_stalled},
    };
}

std::string history_csv(const MinimizeResult& r) {
    std::string out = "iteration,value\n";
    char buf[64];
    for (auto& [it, v] : r.history) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g\n", it, v);
        out += buf;
    }
    return out;
}

void atomic_write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
        if (!out.good()) throw std::runtime_error("short write to '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace parisi
