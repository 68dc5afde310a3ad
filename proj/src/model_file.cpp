#include "parisi/model_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace parisi {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_real(const std::string& text, const std::string& what) {
    try {
        size_t used = 0;
        double v = std::stod(text, &used);
        if (trim(text.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(what + ": cannot parse real value '" + text + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
    std::string cleaned = text;
    for (char& c : cleaned)
        if (c == ',') c = ' ';
    std::istringstream is(cleaned);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_real(tok, "list entry"));
    return out;
}

ParsedModel parse_model_text(const std::string& text, const std::string& origin) {
    std::string xi_kind, xi_terms = "1.0", phi_kind = "logcosh";
    std::optional<double> h;
    std::optional<std::vector<double>> m_vec, q_vec;

    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        if (key == "xi.kind") xi_kind = value;
        else if (key == "xi.terms") xi_terms = value;
        else if (key == "phi.kind") phi_kind = value;
        else if (key == "field.h") h = parse_real(value, "field.h");
        else if (key == "step.m") m_vec = parse_real_list(value);
        else if (key == "step.q") q_vec = parse_real_list(value);
        else throw ConfigError(origin + ": unknown key '" + key + "'");
    }

    if (xi_kind.empty()) throw ConfigError(origin + ": missing key 'xi.kind'");

    ParsedModel out;
    try {
        if (xi_kind == "sk") {
            out.model.xi = MixtureFunction::sk(parse_real(xi_terms, "xi.terms"));
        } else if (xi_kind == "mixture") {
            std::vector<std::pair<int, double>> terms;
            std::string cleaned = xi_terms;
            for (char& c : cleaned)
                if (c == ',') c = ' ';
            std::istringstream ts(cleaned);
            std::string tok;
            while (ts >> tok) {
                size_t colon = tok.find(':');
                if (colon == std::string::npos)
                    throw ConfigError("xi.terms: expected 'p:beta_p', got '" + tok + "'");
                int p = static_cast<int>(parse_real(tok.substr(0, colon), "xi.terms power"));
                double beta = parse_real(tok.substr(colon + 1), "xi.terms coefficient");
                terms.push_back({p, beta});
            }
            out.model.xi = MixtureFunction::mixture(std::move(terms));
        } else {
            throw ConfigError("xi.kind: expected 'sk' or 'mixture', got '" + xi_kind + "'");
        }

        if (phi_kind == "logcosh") {
            out.model.phi = BoundaryFunction::logcosh();
        } else if (phi_kind.rfind("tabulated:", 0) == 0) {
            out.model.phi =
                BoundaryFunction::tabulated(load_gridfunction_csv(phi_kind.substr(10)));
        } else {
            throw ConfigError("phi.kind: expected 'logcosh' or 'tabulated:<path>', got '" +
                              phi_kind + "'");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(origin + ": " + e.what());
    }

    out.model.h = h.value_or(0.0);

    if (m_vec.has_value() != q_vec.has_value())
        throw ConfigError(origin + ": step.m and step.q must be given together");
    if (m_vec) {
        StepOrderParameter step{std::move(*m_vec), std::move(*q_vec)};
        StepValidation v = validate_step(step, /*require_top_one=*/false);
        if (!v.ok) throw ConfigError(origin + ": step.m/step.q: " + v.violation);
        out.step = std::move(step);
    }
    return out;
}

ParsedModel parse_model_file(const std::string& path) {
    return parse_model_text(read_file(path), path);
}

std::string gridfunction_to_csv(const GridFunction& f) {
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "# left_slope=%.17g right_slope=%.17g\n", f.left_slope,
                  f.right_slope);
    os << buf << "x,value\n";
    for (int i = 0; i < f.grid.n_points; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", f.grid.node(i), f.values[i]);
        os << buf;
    }
    return os.str();
}

GridFunction gridfunction_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;

    if (!std::getline(is, line)) throw ConfigError("gridfunction csv: empty input");
    double ls = 0.0, rs = 0.0;
    if (std::sscanf(line.c_str(), "# left_slope=%lf right_slope=%lf", &ls, &rs) != 2)
        throw ConfigError("gridfunction csv: bad slope header '" + line + "'");
    if (!std::getline(is, line) || trim(line) != "x,value")
        throw ConfigError("gridfunction csv: expected 'x,value' header");

    std::vector<double> xs, vs;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty()) continue;
        double x, v;
        if (std::sscanf(line.c_str(), "%lf,%lf", &x, &v) != 2)
            throw ConfigError("gridfunction csv: bad row '" + line + "'");
        xs.push_back(x);
        vs.push_back(v);
    }
    const int n = static_cast<int>(xs.size());
    if (n < 5 || n % 2 == 0)
        throw ConfigError("gridfunction csv: need an odd number of rows, at least 5");
    if (std::fabs(xs.front() + xs.back()) > 1e-9 * std::fabs(xs.back()))
        throw ConfigError("gridfunction csv: domain must be symmetric about 0");
    double dx = (xs.back() - xs.front()) / (n - 1);
    for (int i = 0; i < n; ++i)
        if (std::fabs(xs[i] - (xs.front() + i * dx)) > 1e-9 * std::max(1.0, std::fabs(xs.back())))
            throw ConfigError("gridfunction csv: nodes must be uniformly spaced");

    GridFunction f;
    f.grid = Grid{xs.back(), n};
    f.values = std::move(vs);
    f.left_slope = ls;
    f.right_slope = rs;
    return f;
}

GridFunction load_gridfunction_csv(const std::string& path) {
    return gridfunction_from_csv(read_file(path));
}

}  // namespace parisi
