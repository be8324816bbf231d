#include "compete/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "compete/errors.hpp"

namespace compete {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw ValidationError("config line " + std::to_string(line) + ": " + what);
}

// Strips a trailing comment, honoring double quotes.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& v, int line) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (!v.empty() && (v.front() == '"' || v.back() == '"')) fail(line, "unbalanced quotes");
    return v;
}

double to_double(const std::string& v, int line) {
    double out = 0.0;
    const std::string s = trim(v);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out)) {
        fail(line, "expected a number, got '" + s + "'");
    }
    return out;
}

long long to_integer(const std::string& v, int line) {
    long long out = 0;
    const std::string s = trim(v);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(line, "expected an integer, got '" + s + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

bool valid_name(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Grid RunConfig::grid() const { return Grid::make(domain.dim, domain.lengths, domain.interior_counts); }

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    std::set<std::string> seen_keys;
    bool counts_given = false;
    bool lengths_given = false;

    while (std::getline(in, raw)) {
        ++line;
        const std::string content = trim(strip_comment(raw));
        if (content.empty()) continue;
        if (content.front() == '[') {
            if (content.back() != ']') fail(line, "malformed section header");
            section = trim(content.substr(1, content.size() - 2));
            if (section.rfind("species.", 0) == 0) {
                const std::string name = section.substr(8);
                if (!valid_name(name)) fail(line, "invalid species name '" + name + "'");
                for (const auto& s : cfg.species) {
                    if (s.name == name) fail(line, "duplicate species '" + name + "'");
                }
                cfg.species.push_back({name, ""});
            } else if (section == "sweep") {
                cfg.sweep.emplace();
            } else if (section != "domain" && section != "solver" && section != "outputs" &&
                       section != "parameters") {
                fail(line, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(content.substr(0, eq));
        const std::string value = unquote(trim(content.substr(eq + 1)), line);
        if (section.empty()) fail(line, "key outside of a section");
        if (!seen_keys.insert(section + "." + key).second) fail(line, "duplicate key '" + key + "'");

        if (section == "domain") {
            if (key == "dim") {
                cfg.domain.dim = static_cast<int>(to_integer(value, line));
            } else if (key == "lengths") {
                cfg.domain.lengths.clear();
                for (const auto& item : split_list(value)) cfg.domain.lengths.push_back(to_double(item, line));
                lengths_given = true;
            } else if (key == "interior_counts") {
                cfg.domain.interior_counts.clear();
                for (const auto& item : split_list(value)) {
                    cfg.domain.interior_counts.push_back(static_cast<int>(to_integer(item, line)));
                }
                counts_given = true;
            } else if (key == "potential") {
                cfg.domain.potential = to_double(value, line);
            } else {
                fail(line, "unknown key '" + key + "' in [domain]");
            }
        } else if (section == "parameters") {
            if (!valid_name(key)) fail(line, "invalid parameter name '" + key + "'");
            cfg.parameters.emplace_back(key, to_double(value, line));
        } else if (section.rfind("species.", 0) == 0) {
            if (key != "growth") fail(line, "unknown key '" + key + "' in [" + section + "]");
            if (value.empty()) fail(line, "empty growth expression");
            cfg.species.back().growth = value;
        } else if (section == "solver") {
            if (key == "tol_outer") {
                cfg.solver.tol_outer = to_double(value, line);
            } else if (key == "tol_inner") {
                cfg.solver.tol_inner = to_double(value, line);
            } else if (key == "max_iter") {
                const long long m = to_integer(value, line);
                if (m <= 0) fail(line, "max_iter must be positive");
                cfg.solver.max_iter = static_cast<std::size_t>(m);
            } else {
                fail(line, "unknown key '" + key + "' in [solver]");
            }
        } else if (section == "outputs") {
            if (key == "fields_path") {
                cfg.outputs.fields_path = value;
            } else if (key == "report_path") {
                cfg.outputs.report_path = value;
            } else if (key == "table_path") {
                cfg.outputs.table_path = value;
            } else {
                fail(line, "unknown key '" + key + "' in [outputs]");
            }
        } else if (section == "sweep") {
            if (key == "parameter") {
                cfg.sweep->parameter = value;
            } else if (key == "from") {
                cfg.sweep->from = to_double(value, line);
            } else if (key == "to") {
                cfg.sweep->to = to_double(value, line);
            } else if (key == "step") {
                cfg.sweep->step = to_double(value, line);
            } else {
                fail(line, "unknown key '" + key + "' in [sweep]");
            }
        }
    }
    if (cfg.domain.dim == 2) {
        if (!lengths_given) cfg.domain.lengths = {1.0, 1.0};
        if (!counts_given) cfg.domain.interior_counts = {100, 100};
    }
    for (const auto& s : cfg.species) {
        if (s.growth.empty()) throw ValidationError("species '" + s.name + "' has no growth expression");
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const RunConfig& c) {
    const auto& d = c.domain;
    if (d.dim != 1 && d.dim != 2) throw ValidationError("domain.dim must be 1 or 2");
    if (d.lengths.size() != static_cast<std::size_t>(d.dim) ||
        d.interior_counts.size() != static_cast<std::size_t>(d.dim)) {
        throw ValidationError("domain needs one length and one interior count per axis");
    }
    for (double l : d.lengths) {
        if (!(l > 0.0)) throw ValidationError("domain lengths must be positive");
    }
    for (int n : d.interior_counts) {
        if (n < 3) throw ValidationError("domain interior_counts must be >= 3, got " + std::to_string(n));
    }
    if (!std::isfinite(d.potential)) throw ValidationError("domain.potential must be finite");
    if (!(c.solver.tol_outer > 0.0)) throw ValidationError("solver.tol_outer must be positive");
    if (c.solver.tol_inner < 0.0) throw ValidationError("solver.tol_inner must be positive");
    std::set<std::string> names;
    for (const auto& [name, value] : c.parameters) {
        if (!names.insert(name).second) throw ValidationError("duplicate parameter '" + name + "'");
        if (name == "u" || name == "v" || name == "exp" || name == "log" ||
            (name.size() > 1 && name[0] == 'u' &&
             name.find_first_not_of("0123456789", 1) == std::string::npos)) {
            throw ValidationError("parameter name '" + name + "' is reserved");
        }
    }
    if (c.sweep) {
        const auto& s = *c.sweep;
        if (s.parameter.empty()) throw ValidationError("sweep.parameter is required");
        if (!names.count(s.parameter)) {
            throw ValidationError("sweep parameter '" + s.parameter + "' is not declared in [parameters]");
        }
        if (!(s.step > 0.0)) throw ValidationError("sweep.step must be positive");
    }
}

std::vector<double> sweep_values(const RunConfig::Sweep& s) {
    std::vector<double> out;
    if (s.from > s.to) return out;
    const double span = (s.to - s.from) / s.step;
    const auto count = static_cast<long long>(std::floor(span + 1e-9)) + 1;
    for (long long k = 0; k < count; ++k) out.push_back(s.from + static_cast<double>(k) * s.step);
    return out;
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    const auto join = [](const auto& v, auto&& f) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
        return s;
    };
    os << "[domain]\n";
    os << "dim = " << c.domain.dim << "\n";
    os << "lengths = " << join(c.domain.lengths, fmt) << "\n";
    os << "interior_counts = "
       << join(c.domain.interior_counts, [](int n) { return std::to_string(n); }) << "\n";
    os << "potential = " << fmt(c.domain.potential) << "\n";
    if (!c.parameters.empty()) {
        os << "\n[parameters]\n";
        for (const auto& [name, value] : c.parameters) os << name << " = " << fmt(value) << "\n";
    }
    for (const auto& s : c.species) {
        os << "\n[species." << s.name << "]\n";
        os << "growth = \"" << s.growth << "\"\n";
    }
    os << "\n[solver]\n";
    os << "tol_outer = " << fmt(c.solver.tol_outer) << "\n";
    os << "tol_inner = " << fmt(c.solver.tol_inner) << "\n";
    os << "max_iter = " << c.solver.max_iter << "\n";
    os << "\n[outputs]\n";
    os << "fields_path = \"" << c.outputs.fields_path << "\"\n";
    os << "report_path = \"" << c.outputs.report_path << "\"\n";
    os << "table_path = \"" << c.outputs.table_path << "\"\n";
    if (c.sweep) {
        os << "\n[sweep]\n";
        os << "parameter = " << c.sweep->parameter << "\n";
        os << "from = " << fmt(c.sweep->from) << "\n";
        os << "to = " << fmt(c.sweep->to) << "\n";
        os << "step = " << fmt(c.sweep->step) << "\n";
    }
    return os.str();
}

}  // namespace compete
