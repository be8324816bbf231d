#include "compete/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "compete/errors.hpp"

namespace compete {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> species_names(const RunConfig& c) {
    std::vector<std::string> names;
    for (const auto& s : c.species) names.push_back(s.name);
    return names;
}

void write_text(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

nlohmann::json monotone_json(const MonotoneStats& s) {
    return {{"steps", s.steps},
            {"worst_upper_increase", s.worst_upper_increase},
            {"worst_lower_decrease", s.worst_lower_decrease},
            {"worst_crossing", s.worst_crossing},
            {"newton_jumps", s.newton_jumps}};
}

nlohmann::json sandwich_json(const SandwichCertificate& cert, const std::vector<std::string>& names) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < cert.species.size(); ++i) {
        const auto& c = cert.species[i];
        arr.push_back({{"species", i + 1},
                       {"name", i < names.size() ? names[i] : ""},
                       {"lower_ok", c.lower_ok},
                       {"upper_ok", c.upper_ok},
                       {"strict_lower", c.strict_lower},
                       {"strict_upper", c.strict_upper},
                       {"worst_lower_margin", c.worst_lower_margin},
                       {"worst_upper_margin", c.worst_upper_margin}});
    }
    return arr;
}

void print_summary(const CriterionReport& r, const std::vector<std::string>& names, std::ostream& out) {
    out << std::setprecision(10);
    out << "lambda1 = " << r.lambda1 << "\n";
    out << "existence: " << (r.existence.verdict ? "holds" : "fails") << " (margins:";
    for (const auto& m : r.existence.species) out << ' ' << names.at(m.species) << '=' << m.margin;
    out << ")\n";
    out << "nonexistence: " << (r.nonexistence.verdict ? "certified" : "not certified") << " (margins:";
    for (const auto& m : r.nonexistence.species) out << ' ' << names.at(m.species) << '=' << m.margin;
    out << ")\n";
    if (r.uniqueness_2sp) {
        const auto& u = *r.uniqueness_2sp;
        out << "uniqueness (two-species): lhs=" << u.lhs << " rhs=" << u.rhs << " R1=" << u.r1
            << " R2=" << u.r2 << " -> " << (u.verdict ? "holds" : "fails") << "\n";
    }
    if (r.uniqueness_nsp) {
        const auto& u = *r.uniqueness_nsp;
        out << "uniqueness (N-species): K=" << u.k << " -> " << (u.verdict ? "holds" : "fails") << "\n";
    }
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::out_of_range("no CSV column '" + name + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    return std::strtod(rows.at(row).at(col).c_str(), nullptr);
}

std::string resolve_output(const std::string& configured, const CommandOptions& opts) {
    if (!opts.out_dir) return configured;
    const std::filesystem::path p(configured);
    if (p.is_absolute()) return configured;
    return (std::filesystem::path(*opts.out_dir) / p).string();
}

GrowthModel build_model(const RunConfig& config, const Expr::Parameters& overrides) {
    const int n = static_cast<int>(config.species.size());
    if (n < 1) throw ValidationError("config declares no species");
    Expr::Parameters params(config.parameters.begin(), config.parameters.end());
    for (const auto& [name, value] : overrides) params[name] = value;
    std::vector<Expr> rates;
    for (const auto& s : config.species) {
        try {
            rates.push_back(Expr::parse(s.growth, n, params));
        } catch (const ParseError& e) {
            throw ParseError("species '" + s.name + "': " + std::string(e.what()).substr(0, std::string(e.what()).rfind(" at position")),
                             e.position());
        }
    }
    return GrowthModel::build(std::move(rates));
}

CoexistOptions coexist_options(const RunConfig& config, const CommandOptions& opts) {
    CoexistOptions o;
    o.tol = opts.tol.value_or(config.solver.tol_outer);
    o.inner_tol = config.solver.tol_inner;
    o.max_iterations = config.solver.max_iter;
    o.logistic.tol = o.tol;
    o.logistic.inner_tol = config.solver.tol_inner;
    o.logistic.max_iterations = std::max<std::size_t>(config.solver.max_iter, 1000);
    return o;
}

void write_fields_csv(const std::string& path, const Grid& grid, const std::vector<std::string>& names,
                      const std::vector<const ScalarField*>& columns) {
    std::ostringstream os;
    os << "x";
    if (grid.dim() == 2) os << ",y";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.coords(k);
        os << fmt(x[0]);
        if (grid.dim() == 2) os << ',' << fmt(x[1]);
        for (const ScalarField* f : columns) os << ',' << fmt((*f)[k]);
        os << '\n';
    }
    write_text(path, os.str());
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    const auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    if (std::getline(in, line)) t.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty()) t.rows.push_back(split(line));
    }
    return t;
}

int cmd_eigen(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream&) {
    const Grid grid = config.grid();
    EigenOptions eo;
    if (opts.tol) eo.tol = *opts.tol;
    const EigenResult r = principal_eigenpair(grid, ScalarField(grid, config.domain.potential), eo);
    out << std::setprecision(12) << "lambda1 = " << r.lambda1 << "\n"
        << "residual = " << r.residual << "\n"
        << "iterations = " << r.iterations << "\n";
    write_fields_csv(resolve_output(config.outputs.fields_path, opts), grid, {"phi1"}, {&r.phi1});
    return kExitOk;
}

int cmd_check(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream&) {
    const Grid grid = config.grid();
    const GrowthModel model = build_model(config);
    const auto names = species_names(config);
    const Evaluation ev = evaluate_criteria(grid, model, coexist_options(config, opts), names);
    write_text(resolve_output(config.outputs.report_path, opts), to_json(ev.report).dump(2) + "\n");
    print_summary(ev.report, names, out);
    if (ev.report.existence.verdict) {
        out << "verdict: coexistence state exists\n";
        return kExitOk;
    }
    if (ev.report.nonexistence.verdict) {
        out << "verdict: no positive solution\n";
        return kExitCriterionNegative;
    }
    out << "verdict: inconclusive (neither criterion applies)\n";
    return kExitOk;
}

int cmd_solve(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    const Grid grid = config.grid();
    const GrowthModel model = build_model(config);
    const auto names = species_names(config);
    const int n = model.species();
    const CoexistOptions co = coexist_options(config, opts);
    const Evaluation ev = evaluate_criteria(grid, model, co, names);
    print_summary(ev.report, names, out);

    nlohmann::json solution;
    std::vector<ScalarField> lower_cols, upper_cols;
    Tuple fields;
    std::vector<double> residuals;

    if (ev.report.existence.verdict) {
        const CoexistencePair& pair = *ev.pair;
        const PairReport pr = verify_pair(model, pair, co.tol);
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : pr.checks) {
            checks.push_back({{"species", c.species + 1}, {"inequality", c.upper ? "upper" : "lower"},
                              {"worst_margin", c.worst_margin}, {"holds", c.holds}});
        }
        if (!pr.holds()) throw NumericalError("constructed upper/lower pair fails its inequalities");
        const CoexistenceResult res = solve_coexistence(grid, model, pair, co);
        MonotoneStats stats = pair.stats;
        stats.merge(res.stats);
        solution = {{"mode", "pair"},
                    {"iterations", res.iterations},
                    {"residuals", res.residuals},
                    {"maximal_minimal_gap", res.maximal_minimal_gap},
                    {"unique_in_sector", res.unique_in_sector},
                    {"sandwich", sandwich_json(res.certificate, names)},
                    {"sandwich_holds", res.certificate.holds()},
                    {"pair_check", checks},
                    {"monotone", monotone_json(stats)},
                    {"shifts", res.shifts}};
        fields = res.fields;
        residuals = res.residuals;
        lower_cols = pair.lowers;
        upper_cols = pair.uppers;
        if (!res.unique_in_sector) {
            err << "warning: maximal and minimal states differ by " << res.maximal_minimal_gap
                << "; writing their midpoint\n";
        }
    } else if (!opts.force) {
        out << "refusing to solve: existence criterion fails (use --force to iterate anyway)\n";
        write_text(resolve_output(config.outputs.report_path, opts),
                   nlohmann::json{{"criteria", to_json(ev.report)}, {"solution", nullptr}}.dump(2) + "\n");
        return kExitCriterionNegative;
    } else {
        // Forced: plain iteration from the carrying capacities, bracketed by
        // [0, c_i]; species certified to die out also get the decay check.
        Tuple start;
        for (int i = 0; i < n; ++i) start.emplace_back(grid, model.capacity(i));
        const IterateResult res = iterate_from(grid, model, std::move(start), co);
        nlohmann::json decay = nlohmann::json::array();
        for (const auto& m : ev.report.nonexistence.species) {
            if (!m.holds) continue;
            const DecayResult d = decay_check(grid, model, m.species, 1e-6, co);
            decay.push_back({{"species", m.species + 1}, {"final_sup", d.final_sup},
                             {"iterations", d.iterations}, {"decayed", d.decayed}});
        }
        solution = {{"mode", "forced"},
                    {"iterations", res.iterations},
                    {"residuals", res.residuals},
                    {"decay", decay}};
        fields = res.fields;
        residuals = res.residuals;
        for (int i = 0; i < n; ++i) {
            lower_cols.emplace_back(grid, 0.0);
            upper_cols.emplace_back(grid, model.capacity(i));
        }
    }

    std::vector<double> sups;
    for (const auto& f : fields) sups.push_back(norms(f).sup);
    solution["sup_norms"] = sups;

    std::vector<std::string> header = names;
    std::vector<const ScalarField*> cols;
    for (const auto& f : fields) cols.push_back(&f);
    for (int i = 0; i < n; ++i) {
        header.push_back(names[i] + "_lower");
        cols.push_back(&lower_cols[i]);
    }
    for (int i = 0; i < n; ++i) {
        header.push_back(names[i] + "_upper");
        cols.push_back(&upper_cols[i]);
    }
    write_fields_csv(resolve_output(config.outputs.fields_path, opts), grid, header, cols);
    write_text(resolve_output(config.outputs.report_path, opts),
               nlohmann::json{{"criteria", to_json(ev.report)}, {"solution", solution}}.dump(2) + "\n");

    out << std::setprecision(10);
    for (int i = 0; i < n; ++i) {
        out << names[i] << ": sup = " << sups[i] << ", residual = " << residuals[i] << "\n";
    }
    return kExitOk;
}

namespace {

struct SweepRow {
    double parameter = 0.0;
    double lambda1 = NAN;
    std::vector<double> existence_margins;
    int existence = -1;
    int nonexistence = -1;
    double uniq2_lhs = NAN, uniq2_rhs = NAN;
    double uniqn_k = NAN, uniqn_min_margin = NAN;
    std::vector<double> sups;
    std::string status = "ok";
};

SweepRow run_sweep_case(const RunConfig& config, const CommandOptions& opts, const Grid& grid,
                        const EigenResult& eigen, double value) {
    const int n = static_cast<int>(config.species.size());
    SweepRow row;
    row.parameter = value;
    row.lambda1 = eigen.lambda1;
    row.existence_margins.assign(n, NAN);
    row.sups.assign(n, NAN);
    try {
        const GrowthModel model = build_model(config, {{config.sweep->parameter, value}});
        const CoexistOptions co = coexist_options(config, opts);
        const Evaluation ev = evaluate_criteria(grid, model, eigen, co);
        const CriterionReport& r = ev.report;
        for (int i = 0; i < n; ++i) row.existence_margins[i] = r.existence.species[i].margin;
        row.existence = r.existence.verdict;
        row.nonexistence = r.nonexistence.verdict;
        if (r.uniqueness_2sp) {
            row.uniq2_lhs = r.uniqueness_2sp->lhs;
            row.uniq2_rhs = r.uniqueness_2sp->rhs;
        }
        if (r.uniqueness_nsp) {
            row.uniqn_k = r.uniqueness_nsp->k;
            row.uniqn_min_margin = INFINITY;
            for (const auto& s : r.uniqueness_nsp->species) {
                row.uniqn_min_margin = std::min(row.uniqn_min_margin, s.lhs - s.rhs);
            }
        }
        Tuple fields;
        if (r.existence.verdict) {
            fields = solve_coexistence(grid, model, *ev.pair, co).fields;
        } else {
            Tuple start;
            for (int i = 0; i < n; ++i) start.emplace_back(grid, model.capacity(i));
            fields = iterate_from(grid, model, std::move(start), co).fields;
        }
        for (int i = 0; i < n; ++i) row.sups[i] = norms(fields[i]).sup;
    } catch (const std::exception& e) {
        row.status = e.what();
        for (char& c : row.status) {
            if (c == ',' || c == '\n' || c == '"') c = ';';
        }
    }
    return row;
}

}  // namespace

int cmd_sweep(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream&) {
    if (!config.sweep) throw ValidationError("sweep command needs a [sweep] section");
    const Grid grid = config.grid();
    const auto names = species_names(config);
    const auto values = sweep_values(*config.sweep);
    EigenOptions eo;
    const EigenResult eigen = principal_eigenpair(grid, eo);

    // Cases are independent; rows land at their parameter's index so the table
    // order never depends on completion order.
    std::vector<SweepRow> rows(values.size());
    const auto count = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
        rows[c] = run_sweep_case(config, opts, grid, eigen, values[c]);
    }

    std::ostringstream os;
    os << "parameter,lambda1";
    for (const auto& nm : names) os << ",existence_margin_" << nm;
    os << ",existence,nonexistence,uniq2_lhs,uniq2_rhs,uniqN_K,uniqN_min_margin";
    for (const auto& nm : names) os << ",sup_" << nm;
    os << ",status\n";
    for (const auto& r : rows) {
        os << fmt(r.parameter) << ',' << fmt(r.lambda1);
        for (double m : r.existence_margins) os << ',' << fmt(m);
        os << ',' << r.existence << ',' << r.nonexistence << ',' << fmt(r.uniq2_lhs) << ','
           << fmt(r.uniq2_rhs) << ',' << fmt(r.uniqn_k) << ',' << fmt(r.uniqn_min_margin);
        for (double s : r.sups) os << ',' << fmt(s);
        os << ',' << r.status << '\n';
    }
    const std::string path = resolve_output(config.outputs.table_path, opts);
    write_text(path, os.str());
    out << "sweep: " << rows.size() << " cases written to " << path << "\n";
    return kExitOk;
}

int run_command(const std::string& command, const std::string& path, const CommandOptions& opts,
                std::ostream& out, std::ostream& err) {
    try {
        const RunConfig config = load_config(path);
        if (command == "eigen") return cmd_eigen(config, opts, out, err);
        if (command == "check") return cmd_check(config, opts, out, err);
        if (command == "solve") return cmd_solve(config, opts, out, err);
        if (command == "sweep") return cmd_sweep(config, opts, out, err);
        err << "unknown command '" << command << "'\n";
        return kExitInvalid;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        err << "error: growth rate evaluation: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NonexistenceError& e) {
        err << "no positive solution: " << e.what() << "\n";
        return kExitCriterionNegative;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace compete
