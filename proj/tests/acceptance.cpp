// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "compete/coexist.hpp"
#include "compete/commands.hpp"
#include "compete/config.hpp"
#include "compete/criteria.hpp"
#include "compete/eigen.hpp"
#include "compete/errors.hpp"
#include "compete/logistic.hpp"
#include "oracles.hpp"
#include "random_expr.hpp"

using namespace compete;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Every monotone run in the suite reports here.
MonotoneStats g_monotone;
std::size_t g_monotone_runs = 0;

void record(const MonotoneStats& s) {
    g_monotone.merge(s);
    ++g_monotone_runs;
}

GrowthModel lv(double a, double b) {
    const Expr::Parameters p{{"a", a}, {"b", b}};
    return GrowthModel::build({Expr::parse("a - u - b*v", 2, p), Expr::parse("a - b*u - v", 2, p)});
}

GrowthModel symmetric3() {
    return GrowthModel::build({Expr::parse("12 - u1 - 0.05*u2 - 0.05*u3", 3),
                               Expr::parse("12 - 0.05*u1 - u2 - 0.05*u3", 3),
                               Expr::parse("12 - 0.05*u1 - 0.05*u2 - u3", 3)});
}

Outcome eigen_accuracy() {
    auto t0 = std::chrono::steady_clock::now();
    const auto r1 = principal_eigenpair(Grid::line(1.0, 400));
    const double s1 = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto r2 = principal_eigenpair(Grid::rectangle(1.0, 1.0, 200, 200));
    const double s2 = seconds_since(t0);
    const double e1 = std::fabs(r1.lambda1 - pi * pi) / (pi * pi);
    const double e2 = std::fabs(r2.lambda1 - 2 * pi * pi) / (2 * pi * pi);
    return {e1 < 1e-3 && e2 < 1e-3 && s1 < 10 && s2 < 10,
            fmt("1D rel err %.2e (%.2fs), 2D rel err %.2e (%.2fs)", e1, s1, e2, s2)};
}

Outcome eigen_monotonicity() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> base(-5.0, 15.0), bump(1e-3, 3.0);
    const Grid g = Grid::line(1.0, 100);
    int ok = 0;
    double smallest = INFINITY;
    for (int trial = 0; trial < 50; ++trial) {
        ScalarField q1(g), q2(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            q1[k] = base(rng);
            q2[k] = q1[k] + bump(rng);
        }
        const double d = principal_eigenpair(g, q2).lambda1 - principal_eigenpair(g, q1).lambda1;
        smallest = std::min(smallest, d);
        ok += d > 0.0;
    }
    return {ok == 50, fmt("%d/50 pairs ordered, smallest gap %.3e", ok, smallest)};
}

Outcome variational_minimum() {
    const Grid g = Grid::line(1.0, 400);
    const ScalarField zero(g);
    const double l1 = principal_eigenpair(g).lambda1;
    std::mt19937_64 rng(202);
    std::normal_distribution<double> d;
    int ok = 0;
    double worst = INFINITY;
    for (int trial = 0; trial < 100; ++trial) {
        ScalarField phi(g);
        // Mix smooth and rough trial fields.
        const double w = trial % 2 ? 0.0 : 1.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double x = g.coords(k)[0];
            phi[k] = w * std::sin(pi * x) * (1 + 0.1 * d(rng)) + (1 - w) * d(rng);
        }
        const double rq = rayleigh_quotient(g, zero, phi);
        worst = std::min(worst, rq - l1);
        ok += rq >= l1 - 1e-9;
    }
    return {ok == 100, fmt("%d/100 quotients >= lambda1 - 1e-9, min excess %.3e", ok, worst)};
}

Outcome logistic_dichotomy() {
    const int n = 511;  // node 255 sits at x = 1/2
    const Grid g = Grid::line(1.0, n);
    const auto eig = principal_eigenpair(g);
    const std::vector<double> as{5, 8, 9.8, 9.9, 10, 12, 15};

    // Continuation oracle: damped Newton on the discrete problem, started from
    // 6 sin(pi x) at the largest a and walked down. A small start falls into the
    // trivial root; 1e-13 is below round-off at this n.
    std::vector<double> start(n);
    for (int i = 0; i < n; ++i) start[i] = 6.0 * std::sin(pi * (i + 1) / (n + 1.0));
    std::vector<std::pair<double, std::vector<double>>> oracle_solutions;
    for (auto it = as.rbegin(); it != as.rend(); ++it) {
        const double a = *it;
        if (!(a > eig.lambda1)) break;
        start = oracle::newton_logistic_1d(
            n, 1.0, [a](double s) { return a - s; }, [](double) { return -1.0; }, start, 1e-9);
        oracle_solutions.emplace_back(a, start);
    }

    bool pass = true;
    double worst_res = 0.0, worst_mid = 0.0;
    std::string flags;
    for (double a : as) {
        const auto r = solve_logistic(g, Expr::parse("a - u", 1, {{"a", a}}), eig);
        const bool expect = a > eig.lambda1;
        pass = pass && r.exists == expect;
        flags += r.exists ? "T" : "F";
        if (!r.exists) continue;
        record(r.stats);
        worst_res = std::max(worst_res, r.residual);
        pass = pass && r.residual <= 1e-8 && r.theta->min() > 0.0 && r.theta->max() <= a;
        for (const auto& [oa, u] : oracle_solutions) {
            if (oa != a) continue;
            pass = pass && u[n / 2] > 0.0;
            worst_mid = std::max(worst_mid, std::fabs((*r.theta)[n / 2] - u[n / 2]));
        }
    }
    pass = pass && worst_mid <= 1e-5;
    return {pass, fmt("exists pattern %s (lambda1 %.6f), max residual %.2e, max midpoint diff %.2e",
                      flags.c_str(), eig.lambda1, worst_res, worst_mid)};
}

// Shared between criteria 6, 9 (symmetric model on n = 200).
struct Symmetric {
    Grid grid = Grid::line(1.0, 200);
    GrowthModel model = lv(15.0, 0.1);
    Evaluation ev = evaluate_criteria(grid, model);
};

const Symmetric& symmetric() {
    static const Symmetric s = [] {
        Symmetric out;
        if (out.ev.pair) record(out.ev.pair->stats);
        return out;
    }();
    return s;
}

Outcome sandwich() {
    const auto& s = symmetric();
    if (!s.ev.pair) return {false, "existence criterion failed"};
    const auto& pair = *s.ev.pair;
    const auto r = solve_coexistence(s.grid, s.model, pair);
    record(r.stats);
    bool bounds = true;
    double worst_inner = INFINITY;
    for (int i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < s.grid.size(); ++k) {
            const double u = r.fields[i][k];
            bounds = bounds && pair.lowers[i][k] - 1e-6 <= u && u <= pair.uppers[i][k] + 1e-6;
            if (s.grid.steps_to_boundary(k) >= 2) {
                worst_inner = std::min({worst_inner, u - pair.lowers[i][k], pair.uppers[i][k] - u});
            }
        }
    }
    const double res = std::max(r.residuals[0], r.residuals[1]);
    const double sym = sup_distance(r.fields[0], r.fields[1]);
    const bool pass = bounds && worst_inner > 0.0 && r.certificate.strict() && res <= 1e-7 && sym <= 1e-6;
    return {pass, fmt("bounds %s, min interior margin %.3e, residual %.2e, |u-v| %.2e", bounds ? "ok" : "violated",
                      worst_inner, res, sym)};
}

Outcome oracle_equivalence() {
    const int n = 40;
    const Grid g = Grid::line(1.0, n);
    const auto model = lv(15.0, 0.1);
    const auto pair = build_pair(g, model, principal_eigenpair(g));
    record(pair.stats);
    const auto r = solve_coexistence(g, model, pair);
    record(r.stats);

    oracle::System sys;
    sys.species = 2;
    sys.g = [](int i, const std::vector<double>& x) {
        return i == 0 ? 15 - x[0] - 0.1 * x[1] : 15 - 0.1 * x[0] - x[1];
    };
    sys.dg = [](int i, int j, const std::vector<double>&) { return i == j ? -1.0 : -0.1; };
    std::vector<std::vector<double>> start(2, std::vector<double>(n));
    for (int k = 0; k < n; ++k) {
        const double s = std::sin(pi * (k + 1) / (n + 1.0));
        start[0][k] = 14.0 * s;
        start[1][k] = 10.0 * s;
    }
    const auto u = oracle::newton_system_1d(n, 1.0, sys, start);
    double diff = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < n; ++k) diff = std::max(diff, std::fabs(r.fields[i][k] - u[i][k]));
    }
    return {diff <= 1e-6, fmt("sup distance to Newton solution %.2e", diff)};
}

Outcome nonexistence() {
    const Grid g = Grid::line(1.0, 200);
    const auto model = lv(5.0, 0.1);
    const double l1 = principal_eigenpair(g).lambda1;
    const auto c = check_nonexistence(model, l1);
    bool decayed = c.verdict;
    double worst = 0.0;
    std::size_t iters = 0;
    for (const auto& m : c.species) {
        if (!m.holds) continue;
        const auto d = decay_check(g, model, m.species);
        decayed = decayed && d.decayed;
        worst = std::max(worst, d.final_sup);
        iters = std::max(iters, d.iterations);
    }
    return {c.verdict && decayed, fmt("verdict %s, worst final sup %.2e after %zu steps",
                                      c.verdict ? "true" : "false", worst, iters)};
}

Outcome uniqueness_2sp() {
    const auto& s = symmetric();
    if (!s.ev.report.uniqueness_2sp) return {false, "criterion not evaluated"};
    const auto& u = *s.ev.report.uniqueness_2sp;
    if (!u.verdict) return {false, fmt("criterion verdict false (lhs %.4g rhs %.4g)", u.lhs, u.rhs)};
    const auto emp = verify_uniqueness_empirically(s.grid, s.model, *s.ev.pair);
    return {emp.gap <= 1e-7 && emp.starts == 3,
            fmt("lhs %.4g >= rhs %.4g; maximal/minimal gap %.2e, multistart spread %.2e", u.lhs, u.rhs,
                emp.maximal_minimal_gap, emp.multistart_spread)};
}

Outcome three_species() {
    const Grid g = Grid::line(1.0, 200);
    const auto model = symmetric3();
    const auto ev = evaluate_criteria(g, model);
    double min_margin = INFINITY;
    for (const auto& m : ev.report.existence.species) min_margin = std::min(min_margin, m.margin);
    if (!ev.report.existence.verdict || !ev.pair) return {false, fmt("existence margin %.4g", min_margin)};
    record(ev.pair->stats);
    const auto r = solve_coexistence(g, model, *ev.pair);
    record(r.stats);
    const auto& un = *ev.report.uniqueness_nsp;
    bool pass = r.certificate.holds() && std::isfinite(un.k) && min_margin > 0.0;
    std::string tail = "verdict false (no multistart contract)";
    if (un.verdict) {
        const auto emp = verify_uniqueness_empirically(g, model, *ev.pair);
        pass = pass && emp.gap <= 1e-7;
        tail = fmt("verdict true, multistart gap %.2e", emp.gap);
    }
    return {pass, fmt("min existence margin %.4g, sandwich %s, K %.4f, ", min_margin,
                      r.certificate.holds() ? "holds" : "fails", un.k) +
                      tail};
}

Outcome parser() {
    using namespace randexpr;
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> coord(0.1, 1.0);
    std::uniform_int_distribution<int> nv(1, 3);
    int trees = 0, checks = 0, bad_fd = 0, bad_rt = 0, bad_eval = 0;
    double worst = 0.0;
    while (trees < 1000) {
        const int n = nv(rng);
        const TP t = random_tree(rng, n, 4);
        const Expr e = Expr::parse(print(*t), n);
        const Expr back = Expr::parse(e.to_string(), n);
        ++trees;
        for (int p = 0; p < 3; ++p) {
            std::vector<double> x(n);
            for (auto& xi : x) xi = coord(rng);
            const double want = ev(*t, x);
            if (!std::isfinite(want) || std::fabs(want) > 1e8) continue;
            const double got = e.eval(x);
            bad_eval += std::fabs(got - want) > 1e-12 * (1 + std::fabs(want));
            bad_rt += back.eval(x) != got;
            for (int v = 0; v < n; ++v) {
                const double sym = e.derivative(v).eval(x);
                auto central = [&](double h) {
                    auto xp = x, xm = x;
                    xp[v] += h;
                    xm[v] -= h;
                    return (ev(*t, xp) - ev(*t, xm)) / (2 * h);
                };
                const double fd = (4 * central(5e-4) - central(1e-3)) / 3;
                const double rel = std::fabs(sym - fd) / (1 + std::fabs(sym));
                worst = std::max(worst, rel);
                bad_fd += rel > 1e-6;
                ++checks;
            }
        }
    }
    return {bad_fd == 0 && bad_rt == 0 && bad_eval == 0,
            fmt("%d trees, %d derivative checks (worst rel %.2e), %d round-trip and %d evaluator mismatches",
                trees, checks, worst, bad_rt, bad_eval)};
}

struct CliRun {
    int code = -1;
    fs::path dir;
};

CliRun cli(const fs::path& root, const std::string& name, const std::string& cfg, const std::string& args) {
    CliRun r;
    r.dir = root / name;
    fs::create_directories(r.dir);
    std::ofstream(r.dir / "run.cfg") << cfg;
    const std::string cmd = std::string(COMPETE_CLI_PATH) + " " + args + " --config " + (r.dir / "run.cfg").string() +
                            " --out " + r.dir.string() + " > " + (r.dir / "stdout").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli_contract() {
    const fs::path root = fs::temp_directory_path() / ("compete_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const auto lvcfg = [](double a, int n, const std::string& extra = "") {
        std::ostringstream os;
        os << "[domain]\ninterior_counts = " << n << "\n[parameters]\na = " << a
           << "\n[species.u]\ngrowth = \"a - u - 0.1*v\"\n[species.v]\ngrowth = \"a - 0.1*u - v\"\n" << extra;
        return os.str();
    };
    std::vector<std::string> failures;
    const auto expect = [&](bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    };

    expect(cli(root, "eigen", "[domain]\ninterior_counts = 100\n", "eigen").code == 0, "eigen exit 0");
    expect(cli(root, "badcount", "[domain]\ninterior_counts = 2\n", "eigen").code == 1, "counts=2 exit 1");
    expect(cli(root, "badexpr", "[species.u]\ngrowth = \"15 - u -\"\n", "check").code == 1, "parse error exit 1");

    const auto chk = cli(root, "check", lvcfg(15, 200), "check");
    expect(chk.code == 0, "check exit 0");
    try {
        const auto j = nlohmann::json::parse(slurp(chk.dir / "report.json"));
        std::set<std::string> keys;
        for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
        expect(keys == std::set<std::string>{"lambda1", "existence", "nonexistence", "uniqueness_2sp",
                                             "uniqueness_Nsp", "grid", "sampling"},
               "report key set");
        expect(j["uniqueness_2sp"]["verdict"] == true, "uniqueness_2sp true");
    } catch (const std::exception& e) {
        failures.push_back(std::string("report json: ") + e.what());
    }
    expect(cli(root, "dead", lvcfg(5, 100), "check").code == 2, "nonexistence exit 2");
    expect(cli(root, "refuse", lvcfg(5, 100), "solve").code == 2, "refused solve exit 2");
    expect(cli(root, "budget", lvcfg(15, 50, "[solver]\nmax_iter = 1\n"), "solve").code == 3, "budget exit 3");

    const auto sol = cli(root, "solve", lvcfg(15, 100), "solve");
    expect(sol.code == 0, "solve exit 0");
    try {
        const auto t = read_csv((sol.dir / "fields.csv").string());
        expect(t.header == std::vector<std::string>{"x", "u", "v", "u_lower", "v_lower", "u_upper", "v_upper"},
               "fields header");
        expect(t.rows.size() == 100, "fields rows");
    } catch (const std::exception& e) {
        failures.push_back(std::string("fields csv: ") + e.what());
    }

    const auto sw = cli(root, "sweep", lvcfg(15, 40, "[sweep]\nparameter = a\nfrom = 8\nto = 12\nstep = 1\n"), "sweep");
    expect(sw.code == 0, "sweep exit 0");
    try {
        expect(read_csv((sw.dir / "sweep.csv").string()).rows.size() == 5, "sweep rows");
    } catch (const std::exception& e) {
        failures.push_back(std::string("sweep csv: ") + e.what());
    }

    // Config round trip.
    const std::string text = lvcfg(15, 80);
    const auto a = cli(root, "rt_a", text, "check");
    const auto b = cli(root, "rt_b", serialize_config(parse_config(text)), "check");
    expect(a.code == b.code && slurp(a.dir / "report.json") == slurp(b.dir / "report.json"), "config round trip");

    // CSV reload exactness.
    const Grid g = Grid::rectangle(1.0, 1.0, 9, 7);
    const auto f = ScalarField::sample(g, [](double x, double y) { return std::exp(x - y) / 3.0; });
    write_fields_csv((root / "exact.csv").string(), g, {"f"}, {&f});
    const auto t = read_csv((root / "exact.csv").string());
    bool exact = t.rows.size() == g.size();
    for (std::size_t k = 0; exact && k < g.size(); ++k) exact = t.number(k, 2) == f[k];
    expect(exact, "CSV reload exact");

    fs::remove_all(root);
    std::string detail = failures.empty() ? "exit codes 0/1/2/3, report keys, CSV layout, round trips" : "";
    for (const auto& m : failures) detail += (detail.empty() ? "failed: " : ", ") + m;
    return {failures.empty(), detail};
}

}  // namespace

int main() {
    struct Item {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<Item> items{
        {1, "eigenvalue accuracy", eigen_accuracy},
        {2, "eigenvalue monotone in q", eigen_monotonicity},
        {3, "variational minimum", variational_minimum},
        {4, "logistic dichotomy", logistic_dichotomy},
        {6, "sandwich bounds", sandwich},
        {7, "oracle equivalence", oracle_equivalence},
        {8, "nonexistence and decay", nonexistence},
        {9, "two-species uniqueness", uniqueness_2sp},
        {10, "three species", three_species},
        {11, "parser and derivatives", parser},
        {12, "CLI contract", cli_contract},
    };
    std::vector<std::pair<int, std::string>> lines;
    int failed = 0;
    const auto report = [&](int id, const char* name, const Outcome& o, double secs) {
        char head[128];
        std::snprintf(head, sizeof head, "criterion %2d: %s  %-26s", id, o.pass ? "PASS" : "FAIL", name);
        lines.emplace_back(id, std::string(head) + " " + o.detail + fmt(" [%.1fs]", secs));
        failed += !o.pass;
    };
    for (const auto& item : items) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = item.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        report(item.id, item.name, o, seconds_since(t0));
        std::printf("%s\n", lines.back().second.c_str());
        std::fflush(stdout);
    }
    // Every solver above aborts on a monotonicity violation beyond the slack;
    // this line summarizes the worst departures actually seen.
    const double worst = std::max({g_monotone.worst_upper_increase, g_monotone.worst_lower_decrease,
                                   g_monotone.worst_crossing});
    const Outcome mono{g_monotone_runs > 0 && worst <= 1e-12,
                       fmt("%zu runs, %zu steps, worst violation %.2e", g_monotone_runs, g_monotone.steps, worst)};
    report(5, "monotone iteration", mono, 0.0);
    std::printf("%s\n", lines.back().second.c_str());

    std::sort(lines.begin(), lines.end());
    std::printf("\nsummary\n");
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::printf("%d of 12 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
