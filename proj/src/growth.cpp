#include "compete/growth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "compete/errors.hpp"

namespace compete {

namespace {

constexpr double kUnboundedCap = 1e12;

struct Accumulator {
    std::vector<double> partial_min, partial_max;
    std::vector<double> worst_value;
    std::vector<std::size_t> worst_index;
    std::vector<double> rate_abs, slope;

    explicit Accumulator(int n)
        : partial_min(n * n, INFINITY), partial_max(n * n, -INFINITY),
          worst_value(n * n, -INFINITY), worst_index(n * n, SIZE_MAX),
          rate_abs(n, 0.0), slope(n, 0.0) {}

    void merge(const Accumulator& o) {
        for (std::size_t k = 0; k < partial_min.size(); ++k) {
            partial_min[k] = std::min(partial_min[k], o.partial_min[k]);
            partial_max[k] = std::max(partial_max[k], o.partial_max[k]);
            if (o.worst_value[k] > worst_value[k] ||
                (o.worst_value[k] == worst_value[k] && o.worst_index[k] < worst_index[k])) {
                worst_value[k] = o.worst_value[k];
                worst_index[k] = o.worst_index[k];
            }
        }
        for (std::size_t i = 0; i < rate_abs.size(); ++i) {
            rate_abs[i] = std::max(rate_abs[i], o.rate_abs[i]);
            slope[i] = std::max(slope[i], o.slope[i]);
        }
    }
};

// Produces the sample points of the capacity box, either as a tensor grid or
// as a Latin hypercube plus all corners.
class BoxSampler {
public:
    BoxSampler(const std::vector<double>& caps, const GrowthOptions& opt) : caps_(caps) {
        const int n = static_cast<int>(caps.size());
        if (n <= 3) {
            sampling_.method = "tensor-grid";
            sampling_.points_per_axis = opt.points_per_axis;
            per_axis_.resize(n);
            std::size_t total = 1;
            for (int a = 0; a < n; ++a) {
                per_axis_[a] = caps[a] > 0.0 ? opt.points_per_axis : 1;
                total *= per_axis_[a];
            }
            sampling_.samples = total;
        } else {
            sampling_.method = "latin-hypercube";
            sampling_.seed = opt.seed;
            const std::size_t m = opt.lhs_samples;
            std::mt19937_64 rng(opt.seed);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            lhs_.assign(m * n, 0.0);
            std::vector<std::size_t> perm(m);
            for (int a = 0; a < n; ++a) {
                std::iota(perm.begin(), perm.end(), std::size_t{0});
                std::shuffle(perm.begin(), perm.end(), rng);
                for (std::size_t s = 0; s < m; ++s) {
                    lhs_[s * n + a] = (static_cast<double>(perm[s]) + unit(rng)) / static_cast<double>(m);
                }
            }
            corners_ = n <= 16 ? (std::size_t{1} << n) : 0;
            sampling_.samples = m + corners_;
        }
    }

    std::size_t size() const { return sampling_.samples; }
    const Sampling& info() const { return sampling_; }

    void point(std::size_t s, std::vector<double>& x) const {
        const int n = static_cast<int>(caps_.size());
        if (!per_axis_.empty()) {
            for (int a = 0; a < n; ++a) {
                const int p = per_axis_[a];
                const std::size_t k = s % p;
                s /= p;
                x[a] = p == 1 ? 0.0 : caps_[a] * static_cast<double>(k) / (p - 1);
            }
            return;
        }
        const std::size_t m = lhs_.size() / n;
        if (s < m) {
            for (int a = 0; a < n; ++a) x[a] = caps_[a] * lhs_[s * n + a];
        } else {
            const std::size_t mask = s - m;
            for (int a = 0; a < n; ++a) x[a] = (mask >> a) & 1u ? caps_[a] : 0.0;
        }
    }

private:
    const std::vector<double>& caps_;
    std::vector<int> per_axis_;
    std::vector<double> lhs_;
    std::size_t corners_ = 0;
    Sampling sampling_;
};

std::string format_point(const std::vector<double>& x) {
    std::ostringstream os;
    os.precision(10);
    os << '(';
    for (std::size_t a = 0; a < x.size(); ++a) os << (a ? ", " : "") << x[a];
    os << ')';
    return os.str();
}

}  // namespace

std::string ConditionViolation::describe() const {
    std::ostringstream os;
    os.precision(10);
    if (condition == "monotonicity") {
        os << "competitive monotonicity violated: d g" << species + 1 << "/d u" << other + 1
           << " = " << value << " >= 0 at " << format_point(witness);
    } else {
        os << "carrying-capacity condition violated for species " << species + 1 << ": value "
           << value << " at " << format_point(witness);
    }
    return os.str();
}

double carrying_capacity(const Expr& g, int species) {
    std::vector<double> x(g.num_vars(), 0.0);
    auto f = [&](double s) {
        x[species] = s;
        try {
            return g.eval(x);
        } catch (const DomainError& e) {
            std::ostringstream msg;
            msg << "growth rate " << species + 1 << " cannot be evaluated at density " << s << ": "
                << e.what();
            throw ValidationError(msg.str());
        }
    };
    if (f(0.0) <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > kUnboundedCap) {
            std::ostringstream msg;
            msg << "growth rate " << species + 1
                << " stays positive up to density 1e12 (unbounded growth, no carrying capacity)";
            throw ValidationError(msg.str());
        }
    }
    // f(lo) > 0 >= f(hi); shrink until neighbouring doubles or 1e-12 relative.
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return hi;
}

GrowthModel GrowthModel::build(std::vector<Expr> rates, const GrowthOptions& options) {
    const int n = static_cast<int>(rates.size());
    if (n < 1) throw ValidationError("growth model needs at least one species");
    for (int i = 0; i < n; ++i) {
        if (rates[i].num_vars() != n) {
            throw ValidationError("growth rate " + std::to_string(i + 1) + " declares " +
                                  std::to_string(rates[i].num_vars()) + " variables, expected " +
                                  std::to_string(n));
        }
    }
    if (options.points_per_axis < 2) throw ValidationError("points_per_axis must be >= 2");

    GrowthModel m;
    m.options_ = options;
    m.rates_ = std::move(rates);
    m.partials_.reserve(n * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m.partials_.push_back(m.rates_[i].derivative(j));
    }
    for (int i = 0; i < n; ++i) {
        m.capacities_.push_back(carrying_capacity(m.rates_[i], i));
        if (m.capacities_.back() == 0.0) m.trivial_.push_back(i);
    }

    const BoxSampler sampler(m.capacities_, options);
    m.sampling_ = sampler.info();
    const auto total = static_cast<std::ptrdiff_t>(sampler.size());

    Accumulator acc(n);
    std::atomic<bool> failed{false};
    std::string failure;

#pragma omp parallel
    {
        Accumulator local(n);
        std::vector<double> x(n);
#pragma omp for schedule(static)
        for (std::ptrdiff_t s = 0; s < total; ++s) {
            if (failed.load(std::memory_order_relaxed)) continue;
            sampler.point(static_cast<std::size_t>(s), x);
            try {
                for (int i = 0; i < n; ++i) {
                    const double gi = m.rates_[i].eval(x);
                    local.rate_abs[i] = std::max(local.rate_abs[i], std::fabs(gi));
                    for (int j = 0; j < n; ++j) {
                        const int k = i * n + j;
                        const double d = m.partials_[k].eval(x);
                        local.partial_min[k] = std::min(local.partial_min[k], d);
                        local.partial_max[k] = std::max(local.partial_max[k], d);
                        if (d > local.worst_value[k]) {
                            local.worst_value[k] = d;
                            local.worst_index[k] = static_cast<std::size_t>(s);
                        }
                        if (j == i) {
                            local.slope[i] = std::max(local.slope[i], std::fabs(gi + x[i] * d));
                        }
                    }
                }
            } catch (const std::exception& e) {
#pragma omp critical(compete_growth_failure)
                {
                    if (!failed.load()) failure = "growth rate evaluation failed at " +
                                                  format_point(x) + ": " + e.what();
                    failed.store(true);
                }
            }
        }
#pragma omp critical(compete_growth_merge)
        acc.merge(local);
    }
    if (failed) throw ValidationError(failure);

    for (int i = 0; i < n; ++i) {
        m.rate_sup_abs_.push_back(acc.rate_abs[i]);
        m.self_slope_.push_back(acc.slope[i]);
        for (int j = 0; j < n; ++j) {
            const int k = i * n + j;
            m.partial_bounds_.push_back({acc.partial_min[k], acc.partial_max[k]});
            const bool weak_ok = options.allow_zero_cross_partials && i != j;
            const double worst = acc.worst_value[k];
            if (weak_ok ? worst > 0.0 : worst >= 0.0) {
                std::vector<double> w(n);
                sampler.point(acc.worst_index[k], w);
                m.violations_.push_back({"monotonicity", i, j, std::move(w), worst});
                m.monotone_ = false;
            }
        }
    }

    // Beyond the capacity: g_i(0,..,s,..,0) <= 0 on [c_i, 2 c_i], and still
    // decreasing there, so it stays nonpositive for every larger s.
    for (int i = 0; i < n; ++i) {
        const double c = m.capacities_[i];
        if (c == 0.0) continue;
        std::vector<double> x(n, 0.0);
        x[i] = 0.0;
        const double slack = 1e-12 * (1.0 + std::fabs(m.rates_[i].eval(x)));
        const int p = options.points_per_axis;
        for (int k = 0; k < p; ++k) {
            x[i] = c * (1.0 + static_cast<double>(k) / (p - 1));
            const double gi = m.rates_[i].eval(x);
            const double di = m.partials_[i * n + i].eval(x);
            if (gi > slack || di >= 0.0) {
                m.violations_.push_back({"capacity", i, i, x, gi > slack ? gi : di});
                m.capacity_ok_ = false;
                break;
            }
        }
    }

    if (options.throw_on_violation && !m.violations_.empty()) {
        throw ValidationError(m.violations_.front().describe());
    }
    return m;
}

}  // namespace compete
