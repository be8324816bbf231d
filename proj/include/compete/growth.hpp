#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "compete/expr.hpp"

namespace compete {

struct Bounds {
    double inf = 0.0;
    double sup = 0.0;
};

/// How the capacity box was sampled when bounding partials.
struct Sampling {
    std::string method;  // "tensor-grid" or "latin-hypercube"
    int points_per_axis = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct ConditionViolation {
    std::string condition;  // "monotonicity" or "capacity"
    int species = 0;
    int other = 0;  // partial index for monotonicity; equals species for capacity
    std::vector<double> witness;
    double value = 0.0;
    std::string describe() const;
};

struct GrowthOptions {
    int points_per_axis = 101;
    std::size_t lhs_samples = 100000;
    std::uint64_t seed = 0x5eed1234u;
    // Accept off-diagonal partials that vanish (decoupled species). The
    // self-limitation partial must still be strictly negative.
    bool allow_zero_cross_partials = false;
    bool throw_on_violation = true;
};

/// Smallest c with g(0,..,s,..,0) <= 0 for all s >= c, by doubling then
/// bisection. Returns 0 when g(0) <= 0 already. Throws ValidationError when
/// no sign change occurs below 1e12.
double carrying_capacity(const Expr& g, int species);

/// N competing growth rates with their partials, carrying capacities and the
/// sampled evidence that the competitive structure holds on the capacity box
/// [0, c_1] x ... x [0, c_N].
class GrowthModel {
public:
    static GrowthModel build(std::vector<Expr> rates, const GrowthOptions& options = {});

    int species() const noexcept { return static_cast<int>(rates_.size()); }
    const Expr& rate(int i) const { return rates_.at(i); }
    const Expr& partial(int i, int j) const { return partials_.at(i * species() + j); }
    double capacity(int i) const { return capacities_.at(i); }
    const std::vector<double>& capacities() const noexcept { return capacities_; }

    /// inf/sup of d g_i / d u_j over the sampled box.
    Bounds partial_bounds(int i, int j) const { return partial_bounds_.at(i * species() + j); }
    /// sup over the box of |g_i|.
    double rate_sup_abs(int i) const { return rate_sup_abs_.at(i); }
    /// sup over the box of |d(s g_i)/ds| taken along u_i.
    double self_slope_bound(int i) const { return self_slope_.at(i); }

    double eval(int i, std::span<const double> point) const { return rates_.at(i).eval(point); }

    /// g_i restricted to its own density with the others frozen at `frozen`.
    Expr section(int i, std::span<const double> frozen) const { return rates_.at(i).section(i, frozen); }

    bool monotone() const noexcept { return monotone_; }
    bool capacity_condition() const noexcept { return capacity_ok_; }
    bool valid() const noexcept { return monotone_ && capacity_ok_; }
    // Species whose growth rate at zero density is already nonpositive.
    const std::vector<int>& trivial_species() const noexcept { return trivial_; }
    const std::vector<ConditionViolation>& violations() const noexcept { return violations_; }
    const Sampling& sampling() const noexcept { return sampling_; }
    const GrowthOptions& options() const noexcept { return options_; }

private:
    GrowthModel() = default;

    std::vector<Expr> rates_;
    std::vector<Expr> partials_;
    std::vector<double> capacities_;
    std::vector<Bounds> partial_bounds_;
    std::vector<double> rate_sup_abs_;
    std::vector<double> self_slope_;
    bool monotone_ = true;
    bool capacity_ok_ = true;
    std::vector<int> trivial_;
    std::vector<ConditionViolation> violations_;
    Sampling sampling_;
    GrowthOptions options_;
};

}  // namespace compete
