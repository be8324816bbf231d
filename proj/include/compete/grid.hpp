#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace compete {

/// Uniform tensor grid on the box (0, L_0) x ... (dim 1 or 2). Only interior
/// nodes are stored; boundary values are implicitly zero.
class Grid {
public:
    static Grid line(double length, int interior);
    static Grid rectangle(double lx, double ly, int nx, int ny);
    static Grid make(int dim, std::span<const double> lengths,
                     std::span<const int> counts);

    int dim() const noexcept { return dim_; }
    double length(int axis) const { return lengths_.at(axis); }
    int count(int axis) const { return counts_.at(axis); }
    double spacing(int axis) const { return spacing_.at(axis); }
    std::size_t size() const noexcept;
    double cell_volume() const noexcept;

    // Coordinates of interior node `k` (x fastest).
    std::array<double, 2> coords(std::size_t k) const;
    // Distance from node k to the boundary measured in whole grid steps
    // (1 for nodes adjacent to the boundary).
    int steps_to_boundary(std::size_t k) const;

    bool operator==(const Grid&) const = default;

private:
    Grid(int dim, std::array<double, 2> lengths, std::array<int, 2> counts);

    int dim_ = 1;
    std::array<double, 2> lengths_{1.0, 1.0};
    std::array<int, 2> counts_{1, 1};
    std::array<double, 2> spacing_{1.0, 1.0};
};

/// Real values on the interior nodes of a grid.
class ScalarField {
public:
    explicit ScalarField(const Grid& grid, double fill = 0.0);
    ScalarField(const Grid& grid, std::vector<double> values);

    template <class F>
    static ScalarField sample(const Grid& grid, F&& f) {
        ScalarField out(grid);
        for (std::size_t k = 0; k < out.size(); ++k) {
            const auto x = grid.coords(k);
            out.values_[k] = f(x[0], x[1]);
        }
        return out;
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool all_finite() const noexcept;
    double min() const;
    double max() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

struct Norms {
    double sup = 0.0;
    double l2 = 0.0;
};

Norms norms(const ScalarField& f);
double sup_distance(const ScalarField& a, const ScalarField& b);
// Plain Euclidean inner product over interior nodes (no cell volume).
double dot(const ScalarField& a, const ScalarField& b);

/// Delta_h f with the 3-point / 5-point stencil and zero ghost values.
ScalarField apply_laplacian(const ScalarField& f);

/// -Delta_h + shift + potential(x), where the potential is optional. Must be
/// positive definite for solve_spd; a nonnegative shift and potential suffice.
class LinearOperator {
public:
    explicit LinearOperator(const Grid& grid, double shift = 0.0);
    LinearOperator(const Grid& grid, double shift, ScalarField potential);

    const Grid& grid() const noexcept { return grid_; }
    double shift() const noexcept { return shift_; }
    const std::optional<ScalarField>& potential() const noexcept { return potential_; }

    ScalarField apply(const ScalarField& f) const;
    void apply(std::span<const double> in, std::span<double> out) const;
    double diagonal(std::size_t k) const;

private:
    Grid grid_;
    double shift_;
    std::optional<ScalarField> potential_;
};

struct SolveOptions {
    double rel_tol = 1e-10;
    // 0 selects the default of 10 x node count.
    std::size_t max_iter = 0;
};

struct SolveResult {
    ScalarField solution;
    bool converged = false;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for op * w = rhs. Stops when
/// ||op w - rhs||_2 <= rel_tol ||rhs||_2. A non-converged run is reported
/// through `converged`, never thrown.
SolveResult solve_spd(const LinearOperator& op, const ScalarField& rhs,
                      const SolveOptions& options = {},
                      const ScalarField* initial_guess = nullptr);

// Throwing wrapper used by the nonlinear solvers.
ScalarField solve_spd_or_throw(const LinearOperator& op, const ScalarField& rhs,
                               const SolveOptions& options,
                               const ScalarField* initial_guess = nullptr);

}  // namespace compete
