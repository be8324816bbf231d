#include "compete/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "compete/errors.hpp"
#include "compete/kernels.hpp"

namespace compete {

namespace {

kernels::Stencil stencil_of(const Grid& g) {
    kernels::Stencil s;
    s.dim = g.dim();
    s.nx = g.count(0);
    s.ny = g.dim() == 2 ? g.count(1) : 1;
    s.inv_hx2 = 1.0 / (g.spacing(0) * g.spacing(0));
    s.inv_hy2 = g.dim() == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0;
    return s;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

Grid::Grid(int dim, std::array<double, 2> lengths, std::array<int, 2> counts)
    : dim_(dim), lengths_(lengths), counts_(counts) {
    if (dim != 1 && dim != 2) throw ValidationError("grid dimension must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
            throw ValidationError("grid length must be positive and finite");
        }
        if (counts[a] < 3) {
            std::ostringstream msg;
            msg << "interior node count must be >= 3 (axis " << a << " has " << counts[a] << ")";
            throw ValidationError(msg.str());
        }
        spacing_[a] = lengths[a] / (counts[a] + 1);
    }
    if (dim == 1) {
        lengths_[1] = 1.0;
        counts_[1] = 1;
        spacing_[1] = 1.0;
    }
}

Grid Grid::line(double length, int interior) { return Grid(1, {length, 1.0}, {interior, 1}); }

Grid Grid::rectangle(double lx, double ly, int nx, int ny) { return Grid(2, {lx, ly}, {nx, ny}); }

Grid Grid::make(int dim, std::span<const double> lengths, std::span<const int> counts) {
    if (dim != 1 && dim != 2) throw ValidationError("grid dimension must be 1 or 2");
    if (lengths.size() != static_cast<std::size_t>(dim) ||
        counts.size() != static_cast<std::size_t>(dim)) {
        throw ValidationError("grid needs one length and one interior count per axis");
    }
    if (dim == 1) return line(lengths[0], counts[0]);
    return rectangle(lengths[0], lengths[1], counts[0], counts[1]);
}

std::size_t Grid::size() const noexcept {
    return static_cast<std::size_t>(counts_[0]) * static_cast<std::size_t>(counts_[1]);
}

double Grid::cell_volume() const noexcept {
    return dim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
}

std::array<double, 2> Grid::coords(std::size_t k) const {
    const auto i = static_cast<int>(k % counts_[0]);
    const auto j = static_cast<int>(k / counts_[0]);
    return {(i + 1) * spacing_[0], dim_ == 2 ? (j + 1) * spacing_[1] : 0.0};
}

int Grid::steps_to_boundary(std::size_t k) const {
    const auto i = static_cast<int>(k % counts_[0]);
    int d = std::min(i + 1, counts_[0] - i);
    if (dim_ == 2) {
        const auto j = static_cast<int>(k / counts_[0]);
        d = std::min({d, j + 1, counts_[1] - j});
    }
    return d;
}

ScalarField::ScalarField(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("field length does not match grid node count");
    }
}

bool ScalarField::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(*this, other);
    kernels::axpy(1.0, other.values_, values_);
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(*this, other);
    kernels::axpy(-1.0, other.values_, values_);
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

Norms norms(const ScalarField& f) {
    Norms n;
    n.sup = kernels::max_abs(f.values());
    n.l2 = std::sqrt(kernels::dot(f.values(), f.values()) * f.grid().cell_volume());
    return n;
}

double sup_distance(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b);
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
    return m;
}

double dot(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b);
    return kernels::dot(a.values(), b.values());
}

ScalarField apply_laplacian(const ScalarField& f) {
    ScalarField out(f.grid());
    kernels::laplacian(stencil_of(f.grid()), f.values(), out.values());
    return out;
}

LinearOperator::LinearOperator(const Grid& grid, double shift) : grid_(grid), shift_(shift) {}

LinearOperator::LinearOperator(const Grid& grid, double shift, ScalarField potential)
    : grid_(grid), shift_(shift), potential_(std::move(potential)) {
    if (!(potential_->grid() == grid_)) {
        throw std::invalid_argument("potential lives on a different grid");
    }
}

void LinearOperator::apply(std::span<const double> in, std::span<double> out) const {
    const std::span<const double> q =
        potential_ ? potential_->values() : std::span<const double>{};
    kernels::shifted_operator(stencil_of(grid_), shift_, q, in, out);
}

ScalarField LinearOperator::apply(const ScalarField& f) const {
    ScalarField out(grid_);
    apply(f.values(), out.values());
    return out;
}

double LinearOperator::diagonal(std::size_t k) const {
    const auto s = stencil_of(grid_);
    return 2.0 * s.inv_hx2 + 2.0 * s.inv_hy2 + shift_ + (potential_ ? (*potential_)[k] : 0.0);
}

SolveResult solve_spd(const LinearOperator& op, const ScalarField& rhs,
                      const SolveOptions& options, const ScalarField* initial_guess) {
    const Grid& grid = op.grid();
    const std::size_t n = grid.size();
    const std::size_t max_iter = options.max_iter ? options.max_iter : 10 * n;

    SolveResult result{initial_guess ? *initial_guess : ScalarField(grid)};
    const double rhs_norm = std::sqrt(kernels::dot(rhs.values(), rhs.values()));
    if (rhs_norm == 0.0) {
        result.solution = ScalarField(grid);
        result.converged = true;
        return result;
    }

    std::vector<double> inv_diag(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double d = op.diagonal(k);
        if (!(d > 0.0)) {
            throw NumericalError("operator diagonal is not positive; operator is not SPD");
        }
        inv_diag[k] = 1.0 / d;
    }

    std::span<double> x = result.solution.values();
    std::vector<double> r(n), z(n), p(n), ap(n);
    op.apply(x, ap);
    for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - ap[k];

    const double target = options.rel_tol * rhs_norm;
    double r_norm = std::sqrt(kernels::dot(r, r));
    kernels::scale(r, inv_diag, z);
    p = z;
    double rz = kernels::dot(r, z);

    std::size_t it = 0;
    // The recurrence residual can dip below the target while the true one
    // sits just above it; restart from the true residual a few times then.
    for (int restart = 0; restart < 4; ++restart) {
        bool breakdown = false;
        while (r_norm > target && it < max_iter) {
            op.apply(p, ap);
            const double pap = kernels::dot(p, ap);
            if (!(pap > 0.0)) {  // lost positive definiteness
                breakdown = true;
                break;
            }
            const double alpha = rz / pap;
            kernels::axpy(alpha, p, x);
            kernels::axpy(-alpha, ap, r);
            ++it;
            // Recompute the true residual now and then to keep drift in check.
            if (it % 50 == 0) {
                op.apply(x, ap);
                for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - ap[k];
            }
            r_norm = std::sqrt(kernels::dot(r, r));
            kernels::scale(r, inv_diag, z);
            const double rz_next = kernels::dot(r, z);
            kernels::xpby(z, rz_next / rz, p);
            rz = rz_next;
        }

        op.apply(x, ap);
        for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - ap[k];
        r_norm = std::sqrt(kernels::dot(r, r));
        if (breakdown || r_norm <= target || it >= max_iter) break;
        kernels::scale(r, inv_diag, z);
        p = z;
        rz = kernels::dot(r, z);
    }

    result.iterations = it;
    result.relative_residual = r_norm / rhs_norm;
    result.converged = r_norm <= target;
    return result;
}

ScalarField solve_spd_or_throw(const LinearOperator& op, const ScalarField& rhs,
                               const SolveOptions& options, const ScalarField* initial_guess) {
    auto res = solve_spd(op, rhs, options, initial_guess);
    if (!res.converged) {
        std::ostringstream msg;
        msg << "conjugate gradients did not converge: relative residual "
            << res.relative_residual << " after " << res.iterations << " iterations (target "
            << options.rel_tol << ")";
        throw NumericalError(msg.str());
    }
    return std::move(res.solution);
}

}  // namespace compete
