#include "compete/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace compete::kernels {

namespace {
// Below this many nodes the fork/join overhead dominates.
constexpr std::ptrdiff_t kParallelThreshold = 4096;
}  // namespace

void laplacian(const Stencil& s, std::span<const double> in, std::span<double> out) {
    if (static_cast<std::ptrdiff_t>(in.size()) <= kParallelThreshold) return serial::laplacian(s, in, out);
    const int nx = s.nx;
    const double* u = in.data();
    double* r = out.data();
    if (s.dim == 1) {
        const double c = s.inv_hx2;
#pragma omp parallel for schedule(static) if (nx > kParallelThreshold)
        for (int i = 0; i < nx; ++i) {
            const double left = i > 0 ? u[i - 1] : 0.0;
            const double right = i + 1 < nx ? u[i + 1] : 0.0;
            r[i] = (left - 2.0 * u[i] + right) * c;
        }
        return;
    }
    const int ny = s.ny;
    const double cx = s.inv_hx2;
    const double cy = s.inv_hy2;
#pragma omp parallel for schedule(static) if (static_cast<std::ptrdiff_t>(nx) * ny > kParallelThreshold)
    for (int j = 0; j < ny; ++j) {
        const double* row = u + static_cast<std::size_t>(j) * nx;
        const double* below = j > 0 ? row - nx : nullptr;
        const double* above = j + 1 < ny ? row + nx : nullptr;
        double* dst = r + static_cast<std::size_t>(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const double c = row[i];
            const double w = i > 0 ? row[i - 1] : 0.0;
            const double e = i + 1 < nx ? row[i + 1] : 0.0;
            const double sth = below ? below[i] : 0.0;
            const double nth = above ? above[i] : 0.0;
            dst[i] = (w - 2.0 * c + e) * cx + (sth - 2.0 * c + nth) * cy;
        }
    }
}

void shifted_operator(const Stencil& s, double shift, std::span<const double> potential,
                      std::span<const double> in, std::span<double> out) {
    if (static_cast<std::ptrdiff_t>(in.size()) <= kParallelThreshold)
        return serial::shifted_operator(s, shift, potential, in, out);
    laplacian(s, in, out);
    const auto n = static_cast<std::ptrdiff_t>(in.size());
    const double* u = in.data();
    double* r = out.data();
    if (potential.empty()) {
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
        for (std::ptrdiff_t k = 0; k < n; ++k) r[k] = shift * u[k] - r[k];
    } else {
        const double* q = potential.data();
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
        for (std::ptrdiff_t k = 0; k < n; ++k) r[k] = (shift + q[k]) * u[k] - r[k];
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    const double* x = a.data();
    if (n <= kParallelThreshold) return serial::dot(a, b);
    const double* y = b.data();
    double sum = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sum) if (n > kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < n; ++k) sum += x[k] * y[k];
    return sum;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    if (n <= kParallelThreshold) return serial::axpy(alpha, x, y);
    const double* src = x.data();
    double* dst = y.data();
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < n; ++k) dst[k] += alpha * src[k];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    if (n <= kParallelThreshold) return serial::xpby(x, beta, y);
    const double* src = x.data();
    double* dst = y.data();
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < n; ++k) dst[k] = src[k] + beta * dst[k];
}

void scale(std::span<const double> r, std::span<const double> inv_diag, std::span<double> z) {
    const auto n = static_cast<std::ptrdiff_t>(r.size());
    if (n <= kParallelThreshold) return serial::scale(r, inv_diag, z);
    const double* src = r.data();
    const double* d = inv_diag.data();
    double* dst = z.data();
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < n; ++k) dst[k] = src[k] * d[k];
}

double max_abs(std::span<const double> a) {
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    if (n <= kParallelThreshold) return serial::max_abs(a);
    const double* x = a.data();
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m) if (n > kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < n; ++k) m = std::fmax(m, std::fabs(x[k]));
    return m;
}

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace compete::kernels
