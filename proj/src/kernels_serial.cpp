#include "compete/kernels.hpp"

#include <cmath>

namespace compete::kernels::serial {

void laplacian(const Stencil& s, std::span<const double> in, std::span<double> out) {
    const int nx = s.nx;
    if (s.dim == 1) {
        for (int i = 0; i < nx; ++i) {
            const double left = i > 0 ? in[i - 1] : 0.0;
            const double right = i + 1 < nx ? in[i + 1] : 0.0;
            out[i] = (left - 2.0 * in[i] + right) * s.inv_hx2;
        }
        return;
    }
    const int ny = s.ny;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            const double c = in[k];
            const double w = i > 0 ? in[k - 1] : 0.0;
            const double e = i + 1 < nx ? in[k + 1] : 0.0;
            const double sth = j > 0 ? in[k - nx] : 0.0;
            const double nth = j + 1 < ny ? in[k + nx] : 0.0;
            out[k] = (w - 2.0 * c + e) * s.inv_hx2 + (sth - 2.0 * c + nth) * s.inv_hy2;
        }
    }
}

void shifted_operator(const Stencil& s, double shift, std::span<const double> potential,
                      std::span<const double> in, std::span<double> out) {
    serial::laplacian(s, in, out);
    const bool has_potential = !potential.empty();
    for (std::size_t k = 0; k < in.size(); ++k) {
        const double q = shift + (has_potential ? potential[k] : 0.0);
        out[k] = q * in[k] - out[k];
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
    return sum;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] + beta * y[k];
}

void scale(std::span<const double> r, std::span<const double> inv_diag, std::span<double> z) {
    for (std::size_t k = 0; k < r.size(); ++k) z[k] = r[k] * inv_diag[k];
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::fmax(m, std::fabs(v));
    return m;
}

}  // namespace compete::kernels::serial
