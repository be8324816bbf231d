#pragma once

// Data-parallel inner loops shared by the solvers. Every kernel exists twice:
// the OpenMP version in `compete::kernels` used by the library, and a plain
// serial version in `compete::kernels::serial` kept as the reference for tests
// and the benchmark.

#include <cstddef>
#include <span>

namespace compete::kernels {

struct Stencil {
    int dim = 1;
    int nx = 0;
    int ny = 1;
    double inv_hx2 = 0.0;
    double inv_hy2 = 0.0;
};

// out = Delta_h in
void laplacian(const Stencil& s, std::span<const double> in, std::span<double> out);
// out = (-Delta_h + shift + potential) in; potential may be empty.
void shifted_operator(const Stencil& s, double shift, std::span<const double> potential,
                      std::span<const double> in, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// y = x + beta y
void xpby(std::span<const double> x, double beta, std::span<double> y);
// z = r * inv_diag
void scale(std::span<const double> r, std::span<const double> inv_diag, std::span<double> z);
double max_abs(std::span<const double> a);

namespace serial {
void laplacian(const Stencil& s, std::span<const double> in, std::span<double> out);
void shifted_operator(const Stencil& s, double shift, std::span<const double> potential,
                      std::span<const double> in, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void scale(std::span<const double> r, std::span<const double> inv_diag, std::span<double> z);
double max_abs(std::span<const double> a);
}  // namespace serial

// Number of OpenMP threads kernels will use (1 when built without OpenMP).
int thread_count();

}  // namespace compete::kernels
