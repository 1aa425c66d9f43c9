#include "fbpool/poisson.hpp"

#include "fbpool/errors.hpp"
#include "fbpool/kernels.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace fbpool {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

PoissonDST::PoissonDST(const Grid& g, double scale)
    : grid_(g), scale_(scale), mx_(g.nx() - 1), my_(g.ny() - 1) {
    if (!(scale > 0)) throw DomainError("PoissonDST: scale must be positive");
    const double pi = std::numbers::pi;
    const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
    // Unnormalized DST-I applied twice per axis multiplies by 2(n+1).
    const double norm = 4.0 * double(g.nx()) * double(g.ny());
    inv_eig_.resize(std::size_t(mx_) * std::size_t(my_));
    for (int l = 0; l < my_; ++l) {
        const double ey = (2 - 2 * std::cos((l + 1) * pi / g.ny())) / hy2;
        for (int k = 0; k < mx_; ++k) {
            const double ex = (2 - 2 * std::cos((k + 1) * pi / g.nx())) / hx2;
            inv_eig_[std::size_t(l) * mx_ + k] = 1.0 / (scale * (ex + ey) * norm);
        }
    }
    std::lock_guard<std::mutex> lock(planner_mutex());
    buf_ = fftw_alloc_real(inv_eig_.size());
    plan_ = fftw_plan_r2r_2d(my_, mx_, buf_, buf_, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    if (!plan_) throw NumericError("PoissonDST: FFTW planning failed");
}

PoissonDST::~PoissonDST() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    if (buf_) fftw_free(buf_);
}

void PoissonDST::solve(const double* rhs, double* out) {
    const int nx = grid_.nx(), ny = grid_.ny();
    for (int j = 1; j < ny; ++j)
        for (int i = 1; i < nx; ++i) buf_[std::size_t(j - 1) * mx_ + (i - 1)] = rhs[grid_.index(i, j)];
    fftw_execute(static_cast<fftw_plan>(plan_));
    for (std::size_t k = 0; k < inv_eig_.size(); ++k) buf_[k] *= inv_eig_[k];
    fftw_execute(static_cast<fftw_plan>(plan_));
    for (int i = 0; i <= nx; ++i) {
        out[grid_.index(i, 0)] = 0.0;
        out[grid_.index(i, ny)] = 0.0;
    }
    for (int j = 1; j < ny; ++j) {
        out[grid_.index(0, j)] = 0.0;
        out[grid_.index(nx, j)] = 0.0;
        for (int i = 1; i < nx; ++i) out[grid_.index(i, j)] = buf_[std::size_t(j - 1) * mx_ + (i - 1)];
    }
}

void PoissonDST::apply(const double* x, double* out) const {
    const int nx = grid_.nx(), ny = grid_.ny();
    const double cx = scale_ / (grid_.hx() * grid_.hx()), cy = scale_ / (grid_.hy() * grid_.hy());
    const auto& k = kernels::active();
    for (int i = 0; i <= nx; ++i) {
        out[grid_.index(i, 0)] = 0.0;
        out[grid_.index(i, ny)] = 0.0;
    }
    for (int j = 1; j < ny; ++j) {
        out[grid_.index(0, j)] = 0.0;
        out[grid_.index(nx, j)] = 0.0;
        k.laplace_row(x + grid_.index(1, j - 1), x + grid_.index(1, j), x + grid_.index(1, j + 1),
                      std::size_t(nx - 1), cx, cy, out + grid_.index(1, j));
    }
}

}  // namespace fbpool
