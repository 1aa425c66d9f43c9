#include "fbpool/minimize2d.hpp"

#include "fbpool/errors.hpp"
#include "fbpool/kernels.hpp"
#include "fbpool/poisson.hpp"
#include "fbpool/slice1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

namespace fbpool {

Grid solver_grid(const ProfileParams& p, double hy, double hx_max) {
    if (!(hy > 0 && hx_max > 0)) throw DomainError("solver_grid: spacings must be positive");
    const int ny = int(std::lround(2.0 / hy));
    int nx = int(std::ceil(6 * p.N / hx_max - 1e-9));
    nx += nx % 2;
    return Grid(p.domain(), nx, ny + ny % 2);
}

std::vector<double> default_eps_schedule(double hy) {
    std::vector<double> s;
    for (double e = 0.25; e > hy / 4 * (1 + 1e-12); e *= 0.5) s.push_back(e);
    s.push_back(hy / 4);
    return s;
}

ScalarField2D slice_field(const ProfileParams& p, const Grid& g) {
    return slice_field(p, g, [p](double x) { return f_flat(x, p); });
}

ScalarField2D slice_field(const ProfileParams& p, const Grid& g, const ProfileFn& f) {
    const BoundaryData bd = dirichlet_data(g, p, f);
    std::vector<double> v(g.node_count());
    for (int i = 0; i <= g.nx(); ++i) {
        const SliceSolution s = slice_minimize(f(g.x(i)));
        for (int j = 0; j <= g.ny(); ++j) v[g.index(i, j)] = s.eval(g.y(j));
    }
    // Side columns take the prescribed data exactly.
    for (std::size_t k = 0; k < v.size(); ++k)
        if (bd.fixed[k]) v[k] = bd.values[k];
    return ScalarField2D(g, std::move(v));
}

namespace {

struct Workspace {
    const Grid& g;
    const kernels::Dispatch& k;
    std::size_t n;
    std::vector<double> dsig;  // per cell
    Workspace(const Grid& g)
        : g(g), k(kernels::active()), n(g.node_count()), dsig(std::size_t(g.nx()) * g.ny()) {}

    double energy(const double* u, double inv_eps) {
        const int nx = g.nx(), ny = g.ny();
        kernels::CellRowSums acc;
        double area = 0.0;
        for (int j = 0; j < ny; ++j) {
            const double* lo = u + g.index(0, j);
            const double* hi = u + g.index(0, j + 1);
            k.cell_row(lo, hi, std::size_t(nx), 1.0 / g.hx(), 1.0 / g.hy(), 0.0, nullptr, nullptr,
                       acc);
            area += k.smoothed_area(lo, hi, std::size_t(nx), inv_eps, dsig.data() + std::size_t(j) * nx);
        }
        return (acc.gx2 + acc.gy2 + area) * g.hx() * g.hy();
    }

    // Gradient with respect to interior nodes; call energy() on u first to fill dsig.
    void gradient(const double* u, PoissonDST& P, double* grad) {
        P.apply(u, grad);
        const int nx = g.nx(), ny = g.ny();
        const double c4 = 0.25 * g.hx() * g.hy();
        for (int j = 1; j < ny; ++j) {
            const double* below = dsig.data() + std::size_t(j - 1) * nx;
            const double* above = dsig.data() + std::size_t(j) * nx;
            double* out = grad + g.index(0, j);
            for (int i = 1; i < nx; ++i)
                out[i] += c4 * ((below[i - 1] + below[i]) + (above[i - 1] + above[i]));
        }
    }
};

// Replaces v by its part odd in y; requires ny even.
void project_odd(const Grid& g, double* v) {
    const int nx = g.nx(), ny = g.ny();
    for (int j = 0; j < ny / 2; ++j)
        for (int i = 0; i <= nx; ++i) {
            double& a = v[g.index(i, j)];
            double& b = v[g.index(i, ny - j)];
            const double o = 0.5 * (b - a);
            b = o;
            a = -o;
        }
    for (int i = 0; i <= nx; ++i) v[g.index(i, ny / 2)] = 0.0;
}

bool data_is_odd(const BoundaryData& bd) {
    const Grid& g = bd.grid;
    if (g.ny() % 2 != 0) return false;
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = 0; i <= g.nx(); ++i) {
            const std::size_t a = g.index(i, j), b = g.index(i, g.ny() - j);
            if (bd.fixed[a] && bd.values[a] != -bd.values[b]) return false;
        }
    return true;
}

double cell_sharp(const Grid& g, const double* u, int i, int j, double ztol) {
    const double a = u[g.index(i, j)], b = u[g.index(i + 1, j)];
    const double c = u[g.index(i, j + 1)], d = u[g.index(i + 1, j + 1)];
    const double gx = (b - a) / g.hx(), gy = (c - a) / g.hy();
    const double m = 0.25 * ((a + b) + (c + d));
    return (gx * gx + gy * gy + (std::abs(m) > ztol ? 1.0 : 0.0)) * g.hx() * g.hy();
}

double node_local_sharp(const Grid& g, const double* u, int i, int j, double ztol) {
    return cell_sharp(g, u, i - 1, j - 1, ztol) + cell_sharp(g, u, i, j - 1, ztol) +
           cell_sharp(g, u, i - 1, j, ztol) + cell_sharp(g, u, i, j, ztol);
}

double sharp_energy(const Grid& g, const std::vector<double>& u, double ztol) {
    return energy_J(ScalarField2D(g, u), Weights::unit(), ztol).total;
}

// Solves -Laplacian_h u = 0 on mask nodes, all other nodes fixed. PCG with the DST preconditioner.
void masked_harmonic(const Grid& g, PoissonDST& P, std::vector<double>& u,
                     const std::vector<std::uint8_t>& mask, bool odd, double rtol, int max_it) {
    const auto& k = kernels::active();
    const std::size_t n = u.size();
    std::vector<double> r(n), z(n), p(n), Ap(n), base(n);
    auto apply_mask = [&](std::vector<double>& v) {
        for (std::size_t i = 0; i < n; ++i)
            if (!mask[i]) v[i] = 0.0;
    };
    P.apply(u.data(), r.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = -r[i];
    apply_mask(r);
    if (odd) project_odd(g, r.data());
    const double r0 = std::sqrt(k.dot(r.data(), r.data(), n));
    if (r0 == 0.0) return;
    std::vector<double> x(n, 0.0);
    P.solve(r.data(), z.data());
    apply_mask(z);
    p = z;
    double rz = k.dot(r.data(), z.data(), n);
    for (int it = 0; it < max_it; ++it) {
        P.apply(p.data(), Ap.data());
        apply_mask(Ap);
        const double pAp = k.dot(p.data(), Ap.data(), n);
        if (!(pAp > 0)) break;
        const double a = rz / pAp;
        k.axpy(a, p.data(), x.data(), n);
        k.axpy(-a, Ap.data(), r.data(), n);
        if (std::sqrt(k.dot(r.data(), r.data(), n)) <= rtol * r0) break;
        P.solve(r.data(), z.data());
        apply_mask(z);
        const double rz_new = k.dot(r.data(), z.data(), n);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (odd) project_odd(g, x.data());
    k.axpy(1.0, x.data(), u.data(), n);
}

}  // namespace

double smoothed_energy(const ScalarField2D& u, double eps) {
    Workspace ws(u.grid());
    return ws.energy(u.data(), 1.0 / eps);
}

SolveResult solve(const SolveConfig& cfg) {
    const Grid& g = cfg.grid;
    if (cfg.eps_schedule.empty()) throw DomainError("solve: empty eps schedule");
    for (std::size_t s = 0; s < cfg.eps_schedule.size(); ++s) {
        if (!(cfg.eps_schedule[s] > 0)) throw DomainError("solve: eps must be positive");
        if (s > 0 && !(cfg.eps_schedule[s] < cfg.eps_schedule[s - 1]))
            throw DomainError("solve: eps schedule must be strictly decreasing");
    }
    if (cfg.eps_schedule.back() < g.hy() / 4 * (1 - 1e-12))
        throw DomainError("solve: last eps below hy/4");
    if (!(cfg.rel_tol > 0)) throw DomainError("solve: rel_tol must be positive");

    const ProfileFn f = cfg.profile_fn ? cfg.profile_fn
                                       : ProfileFn([p = cfg.profile](double x) { return f_flat(x, p); });
    const BoundaryData bd = dirichlet_data(g, cfg.profile, f);
    const ScalarField2D init = slice_field(cfg.profile, g, f);
    const bool odd = data_is_odd(bd);

    const std::size_t n = g.node_count();
    std::vector<double> u = init.values(), grad(n), d(n), trial(n);
    PoissonDST P(g, 2 * g.hx() * g.hy());
    Workspace ws(g);
    const auto& k = kernels::active();

    SolveResult res{init, init};
    res.odd_symmetric = odd;
    bool last_converged = false;
    // Limited-memory BFGS with the scaled Dirichlet operator as the initial inverse Hessian.
    constexpr std::size_t kMem = 8;
    std::vector<std::vector<double>> S, Y;
    std::vector<double> rho, alpha_k(kMem), gprev(n), q(n);
    for (std::size_t s = 0; s < cfg.eps_schedule.size(); ++s) {
        const double inv_eps = 1.0 / cfg.eps_schedule[s];
        double E = ws.energy(u.data(), inv_eps);
        if (!std::isfinite(E)) throw NumericError("solve: non-finite energy");
        StageSummary st{cfg.eps_schedule[s], 0, E, E, false};
        std::vector<double> hist{E};
        S.clear();
        Y.clear();
        rho.clear();
        ws.gradient(u.data(), P, grad.data());
        double t_last = 1.0;
        for (int it = 0; it < cfg.max_iter; ++it) {
            // Two-loop recursion.
            q = grad;
            const std::size_t m = S.size();
            for (std::size_t c = m; c-- > 0;) {
                alpha_k[c] = rho[c] * k.dot(S[c].data(), q.data(), n);
                k.axpy(-alpha_k[c], Y[c].data(), q.data(), n);
            }
            P.solve(q.data(), d.data());
            for (std::size_t c = 0; c < m; ++c) {
                const double b = rho[c] * k.dot(Y[c].data(), d.data(), n);
                k.axpy(alpha_k[c] - b, S[c].data(), d.data(), n);
            }
            for (double& v : d) v = -v;
            if (odd) project_odd(g, d.data());
            double gd = k.dot(grad.data(), d.data(), n);
            if (!std::isfinite(gd)) throw NumericError("solve: non-finite gradient");
            if (gd >= 0.0 && m > 0) {
                // Curvature information went stale; fall back to the preconditioned gradient.
                S.clear();
                Y.clear();
                rho.clear();
                P.solve(grad.data(), d.data());
                for (double& v : d) v = -v;
                if (odd) project_odd(g, d.data());
                gd = k.dot(grad.data(), d.data(), n);
            }
            double dmax = 0.0;
            for (double v : d) dmax = std::max(dmax, std::abs(v));
            if (gd >= 0.0 || dmax < 1e-14) {
                st.converged = true;
                break;
            }
            // Steps are usually far below 1 once the kinks dominate; start near the last one.
            double t = std::min(1.0, 4 * t_last), Et = E;
            bool accepted = false;
            for (int ls = 0; ls < 40; ++ls) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * d[i];
                Et = ws.energy(trial.data(), inv_eps);
                if (!std::isfinite(Et)) throw NumericError("solve: non-finite energy in line search");
                if (Et <= E + 1e-4 * t * gd) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (accepted) t_last = t;
            if (!accepted) {
                t_last = 1.0;
                if (m > 0) {
                    S.clear();
                    Y.clear();
                    rho.clear();
                    ws.energy(u.data(), inv_eps);
                    continue;
                }
                if (it == 0 && dmax > 1e-10)
                    throw SolverStallError("solve: no descent at the start of a stage", st.eps, it,
                                           st.energy_start, E);
                st.converged = true;
                ws.energy(u.data(), inv_eps);
                break;
            }
            gprev = grad;
            ws.gradient(trial.data(), P, grad.data());
            std::vector<double> sv(n), yv(n);
            for (std::size_t i = 0; i < n; ++i) {
                sv[i] = trial[i] - u[i];
                yv[i] = grad[i] - gprev[i];
            }
            if (odd) {
                project_odd(g, sv.data());
                project_odd(g, yv.data());
            }
            const double sy = k.dot(sv.data(), yv.data(), n);
            if (sy > 1e-12 * std::sqrt(k.dot(sv.data(), sv.data(), n) * k.dot(yv.data(), yv.data(), n))) {
                if (S.size() == kMem) {
                    S.erase(S.begin());
                    Y.erase(Y.begin());
                    rho.erase(rho.begin());
                }
                S.push_back(std::move(sv));
                Y.push_back(std::move(yv));
                rho.push_back(1.0 / sy);
            }
            u.swap(trial);
            E = Et;
            ++st.iterations;
            hist.push_back(E);
            res.energy_history.push_back(E);
            res.history_stage.push_back(int(s));
            const std::size_t w = std::size_t(cfg.window);
            if (hist.size() > w && hist[hist.size() - 1 - w] - E < cfg.rel_tol * std::abs(E)) {
                st.converged = true;
                break;
            }
        }
        st.energy_end = E;
        if (st.iterations > 0 && !(st.energy_end < st.energy_start))
            throw SolverStallError("solve: stage energy did not decrease", st.eps, st.iterations,
                                   st.energy_start, st.energy_end);
        res.stages.push_back(st);
        last_converged = st.converged;
    }

    // Hard truncation of the smoothing band, four parity colours, mirror pairs decided jointly.
    const double ztol = default_zero_tol(ScalarField2D(g, u));
    const double trunc = cfg.truncation_tol > 0 ? cfg.truncation_tol : cfg.eps_schedule.back();
    const int nx = g.nx(), ny = g.ny();
    for (int colour = 0; colour < 4; ++colour) {
        for (int j = 1; j < ny; ++j) {
            if ((j & 1) != (colour >> 1)) continue;
            if (odd && j > ny / 2) continue;
            for (int i = 1 + ((colour & 1) ^ 1); i < nx; i += 2) {
                const std::size_t a = g.index(i, j);
                if (u[a] == 0.0 || std::abs(u[a]) >= trunc) continue;
                const bool paired = odd && j != ny / 2;
                const int jm = ny - j;
                const std::size_t b = g.index(i, jm);
                double before = node_local_sharp(g, u.data(), i, j, ztol);
                if (paired) before += node_local_sharp(g, u.data(), i, jm, ztol);
                const double ua = u[a], ub = u[b];
                u[a] = 0.0;
                if (paired) u[b] = 0.0;
                double after = node_local_sharp(g, u.data(), i, j, ztol);
                if (paired) after += node_local_sharp(g, u.data(), i, jm, ztol);
                if (after - before < 1e-14) {
                    res.truncated_nodes += paired ? 2 : 1;
                } else {
                    u[a] = ua;
                    if (paired) u[b] = ub;
                }
            }
        }
    }

    // Harmonic replacement on the nonzero set, kept only if the sharp energy does not rise.
    {
        std::vector<std::uint8_t> mask(n, 0);
        for (int j = 1; j < ny; ++j)
            for (int i = 1; i < nx; ++i) mask[g.index(i, j)] = u[g.index(i, j)] != 0.0;
        std::vector<double> h = u;
        masked_harmonic(g, P, h, mask, odd, 1e-12, 500);
        const double e_old = sharp_energy(g, u, ztol), e_new = sharp_energy(g, h, ztol);
        if (e_new <= e_old) {
            u.swap(h);
            res.harmonic_pass_kept = true;
        }
    }

    res.u = ScalarField2D(g, std::move(u));
    res.zero_tol = ztol;
    res.final_energy = energy_J(res.u, Weights::unit(), ztol);
    res.converged = last_converged;
    return res;
}

BallStencil ball_stencil(const Grid& g, const Ball& b) {
    BallStencil s;
    const Rect& R = g.rect();
    const int i0 = std::max(1, int(std::floor((b.c.x - b.r - R.x_lo) / g.hx())));
    const int i1 = std::min(g.nx() - 1, int(std::ceil((b.c.x + b.r - R.x_lo) / g.hx())));
    const int j0 = std::max(1, int(std::floor((b.c.y - b.r - R.y_lo) / g.hy())));
    const int j1 = std::min(g.ny() - 1, int(std::ceil((b.c.y + b.r - R.y_lo) / g.hy())));
    std::vector<std::uint8_t> touched;
    const int w = i1 - i0 + 2, h = j1 - j0 + 2;
    touched.assign(std::size_t(std::max(w, 0)) * std::max(h, 0), 0);
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
            const double dx = g.x(i) - b.c.x, dy = g.y(j) - b.c.y;
            if (dx * dx + dy * dy < b.r * b.r) {
                s.nodes.push_back(g.index(i, j));
                for (int cj = j - 1; cj <= j; ++cj)
                    for (int ci = i - 1; ci <= i; ++ci) {
                        uint8_t& t = touched[std::size_t(cj - (j0 - 1)) * w + (ci - (i0 - 1))];
                        if (!t) {
                            t = 1;
                            s.cells.emplace_back(ci, cj);
                        }
                    }
            }
        }
    std::sort(s.cells.begin(), s.cells.end(), [](auto a, auto b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    return s;
}

std::vector<double> harmonic_in_ball(const ScalarField2D& u, const BallStencil& s) {
    const Grid& g = u.grid();
    std::vector<double> v = u.values();
    const std::size_t m = s.nodes.size();
    if (m == 0) return v;
    const double cx = 1.0 / (g.hx() * g.hx()), cy = 1.0 / (g.hy() * g.hy());
    const std::size_t row = std::size_t(g.nx() + 1);
    // Matrix-free CG on the stencil nodes; unknowns are offsets from zero initial values.
    std::vector<std::uint8_t> in(v.size(), 0);
    for (std::size_t a : s.nodes) {
        in[a] = 1;
        v[a] = 0.0;
    }
    auto lap = [&](const std::vector<double>& full, std::size_t a) {
        return cx * (2 * full[a] - full[a - 1] - full[a + 1]) +
               cy * (2 * full[a] - full[a - row] - full[a + row]);
    };
    std::vector<double> r(m), p(m), Ap(m), pf(v.size(), 0.0);
    for (std::size_t k = 0; k < m; ++k) r[k] = -lap(v, s.nodes[k]);
    p = r;
    double rr = 0.0;
    for (double x : r) rr += x * x;
    const double r0 = std::sqrt(rr);
    for (int it = 0; it < 4 * int(m) + 50 && std::sqrt(rr) > 1e-13 * r0 && rr > 0; ++it) {
        for (std::size_t k = 0; k < m; ++k) pf[s.nodes[k]] = p[k];
        double pAp = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            Ap[k] = lap(pf, s.nodes[k]);
            pAp += p[k] * Ap[k];
        }
        const double a = rr / pAp;
        double rr_new = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            v[s.nodes[k]] += a * p[k];
            r[k] -= a * Ap[k];
            rr_new += r[k] * r[k];
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < m; ++k) p[k] = r[k] + beta * p[k];
    }
    return v;
}

AuditReport competitor_audit(const SolveResult& res, const Weights& w, int n_balls,
                             std::uint64_t seed, double c_audit) {
    const ScalarField2D& u = res.u;
    const Grid& g = u.grid();
    const Rect& R = g.rect();
    const double h = std::max(g.hx(), g.hy());
    const double r_lo = 4 * h, r_hi = std::min(0.5, 0.5 * R.height() - 3 * h);
    if (r_hi <= r_lo) throw DomainError("competitor_audit: domain too small for audit balls");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    std::vector<std::size_t> zero_nodes;
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i)
            if (u(i, j) == 0.0) zero_nodes.push_back(g.index(i, j));

    AuditReport rep;
    rep.c_audit = c_audit;
    std::vector<double> work = u.values();
    const double ztol = res.zero_tol;
    for (int b = 0; b < n_balls; ++b) {
        const double r = r_lo + (r_hi - r_lo) * U(rng);
        const double m = r + 2 * h;
        Point c;
        if ((b & 1) && !zero_nodes.empty()) {
            const std::size_t a = zero_nodes[std::size_t(U(rng) * zero_nodes.size()) % zero_nodes.size()];
            const int i = int(a % std::size_t(g.nx() + 1)), j = int(a / std::size_t(g.nx() + 1));
            c = {std::clamp(g.x(i), R.x_lo + m, R.x_hi - m), std::clamp(g.y(j), R.y_lo + m, R.y_hi - m)};
        } else {
            c = {R.x_lo + m + (R.width() - 2 * m) * U(rng), R.y_lo + m + (R.height() - 2 * m) * U(rng)};
        }
        const Ball ball{c, r};
        const BallStencil st = ball_stencil(g, ball);
        if (st.nodes.empty()) continue;
        const double eu = energy_on_cells(g, u.data(), w, st.cells, ztol);
        const double tol = c_audit * h * r;
        auto record = [&](const std::string& name, const double* vals) {
            const double ev = energy_on_cells(g, vals, w, st.cells, ztol);
            AuditEntry e{ball, name, eu, ev, ev - eu, tol};
            if (e.margin < -tol) ++rep.violations;
            if (rep.worst_index < 0 || e.margin < rep.worst_margin) {
                rep.worst_margin = e.margin;
                rep.worst_index = int(rep.entries.size());
            }
            rep.entries.push_back(e);
        };
        auto restore = [&] {
            for (std::size_t a : st.nodes) work[a] = u.data()[a];
        };

        const std::vector<double> harm = harmonic_in_ball(u, st);
        record("harmonic_replacement", harm.data());

        for (std::size_t a : st.nodes) work[a] = 0.0;
        record("zero_fill", work.data());
        restore();

        for (std::size_t a : st.nodes) work[a] = res.initial.data()[a];
        record("slice_splice", work.data());
        restore();

        for (int sgn : {1, -1}) {
            const double amp = sgn * 1e-2 * r;
            for (std::size_t a : st.nodes) {
                const int i = int(a % std::size_t(g.nx() + 1)), j = int(a / std::size_t(g.nx() + 1));
                const double dx = g.x(i) - c.x, dy = g.y(j) - c.y;
                work[a] += amp * std::max(0.0, 1 - (dx * dx + dy * dy) / (r * r));
            }
            record(sgn > 0 ? "bump_plus" : "bump_minus", work.data());
            restore();
        }
    }
    rep.passed = rep.violations == 0;
    return rep;
}

}  // namespace fbpool
