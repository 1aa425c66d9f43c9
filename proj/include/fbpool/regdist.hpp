#pragma once

#include "fbpool/boundary.hpp"
#include "fbpool/geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fbpool {

// A graph y = f(x) carrying the measure q^{-1} ds. Inside the core |x| < R/10 the graph and
// weight are arbitrary; outside it f equals tail_height and q equals q_tail.
struct GraphMeasureSpec {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(Point)> q;
    double q_tail = 1.0;
    double tail_height = 0.0;
    double beta = 1.0;
    int d = 1;
    double R = 20.0;
    std::vector<double> breakpoints;  // abscissae where f is least smooth
    std::string name;

    double core() const { return R / 10; }
    double height(double x) const { return std::abs(x) < core() ? f(x) : tail_height; }
    double slope(double x) const { return std::abs(x) < core() ? df(x) : 0.0; }
    double weight(Point p) const { return std::abs(p.x) < core() ? q(p) : q_tail; }
};

// Built-in graphs. `sign` = -1 reflects the graph through y = 0.
GraphMeasureSpec flat_graph(double R, double q, double offset = 0.0);
GraphMeasureSpec cubic_cusp_graph(double R, double amplitude, double q, int sign = 1);
GraphMeasureSpec bump_graph(double R, double amplitude, double width, double q, int sign = 1);
// f = rho(s(x)) * cutoff(x), s = 1 / sum_e (x - e)^-2, rho(s) = A s / (1 + A s / H).
GraphMeasureSpec points_graph(double R, std::vector<double> points, double A, double H, double q,
                              int sign = 1);
// Endpoints of the 2^k level-k intervals of the middle-thirds construction on [lo, hi].
std::vector<double> cantor_points(int k, double lo, double hi);
// f = rho(dist(x, [a, b])^3) * cutoff(x); touches y = 0 along the whole segment.
GraphMeasureSpec segment_graph(double R, double a, double b, double A, double H, double q,
                               int sign = 1);
// From JSON text, e.g. {"type":"cantor-k","k":2,"A":200,"H":0.1,"q":3.14159,"sign":1}.
GraphMeasureSpec graph_from_json(const std::string& json, double R);

struct QuadLevel {
    double tol = 1e-10;
    int max_depth = 15;
};

// Euclidean distance to the graph (core plus flat tails) and the nearest abscissa.
struct GraphProjection {
    double distance;
    double s;
};
GraphProjection project_to_graph(const GraphMeasureSpec& spec, Point x);

double regdist_eval(const GraphMeasureSpec& spec, Point x, const QuadLevel& q = {});
// D and its analytic gradient.
std::array<double, 3> regdist_eval_grad(const GraphMeasureSpec& spec, Point x,
                                        const QuadLevel& q = {});

// For d = 1, beta = 1: |grad D| -> c * Theta^{-1} near the graph with Theta = 2 / q.
// On the flat line D = q h / pi, which fixes c.
constexpr double kGradCalibration = 0.63661977236758134308;  // 2 / pi
double calibrate_gradient_constant(const QuadLevel& q = {});

ScalarField2D build_almost_minimizer(const GraphMeasureSpec& plus, const GraphMeasureSpec& minus,
                                     const Grid& grid, const QuadLevel& q = {});

struct GrowthReport {
    double C1 = 0.0;             // max of D/dist and dist/D
    double grad_sup = 0.0;       // sup |grad D|
    double hess_dist_sup = 0.0;  // sup ||D^2 D|| * dist
    double near_graph_max_rel_dev = 0.0;  // max | |grad D| / (c / Theta) - 1 |
    int samples = 0;
    int graph_points = 0;
};
GrowthReport growth_checks(const GraphMeasureSpec& spec, int sample_n, std::uint64_t seed,
                           const QuadLevel& q = {}, int graph_points = 50);

struct BarrierParams {
    double t = 0.0;
    double M_plus = 1.0, m_minus = 1.0;  // upper barrier slopes
    double m_plus = 1.0, M_minus = 1.0;  // lower barrier slopes
};
enum class BarrierDirection { sub, super };

struct BarrierResult {
    bool ordered = false;
    double worst_margin = 0.0;  // min over ball nodes of the signed ordering gap
};
// sub: w_bar_t = M+ (y-t)^+ - m- (y-t)^- <= u;  super: w_low_t = m+ (y+t)^+ - M- (y+t)^- >= u.
// y is measured from the ball centre.
BarrierResult barrier_compare(const ScalarField2D& u, Point center, double radius,
                              const BarrierParams& p, BarrierDirection dir);
// Sweeps t from t_max down to t_min in `steps` steps; returns the first t at which the
// ordering fails, or t_min - 1 if it never fails.
double barrier_slide(const ScalarField2D& u, Point center, double radius, BarrierParams p,
                     BarrierDirection dir, double t_max, double t_min, int steps);

// Weights equal to the near-graph |grad u+-| traces, extended vertically.
Weights trace_weights(const GraphMeasureSpec& plus, const GraphMeasureSpec& minus,
                      const Grid& grid, double holder_alpha, const QuadLevel& q = {});

struct CertificateLevel {
    double radius = 0.0;
    double max_excess = 0.0;
    double noise = 0.0;
    bool resolvable = false;
    int balls = 0;
};
struct CertificateReport {
    std::vector<CertificateLevel> levels;
    double slope = 0.0;
    double threshold = 0.0;
    double fitted_C = 0.0;
    int resolvable_levels = 0;
    bool at_noise_level = false;
    bool passed = false;
    std::string status;
};

// Per-ball excess J_B(u) - min over competitors J_B(v) at radii r0 * 2^{-k/2} down to 8h.
// `noise` is the per-level excess measured on an exact minimizer (empty: treat as zero).
CertificateReport almost_min_certificate(const ScalarField2D& u, const Weights& w,
                                         double holder_alpha, int n_balls, std::uint64_t seed,
                                         const std::vector<Point>& focus = {},
                                         const std::vector<double>& noise = {},
                                         double r0 = 0.25);

// Excess of one ball over the certificate's competitor family.
double ball_excess(const ScalarField2D& u, const Weights& w, Point c, double r, double zero_tol);

}  // namespace fbpool
