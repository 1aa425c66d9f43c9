#include "fbpool/geometry.hpp"

#include "fbpool/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace fbpool {

Rect::Rect(double x_lo, double x_hi, double y_lo, double y_hi)
    : x_lo(x_lo), x_hi(x_hi), y_lo(y_lo), y_hi(y_hi) {
    if (!(x_lo < x_hi) || !(y_lo < y_hi)) throw DomainError("Rect: empty or inverted extent");
}

Grid::Grid(Rect rect, int nx, int ny) : rect_(rect), nx_(nx), ny_(ny) {
    if (nx < 2 || ny < 2) throw DomainError("Grid: need at least 2 cells per axis");
    hx_ = rect.width() / nx;
    hy_ = rect.height() / ny;
}

// Offsets from the midpoint keep coordinates of symmetric rects exactly antisymmetric.
double Grid::x(int i) const {
    if (i == 0) return rect_.x_lo;
    if (i == nx_) return rect_.x_hi;
    return 0.5 * (rect_.x_lo + rect_.x_hi) + double(2 * i - nx_) * (0.5 * hx_);
}

double Grid::y(int j) const {
    if (j == 0) return rect_.y_lo;
    if (j == ny_) return rect_.y_hi;
    return 0.5 * (rect_.y_lo + rect_.y_hi) + double(2 * j - ny_) * (0.5 * hy_);
}

namespace {
int snap(double v, double lo, double h, int n) {
    const double t = (v - lo) / h;
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9 || r < 0 || r > n) return -1;
    return int(r);
}
}  // namespace

int Grid::node_i(double v) const { return snap(v, rect_.x_lo, hx_, nx_); }
int Grid::node_j(double v) const { return snap(v, rect_.y_lo, hy_, ny_); }

bool Grid::operator==(const Grid& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && rect_.x_lo == o.rect_.x_lo &&
           rect_.x_hi == o.rect_.x_hi && rect_.y_lo == o.rect_.y_lo && rect_.y_hi == o.rect_.y_hi;
}

CellRange cell_range(const Grid& g, const Rect& sub) {
    const int i0 = g.node_i(sub.x_lo), i1 = g.node_i(sub.x_hi);
    const int j0 = g.node_j(sub.y_lo), j1 = g.node_j(sub.y_hi);
    if (i0 < 0 || i1 < 0 || j0 < 0 || j1 < 0 || i0 >= i1 || j0 >= j1)
        throw AlignmentError("sub-rectangle is not node-aligned inside the grid");
    return {i0, i1, j0, j1};
}

ScalarField2D::ScalarField2D(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
        throw DomainError("ScalarField2D: value count does not match grid");
    for (double v : values_)
        if (!std::isfinite(v)) throw NumericError("ScalarField2D: non-finite value");
}

double ScalarField2D::at(int i, int j) const {
    if (i < 0 || i > grid_.nx() || j < 0 || j > grid_.ny())
        throw IndexError("node index out of range");
    return (*this)(i, j);
}

double ScalarField2D::interpolate(Point p) const {
    const Rect& r = grid_.rect();
    const double tx = (std::clamp(p.x, r.x_lo, r.x_hi) - r.x_lo) / grid_.hx();
    const double ty = (std::clamp(p.y, r.y_lo, r.y_hi) - r.y_lo) / grid_.hy();
    const int i = std::clamp(int(std::floor(tx)), 0, grid_.nx() - 1);
    const int j = std::clamp(int(std::floor(ty)), 0, grid_.ny() - 1);
    const double s = tx - i, t = ty - j;
    return (1 - s) * (1 - t) * (*this)(i, j) + s * (1 - t) * (*this)(i + 1, j) +
           (1 - s) * t * (*this)(i, j + 1) + s * t * (*this)(i + 1, j + 1);
}

double ScalarField2D::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::array<double, 2> gradient(const ScalarField2D& f, int i, int j) {
    const Grid& g = f.grid();
    if (i < 0 || i >= g.nx() || j < 0 || j >= g.ny()) throw IndexError("cell index out of range");
    return {(f(i + 1, j) - f(i, j)) / g.hx(), (f(i, j + 1) - f(i, j)) / g.hy()};
}

ScalarField2D restrict_field(const ScalarField2D& f, const Rect& sub) {
    const CellRange c = cell_range(f.grid(), sub);
    const Grid& g = f.grid();
    Grid sg(Rect(g.x(c.i0), g.x(c.i1), g.y(c.j0), g.y(c.j1)), c.i1 - c.i0, c.j1 - c.j0);
    std::vector<double> v;
    v.reserve(sg.node_count());
    for (int j = c.j0; j <= c.j1; ++j)
        for (int i = c.i0; i <= c.i1; ++i) v.push_back(f(i, j));
    return ScalarField2D(sg, std::move(v));
}

ScalarField2D negate(const ScalarField2D& f) {
    std::vector<double> v = f.values();
    for (double& x : v) x = -x;
    return ScalarField2D(f.grid(), std::move(v));
}

void write_field(std::ostream& os, const ScalarField2D& f) {
    const Grid& g = f.grid();
    const Rect& r = g.rect();
    os << g.nx() << ' ' << g.ny() << '\n';
    os << std::setprecision(17) << r.x_lo << ' ' << r.x_hi << ' ' << r.y_lo << ' ' << r.y_hi
       << '\n';
    for (double v : f.values()) os << v << '\n';
}

ScalarField2D read_field(std::istream& is) {
    int nx = 0, ny = 0;
    double x0, x1, y0, y1;
    if (!(is >> nx >> ny >> x0 >> x1 >> y0 >> y1)) throw DomainError("field dump: bad header");
    Grid g(Rect(x0, x1, y0, y1), nx, ny);
    std::vector<double> v(g.node_count());
    for (double& x : v)
        if (!(is >> x)) throw DomainError("field dump: truncated values");
    return ScalarField2D(g, std::move(v));
}

void write_field_file(const std::string& path, const ScalarField2D& f) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_field(os, f);
}

ScalarField2D read_field_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    return read_field(is);
}

}  // namespace fbpool
