#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace fbpool {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    double x_lo, x_hi, y_lo, y_hi;

    Rect(double x_lo, double x_hi, double y_lo, double y_hi);
    double width() const { return x_hi - x_lo; }
    double height() const { return y_hi - y_lo; }
    double area() const { return width() * height(); }
    bool contains(Point p) const {
        return p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi;
    }
};

class Grid {
public:
    Grid(Rect rect, int nx, int ny);

    const Rect& rect() const { return rect_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    std::size_t node_count() const { return std::size_t(nx_ + 1) * std::size_t(ny_ + 1); }
    std::size_t index(int i, int j) const { return std::size_t(j) * std::size_t(nx_ + 1) + std::size_t(i); }

    double x(int i) const;
    double y(int j) const;
    Point node(int i, int j) const { return {x(i), y(j)}; }
    Point cell_center(int i, int j) const { return {x(i) + 0.5 * hx_, y(j) + 0.5 * hy_}; }

    // Node index of coordinate v if it lies on a grid line (relative tol 1e-9 of a step), else -1.
    int node_i(double v) const;
    int node_j(double v) const;

    bool operator==(const Grid& o) const;

private:
    Rect rect_;
    int nx_, ny_;
    double hx_, hy_;
};

// Cell index window [i0, i1) x [j0, j1).
struct CellRange {
    int i0, i1, j0, j1;
    int count() const { return (i1 - i0) * (j1 - j0); }
};

// Node-aligned sub-rectangle of a grid as a cell range; throws AlignmentError.
CellRange cell_range(const Grid& g, const Rect& sub);

class ScalarField2D {
public:
    ScalarField2D(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const double* data() const { return values_.data(); }
    double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    double at(int i, int j) const;

    // Bilinear interpolation; points outside the rect are clamped to it.
    double interpolate(Point p) const;

    double max_abs() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

template <class F>
ScalarField2D sample(const Grid& g, F&& fn) {
    std::vector<double> v(g.node_count());
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = 0; i <= g.nx(); ++i) v[g.index(i, j)] = fn(g.x(i), g.y(j));
    return ScalarField2D(g, std::move(v));
}

// Forward-difference gradient on cell (i, j) from its lower-left corner.
std::array<double, 2> gradient(const ScalarField2D& f, int i, int j);

ScalarField2D restrict_field(const ScalarField2D& f, const Rect& sub);

ScalarField2D negate(const ScalarField2D& f);

void write_field(std::ostream& os, const ScalarField2D& f);
ScalarField2D read_field(std::istream& is);
void write_field_file(const std::string& path, const ScalarField2D& f);
ScalarField2D read_field_file(const std::string& path);

}  // namespace fbpool
