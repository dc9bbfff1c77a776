#include "logcc/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace logcc {

namespace {

struct Padded {
    const Grid& g;
    std::span<const double> f;
    double outside;

    int n0() const { return g.points(0); }
    int n1() const { return g.points(1); }
    bool real(int i, int j) const { return i >= 0 && j >= 0 && i < n0() && j < n1(); }
    double value(int i, int j) const { return real(i, j) ? f[g.index(i, j)] : outside; }
    static double coord(const Axis& a, int i)
    {
        if (i < 0) return a.lo - a.spacing();
        if (i >= a.points) return a.hi + a.spacing();
        return a.coord(i);
    }
    Point pos(int i, int j) const { return {coord(g.axis(0), i), coord(g.axis(1), j)}; }
};

Point interpolate(const Point& p, const Point& q, double a, double b, double level)
{
    const double s = (a - level) / (a - b);
    return {p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])};
}

double cross(const Point& o, const Point& a, const Point& b)
{
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double dist(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

}  // namespace

std::vector<Segment> marching_squares(const Grid& grid, std::span<const double> field, double level,
                                      double outside)
{
    if (grid.dim() != 2) throw PreconditionError("marching squares needs a 2D grid");
    Padded P{grid, field, outside};
    std::vector<Segment> out;
    for (int i = -1; i < P.n0(); ++i) {
        for (int j = -1; j < P.n1(); ++j) {
            const int ci[4] = {i, i + 1, i + 1, i};
            const int cj[4] = {j, j, j + 1, j + 1};
            double v[4];
            Point x[4];
            int bits = 0;
            for (int k = 0; k < 4; ++k) {
                v[k] = P.value(ci[k], cj[k]);
                x[k] = P.pos(ci[k], cj[k]);
                if (v[k] > level) bits |= 1 << k;
            }
            if (bits == 0 || bits == 15) continue;
            // edge e joins corner e and e+1
            Point e[4];
            bool has[4];
            for (int k = 0; k < 4; ++k) {
                const int l = (k + 1) % 4;
                has[k] = ((bits >> k) & 1) != ((bits >> l) & 1);
                if (has[k]) e[k] = interpolate(x[k], x[l], v[k], v[l], level);
            }
            if (bits == 5 || bits == 10) {
                const bool centre = 0.25 * (v[0] + v[1] + v[2] + v[3]) > level;
                // cut off the corners that differ from the centre
                const bool cut_odd = (bits == 5) == centre;
                if (cut_odd) {
                    out.push_back({e[0], e[1]});
                    out.push_back({e[2], e[3]});
                } else {
                    out.push_back({e[3], e[0]});
                    out.push_back({e[1], e[2]});
                }
                continue;
            }
            Point s[2];
            int m = 0;
            for (int k = 0; k < 4; ++k)
                if (has[k]) s[m++] = e[k];
            out.push_back({s[0], s[1]});
        }
    }
    return out;
}

std::vector<Crossing> level_crossings(const Grid& grid, std::span<const double> field, double level,
                                      double outside)
{
    if (grid.dim() != 2) throw PreconditionError("level crossings need a 2D grid");
    Padded P{grid, field, outside};
    std::vector<Crossing> out;
    auto edge = [&](int i, int j, int k, int l) {
        const double a = P.value(i, j), b = P.value(k, l);
        const bool ia = a > level, ib = b > level;
        if (ia == ib) return;
        Point x = interpolate(P.pos(i, j), P.pos(k, l), a, b, level);
        const std::size_t in = ia ? grid.index(i, j) : grid.index(k, l);
        out.push_back({x, in});
    };
    for (int i = -1; i < P.n0(); ++i)
        for (int j = 0; j < P.n1(); ++j) edge(i, j, i + 1, j);
    for (int i = 0; i < P.n0(); ++i)
        for (int j = -1; j < P.n1(); ++j) edge(i, j, i, j + 1);
    return out;
}

double polyline_length(const std::vector<Segment>& segments)
{
    double s = 0.0;
    for (const Segment& seg : segments) s += dist(seg[0], seg[1]);
    return s;
}

std::vector<std::size_t> convex_hull(const std::vector<Point>& pts)
{
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return pts[a][0] < pts[b][0] || (pts[a][0] == pts[b][0] && pts[a][1] < pts[b][1]);
    });
    if (idx.size() < 3) return idx;
    std::vector<std::size_t> h(2 * idx.size());
    std::size_t k = 0;
    for (std::size_t i : idx) {
        while (k >= 2 && cross(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= 0) --k;
        h[k++] = i;
    }
    const std::size_t lower = k + 1;
    for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
        while (k >= lower && cross(pts[h[k - 2]], pts[h[k - 1]], pts[*it]) <= 0) --k;
        h[k++] = *it;
    }
    h.resize(k - 1);
    return h;
}

double hull_perimeter(const std::vector<Point>& pts)
{
    std::vector<double> ones(pts.size(), 1.0);
    return hull_line_integral(pts, ones);
}

double hull_line_integral(const std::vector<Point>& pts, const std::vector<double>& values)
{
    auto h = convex_hull(pts);
    if (h.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const std::size_t a = h[k], b = h[(k + 1) % h.size()];
        s += dist(pts[a], pts[b]) * 0.5 * (values[a] + values[b]);
    }
    return s;
}

}  // namespace logcc
