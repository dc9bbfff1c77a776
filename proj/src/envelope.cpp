#include "logcc/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logcc/errors.hpp"

namespace logcc {

double exp_affine_integral(double c, double s, double u, double v)
{
    const double w = v - u;
    if (!(w > 0.0)) return 0.0;
    if (s == 0.0) return std::exp(c) * w;
    if (s > 0.0) return std::exp(c - u * s) * (-std::expm1(-w * s)) / s;
    return std::exp(c - v * s) * (-std::expm1(w * s)) / (-s);
}

AffineEnvelope::AffineEnvelope(std::vector<double> slopes, std::vector<double> offsets, double lo, double hi)
    : slopes_(std::move(slopes)), offsets_(std::move(offsets)), lo_(lo), hi_(hi)
{
    if (slopes_.size() != offsets_.size()) throw PreconditionError("envelope: size mismatch");
    if (!(lo <= hi)) throw PreconditionError("envelope: empty interval");
    masses_.assign(slopes_.size(), 0.0);

    std::vector<int> hull;
    for (int i = 0; i < static_cast<int>(slopes_.size()); ++i) {
        if (!(offsets_[i] < std::numeric_limits<double>::infinity())) continue;
        if (!hull.empty() && !(slopes_[i] > slopes_[hull.back()]))
            throw PreconditionError("envelope: slopes must be strictly increasing");
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2], b = hull.back();
            const double cr = (slopes_[b] - slopes_[a]) * (offsets_[i] - offsets_[a]) -
                              (offsets_[b] - offsets_[a]) * (slopes_[i] - slopes_[a]);
            if (cr > 0.0) break;
            hull.pop_back();
        }
        hull.push_back(i);
    }
    if (hull.empty()) return;

    // breakpoint between hull[k] and hull[k+1]
    std::vector<double> b(hull.size() - 1);
    for (std::size_t k = 0; k + 1 < hull.size(); ++k)
        b[k] = (offsets_[hull[k + 1]] - offsets_[hull[k]]) / (slopes_[hull[k + 1]] - slopes_[hull[k]]);

    breaks_.push_back(lo);
    for (std::size_t k = 0; k < hull.size(); ++k) {
        const double left = k == 0 ? -std::numeric_limits<double>::infinity() : b[k - 1];
        const double right = k + 1 == hull.size() ? std::numeric_limits<double>::infinity() : b[k];
        const double u = std::max(left, lo), v = std::min(right, hi);
        const bool last = active_.empty() && k + 1 == hull.size();
        if (u < v || (lo == hi && u <= v) || last) {
            active_.push_back(hull[k]);
            breaks_.push_back(std::max(v, breaks_.back()));
        }
    }
    breaks_.back() = hi;

    for (std::size_t k = 0; k < active_.size(); ++k) {
        const int i = active_[k];
        masses_[i] = exp_affine_integral(offsets_[i], slopes_[i], breaks_[k], breaks_[k + 1]);
        integral_ += masses_[i];
    }
}

double AffineEnvelope::operator()(double x) const
{
    if (active_.empty() || x < lo_ || x > hi_) return std::numeric_limits<double>::infinity();
    auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, x);
    std::size_t k = static_cast<std::size_t>(it - (breaks_.begin() + 1));
    double best = x * slopes_[active_[k]] - offsets_[active_[k]];
    // neighbours guard against rounding at the breakpoints
    if (k > 0) best = std::max(best, x * slopes_[active_[k - 1]] - offsets_[active_[k - 1]]);
    if (k + 1 < active_.size()) best = std::max(best, x * slopes_[active_[k + 1]] - offsets_[active_[k + 1]]);
    return best;
}

}  // namespace logcc
