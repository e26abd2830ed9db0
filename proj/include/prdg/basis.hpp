#pragma once

#include <vector>

#include "prdg/errors.hpp"
#include "prdg/geometry.hpp"

namespace prdg {

/* Scaled-shifted monomial basis of P_m around (x_K, h_K):
 *   ((x - x_K)/h_K)^a ((y - y_K)/h_K)^b,  a + b <= m,
 * graded-lexicographic: 1; x, y; x^2, xy, y^2; ...
 * Scaling keeps the least-squares design matrix conditioned independently
 * of h. */
class local_basis {
public:
    static constexpr int max_degree = 12;

    local_basis() = default;

    local_basis(int m, vec2 center, double scale) : m_(m), center_(center), scale_(scale) {
        if (m < 0 || m > max_degree)
            throw config_error("polynomial degree must be in [0, " +
                               std::to_string(max_degree) + "]");
        if (!(scale > 0.0))
            throw config_error("local basis scale must be positive");
        exps_.clear();
        for (int d = 0; d <= m; ++d)
            for (int a = d; a >= 0; --a)
                exps_.emplace_back(a, d - a);
    }

    int degree() const { return m_; }
    int dimension() const { return int(exps_.size()); }
    vec2 center() const { return center_; }
    double scale() const { return scale_; }
    const std::vector<std::pair<int, int>>& exponents() const { return exps_; }

    /* values[i] = d^(dx+dy)/(dx dy) of member i at p; chain rule contributes
     * scale^-(dx+dy). */
    void eval(vec2 p, int dx, int dy, double* values) const {
        if (dx < 0 || dy < 0 || dx + dy > 3)
            throw config_error("basis derivative order must be between 0 and 3");
        const double xi = (p.x - center_.x) / scale_;
        const double eta = (p.y - center_.y) / scale_;
        double xp[max_degree + 1], yp[max_degree + 1];
        xp[0] = yp[0] = 1.0;
        for (int k = 1; k <= m_; ++k) {
            xp[k] = xp[k - 1] * xi;
            yp[k] = yp[k - 1] * eta;
        }
        const double ds = 1.0 / ipow(scale_, dx + dy);
        for (size_t i = 0; i < exps_.size(); ++i) {
            auto [a, b] = exps_[i];
            if (a < dx || b < dy) {
                values[i] = 0.0;
                continue;
            }
            values[i] = falling(a, dx) * falling(b, dy) * xp[a - dx] * yp[b - dy] * ds;
        }
    }

    std::vector<double> eval(vec2 p, int dx = 0, int dy = 0) const {
        std::vector<double> values(exps_.size());
        eval(p, dx, dy, values.data());
        return values;
    }

    /* p(x) = sum_i coeffs[i] * member_i(x), derivative (dx, dy). */
    double value(const double* coeffs, vec2 p, int dx = 0, int dy = 0) const {
        std::vector<double> v = eval(p, dx, dy);
        double s = 0.0;
        for (size_t i = 0; i < v.size(); ++i)
            s += coeffs[i] * v[i];
        return s;
    }

private:
    static double falling(int a, int k) {
        double r = 1.0;
        for (int j = 0; j < k; ++j)
            r *= a - j;
        return r;
    }
    static double ipow(double x, int k) {
        double r = 1.0;
        for (int j = 0; j < k; ++j)
            r *= x;
        return r;
    }

    int m_ = 0;
    vec2 center_{};
    double scale_ = 1.0;
    std::vector<std::pair<int, int>> exps_{{0, 0}};
};

} // namespace prdg
