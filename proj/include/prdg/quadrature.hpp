#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "prdg/errors.hpp"
#include "prdg/geometry.hpp"

namespace prdg {

/* Quadrature on the reference segment [0,1]. Weights sum to 1. */
struct segment_rule_t {
    std::vector<double> points;
    std::vector<double> weights;
    int degree = 0;
};

/* Quadrature on the reference triangle (0,0)-(1,0)-(0,1). Weights sum to 1/2. */
struct triangle_rule_t {
    std::vector<vec2> points;
    std::vector<double> weights;
    int degree = 0;
};

namespace detail {

/* Golub-Welsch: Gauss-Legendre nodes/weights on [-1,1] from the symmetric
 * tridiagonal Jacobi matrix of the Legendre recurrence. */
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        x[i] = es.eigenvalues()(i);
        double v = es.eigenvectors()(0, i);
        w[i] = 2.0 * v * v;
    }
}

} // namespace detail

inline segment_rule_t segment_rule(int degree) {
    if (degree < 1 || degree > 20)
        throw config_error("segment_rule: degree out of range [1,20]: " + std::to_string(degree));
    int n = degree / 2 + 1;
    std::vector<double> x, w;
    detail::gauss_legendre(n, x, w);
    segment_rule_t rule;
    rule.degree = degree;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.points[i] = 0.5 * (x[i] + 1.0);
        rule.weights[i] = 0.5 * w[i];
    }
    return rule;
}

namespace detail {

inline void push_point(triangle_rule_t& r, double x, double y, double w) {
    r.points.emplace_back(x, y);
    r.weights.push_back(w);
}

/* Three points with barycentric coordinates (a,a,1-2a) and permutations;
 * weight is relative to unit total (scaled by the 1/2 reference area below). */
inline void push_sym3(triangle_rule_t& r, double a, double w) {
    double c = 1.0 - 2.0 * a;
    push_point(r, a, a, w);
    push_point(r, c, a, w);
    push_point(r, a, c, w);
}

/* Tensor Gauss rule collapsed onto the triangle: x = u(1-v), y = uv with
 * Jacobian u. The Jacobian raises the u-degree by one, hence n >= (d+2)/2. */
inline triangle_rule_t duffy_rule(int degree) {
    int n = (degree + 3) / 2;
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    triangle_rule_t rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        double u = 0.5 * (x[i] + 1.0), wu = 0.5 * w[i];
        for (int j = 0; j < n; ++j) {
            double v = 0.5 * (x[j] + 1.0), wv = 0.5 * w[j];
            push_point(rule, u * (1.0 - v), u * v, wu * wv * u);
        }
    }
    return rule;
}

} // namespace detail

inline triangle_rule_t triangle_rule(int degree) {
    if (degree < 1 || degree > 20)
        throw config_error("triangle_rule: degree out of range [1,20]: " + std::to_string(degree));

    triangle_rule_t rule;
    rule.degree = degree;
    const double half = 0.5; // reference area

    if (degree == 1) {
        detail::push_point(rule, 1.0 / 3.0, 1.0 / 3.0, half);
    } else if (degree == 2) {
        // edge midpoints
        detail::push_point(rule, 0.5, 0.0, half / 3.0);
        detail::push_point(rule, 0.5, 0.5, half / 3.0);
        detail::push_point(rule, 0.0, 0.5, half / 3.0);
    } else if (degree <= 4) {
        // 6-point rule, exact to degree 4
        detail::push_sym3(rule, 0.445948490915965, half * 0.223381589678011);
        detail::push_sym3(rule, 0.091576213509771, half * 0.109951743655322);
    } else if (degree == 5) {
        // 7-point rule
        const double s15 = std::sqrt(15.0);
        detail::push_point(rule, 1.0 / 3.0, 1.0 / 3.0, half * 9.0 / 40.0);
        detail::push_sym3(rule, (6.0 + s15) / 21.0, half * (155.0 + s15) / 1200.0);
        detail::push_sym3(rule, (6.0 - s15) / 21.0, half * (155.0 - s15) / 1200.0);
    } else {
        rule = detail::duffy_rule(degree);
    }
    return rule;
}

/* Physical-space point set built by mapping reference rules. */
struct mapped_quad {
    std::vector<vec2> points;
    std::vector<double> weights;

    double integrate(const auto& f) const {
        double s = 0.0;
        for (size_t i = 0; i < points.size(); ++i)
            s += weights[i] * f(points[i]);
        return s;
    }
};

inline void map_triangle_rule(const triangle_rule_t& rule, const triangle& tri, mapped_quad& out) {
    vec2 a = tri.v[0];
    vec2 e1 = tri.v[1] - tri.v[0];
    vec2 e2 = tri.v[2] - tri.v[0];
    double jac = std::abs(cross(e1, e2)); // = 2*area
    for (size_t q = 0; q < rule.points.size(); ++q) {
        const vec2& p = rule.points[q];
        out.points.push_back(a + e1 * p.x + e2 * p.y);
        out.weights.push_back(rule.weights[q] * jac);
    }
}

inline mapped_quad triangle_quadrature(const triangle& tri, int degree) {
    mapped_quad out;
    map_triangle_rule(triangle_rule(degree), tri, out);
    return out;
}

inline mapped_quad segment_quadrature(const vec2& a, const vec2& b, int degree) {
    segment_rule_t rule = segment_rule(degree);
    mapped_quad out;
    double len = (b - a).norm();
    for (size_t q = 0; q < rule.points.size(); ++q) {
        out.points.push_back(a + (b - a) * rule.points[q]);
        out.weights.push_back(rule.weights[q] * len);
    }
    return out;
}

} // namespace prdg
