#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "prdg/errors.hpp"
#include "prdg/geometry.hpp"

namespace prdg {

enum class bc_mode { clamped, simply_supported };

inline std::string to_string(bc_mode bc) {
    return bc == bc_mode::clamped ? "clamped" : "simply-supported";
}

enum class domain_tag { unit_square, lshape };

/* Exact solution bundle: u and enough derivatives for the forms and all
 * error norms; f = lap(lap(u)). Boundary data are exact traces. */
struct manufactured_case {
    std::string name;
    bc_mode bc = bc_mode::clamped;
    domain_tag domain = domain_tag::unit_square;

    std::function<double(vec2)> u;
    std::function<vec2(vec2)> grad;
    std::function<std::array<double, 3>(vec2)> hess; // uxx, uxy, uyy
    std::function<double(vec2)> lap;
    std::function<vec2(vec2)> grad_lap;
    std::function<double(vec2)> f;

    /* Traces; g_N additionally needs the outward normal. */
    double g_dirichlet(vec2 p) const { return u(p); }
    double g_neumann(vec2 p, vec2 n) const { return dot(grad(p), n); }
    double g_laplacian(vec2 p) const { return lap(p); }
};

namespace detail {

/* Dense bivariate polynomial with exact derivative calculus; backs the
 * poly-exact cases. Coefficient c(a,b) multiplies x^a y^b. */
struct poly2 {
    int deg = 0;
    std::vector<double> c; // (deg+1)^2, row a, col b

    explicit poly2(int degree) : deg(degree), c(size_t((degree + 1) * (degree + 1)), 0.0) {}

    double& at(int a, int b) { return c[size_t(a * (deg + 1) + b)]; }
    double get(int a, int b) const {
        if (a < 0 || b < 0 || a > deg || b > deg)
            return 0.0;
        return c[size_t(a * (deg + 1) + b)];
    }

    double eval(vec2 p) const {
        double s = 0.0;
        for (int a = deg; a >= 0; --a) {
            double row = 0.0;
            for (int b = deg; b >= 0; --b)
                row = row * p.y + get(a, b);
            s = s * p.x + row;
        }
        return s;
    }

    poly2 dx() const {
        poly2 r(deg);
        for (int a = 1; a <= deg; ++a)
            for (int b = 0; b <= deg; ++b)
                r.at(a - 1, b) = a * get(a, b);
        return r;
    }

    poly2 dy() const {
        poly2 r(deg);
        for (int a = 0; a <= deg; ++a)
            for (int b = 1; b <= deg; ++b)
                r.at(a, b - 1) = b * get(a, b);
        return r;
    }

    poly2 laplacian() const {
        poly2 xx = dx().dx(), yy = dy().dy();
        poly2 r(deg);
        for (size_t i = 0; i < r.c.size(); ++i)
            r.c[i] = xx.c[i] + yy.c[i];
        return r;
    }
};

inline manufactured_case make_poly_case(int m) {
    if (m < 0)
        throw config_error("poly-exact degree must be >= 0");
    poly2 u(m);
    for (int a = 0; a <= m; ++a)
        for (int b = 0; b + a <= m; ++b)
            u.at(a, b) = 1.0 + ((a + 1) * (b + 2) % 7) * 0.25;

    poly2 ux = u.dx(), uy = u.dy();
    poly2 uxx = ux.dx(), uxy = ux.dy(), uyy = uy.dy();
    poly2 lap = u.laplacian();
    poly2 lapx = lap.dx(), lapy = lap.dy();
    poly2 f = lap.laplacian();

    manufactured_case mc;
    mc.name = "poly-exact-" + std::to_string(m);
    mc.bc = bc_mode::clamped;
    mc.domain = domain_tag::unit_square;
    mc.u = [u](vec2 p) { return u.eval(p); };
    mc.grad = [ux, uy](vec2 p) { return vec2{ux.eval(p), uy.eval(p)}; };
    mc.hess = [uxx, uxy, uyy](vec2 p) {
        return std::array<double, 3>{uxx.eval(p), uxy.eval(p), uyy.eval(p)};
    };
    mc.lap = [lap](vec2 p) { return lap.eval(p); };
    mc.grad_lap = [lapx, lapy](vec2 p) { return vec2{lapx.eval(p), lapy.eval(p)}; };
    mc.f = [f](vec2 p) { return f.eval(p); };
    return mc;
}

inline manufactured_case make_ex1_sin2() {
    constexpr double pi = 3.14159265358979323846;
    constexpr double pi2 = pi * pi, pi3 = pi2 * pi, pi4 = pi2 * pi2;
    manufactured_case mc;
    mc.name = "ex1-sin2";
    mc.bc = bc_mode::clamped;
    mc.domain = domain_tag::unit_square;
    // u = sin^2(pi x) sin^2(pi y) = (1 - cos 2pi x)(1 - cos 2pi y)/4
    mc.u = [=](vec2 p) {
        return 0.25 * (1.0 - std::cos(2 * pi * p.x)) * (1.0 - std::cos(2 * pi * p.y));
    };
    mc.grad = [=](vec2 p) {
        double Sx = std::sin(2 * pi * p.x), Sy = std::sin(2 * pi * p.y);
        double Cx = std::cos(2 * pi * p.x), Cy = std::cos(2 * pi * p.y);
        return vec2{0.5 * pi * Sx * (1.0 - Cy), 0.5 * pi * Sy * (1.0 - Cx)};
    };
    mc.hess = [=](vec2 p) {
        double Sx = std::sin(2 * pi * p.x), Sy = std::sin(2 * pi * p.y);
        double Cx = std::cos(2 * pi * p.x), Cy = std::cos(2 * pi * p.y);
        return std::array<double, 3>{pi2 * Cx * (1.0 - Cy), pi2 * Sx * Sy,
                                     pi2 * Cy * (1.0 - Cx)};
    };
    mc.lap = [=](vec2 p) {
        double Cx = std::cos(2 * pi * p.x), Cy = std::cos(2 * pi * p.y);
        return pi2 * (Cx + Cy - 2.0 * Cx * Cy);
    };
    mc.grad_lap = [=](vec2 p) {
        double Sx = std::sin(2 * pi * p.x), Sy = std::sin(2 * pi * p.y);
        double Cx = std::cos(2 * pi * p.x), Cy = std::cos(2 * pi * p.y);
        return vec2{2.0 * pi3 * Sx * (2.0 * Cy - 1.0), 2.0 * pi3 * Sy * (2.0 * Cx - 1.0)};
    };
    mc.f = [=](vec2 p) {
        double Cx = std::cos(2 * pi * p.x), Cy = std::cos(2 * pi * p.y);
        return 4.0 * pi4 * (4.0 * Cx * Cy - Cx - Cy);
    };
    return mc;
}

inline manufactured_case make_ex3_ss() {
    constexpr double pi = 3.14159265358979323846;
    constexpr double pi2 = pi * pi, pi4 = pi2 * pi2;
    manufactured_case mc;
    mc.name = "ex3-ss";
    mc.bc = bc_mode::simply_supported;
    mc.domain = domain_tag::unit_square;
    mc.u = [=](vec2 p) { return std::sin(2 * pi * p.x) * std::sin(2 * pi * p.y); };
    mc.grad = [=](vec2 p) {
        return vec2{2 * pi * std::cos(2 * pi * p.x) * std::sin(2 * pi * p.y),
                    2 * pi * std::sin(2 * pi * p.x) * std::cos(2 * pi * p.y)};
    };
    mc.hess = [=](vec2 p) {
        double u = std::sin(2 * pi * p.x) * std::sin(2 * pi * p.y);
        double cc = std::cos(2 * pi * p.x) * std::cos(2 * pi * p.y);
        return std::array<double, 3>{-4 * pi2 * u, 4 * pi2 * cc, -4 * pi2 * u};
    };
    mc.lap = [=](vec2 p) {
        return -8 * pi2 * std::sin(2 * pi * p.x) * std::sin(2 * pi * p.y);
    };
    mc.grad_lap = [=](vec2 p) {
        return vec2{-16 * pi2 * pi * std::cos(2 * pi * p.x) * std::sin(2 * pi * p.y),
                    -16 * pi2 * pi * std::sin(2 * pi * p.x) * std::cos(2 * pi * p.y)};
    };
    mc.f = [=](vec2 p) { return 64 * pi4 * std::sin(2 * pi * p.x) * std::sin(2 * pi * p.y); };
    return mc;
}

/* u = r^(5/3) sin(5 theta / 3) with theta in [0, 3pi/2] from the positive
 * x-axis: the imaginary part of z^(5/3), harmonic away from the corner, so
 * lap u = 0 and f = 0. Cartesian derivatives come from w' = (5/3) z^(2/3)
 * and w'' = (10/9) z^(-1/3). */
inline manufactured_case make_lshape_singular() {
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    auto polar = [](vec2 p, double& r, double& t) {
        r = std::sqrt(p.x * p.x + p.y * p.y);
        if (r < 1e-14)
            r = 1e-14;
        t = std::atan2(p.y, p.x);
        if (t < 0)
            t += two_pi;
    };
    manufactured_case mc;
    mc.name = "lshape-singular";
    mc.bc = bc_mode::clamped;
    mc.domain = domain_tag::lshape;
    mc.u = [=](vec2 p) {
        double r, t;
        polar(p, r, t);
        return std::pow(r, 5.0 / 3.0) * std::sin(5.0 * t / 3.0);
    };
    mc.grad = [=](vec2 p) {
        double r, t;
        polar(p, r, t);
        double c = (5.0 / 3.0) * std::pow(r, 2.0 / 3.0);
        return vec2{c * std::sin(2.0 * t / 3.0), c * std::cos(2.0 * t / 3.0)};
    };
    mc.hess = [=](vec2 p) {
        double r, t;
        polar(p, r, t);
        double c = (10.0 / 9.0) * std::pow(r, -1.0 / 3.0);
        double uxx = -c * std::sin(t / 3.0);
        double uxy = c * std::cos(t / 3.0);
        return std::array<double, 3>{uxx, uxy, -uxx};
    };
    mc.lap = [](vec2) { return 0.0; };
    mc.grad_lap = [](vec2) { return vec2{0.0, 0.0}; };
    mc.f = [](vec2) { return 0.0; };
    return mc;
}

} // namespace detail

/* Catalog lookup; `m` only matters for the poly-exact family. */
inline manufactured_case get_case(const std::string& name, int m = 2) {
    if (name == "ex1-sin2")
        return detail::make_ex1_sin2();
    if (name == "ex3-ss")
        return detail::make_ex3_ss();
    if (name == "lshape-singular")
        return detail::make_lshape_singular();
    if (name == "poly-exact-m" || name.rfind("poly-exact", 0) == 0)
        return detail::make_poly_case(m);
    throw config_error("unknown case: " + name +
                       " (known: ex1-sin2, ex3-ss, lshape-singular, poly-exact-m)");
}

} // namespace prdg
