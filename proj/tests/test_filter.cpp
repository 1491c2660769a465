#include "cmx/harmonic_filter.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

using namespace cmx;

namespace
{
    constexpr double pi = std::numbers::pi;
    using C = std::complex<double>;

    TimeGrid make_grid(double omega, int steps)
    {
        TimeGrid g;
        g.omega = omega;
        g.period = 2 * pi / omega;
        g.steps = steps;
        g.dt = g.period / steps;
        g.degree = 1;
        return g;
    }

    // adaptive Simpson quadrature, the independent oracle for the Hermite weights
    C adaptive_simpson(const std::function<C(double)>& f, double a, double b, double tol,
                       int depth = 0)
    {
        const double m = 0.5 * (a + b);
        auto simpson = [&](double lo, double hi)
        { return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi)); };
        const C whole = simpson(a, b);
        const C halves = simpson(a, m) + simpson(m, b);
        if (depth > 40 || std::abs(halves - whole) < 15.0 * tol)
            return halves + (halves - whole) / 15.0;
        return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1) +
               adaptive_simpson(f, m, b, 0.5 * tol, depth + 1);
    }

    // drive one period of a synthetic scalar trajectory through the filter
    ComplexField filter_signal(FilterKind kind, const TimeGrid& g,
                               const std::function<double(double)>& u,
                               const std::function<double(double)>& du)
    {
        FilterAccumulator acc(kind, g, 1);
        for (int m = 0; m <= g.steps; ++m)
        {
            const double t = m * g.dt;
            const FieldState um{u(t)};
            const FieldState pm{du(t)};
            acc.accumulate(m, t, um, &pm);
        }
        return acc.finalize();
    }
} // namespace

TEST_CASE("constant signals filter to zero")
{
    const double omega = 3.0;
    for (FilterKind kind : {FilterKind::Trapezoid, FilterKind::Hermite})
        for (int M : {8, 57, 256})
        {
            const TimeGrid g = make_grid(omega, M);
            const ComplexField f = filter_signal(
                kind, g, [](double) { return 4.2; }, [](double) { return 0.0; });
            CHECK(std::abs(f[0]) <= 1e-12);
        }
}

TEST_CASE("trapezoid recovers a pure first harmonic exactly")
{
    const double omega = 10 * pi;
    const C a{0.8, -1.7};
    for (int M : {3, 8, 97})
    {
        const TimeGrid g = make_grid(omega, M);
        const ComplexField f = filter_signal(
            FilterKind::Trapezoid, g,
            [&](double t) { return (a * std::exp(C{0, omega * t})).real(); },
            [](double) { return 0.0; });
        CHECK(std::abs(f[0] - a) <= 1e-12 * std::abs(a));
    }
}

TEST_CASE("hermite weights match an adaptive quadrature oracle on cubics")
{
    const double omega = 7.3;
    const double dt = 0.21;
    const auto xi = FilterAccumulator::hermite_weights(omega, dt);

    // a cubic is its own Hermite interpolant: u(t) = 2 - t + 3t^2 - 0.5 t^3
    auto u = [](double t) { return 2.0 - t + 3.0 * t * t - 0.5 * t * t * t; };
    auto du = [](double t) { return -1.0 + 6.0 * t - 1.5 * t * t; };
    const C quad = u(0.0) * xi[0] + u(dt) * xi[1] + du(0.0) * xi[2] + du(dt) * xi[3];
    const C oracle = adaptive_simpson([&](double t) { return u(t) * std::exp(C{0, -omega * t}); },
                                      0.0, dt, 1e-15);
    CHECK(std::abs(quad - oracle) <= 1e-12 * std::abs(oracle));
}

TEST_CASE("hermite weight partition: xi00 + xi01 integrates the phase")
{
    for (double omega : {0.5, 4.0, 60.0})
        for (double dt : {0.3, 0.004})
        {
            const auto xi = FilterAccumulator::hermite_weights(omega, dt);
            const C expected = (1.0 - std::exp(C{0, -omega * dt})) / C{0, omega};
            CHECK(std::abs(xi[0] + xi[1] - expected) <= 1e-13 * std::abs(expected) + 1e-18);
        }
}

TEST_CASE("hermite weights near the Taylor threshold match the oracle on both branches")
{
    const double dt = 1.0;
    auto p = [dt](int idx, double t) -> double
    {
        const double s = t / dt;
        switch (idx)
        {
        case 0: return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
        case 1: return 3.0 * s * s - 2.0 * s * s * s;
        case 2: return t * (1.0 - s) * (1.0 - s);
        default: return t * s * (s - 1.0);
        }
    };
    for (double omega : {0.99e-4, 1.01e-4})   // straddles the series/closed-form switch
    {
        const auto xi = FilterAccumulator::hermite_weights(omega, dt);
        for (int i = 0; i < 4; ++i)
        {
            const C oracle = adaptive_simpson(
                [&](double t) { return p(i, t) * std::exp(C{0, -omega * t}); }, 0.0, dt, 1e-16);
            CHECK(std::abs(xi[i] - oracle) <= 1e-10 * std::abs(oracle));
        }
    }
    // the omega -> 0 limit reproduces the plain moments of the basis
    const auto z = FilterAccumulator::hermite_weights(1e-9, dt);
    CHECK(z[0].real() == doctest::Approx(0.5).epsilon(1e-9));         // int p00
    CHECK(z[1].real() == doctest::Approx(0.5).epsilon(1e-9));         // int p01
    CHECK(z[2].real() == doctest::Approx(1.0 / 12).epsilon(1e-9));    // int p10
    CHECK(z[3].real() == doctest::Approx(-1.0 / 12).epsilon(1e-9));   // int p11
}

TEST_CASE("hermite filter: quartic accuracy on a sampled first harmonic")
{
    const double omega = 2 * pi;
    const C a{1.0, 0.5};
    auto u = [&](double t) { return (a * std::exp(C{0, omega * t})).real(); };
    auto du = [&](double t) { return (C{0, omega} * a * std::exp(C{0, omega * t})).real(); };

    double prev = 0.0, slope = 0.0;
    for (int M : {8, 16, 32})
    {
        const TimeGrid g = make_grid(omega, M);
        const ComplexField f = filter_signal(FilterKind::Hermite, g, u, du);
        const double err = std::abs(f[0] - a) / std::abs(a);
        if (prev > 0.0)
            slope = std::log2(prev / err);
        prev = err;
    }
    CHECK(slope >= 3.8);

    // with enough steps per period it recovers the amplitude to 1e-10
    const TimeGrid g = make_grid(omega, 512);
    const ComplexField f = filter_signal(FilterKind::Hermite, g, u, du);
    CHECK(std::abs(f[0] - a) <= 1e-10 * std::abs(a));
}

TEST_CASE("filter is linear in the trajectory")
{
    const double omega = 5.0;
    const TimeGrid g = make_grid(omega, 64);
    auto u1 = [&](double t) { return std::cos(omega * t) + 0.2 * std::cos(2 * omega * t); };
    auto du1 = [&](double t)
    { return -omega * std::sin(omega * t) - 0.4 * omega * std::sin(2 * omega * t); };
    auto u2 = [&](double t) { return 0.3 - std::sin(omega * t); };
    auto du2 = [&](double t) { return -omega * std::cos(omega * t); };
    for (FilterKind kind : {FilterKind::Trapezoid, FilterKind::Hermite})
    {
        const ComplexField f1 = filter_signal(kind, g, u1, du1);
        const ComplexField f2 = filter_signal(kind, g, u2, du2);
        const ComplexField f12 = filter_signal(
            kind, g, [&](double t) { return u1(t) + u2(t); },
            [&](double t) { return du1(t) + du2(t); });
        CHECK(std::abs(f12[0] - (f1[0] + f2[0])) <= 1e-12 * std::abs(f12[0]));
    }
}

TEST_CASE("filter protocol errors")
{
    const TimeGrid bad = make_grid(2 * pi, 2);
    CHECK_THROWS(FilterAccumulator(FilterKind::Trapezoid, bad, 1));

    const TimeGrid g = make_grid(2 * pi, 8);
    FilterAccumulator acc(FilterKind::Trapezoid, g, 1);
    const FieldState u{1.0};
    acc.accumulate(0, 0.0, u);
    CHECK_THROWS(acc.accumulate(2, 2 * g.dt, u));   // out of order
    CHECK_THROWS(acc.finalize());                   // premature

    FilterAccumulator h(FilterKind::Hermite, g, 1);
    CHECK_THROWS(h.accumulate(0, 0.0, u, nullptr));   // missing derivative
}
