#include "cmx/reference_solutions.hpp"

#include <cmath>
#include <numbers>

namespace cmx
{
    using C = std::complex<double>;
    namespace
    {
        constexpr C I{0.0, 1.0};
        constexpr double pi = std::numbers::pi;

        // int_0^1 e^{icx} dx, stable near c = 0
        C unit_phase_integral(double c)
        {
            if (std::abs(c) < 1e-8)
                return C{1.0 - c * c / 6.0, c / 2.0 - c * c * c / 24.0};
            return (std::exp(I * c) - 1.0) / (I * c);
        }

        // int_0^1 e^{iax} sin(b x) dx via the exponential split (handles a = +-b)
        C phase_sine_integral(double a, double b)
        {
            return (unit_phase_integral(a + b) - unit_phase_integral(a - b)) / (2.0 * I);
        }
    } // namespace

    ExactSolution plane_wave(double theta, double omega)
    {
        if (!(omega > 0.0))
            throw std::invalid_argument("plane_wave: omega must be positive");
        const double dx = std::cos(theta), dy = std::sin(theta);
        ExactSolution sol;
        sol.name = "planewave";
        sol.omega = omega;
        sol.e = [=](const Vec2& x) { return std::exp(I * omega * (dx * x.x + dy * x.y)); };
        // i w mu h = scurl e = (d2 e, -d1 e)  ->  h = e (dy, -dx)
        sol.h = [=](const Vec2& x) -> std::array<C, 2>
        {
            const C e = std::exp(I * omega * (dx * x.x + dy * x.y));
            return {e * dy, -e * dx};
        };
        return sol;
    }

    std::function<C(const Vec2&, const Vec2&)> impedance_trace(const ExactSolution& exact, double z)
    {
        return [&exact, z](const Vec2& x, const Vec2& n) -> C
        {
            const C e = exact.e(x);
            const auto h = exact.h(x);
            return e + z * (h[0] * n.y - h[1] * n.x);   // e + Z (h x n)
        };
    }

    ExactSolution waveguide_series(double theta, double omega, int n_max)
    {
        if (n_max < 1)
            throw std::invalid_argument("waveguide_series: n_max must be positive");
        if (!(omega > 0.0))
            throw std::invalid_argument("waveguide_series: omega must be positive");

        // e_n solves e_n'' + k_n^2 e_n = 0, e_n(0) = 0, e_n(4) + e_n'(4)/(i w) = g_n.
        // Away from a cutoff e_n = g_n sin(k x)/D with D = sin(4k) + k cos(4k)/(i w);
        // at a cutoff (k = 0, which omega = 2 pi and 6 pi hit exactly) the limit is
        // the linear mode e_n = g_n x / (4 + 1/(i w)). Both are evaluated with the
        // e^{4ik} scaling so evanescent modes cannot overflow.
        struct Mode
        {
            C k;
            bool cutoff;
            C coef;      // g_n / (2i Ds)            (or g_n/(4 + 1/(i w)) at cutoff)
            C coef_dx;   // g_n k / (2 Ds)
        };
        auto modes = std::make_shared<std::vector<Mode>>();
        modes->reserve(n_max);

        const double a = omega * std::sin(theta);
        const C phase4 = std::exp(I * (4.0 * omega * std::cos(theta)));
        for (int n = 1; n <= n_max; ++n)
        {
            const C k = std::sqrt(C{omega * omega - n * n * pi * pi, 0.0});
            const C gn = 2.0 * phase4 * phase_sine_integral(a, n * pi);
            Mode md;
            md.k = k;
            md.cutoff = std::abs(k) * 4.0 < 1e-4;
            if (md.cutoff)
            {
                md.coef = gn / (4.0 + 1.0 / (I * omega));
                md.coef_dx = md.coef;
            }
            else
            {
                const C q8 = std::exp(I * (8.0 * k));
                const C Ds = (q8 - 1.0) / (2.0 * I) + (k / (I * omega)) * (q8 + 1.0) / 2.0;
                md.coef = gn / (2.0 * I * Ds);
                md.coef_dx = gn * k / (2.0 * Ds);
            }
            modes->push_back(md);
        }

        auto mode_e = [](const Mode& md, double x) -> C
        {
            if (md.cutoff)
                return md.coef * x;
            return md.coef *
                   (std::exp(I * (md.k * (4.0 + x))) - std::exp(I * (md.k * (4.0 - x))));
        };
        auto mode_dx = [](const Mode& md, double x) -> C
        {
            if (md.cutoff)
                return md.coef_dx;
            return md.coef_dx *
                   (std::exp(I * (md.k * (4.0 + x))) + std::exp(I * (md.k * (4.0 - x))));
        };

        ExactSolution sol;
        sol.name = "waveguide";
        sol.omega = omega;
        sol.e = [modes, mode_e](const Vec2& x) -> C
        {
            C e{0.0, 0.0};
            for (std::size_t n = 1; n <= modes->size(); ++n)
                e += mode_e((*modes)[n - 1], x.x) * std::sin(n * pi * x.y);
            return e;
        };
        sol.h = [modes, mode_e, mode_dx, omega](const Vec2& x) -> std::array<C, 2>
        {
            C h1{0.0, 0.0}, h2{0.0, 0.0};
            for (std::size_t n = 1; n <= modes->size(); ++n)
            {
                const Mode& md = (*modes)[n - 1];
                h1 += mode_e(md, x.x) * (n * pi * std::cos(n * pi * x.y)) / (I * omega);
                h2 -= mode_dx(md, x.x) * std::sin(n * pi * x.y) / (I * omega);
            }
            return {h1, h2};
        };
        return sol;
    }

    ExactSolution cavity_series(double omega, double j_amplitude, int n_max)
    {
        if (n_max < 1)
            throw std::invalid_argument("cavity_series: n_max must be positive");
        for (int n = 1; n <= n_max; ++n)
            for (int m = 1; m <= n_max; ++m)
                if (std::abs(omega * omega - (n * n + m * m) * pi * pi) < 1e-8 * omega * omega)
                    throw std::invalid_argument("cavity_series: omega is resonant with mode (" +
                                                std::to_string(n) + "," + std::to_string(m) + ")");

        // Delta e + w^2 e = -i w j with e = 0 on the boundary and j constant:
        // c_nm = -i w jhat_nm / (w^2 - (n^2+m^2) pi^2), jhat from the double sine
        // series of 1 (odd modes only).
        auto coef = std::make_shared<Eigen::MatrixXcd>(n_max, n_max);
        coef->setZero();
        for (int n = 1; n <= n_max; n += 2)
            for (int m = 1; m <= n_max; m += 2)
            {
                const double bn = 4.0 / (n * pi), bm = 4.0 / (m * pi);
                const double lam = (n * n + m * m) * pi * pi;
                (*coef)(n - 1, m - 1) = -I * omega * (bn * bm * j_amplitude) / (omega * omega - lam);
            }

        ExactSolution sol;
        sol.name = "cavity";
        sol.omega = omega;
        const int N = n_max;
        sol.e = [coef, N](const Vec2& x) -> C
        {
            C e{0.0, 0.0};
            for (int n = 1; n <= N; n += 2)
            {
                const double sx = std::sin(n * pi * x.x);
                for (int m = 1; m <= N; m += 2)
                    e += (*coef)(n - 1, m - 1) * sx * std::sin(m * pi * x.y);
            }
            return e;
        };
        sol.h = [coef, N, omega](const Vec2& x) -> std::array<C, 2>
        {
            C h1{0.0, 0.0}, h2{0.0, 0.0};
            for (int n = 1; n <= N; n += 2)
            {
                const double sx = std::sin(n * pi * x.x);
                const double cx = std::cos(n * pi * x.x);
                for (int m = 1; m <= N; m += 2)
                {
                    const C c = (*coef)(n - 1, m - 1);
                    h1 += c * sx * (m * pi * std::cos(m * pi * x.y)) / (I * omega);
                    h2 -= c * (n * pi * cx) * std::sin(m * pi * x.y) / (I * omega);
                }
            }
            return {h1, h2};
        };
        return sol;
    }

    ComplexField interpolate(const DgSpace& space, const ExactSolution& exact)
    {
        ComplexField u(space.n_dof());
        for (int e = 0; e < space.n_elements(); ++e)
            for (int i = 0; i < space.nodes_per_elem(); ++i)
            {
                const Vec2 x = space.node_position(e, i);
                u[space.dof(e, 0, i)] = exact.e(x);
                const auto h = exact.h(x);
                u[space.dof(e, 1, i)] = h[0];
                u[space.dof(e, 2, i)] = h[1];
            }
        return u;
    }

    FieldState real_part(const ComplexField& u)
    {
        FieldState v(u.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            v[i] = u[i].real();
        return v;
    }

    WeightedErrorMetric::WeightedErrorMetric(const DgSpace& space, const MaterialField& materials,
                                             const ExactSolution& exact)
        : space_(&space)
    {
        const int K = space.n_elements();
        const int nq = space.ref().n_volume_quad();
        const auto& qw = space.ref().volume_quad_weights();
        const auto& qp = space.ref().volume_quad_points();

        exact_e_.resize(static_cast<std::size_t>(K) * nq);
        exact_h1_.resize(exact_e_.size());
        exact_h2_.resize(exact_e_.size());
        w_eps_.resize(exact_e_.size());
        w_mu_.resize(exact_e_.size());

        double nrm2 = 0.0;
        for (int e = 0; e < K; ++e)
        {
            const Vec2 v0 = space.mesh().element_vertex(e, 0);
            const Vec2 v1 = space.mesh().element_vertex(e, 1);
            const Vec2 v2 = space.mesh().element_vertex(e, 2);
            const double d = space.det_jacobian(e);
            for (int k = 0; k < nq; ++k)
            {
                const double r = qp(k, 0), s = qp(k, 1);
                const Vec2 x = (-0.5 * (r + s)) * v0 + (0.5 * (1.0 + r)) * v1 +
                               (0.5 * (1.0 + s)) * v2;
                const std::size_t idx = static_cast<std::size_t>(e) * nq + k;
                exact_e_[idx] = exact.e(x);
                const auto h = exact.h(x);
                exact_h1_[idx] = h[0];
                exact_h2_[idx] = h[1];
                w_eps_[idx] = qw[k] * d * materials.eps[e];
                w_mu_[idx] = qw[k] * d * materials.mu[e];
                nrm2 += w_eps_[idx] * std::norm(exact_e_[idx]) +
                        w_mu_[idx] * (std::norm(exact_h1_[idx]) + std::norm(exact_h2_[idx]));
            }
        }
        exact_norm_ = std::sqrt(nrm2);
        if (!(exact_norm_ > 0.0))
            throw std::invalid_argument("WeightedErrorMetric: exact solution has zero norm");
    }

    double WeightedErrorMetric::operator()(const ComplexField& numeric) const
    {
        const DgSpace& sp = *space_;
        check_same_size(numeric.size(), static_cast<std::size_t>(sp.n_dof()), "WeightedErrorMetric");
        const int K = sp.n_elements();
        const int n = sp.nodes_per_elem();
        const int nq = sp.ref().n_volume_quad();
        const Eigen::MatrixXd& Vq = sp.ref().volume_interp();

        double err2 = 0.0;
        Eigen::Matrix<C, Eigen::Dynamic, 3> Uq(nq, 3);
        for (int e = 0; e < K; ++e)
        {
            Eigen::Map<const Eigen::Matrix<C, Eigen::Dynamic, 3>> U(numeric.data() + sp.block(e, 0),
                                                                    n, 3);
            for (int c = 0; c < 3; ++c)
                for (int k = 0; k < nq; ++k)
                {
                    C acc{0.0, 0.0};
                    for (int i = 0; i < n; ++i)
                        acc += Vq(k, i) * U(i, c);
                    Uq(k, c) = acc;
                }
            for (int k = 0; k < nq; ++k)
            {
                const std::size_t idx = static_cast<std::size_t>(e) * nq + k;
                err2 += w_eps_[idx] * std::norm(Uq(k, 0) - exact_e_[idx]) +
                        w_mu_[idx] * (std::norm(Uq(k, 1) - exact_h1_[idx]) +
                                      std::norm(Uq(k, 2) - exact_h2_[idx]));
            }
        }
        return std::sqrt(err2) / exact_norm_;
    }

    double relative_error(const DgSpace& space, const MaterialField& materials,
                          const ComplexField& numeric, const ExactSolution& exact)
    {
        return WeightedErrorMetric(space, materials, exact)(numeric);
    }

    double relative_error(const DgOperator& op, const ComplexField& numeric,
                          const ComplexField& reference)
    {
        check_same_size(numeric.size(), reference.size(), "relative_error");
        ComplexField diff(numeric.size());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = numeric[i] - reference[i];
        const double denom = op.weighted_norm(reference);
        if (!(denom > 0.0))
            throw std::invalid_argument("relative_error: reference field has zero norm");
        return op.weighted_norm(diff) / denom;
    }

} // namespace cmx
