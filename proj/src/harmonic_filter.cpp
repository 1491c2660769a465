#include "cmx/harmonic_filter.hpp"

#include <cmath>
#include <stdexcept>

namespace cmx
{
    namespace
    {
        using C = std::complex<double>;
        constexpr C I{0.0, 1.0};

        // moments int_0^dt tau^k e^{-i w tau} dtau, k = 0..3
        std::array<C, 4> phase_moments(double omega, double dt)
        {
            std::array<C, 4> Im;
            if (std::abs(omega * dt) < 1e-4)
            {
                // Taylor branch: the closed forms cancel badly for small w dt
                for (int k = 0; k < 4; ++k)
                {
                    C sum{0.0, 0.0};
                    C pw{1.0, 0.0};   // (-i w)^j / j!
                    double djk = std::pow(dt, k + 1);
                    for (int j = 0; j < 8; ++j)
                    {
                        sum += pw * (djk / (k + j + 1.0));
                        pw *= -I * omega / (j + 1.0);
                        djk *= dt;
                    }
                    Im[k] = sum;
                }
                return Im;
            }
            const C iw = I * omega;
            const C E = std::exp(-iw * dt);
            Im[0] = (1.0 - E) / iw;
            double dk = 1.0;
            for (int k = 1; k < 4; ++k)
            {
                dk *= dt;
                Im[k] = (static_cast<double>(k) * Im[k - 1] - dk * E) / iw;
            }
            return Im;
        }
    } // namespace

    std::array<C, 4> FilterAccumulator::hermite_weights(double omega, double dt)
    {
        const auto Im = phase_moments(omega, dt);
        const double d = dt;
        // cubic Hermite basis on [0, dt]:
        //   p00 = 1 - 3 (t/d)^2 + 2 (t/d)^3      p01 = 3 (t/d)^2 - 2 (t/d)^3
        //   p10 = t - 2 t^2/d + t^3/d^2          p11 = t^3/d^2 - t^2/d
        const C xi00 = Im[0] - 3.0 * Im[2] / (d * d) + 2.0 * Im[3] / (d * d * d);
        const C xi01 = 3.0 * Im[2] / (d * d) - 2.0 * Im[3] / (d * d * d);
        const C xi10 = Im[1] - 2.0 * Im[2] / d + Im[3] / (d * d);
        const C xi11 = Im[3] / (d * d) - Im[2] / d;
        return {xi00, xi01, xi10, xi11};
    }

    FilterAccumulator::FilterAccumulator(FilterKind kind, const TimeGrid& grid, std::size_t n_dof)
        : kind_(kind), grid_(grid), acc_(n_dof, C{0.0, 0.0})
    {
        if (grid.steps < 3)
            throw std::invalid_argument(
                "FilterAccumulator: need at least 3 steps per period to resolve the first harmonic");
        const auto xi = hermite_weights(grid.omega, grid.dt);
        xi00_ = xi[0];
        xi01_ = xi[1];
        xi10_ = xi[2];
        xi11_ = xi[3];
    }

    void FilterAccumulator::accumulate(int m, double t, const FieldState& u, const FieldState* phi)
    {
        if (m != next_)
            throw std::logic_error("FilterAccumulator: node " + std::to_string(m) +
                                   " out of order (expected " + std::to_string(next_) + ")");
        if (m > grid_.steps)
            throw std::logic_error("FilterAccumulator: node index past the period");
        check_same_size(u.size(), acc_.size(), "FilterAccumulator");

        const int M = grid_.steps;
        const C phase = std::exp(-I * grid_.omega * t);

        if (kind_ == FilterKind::Trapezoid)
        {
            const double w = (m == 0 || m == M) ? 0.5 * grid_.dt : grid_.dt;
            const C cw = w * phase;
            for (std::size_t i = 0; i < u.size(); ++i)
                acc_[i] += cw * u[i];
        }
        else
        {
            if (!phi)
                throw std::invalid_argument("FilterAccumulator: Hermite quadrature needs the rhs");
            check_same_size(phi->size(), acc_.size(), "FilterAccumulator");
            // node m closes interval m (right endpoint, phase shifted by e^{+i w dt})
            // and opens interval m+1 (left endpoint)
            const C shift = std::exp(I * grid_.omega * grid_.dt);
            C wu{0.0, 0.0}, wp{0.0, 0.0};
            if (m < M)
            {
                wu += xi00_;
                wp += xi10_;
            }
            if (m > 0)
            {
                wu += shift * xi01_;
                wp += shift * xi11_;
            }
            wu *= phase;
            wp *= phase;
            for (std::size_t i = 0; i < u.size(); ++i)
                acc_[i] += wu * u[i] + wp * (*phi)[i];
        }
        ++next_;
    }

    ComplexField FilterAccumulator::finalize() const
    {
        if (!complete())
            throw std::logic_error("FilterAccumulator: finalize before all nodes were seen");
        ComplexField out(acc_);
        const double scale = 2.0 / grid_.period;
        for (auto& v : out)
            v *= scale;
        return out;
    }

} // namespace cmx
