#ifndef CMX_TIME_INTEGRATOR_HPP
#define CMX_TIME_INTEGRATOR_HPP

#include "cmx/dg.hpp"
#include "cmx/field.hpp"

#include <functional>
#include <vector>

namespace cmx
{
    /// Uniform subdivision of one period T = 2 pi / omega into the smallest
    /// number of steps satisfying the CFL bound
    ///     dt <= c_q * min_K sqrt(mu_K eps_K) rho_K.
    struct TimeGrid
    {
        double omega = 0.0;
        double period = 0.0;       // 2 pi / omega
        int steps = 0;             // M
        double dt = 0.0;           // period / steps
        double cfl_constant = 0.0; // c_q
        int degree = 0;            // paired RK order: q=1 -> RK2, q=3 -> RK4
    };

    /// c_1 = 0.24 (RK2/P1), c_3 = 0.12 (RK4/P3); other degrees are rejected.
    TimeGrid cfl_steps(const Mesh& mesh, const MaterialField& materials, double omega, int degree);

    /// Scratch vectors reused across steps.
    struct RkWork
    {
        FieldState k1, k2, k3, k4, tmp;
        void resize(std::size_t n)
        {
            k1.assign(n, 0.0);
            k2.assign(n, 0.0);
            k3.assign(n, 0.0);
            k4.assign(n, 0.0);
            tmp.assign(n, 0.0);
        }
    };

    /// Midpoint RK2: K1 = Phi(t,u), K2 = Phi(t+dt/2, u+(dt/2)K1), u += dt K2.
    /// If k1_in is non-null it must hold Phi(t,u) and stage 1 is skipped.
    template <class Rhs>
    void rk2_step(Rhs&& phi, double t, double dt, FieldState& u, RkWork& w,
                  const FieldState* k1_in = nullptr)
    {
        const std::size_t n = u.size();
        const FieldState* k1 = k1_in;
        if (!k1)
        {
            phi(t, u, w.k1);
            k1 = &w.k1;
        }
        for (std::size_t i = 0; i < n; ++i)
            w.tmp[i] = u[i] + 0.5 * dt * (*k1)[i];
        phi(t + 0.5 * dt, w.tmp, w.k2);
        for (std::size_t i = 0; i < n; ++i)
            u[i] += dt * w.k2[i];
    }

    /// Classical RK4.
    template <class Rhs>
    void rk4_step(Rhs&& phi, double t, double dt, FieldState& u, RkWork& w,
                  const FieldState* k1_in = nullptr)
    {
        const std::size_t n = u.size();
        const FieldState* k1 = k1_in;
        if (!k1)
        {
            phi(t, u, w.k1);
            k1 = &w.k1;
        }
        for (std::size_t i = 0; i < n; ++i)
            w.tmp[i] = u[i] + 0.5 * dt * (*k1)[i];
        phi(t + 0.5 * dt, w.tmp, w.k2);
        for (std::size_t i = 0; i < n; ++i)
            w.tmp[i] = u[i] + 0.5 * dt * w.k2[i];
        phi(t + 0.5 * dt, w.tmp, w.k3);
        for (std::size_t i = 0; i < n; ++i)
            w.tmp[i] = u[i] + dt * w.k3[i];
        phi(t + dt, w.tmp, w.k4);
        for (std::size_t i = 0; i < n; ++i)
            u[i] += (dt / 6.0) * ((*k1)[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
    }

    /// Called once per step with (m, t_m, u_m, Phi(t_m, u_m)) for m = 0..M-1;
    /// the rhs is the first RK stage and is reused by the Hermite filter.
    using StepObserver =
        std::function<void(int m, double t, const FieldState& u, const FieldState& phi)>;

    /// Marches M steps of the degree-paired RK scheme from t = 0 to t = T.
    /// Non-finite states raise DivergenceError with the step index.
    template <class Rhs>
    FieldState march_period(Rhs&& phi, const TimeGrid& grid, FieldState u,
                            const std::vector<StepObserver>& observers = {})
    {
        RkWork w;
        w.resize(u.size());
        const bool rk4 = grid.degree == 3;
        for (int m = 0; m < grid.steps; ++m)
        {
            const double t = m * grid.dt;
            phi(t, u, w.k1);
            for (const auto& obs : observers)
                obs(m, t, u, w.k1);
            if (rk4)
                rk4_step(phi, t, grid.dt, u, w, &w.k1);
            else
                rk2_step(phi, t, grid.dt, u, w, &w.k1);
            if ((m & 63) == 63 && !all_finite(u))
                throw DivergenceError(m);
        }
        if (!all_finite(u))
            throw DivergenceError(grid.steps - 1);
        return u;
    }

} // namespace cmx

#endif
