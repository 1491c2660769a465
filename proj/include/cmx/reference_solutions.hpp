#ifndef CMX_REFERENCE_SOLUTIONS_HPP
#define CMX_REFERENCE_SOLUTIONS_HPP

#include "cmx/dg.hpp"

#include <complex>
#include <functional>
#include <string>

namespace cmx
{
    /// Analytic or semi-analytic time-harmonic reference field (e, h).
    struct ExactSolution
    {
        std::string name;
        double omega = 0.0;
        std::function<std::complex<double>(const Vec2&)> e;
        std::function<std::array<std::complex<double>, 2>(const Vec2&)> h;
    };

    /// Plane wave e = exp(i w d.x) travelling along d = (cos theta, sin theta);
    /// h follows from i w mu h = scurl e.
    ExactSolution plane_wave(double theta, double omega);

    /// Impedance boundary data g = e + h x n of an exact solution (the trace
    /// the time-domain scheme forces on impedance faces).
    std::function<std::complex<double>(const Vec2&, const Vec2&)>
    impedance_trace(const ExactSolution& exact, double z = 1.0);

    /// Semi-analytic solution of the half-open waveguide (0,4)x(0,1):
    /// e = sum_n A_n sin(k_n x1) sin(n pi x2), k_n = sqrt(w^2 - n^2 pi^2),
    /// driven by g = plane-wave trace on the impedance side x1 = 4.
    /// Throws if omega sits on a mode cutoff.
    ExactSolution waveguide_series(double theta, double omega, int n_max = 50);

    /// Modal solution of the closed cavity (0,1)^2 with unit volume current:
    /// resonances at w_{n,m}^2 = (n^2+m^2) pi^2. Throws near a resonance.
    ExactSolution cavity_series(double omega, double j_amplitude = 1.0, int n_max = 50);

    /// Nodal interpolant of the exact field (all three components).
    ComplexField interpolate(const DgSpace& space, const ExactSolution& exact);

    /// Relative (eps,mu)-weighted L2 error against an exact solution, evaluated
    /// with quadrature of degree >= 2q+2. The exact field is sampled at the
    /// quadrature points once at construction so repeated evaluations along a
    /// convergence history stay cheap.
    class WeightedErrorMetric
    {
    public:
        WeightedErrorMetric(const DgSpace& space, const MaterialField& materials,
                            const ExactSolution& exact);

        double operator()(const ComplexField& numeric) const;
        double exact_norm() const { return exact_norm_; }

    private:
        const DgSpace* space_;
        std::vector<std::complex<double>> exact_e_, exact_h1_, exact_h2_;   // at quad points
        std::vector<double> w_eps_, w_mu_;                                  // scaled weights
        double exact_norm_ = 0.0;
    };

    /// One-shot convenience wrapper around WeightedErrorMetric.
    double relative_error(const DgSpace& space, const MaterialField& materials,
                          const ComplexField& numeric, const ExactSolution& exact);

    /// Weighted relative error between two discrete fields on the same space.
    double relative_error(const DgOperator& op, const ComplexField& numeric,
                          const ComplexField& reference);

    /// Real part of a complex field (the controllability initial state Re U).
    FieldState real_part(const ComplexField& u);

} // namespace cmx

#endif
