#ifndef CMX_HARMONIC_FILTER_HPP
#define CMX_HARMONIC_FILTER_HPP

#include "cmx/field.hpp"
#include "cmx/time_integrator.hpp"

#include <complex>

namespace cmx
{
    enum class FilterKind
    {
        Trapezoid,   // second order, paired with RK2
        Hermite      // quartic Hermite quadrature, paired with RK4
    };

    inline FilterKind filter_for_degree(int degree)
    {
        return degree == 3 ? FilterKind::Hermite : FilterKind::Trapezoid;
    }

    /// On-the-fly evaluation of F_w U = (2/T) int_0^T U(t) e^{-i w t} dt along a
    /// trajectory sampled at the M+1 grid nodes of one period. Only the running
    /// complex accumulator is stored, never the time history.
    ///
    /// accumulate() must be called for every node m = 0..M in order; the Hermite
    /// quadrature additionally consumes the rhs Phi(t_m, u_m) as the derivative.
    class FilterAccumulator
    {
    public:
        FilterAccumulator(FilterKind kind, const TimeGrid& grid, std::size_t n_dof);

        void accumulate(int m, double t, const FieldState& u, const FieldState* phi = nullptr);
        bool complete() const { return next_ == grid_.steps + 1; }

        /// Applies the 2/T factor; throws if nodes are missing.
        ComplexField finalize() const;

        FilterKind kind() const { return kind_; }

        /// Hermite weights xi_ij = int p_ij(t) e^{-i w t} dt on [0, dt], with the
        /// cubic Hermite basis p_ij; exposed for the quadrature unit tests.
        static std::array<std::complex<double>, 4> hermite_weights(double omega, double dt);

    private:
        FilterKind kind_;
        TimeGrid grid_;
        int next_ = 0;
        ComplexField acc_;
        std::complex<double> xi00_, xi01_, xi10_, xi11_;   // per-interval, phase factored out
    };

} // namespace cmx

#endif
