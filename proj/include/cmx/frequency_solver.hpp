#ifndef CMX_FREQUENCY_SOLVER_HPP
#define CMX_FREQUENCY_SOLVER_HPP

#include "cmx/dg.hpp"

#include <memory>

namespace cmx
{
    /// Direct frequency-domain baseline: (i w M + K) u = M j + boundary load,
    /// with K = -M B the stiffness of the same DG operator used in time domain.
    /// The sparse matrix of B is recovered from apply_B by probing distance-2
    /// colored element blocks, so both solvers share one flux implementation.
    class FrequencySystem
    {
    public:
        FrequencySystem(const DgOperator& op, const SourceSpec& sources);
        ~FrequencySystem();
        FrequencySystem(FrequencySystem&&) noexcept;

        /// Action u -> (i w M + K) u.
        ComplexField apply(const ComplexField& u) const;

        /// M-weighted load (M S).
        const ComplexField& load() const { return load_; }

        /// Mass-normalized source S with (i w I - B) u = S.
        const ComplexField& normalized_load() const { return S_; }

        double omega() const { return omega_; }

        /// Solves the system: dense LU below 5000 complex dofs, sparse LU up to
        /// desk-memory scale, block-Jacobi preconditioned restarted GMRES above.
        /// Throws SolveError (with the measured residual) if the relative
        /// residual ||(i w M + K)u - load|| / ||load|| exceeds tol.
        ComplexField solve(double tol = 1e-10) const;

        class SolveError : public std::runtime_error
        {
        public:
            SolveError(const std::string& msg, double residual)
                : std::runtime_error(msg), residual_(residual)
            {
            }
            double residual() const { return residual_; }

        private:
            double residual_;
        };

    private:
        struct Impl;
        Eigen::VectorXcd solve_iterative(double tol) const;

        const DgOperator* op_;
        double omega_;
        ComplexField S_;      // mass-normalized load
        ComplexField load_;   // M S
        std::unique_ptr<Impl> impl_;
    };

} // namespace cmx

#endif
