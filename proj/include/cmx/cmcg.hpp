#ifndef CMX_CMCG_HPP
#define CMX_CMCG_HPP

#include "cmx/propagation.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cmx
{
    /// One row of a convergence history: N counts simulated periods
    /// (2(k+1) per CG iteration, k+1 per full-wave period).
    struct ConvergenceRow
    {
        int periods = 0;
        double err = std::numeric_limits<double>::quiet_NaN();
        double misfit = 0.0;
    };

    struct CmcgOptions
    {
        double tol = 1e-4;                 // relative residual stopping threshold
        int max_iterations = 500;
        bool filter_each_iteration = false;   // diagnostic filtered solution per iterate
        int residual_recompute_every = 0;     // n > 0: check recursive residual every n iterations
        std::optional<FilterKind> filter;     // defaults to the degree pairing
        std::function<double(const ComplexField&)> error_metric;   // optional, fills err column
    };

    struct CmcgResult
    {
        FieldState u0;
        ComplexField filtered;
        std::vector<ConvergenceRow> history;
        std::vector<double> functional_values;        // tracked J(u0^(k)), k = 0..iterations
        std::vector<double> residual_consistency;     // |R_rec - R_true| / |R_true| samples
        bool converged = false;
        int iterations = 0;
        double residual0 = 0.0;
        double final_relative_residual = 0.0;
    };

    /// G* = (I - P*_w) P_{psi,w} 0 (two period solves).
    FieldState cmcg_initialize(const DgOperator& op, const TimeGrid& grid, const ComplexField& S);

    /// J'(u0) = (I - P*_w)(I - P_w) u0 - G*, evaluated as W_T = (P_w - I) u0,
    /// W_0 = P*_w W_T, J' = W_0 - W_T - Gstar (one forward + one backward solve).
    FieldState cmcg_gradient(const DgOperator& op, const TimeGrid& grid, const FieldState& u0,
                             const FieldState& Gstar);

    /// J(u0) = 1/2 || P_{psi,w} u0 - u0 ||^2 in the weighted norm (one forward solve).
    double cmcg_functional(const DgOperator& op, const TimeGrid& grid, const ComplexField& S,
                           const FieldState& u0);

    /// Conjugate gradient on H u0 = G*, H = (I-P*)(I-P), with residual
    /// R = -J'(u0); each iteration costs one forward and one backward period
    /// solve (H D = gradient(D) + G*). Terminates on ||R|| <= tol ||R0|| or the
    /// iteration cap, then filters the final iterate.
    CmcgResult cmcg_solve(const DgOperator& op, const TimeGrid& grid, const ComplexField& S,
                          const CmcgOptions& options = {});

    struct FwOptions
    {
        int max_periods = 100;
        std::optional<FilterKind> filter;
        std::function<double(const ComplexField&)> error_metric;
    };

    struct FwResult
    {
        ComplexField filtered;     // filter over the last simulated period
        FieldState state;          // U at the final period boundary
        std::vector<ConvergenceRow> history;
    };

    /// Limiting-amplitude baseline: marches continuously from rest with the
    /// sources on, filtering each period; runs to the period cap.
    FwResult fw_solve(const DgOperator& op, const TimeGrid& grid, const ComplexField& S,
                      const FwOptions& options = {});

} // namespace cmx

#endif
