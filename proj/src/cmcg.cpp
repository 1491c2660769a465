#include "cmx/cmcg.hpp"

#include <cmath>

namespace cmx
{
    FieldState cmcg_initialize(const DgOperator& op, const TimeGrid& grid, const ComplexField& S)
    {
        FieldState G = inhomogeneous_term(op, grid, S);
        FieldState GT = backward(op, grid, G);
        for (std::size_t i = 0; i < G.size(); ++i)
            G[i] -= GT[i];
        return G;   // G* = (I - P*) G
    }

    FieldState cmcg_gradient(const DgOperator& op, const TimeGrid& grid, const FieldState& u0,
                             const FieldState& Gstar)
    {
        // W_T = (P - I) u0, W_0 = P* W_T, J' = W_0 - W_T - G*
        FieldState WT = forward_homogeneous(op, grid, u0);
        for (std::size_t i = 0; i < WT.size(); ++i)
            WT[i] -= u0[i];
        FieldState W0 = backward(op, grid, WT);
        for (std::size_t i = 0; i < W0.size(); ++i)
            W0[i] -= WT[i] + Gstar[i];
        return W0;
    }

    double cmcg_functional(const DgOperator& op, const TimeGrid& grid, const ComplexField& S,
                           const FieldState& u0)
    {
        FieldState d = forward(op, grid, S, u0).uT;
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] -= u0[i];
        const double nrm = op.weighted_norm(d);
        return 0.5 * nrm * nrm;
    }

    CmcgResult cmcg_solve(const DgOperator& op, const TimeGrid& grid, const ComplexField& S,
                          const CmcgOptions& options)
    {
        const std::size_t nd = static_cast<std::size_t>(op.space().n_dof());
        const FilterKind kind = options.filter.value_or(filter_for_degree(grid.degree));

        CmcgResult result;
        result.u0.assign(nd, 0.0);

        // initialization: G = P_{psi,w} 0, G* = (I - P*) G
        FieldState G = inhomogeneous_term(op, grid, S);
        FieldState Gstar = backward(op, grid, G);
        for (std::size_t i = 0; i < nd; ++i)
            Gstar[i] = G[i] - Gstar[i];
        const double normG = op.weighted_norm(G);
        double J = 0.5 * normG * normG;   // J(0) = 1/2 ||G||^2
        result.functional_values.push_back(J);

        // zero initial guess: R = G* - H*0 = G*
        FieldState R = Gstar;
        FieldState D = R;
        double res2 = op.weighted_inner(R, R);
        result.residual0 = std::sqrt(std::max(0.0, res2));
        const double res0 = result.residual0;

        auto filter_iterate = [&](const FieldState& u0) -> ComplexField
        { return *forward(op, grid, S, u0, kind).filtered; };

        bool filtered_current = false;
        int k = 0;
        for (; k < options.max_iterations; ++k)
        {
            if (std::sqrt(std::max(0.0, res2)) <= options.tol * res0)
            {
                result.converged = true;
                break;
            }

            // A = H D, evaluated as J'(D) + G*
            FieldState A = cmcg_gradient(op, grid, D, Gstar);
            for (std::size_t i = 0; i < nd; ++i)
                A[i] += Gstar[i];

            const double dAd = op.weighted_inner(D, A);
            if (!std::isfinite(dAd) || dAd <= 0.0)
                throw std::runtime_error(
                    "cmcg_solve: direction curvature " + std::to_string(dAd) +
                    " is not positive; the normal-equations operator lost positivity");

            const double alpha = res2 / dAd;
            for (std::size_t i = 0; i < nd; ++i)
            {
                result.u0[i] += alpha * D[i];
                R[i] -= alpha * A[i];
            }
            J -= 0.5 * alpha * res2;   // exact CG decrease of the quadratic
            result.functional_values.push_back(J);

            const double res2_new = op.weighted_inner(R, R);
            const double beta = res2_new / res2;
            res2 = res2_new;
            for (std::size_t i = 0; i < nd; ++i)
                D[i] = R[i] + beta * D[i];

            ConvergenceRow row;
            row.periods = 2 * (k + 1);
            row.misfit = std::sqrt(std::max(0.0, res2)) / (res0 > 0.0 ? res0 : 1.0);
            filtered_current = false;
            if (options.filter_each_iteration || options.error_metric)
            {
                result.filtered = filter_iterate(result.u0);
                filtered_current = true;
                if (options.error_metric)
                    row.err = options.error_metric(result.filtered);
            }
            result.history.push_back(row);

            if (options.residual_recompute_every > 0 &&
                (k + 1) % options.residual_recompute_every == 0)
            {
                // R_true = -J'(u0) = G* - H u0
                FieldState Rtrue = cmcg_gradient(op, grid, result.u0, Gstar);
                FieldState diff(nd);
                for (std::size_t i = 0; i < nd; ++i)
                {
                    Rtrue[i] = -Rtrue[i];
                    diff[i] = Rtrue[i] - R[i];
                }
                const double denom = std::max(op.weighted_norm(Rtrue), 1e-300);
                result.residual_consistency.push_back(op.weighted_norm(diff) / denom);
            }
        }
        result.iterations = k;
        result.final_relative_residual =
            res0 > 0.0 ? std::sqrt(std::max(0.0, res2)) / res0 : 0.0;
        if (res0 == 0.0)
            result.converged = true;

        if (!filtered_current)
            result.filtered = filter_iterate(result.u0);
        return result;
    }

    FwResult fw_solve(const DgOperator& op, const TimeGrid& grid, const ComplexField& S,
                      const FwOptions& options)
    {
        const std::size_t nd = static_cast<std::size_t>(op.space().n_dof());
        const FilterKind kind = options.filter.value_or(filter_for_degree(grid.degree));

        auto rhs = [&](double t, const FieldState& u, FieldState& out)
        { op.apply_rhs(S, grid.omega, t, u, out); };

        FwResult result;
        result.state.assign(nd, 0.0);
        FieldState phiT(nd);

        for (int p = 0; p < options.max_periods; ++p)
        {
            FilterAccumulator acc(kind, grid, nd);
            std::vector<StepObserver> observers;
            observers.push_back([&acc](int m, double t, const FieldState& u, const FieldState& phi)
                                { acc.accumulate(m, t, u, &phi); });
            const FieldState u_start = result.state;
            result.state = march_period(rhs, grid, result.state, observers);
            op.apply_rhs(S, grid.omega, grid.period, result.state, phiT);
            acc.accumulate(grid.steps, grid.period, result.state, &phiT);
            result.filtered = acc.finalize();

            ConvergenceRow row;
            row.periods = p + 1;
            FieldState diff = result.state;
            for (std::size_t i = 0; i < nd; ++i)
                diff[i] -= u_start[i];
            const double denom = op.weighted_norm(result.state);
            row.misfit = denom > 0.0 ? op.weighted_norm(diff) / denom : 0.0;
            if (options.error_metric)
                row.err = options.error_metric(result.filtered);
            result.history.push_back(row);
        }
        return result;
    }

} // namespace cmx
