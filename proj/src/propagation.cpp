#include "cmx/propagation.hpp"

namespace cmx
{
    void flip_magnetic(const DgSpace& space, FieldState& u)
    {
        const int n = space.nodes_per_elem();
        for (int e = 0; e < space.n_elements(); ++e)
        {
            double* h = u.data() + space.block(e, 1);
            for (int i = 0; i < 2 * n; ++i)
                h[i] = -h[i];
        }
    }

    ForwardResult forward(const DgOperator& op, const TimeGrid& grid, const ComplexField& S,
                          const FieldState& u0, std::optional<FilterKind> filter)
    {
        auto rhs = [&](double t, const FieldState& u, FieldState& out)
        { op.apply_rhs(S, grid.omega, t, u, out); };

        ForwardResult result;
        if (!filter)
        {
            result.uT = march_period(rhs, grid, u0);
            return result;
        }

        FilterAccumulator acc(*filter, grid, u0.size());
        std::vector<StepObserver> observers;
        observers.push_back([&acc](int m, double t, const FieldState& u, const FieldState& phi)
                            { acc.accumulate(m, t, u, &phi); });
        result.uT = march_period(rhs, grid, u0, observers);

        // final node: the marching loop stops before evaluating Phi(T, u_M)
        FieldState phiT(u0.size());
        op.apply_rhs(S, grid.omega, grid.period, result.uT, phiT);
        acc.accumulate(grid.steps, grid.period, result.uT, &phiT);
        result.filtered = acc.finalize();
        return result;
    }

    FieldState forward_homogeneous(const DgOperator& op, const TimeGrid& grid,
                                   const FieldState& u0)
    {
        static const ComplexField no_sources;
        auto rhs = [&](double t, const FieldState& u, FieldState& out)
        { op.apply_rhs(no_sources, grid.omega, t, u, out); };
        return march_period(rhs, grid, u0);
    }

    FieldState backward(const DgOperator& op, const TimeGrid& grid, const FieldState& wT)
    {
        FieldState w = wT;
        flip_magnetic(op.space(), w);
        w = forward_homogeneous(op, grid, w);
        flip_magnetic(op.space(), w);
        return w;
    }

    FieldState inhomogeneous_term(const DgOperator& op, const TimeGrid& grid,
                                  const ComplexField& S)
    {
        const FieldState zero(op.space().n_dof(), 0.0);
        return forward(op, grid, S, zero).uT;
    }

} // namespace cmx
