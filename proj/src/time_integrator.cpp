#include "cmx/time_integrator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmx
{
    TimeGrid cfl_steps(const Mesh& mesh, const MaterialField& materials, double omega, int degree)
    {
        if (!(omega > 0.0))
            throw std::invalid_argument("cfl_steps: omega must be positive");
        double cq = 0.0;
        if (degree == 1)
            cq = 0.24;
        else if (degree == 3)
            cq = 0.12;
        else
            throw std::invalid_argument("cfl_steps: unsupported degree " + std::to_string(degree));

        double bound = std::numeric_limits<double>::infinity();
        for (int e = 0; e < mesh.n_elements(); ++e)
            bound = std::min(bound, std::sqrt(materials.mu[e] * materials.eps[e]) *
                                        mesh.element_inradius[e]);
        bound *= cq;

        TimeGrid g;
        g.omega = omega;
        g.period = 2.0 * std::numbers::pi / omega;
        g.steps = static_cast<int>(std::ceil(g.period / bound));
        g.steps = std::max(g.steps, 1);
        g.dt = g.period / g.steps;
        g.cfl_constant = cq;
        g.degree = degree;
        return g;
    }

} // namespace cmx
