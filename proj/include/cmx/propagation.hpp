#ifndef CMX_PROPAGATION_HPP
#define CMX_PROPAGATION_HPP

#include "cmx/dg.hpp"
#include "cmx/harmonic_filter.hpp"
#include "cmx/time_integrator.hpp"

#include <optional>

namespace cmx
{
    /// One-period propagators built on the time-domain engine. The source
    /// vector S is the operator's source_vector(); pass an empty field for the
    /// homogeneous propagator P_w.
    struct ForwardResult
    {
        FieldState uT;
        std::optional<ComplexField> filtered;
    };

    /// P_{psi,w} u0 = U(T), optionally with the harmonic filter F_{psi,w} u0
    /// accumulated on the fly.
    ForwardResult forward(const DgOperator& op, const TimeGrid& grid, const ComplexField& S,
                          const FieldState& u0, std::optional<FilterKind> filter = std::nullopt);

    /// Homogeneous propagator P_w.
    FieldState forward_homogeneous(const DgOperator& op, const TimeGrid& grid,
                                   const FieldState& u0);

    /// Adjoint propagator P*_w: flips the sign of the magnetic dofs, marches one
    /// homogeneous period with the same scheme, flips back.
    FieldState backward(const DgOperator& op, const TimeGrid& grid, const FieldState& wT);

    /// G = P_{psi,w} 0.
    FieldState inhomogeneous_term(const DgOperator& op, const TimeGrid& grid,
                                  const ComplexField& S);

    /// Multiplies the magnetic-field dofs by -1 in place.
    void flip_magnetic(const DgSpace& space, FieldState& u);

} // namespace cmx

#endif
