#ifndef CMX_FIELD_HPP
#define CMX_FIELD_HPP

#include <complex>
#include <stdexcept>
#include <vector>

namespace cmx
{
    /// Real degree-of-freedom vector for the pair (E, H) at one time instant.
    /// Layout is element-major, field-major within the element:
    /// dof(e, f, i) = (3*e + f)*nodes_per_elem + i with fields f = 0:E, 1:H1, 2:H2.
    using FieldState = std::vector<double>;

    /// Complex dof vector with the same layout as FieldState.
    using ComplexField = std::vector<std::complex<double>>;

    inline void check_same_size(std::size_t a, std::size_t b, const char* what)
    {
        if (a != b)
            throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }

    /// y += alpha * x
    inline void axpy(double alpha, const FieldState& x, FieldState& y)
    {
        check_same_size(x.size(), y.size(), "axpy");
        for (std::size_t i = 0; i < x.size(); ++i)
            y[i] += alpha * x[i];
    }

    inline bool all_finite(const FieldState& u)
    {
        for (double v : u)
            if (!std::isfinite(v))
                return false;
        return true;
    }

    /// Raised when time-marching produces a non-finite state.
    class DivergenceError : public std::runtime_error
    {
    public:
        DivergenceError(int step)
            : std::runtime_error("time integration diverged at step " + std::to_string(step)),
              step_(step)
        {
        }
        int step() const { return step_; }

    private:
        int step_;
    };
} // namespace cmx

#endif
