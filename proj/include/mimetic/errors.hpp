#ifndef MIMETIC_ERRORS_HPP
#define MIMETIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mimetic
{
    // Invalid arguments: bad grid extents, mismatched field lengths, bad shapes.
    class DomainError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Operator assembly failed (singular stencil system, non-positive weight,
    // unsatisfiable conservation constraints).
    class ConstructionError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // A time step could not be completed. step is the zero-based index of the
    // failing step, or -1 when raised outside the integration loop.
    class NumericalFailure : public std::runtime_error
    {
    public:
        explicit NumericalFailure(const std::string& what, long step = -1)
            : std::runtime_error(what), step_(step) {}

        long step() const noexcept { return step_; }

    private:
        long step_;
    };

    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
} // namespace mimetic

#endif
