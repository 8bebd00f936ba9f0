#ifndef NNREACH_EXCEPTIONS_HPP
#define NNREACH_EXCEPTIONS_HPP

#include <stdexcept>
#include <string>

namespace nnreach
{

// Base class for every error raised by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Non-finite or inverted interval endpoints.
class interval_error : public error
{
public:
    using error::error;
};

// Operand shapes, dimensions or variable counts do not agree.
class dimension_error : public error
{
public:
    using error::error;
};

// The validated integrator could not certify a step.
class integration_error : public error
{
public:
    using error::error;
};

// Malformed model, network or expression input. Carries the 1-based
// line and column when known (0 otherwise).
class parse_error : public error
{
public:
    parse_error(const std::string &msg, std::size_t line = 0, std::size_t column = 0)
        : error(msg), m_line(line), m_column(column)
    {
    }

    [[nodiscard]] std::size_t line() const noexcept
    {
        return m_line;
    }
    [[nodiscard]] std::size_t column() const noexcept
    {
        return m_column;
    }

private:
    std::size_t m_line;
    std::size_t m_column;
};

// Semantic validation failure of a loaded model. The message names the
// offending field.
class model_error : public error
{
public:
    using error::error;
};

} // namespace nnreach

#endif
