#pragma once

#include "bikind/transys/formula.hpp"

#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>

namespace bikind
{

enum class sat_status
{
    sat,
    unsat,
    unknown,
};

enum class unknown_reason
{
    none,
    timeout,
    process_failure,
    too_large,
};

const char* to_string( sat_status s );
const char* to_string( unknown_reason r );

struct solve_result
{
    sat_status status = sat_status::unknown;
    unknown_reason reason = unknown_reason::none;
    smt::model model; // sat only
    std::string detail;

    bool is_sat() const { return status == sat_status::sat; }
    bool is_unsat() const { return status == sat_status::unsat; }
};

// A backend answered Sat with a model that does not satisfy the formula.
class model_validation_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class backend
{
public:
    virtual ~backend() = default;
    virtual std::string id() const = 0;
    virtual solve_result solve( const smt::query& q, std::chrono::milliseconds budget ) = 0;
};

// Bit-blasting to a CDCL SAT solver. Handles every width.
std::unique_ptr< backend > make_builtin_backend();

// Exhaustive enumeration over the free variables, after solving top-level
// definitional equalities. Unknown(too_large) past 2^20 assignments.
std::unique_ptr< backend > make_enum_backend();

// Any SMT-LIB 2 solver reading the script on standard input, run through
// /bin/sh -c.
std::unique_ptr< backend > make_external_backend( std::string command_line );

// "builtin", "enum" or "cmd:<command line>". Throws std::invalid_argument.
std::unique_ptr< backend > make_backend( const std::string& spec );

// Runs the backend, completes the model to every declaration (missing
// values become 0) and re-evaluates the formula under it. Throws
// model_validation_error if the model does not satisfy the formula.
solve_result check_sat( backend& b, const smt::query& q, std::chrono::milliseconds budget );

} // namespace bikind
