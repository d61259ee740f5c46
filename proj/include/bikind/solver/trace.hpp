#pragma once

#include "bikind/trace.hpp"
#include "bikind/transys/transys.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace bikind
{

class extraction_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Reads steps 0..steps off the model, cut after the first error state.
trace extract_trace( const smt::model& m, const transition_system& ts, int steps, trace_kind kind );

// `k=<i> pc=<loc> var=value ... [havoc.x.0=v]`, one state per line.
std::string format_trace( const trace& t, const transition_system& ts );

} // namespace bikind
