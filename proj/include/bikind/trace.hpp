#pragma once

#include "bikind/frontend/cfg.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace bikind
{

struct trace_state
{
    int step = 0;
    // One value per transition-system state variable; values[0] is pc.
    std::vector< std::uint64_t > values;
    // Havoc inputs read by the transition leaving this state, one per
    // transition-system input. Empty for the last state.
    std::vector< std::uint64_t > inputs;

    location pc() const { return static_cast< location >( values.at( 0 ) ); }
};

enum class trace_kind
{
    full,    // starts in an initial state
    partial, // a backward counterexample candidate
};

struct trace
{
    trace_kind kind = trace_kind::full;
    std::vector< trace_state > states;
    // For a spliced trace, the index of the first state taken from the
    // backward part.
    std::optional< std::size_t > join;

    bool ends_in_error() const { return !states.empty() && states.back().pc() == cfg::error; }
};

} // namespace bikind
