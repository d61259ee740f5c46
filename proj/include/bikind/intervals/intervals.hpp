#pragma once

#include "bikind/frontend/cfg.hpp"
#include "bikind/transys/transys.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bikind::intervals
{

// Bounds are the mathematical values of the variable's type (signed types
// read two's complement), so they always fit in 64 bits.
struct interval
{
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    bool contains( std::int64_t v ) const { return lo <= v && v <= hi; }
    friend bool operator==( const interval&, const interval& ) = default;
};

interval top( int_type t );
bool is_top( const interval& i, int_type t );

// The mathematical value of a bit pattern of type `t`, and back.
std::int64_t to_math( std::uint64_t bits, int_type t );
std::uint64_t to_bits( std::int64_t v, int_type t );

// One interval per CFG variable; nullopt is bottom (unreachable).
using env = std::optional< std::vector< interval > >;

// Any bound that grew jumps to the type extremum.
interval widen( const interval& old_value, const interval& new_value, int_type t );

// Abstract post of one edge: guard refinement, then the parallel update.
env transfer( const edge& e, const env& in, const cfg& g );

struct invariant_set
{
    std::map< location, env > at; // every loop head
    int iterations = 0;           // most updates any loop head needed
};

// Worklist fixpoint with widening at loop heads, then one narrowing sweep.
// A variable that is initialised and only ever assigned constants is also
// clamped to the hull of those constants.
invariant_set infer( const cfg& g );

// Over step 0: the disjunction over loop heads of pc = head conjoined with
// that head's non-trivial bounds.
smt::term to_formula( const invariant_set& inv, const transition_system& ts );

// {"L3": {"s": [1, 5], ...}, ...}; unreachable heads map to null.
std::string to_json( const invariant_set& inv, const cfg& g );

} // namespace bikind::intervals
