#pragma once

#include "bikind/frontend/cfg.hpp"
#include "bikind/trace.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bikind::oracle
{

struct concrete_state
{
    location pc = cfg::entry;
    std::vector< std::uint64_t > values; // one per CFG variable

    auto operator<=>( const concrete_state& ) const = default;
};

// Value of an expression; booleans are 0 or 1.
std::uint64_t evaluate( const expr& e, const std::vector< std::uint64_t >& values );

class fanout_exceeded : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// How havoc is resolved while exploring.
struct input_domain
{
    // Enumerate every value of the havocked type, up to this many.
    std::uint64_t fanout_cap = std::uint64_t{ 1 } << 16;
    // Or only lo..hi (inclusive, as bit patterns); the result is then only
    // valid for inputs in that range.
    std::optional< std::pair< std::uint64_t, std::uint64_t > > range;
};

// One-edge successors. Havoc fans out over the domain and throws
// fanout_exceeded when the type is wider than the cap allows.
std::vector< concrete_state > successors( const concrete_state& s, const cfg& g, const input_domain& dom = {} );

// One-edge successors with the havoc inputs fixed (indexed like cfg::inputs).
std::vector< concrete_state > successors( const concrete_state& s, const cfg& g,
                                          const std::vector< std::uint64_t >& inputs );

// A cutpoint-to-cutpoint step: the next cutpoint state and the inputs the
// path read (unread inputs are 0).
struct macro_step
{
    concrete_state to;
    std::vector< std::uint64_t > inputs;
};

std::vector< macro_step > macro_successors( const concrete_state& s, const cfg& g, const input_domain& dom );

enum class bfs_verdict
{
    safe_within_cap, // no error within the explored depth
    safe,            // the whole reachable state space was explored
    unsafe,
    cap_exceeded,
};

const char* to_string( bfs_verdict v );

struct bfs_result
{
    bfs_verdict verdict = bfs_verdict::cap_exceeded;
    // Loop-head visits on the shortest error path (at least 1), which is the
    // engine's k for the same path.
    int k_star = 0;
    trace shortest; // full trace at cutpoint granularity
    std::size_t states = 0;
    int depth = 0; // transitions explored
    bool restricted = false;
    std::string detail;
};

struct bfs_limits
{
    int depth_cap = 64; // in loop-head visits
    std::size_t state_cap = std::size_t{ 1 } << 20;
    input_domain inputs;
};

// Breadth-first search over cutpoint states from every initial state.
bfs_result bfs( const cfg& g, const bfs_limits& limits = {} );

// Every initial state (uninitialised variables range over their domain).
std::vector< concrete_state > initial_states( const cfg& g, const input_domain& dom );

// The smallest k >= 1 such that every execution of k+1 transitions has
// reached exit, i.e. the depth at which the forward condition holds.
// nullopt when no such k <= depth_cap exists.
std::optional< int > exit_depth( const cfg& g, const bfs_limits& limits = {} );

struct replay_result
{
    bool valid = true;
    std::size_t index = 0; // first offending state
    std::string reason;
};

// Re-executes a trace on the CFG: full traces must start in an initial state,
// every step must follow with the recorded inputs, error may only be last.
replay_result replay( const trace& t, const cfg& g );

trace_state to_trace_state( const concrete_state& s, int step );
concrete_state from_trace_state( const trace_state& s );

} // namespace bikind::oracle
