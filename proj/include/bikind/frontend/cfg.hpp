#pragma once

#include "bikind/frontend/ast.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bikind
{

using location = std::uint32_t;

struct variable
{
    std::string name;
    int_type type;
    std::optional< std::uint64_t > init;
};

// One nondeterministic choice point: a `havoc` statement.
struct havoc_input
{
    std::size_t var = 0;
    std::string name; // symbol name, e.g. "havoc.input.0"
};

// Parallel assignment of one variable: either an expression over the
// pre-state or the value of a havoc input.
struct update
{
    std::size_t var = 0;
    expr_ptr value;
    std::optional< std::size_t > input;
};

enum class edge_kind
{
    plain,
    assume,
    assert_pass,
    assert_fail,
};

struct edge
{
    location from = 0;
    location to = 0;
    expr_ptr guard;
    std::vector< update > updates;
    edge_kind kind = edge_kind::plain;
};

struct cfg
{
    static constexpr location entry = 0;
    static constexpr location exit = 1;
    static constexpr location error = 2;

    std::vector< variable > vars;
    std::vector< havoc_input > inputs;
    std::size_t num_locations = 3;
    std::vector< location > loop_heads;
    // Per loop head (parallel to `loop_heads`): variables reset to 0 on entry.
    std::vector< std::vector< std::size_t > > reset_at_head;
    std::vector< edge > edges;

    // Indices into `edges`, per source location.
    std::vector< std::vector< std::size_t > > out;

    bool is_loop_head( location l ) const;
    // Entry, exit, error and every loop head.
    bool is_cutpoint( location l ) const;
    bool is_terminal( location l ) const { return l == exit || l == error; }

    std::string location_name( location l ) const;
};

// Lowers a checked program. `while` becomes a loop with a leading exit test,
// `break` leaves the innermost loop, `halt` jumps to exit, and every division
// or remainder is preceded by an implicit assertion that its divisor is
// non-zero.
//
// Edges entering a loop head also reset every variable that is dead at that
// head to 0, so that two executions reaching the same loop head with the same
// live values produce equal states.
cfg lower_to_cfg( const program& p );

std::string to_string( const cfg& g );

} // namespace bikind
