#pragma once

#include "bikind/frontend/cfg.hpp"
#include "bikind/transys/formula.hpp"

#include <string>
#include <vector>

namespace bikind
{

struct state_var
{
    std::string name;
    unsigned width = 0;
    bool is_signed = false;
};

// One transition runs the loop-free stretch of the CFG between two cutpoints
// (entry, exit, error, loop heads), so a step of the system is one visit of
// a loop head. Exit and error loop on themselves.
//
// `init`, `safety`, `threshold`, `at_loop_head` and `normal_form` are stated
// over step 0; `trans` relates step 0 to step 1 and reads the havoc inputs
// at step 0.
struct transition_system
{
    cfg graph;

    std::vector< state_var > state_vars; // state_vars[0] is pc
    std::vector< state_var > inputs;
    unsigned pc_width = 0;

    smt::term init;
    smt::term trans;
    smt::term safety;    // pc != error
    smt::term threshold; // pc == exit
    smt::term at_loop_head;
    // Dead variables are 0 at every loop head. Holds in every reachable
    // state because lowering resets them on the way in.
    smt::term normal_form;

    smt::term pc( int step ) const;
    smt::term state( std::size_t index, int step ) const;
    smt::term input( std::size_t index, int step ) const;

    // Every state variable at steps 0..last_step and every input at steps
    // 0..last_step-1.
    std::vector< smt::var_decl > declarations( int last_step ) const;
};

transition_system compile( const cfg& g );

// init@0 ∧ trans^(k+1) ∧ some state 0..k+1 violates safety.
smt::query encode_base_case( const transition_system& ts, int k );

// init@0 ∧ trans^(k+1) ∧ ¬threshold@(k+1).
smt::query encode_forward_condition( const transition_system& ts, int k );

// A loop-head start state (optionally filtered by `invariant`), k transitions
// that keep safety, and a violation at step k.
smt::query encode_inductive_step( const transition_system& ts, int k, const smt::term& invariant = nullptr );

// Equality of the full state at `step` with a concrete valuation.
smt::term state_equals( const transition_system& ts, int step, const std::vector< std::uint64_t >& values );

// init@0 ∧ trans^(k+1) ∧ some state 0..k+1 equals one of `targets`.
smt::query encode_reaches_any( const transition_system& ts, int k,
                               const std::vector< std::vector< std::uint64_t > >& targets );

} // namespace bikind
