#pragma once

#include "bikind/intervals/intervals.hpp"
#include "bikind/solver/solver.hpp"
#include "bikind/solver/trace.hpp"
#include "bikind/transys/transys.hpp"

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bikind::engine
{

enum class strategy
{
    kind,
    bkind,
};

enum class verdict_kind
{
    safe,
    unsafe,
    unknown,
};

enum class proof_method
{
    forward_condition,
    inductive_step,
};

const char* to_string( strategy s );
const char* to_string( verdict_kind v );
const char* to_string( proof_method m );

struct verdict
{
    verdict_kind kind = verdict_kind::unknown;
    int k = 0; // iteration that decided it, or k_max for unknown
    proof_method by = proof_method::inductive_step; // safe only
    std::optional< trace > cex;                      // unsafe only
};

struct check_timing
{
    int k = 0;
    std::string check; // base, reach-backward, forward, inductive
    double ms = 0;
    sat_status result = sat_status::unknown;
};

struct options
{
    strategy strat = strategy::bkind;
    bool use_invariants = true;
    int k_max = 50;
    std::chrono::milliseconds timeout{ 30000 }; // per query
    std::chrono::milliseconds run_budget{ 0 };  // whole run, 0 = unlimited
    bool cex_pool = false;      // match against every backward trace so far
    std::string dump_smt_dir;   // write every query here when non-empty
};

// A trace the engine was about to report failed concrete replay. Only a
// backend or encoding bug can cause this.
class internal_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// The solver could not be run at all, as opposed to giving up on a query.
class solver_failure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct check_outcome
{
    sat_status status = sat_status::unknown;
    std::optional< trace > found; // sat only
};

class verifier
{
public:
    verifier( const transition_system& ts, backend& solver, options opts );

    check_outcome base_case( int k );
    // sat: the completeness threshold is not reached yet; unsat: proven.
    sat_status forward_condition( int k );
    check_outcome inductive_step( int k, bool with_invariants );
    // Plain base case, then a search for a forward state that equals a
    // state of one of the backward traces; a hit is spliced into a full
    // counterexample.
    check_outcome bkind_base_case( int k, const std::vector< trace >& backward );

    verdict kind();
    verdict bkind();
    verdict run() { return opts_.strat == strategy::kind ? kind() : bkind(); }

    const std::vector< check_timing >& timings() const { return timings_; }
    const intervals::invariant_set& invariants() const { return inv_; }
    const smt::term& invariant_formula() const { return inv_formula_; }

private:
    solve_result solve( const smt::query& q, int k, const std::string& check );
    void validate( const trace& t, const char* what ) const;

    const transition_system& ts_;
    backend& solver_;
    options opts_;
    intervals::invariant_set inv_;
    smt::term inv_formula_;
    std::vector< check_timing > timings_;
    std::chrono::steady_clock::time_point started_ = std::chrono::steady_clock::now();
};

// Smallest j such that `state` equals pi.states[j] on every state variable.
std::optional< std::size_t > starts_counterexample( const trace_state& state, const trace& pi );

} // namespace bikind::engine
