#include "bikind/engine/engine.hpp"

#include "bikind/oracle/oracle.hpp"

#include <filesystem>
#include <fstream>
#include <set>

namespace bikind::engine
{

const char* to_string( strategy s ) { return s == strategy::kind ? "kind" : "bkind"; }

const char* to_string( verdict_kind v )
{
    switch ( v )
    {
    case verdict_kind::safe: return "safe";
    case verdict_kind::unsafe: return "unsafe";
    case verdict_kind::unknown: return "unknown";
    }
    return "?";
}

const char* to_string( proof_method m )
{
    return m == proof_method::forward_condition ? "forward-condition" : "inductive-step";
}

std::optional< std::size_t > starts_counterexample( const trace_state& state, const trace& pi )
{
    for ( std::size_t j = 0; j < pi.states.size(); ++j )
        if ( pi.states[ j ].values == state.values )
            return j;
    return std::nullopt;
}

verifier::verifier( const transition_system& ts, backend& solver, options opts )
    : ts_( ts ), solver_( solver ), opts_( std::move( opts ) )
{
    if ( opts_.use_invariants )
    {
        inv_ = intervals::infer( ts_.graph );
        inv_formula_ = intervals::to_formula( inv_, ts_ );
    }
}

solve_result verifier::solve( const smt::query& q, int k, const std::string& check )
{
    if ( !opts_.dump_smt_dir.empty() )
    {
        std::filesystem::create_directories( opts_.dump_smt_dir );
        std::ofstream( std::filesystem::path( opts_.dump_smt_dir ) / ( check + "_k" + std::to_string( k ) + ".smt2" ) )
            << smt::to_smtlib( q );
    }
    const auto start = std::chrono::steady_clock::now();
    auto budget = opts_.timeout;
    if ( opts_.run_budget.count() > 0 )
    {
        const auto left = opts_.run_budget - std::chrono::duration_cast< std::chrono::milliseconds >( start - started_ );
        if ( left.count() <= 0 )
        {
            timings_.push_back( { k, check, 0, sat_status::unknown } );
            return { sat_status::unknown, unknown_reason::timeout, {}, "run budget exhausted" };
        }
        budget = std::min( budget, left );
    }
    solve_result r = check_sat( solver_, q, budget );
    if ( r.reason == unknown_reason::process_failure )
        throw solver_failure( solver_.id() + ": " + r.detail );
    const std::chrono::duration< double, std::milli > took = std::chrono::steady_clock::now() - start;
    timings_.push_back( { k, check, took.count(), r.status } );
    return r;
}

void verifier::validate( const trace& t, const char* what ) const
{
    const auto r = oracle::replay( t, ts_.graph );
    if ( !r.valid )
        throw internal_error( std::string( what ) + " failed replay at state " + std::to_string( r.index ) + ": " +
                              r.reason );
    if ( !t.ends_in_error() )
        throw internal_error( std::string( what ) + " does not end in the error location" );
}

check_outcome verifier::base_case( int k )
{
    const auto r = solve( encode_base_case( ts_, k ), k, "base" );
    check_outcome out{ r.status, std::nullopt };
    if ( r.is_sat() )
    {
        out.found = extract_trace( r.model, ts_, k + 1, trace_kind::full );
        validate( *out.found, "base-case counterexample" );
    }
    return out;
}

sat_status verifier::forward_condition( int k )
{
    return solve( encode_forward_condition( ts_, k ), k, "forward" ).status;
}

check_outcome verifier::inductive_step( int k, bool with_invariants )
{
    const auto r =
        solve( encode_inductive_step( ts_, k, with_invariants ? inv_formula_ : nullptr ), k, "inductive" );
    check_outcome out{ r.status, std::nullopt };
    if ( r.is_sat() )
    {
        out.found = extract_trace( r.model, ts_, k, trace_kind::partial );
        validate( *out.found, "backward counterexample" );
    }
    return out;
}

check_outcome verifier::bkind_base_case( int k, const std::vector< trace >& backward )
{
    check_outcome plain = base_case( k );
    if ( plain.status != sat_status::unsat || backward.empty() )
        return plain;

    std::set< std::vector< std::uint64_t > > unique;
    std::vector< std::vector< std::uint64_t > > targets;
    for ( const auto& pi : backward )
        for ( const auto& s : pi.states )
            if ( unique.insert( s.values ).second )
                targets.push_back( s.values );

    const auto r = solve( encode_reaches_any( ts_, k, targets ), k, "reach-backward" );
    check_outcome out{ r.status, std::nullopt };
    if ( !r.is_sat() )
        return out;

    const trace forward = extract_trace( r.model, ts_, k + 1, trace_kind::full );
    for ( std::size_t i = 0; i < forward.states.size(); ++i )
        for ( const auto& pi : backward )
        {
            const auto j = starts_counterexample( forward.states[ i ], pi );
            if ( !j )
                continue;
            trace full;
            full.kind = trace_kind::full;
            full.states.assign( forward.states.begin(), forward.states.begin() + static_cast< std::ptrdiff_t >( i ) );
            full.states.insert( full.states.end(), pi.states.begin() + static_cast< std::ptrdiff_t >( *j ),
                                pi.states.end() );
            for ( std::size_t s = 0; s < full.states.size(); ++s )
                full.states[ s ].step = static_cast< int >( s );
            full.join = i;
            validate( full, "spliced counterexample" );
            out.found = std::move( full );
            return out;
        }
    throw internal_error( "solver model reaches no backward state" );
}

verdict verifier::kind()
{
    for ( int k = 1; k <= opts_.k_max; ++k )
    {
        const auto bc = base_case( k );
        if ( bc.status == sat_status::sat )
            return { verdict_kind::unsafe, k, proof_method::inductive_step, bc.found };
        if ( bc.status == sat_status::unknown )
            continue;
        if ( forward_condition( k ) == sat_status::unsat )
            return { verdict_kind::safe, k, proof_method::forward_condition, std::nullopt };
        if ( inductive_step( k, opts_.use_invariants ).status == sat_status::unsat )
            return { verdict_kind::safe, k, proof_method::inductive_step, std::nullopt };
    }
    return { verdict_kind::unknown, opts_.k_max, proof_method::inductive_step, std::nullopt };
}

verdict verifier::bkind()
{
    std::vector< trace > backward;
    for ( int k = 1; k <= opts_.k_max; ++k )
    {
        const auto bc = bkind_base_case( k, backward );
        if ( bc.status == sat_status::sat )
            return { verdict_kind::unsafe, k, proof_method::inductive_step, bc.found };
        if ( bc.status == sat_status::unknown )
            continue;
        if ( forward_condition( k ) == sat_status::unsat )
            return { verdict_kind::safe, k, proof_method::forward_condition, std::nullopt };
        const auto is = inductive_step( k, opts_.use_invariants );
        if ( is.status == sat_status::unsat )
            return { verdict_kind::safe, k, proof_method::inductive_step, std::nullopt };
        if ( !opts_.cex_pool )
            backward.clear();
        if ( is.found )
            backward.push_back( *is.found );
    }
    return { verdict_kind::unknown, opts_.k_max, proof_method::inductive_step, std::nullopt };
}

} // namespace bikind::engine
