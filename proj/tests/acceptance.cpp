// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include "support.hpp"

#include <functional>
#include <iostream>

using namespace bikind;
using engine::strategy;
using engine::verdict_kind;

namespace
{

struct result
{
    bool pass = true;
    std::string detail;

    void require( bool ok, const std::string& what )
    {
        if ( !ok )
        {
            pass = false;
            detail += ( detail.empty() ? "" : "; " ) + what;
        }
    }
};

struct loaded
{
    cfg graph;
    transition_system ts;

    explicit loaded( const std::filesystem::path& p ) : graph( cli::load_program( p ) ), ts( compile( graph ) ) {}
};

engine::verdict verify( const loaded& f, backend& solver, strategy s, bool invariants, int k_max )
{
    engine::options o;
    o.strat = s;
    o.use_invariants = invariants;
    o.k_max = k_max;
    return engine::verifier( f.ts, solver, o ).run();
}

std::string describe( const engine::verdict& v )
{
    return std::string( engine::to_string( v.kind ) ) + "@" + std::to_string( v.k );
}

// Measured with the built-in backend and pinned.
constexpr int eca_safe_iterations = 1;
constexpr int eca_unsafe_bkind_iterations = 4;
const std::map< int, int > counter_bkind_iterations{ { 3, 3 }, { 5, 4 }, { 7, 5 }, { 9, 6 } };

result safe_with_intervals()
{
    result r;
    auto solver = make_builtin_backend();
    const loaded f( test::fixture_path( "eca_safe.bik" ) );
    for ( auto s : { strategy::bkind, strategy::kind } )
    {
        const auto v = verify( f, *solver, s, true, 10 );
        r.require( v.kind == verdict_kind::safe && v.k <= 2, std::string( engine::to_string( s ) ) + " gave " + describe( v ) );
        r.require( v.k == eca_safe_iterations, "iteration differs from the pinned value" );
    }
    r.detail += r.pass ? "safe at iteration 1 under both strategies" : "";
    return r;
}

result unknown_without_invariants()
{
    result r;
    auto solver = make_builtin_backend();
    const loaded f( test::fixture_path( "eca_safe.bik" ) );
    const auto v = verify( f, *solver, strategy::kind, false, 10 );
    r.require( v.kind == verdict_kind::unknown && v.k == 10, "got " + describe( v ) );
    if ( r.pass )
        r.detail = "unknown(10)";
    return r;
}

result bug_depth()
{
    result r;
    auto solver = make_builtin_backend();
    const loaded f( test::fixture_path( "eca_unsafe.bik" ) );
    for ( bool inv : { false, true } )
    {
        const auto v = verify( f, *solver, strategy::kind, inv, 10 );
        r.require( v.kind == verdict_kind::unsafe && v.k == 5,
                   std::string( inv ? "intervals" : "none" ) + " gave " + describe( v ) );
    }
    if ( r.pass )
        r.detail = "unsafe at iteration 5 with and without intervals";
    return r;
}

result iteration_halving()
{
    result r;
    auto solver = make_builtin_backend();
    const loaded eca( test::fixture_path( "eca_unsafe.bik" ) );
    const auto b = verify( eca, *solver, strategy::bkind, true, 10 );
    r.require( b.kind == verdict_kind::unsafe && b.k >= 2 && b.k <= 4 && b.k < 5, "eca_unsafe gave " + describe( b ) );
    r.require( b.k == eca_unsafe_bkind_iterations, "eca_unsafe differs from the pinned value" );
    std::string counts = "eca_unsafe bkind=" + std::to_string( b.k );
    for ( const auto& [ n, pinned ] : counter_bkind_iterations )
    {
        const loaded f( test::fixture_path( "counter_" + std::to_string( n ) + ".bik" ) );
        const auto truth = oracle::bfs( f.graph );
        const int k_star = truth.k_star;
        r.require( truth.verdict == oracle::bfs_verdict::unsafe && k_star == n + 1, "unexpected k* for N=" + std::to_string( n ) );
        const auto kind = verify( f, *solver, strategy::kind, true, 20 );
        const auto bkind = verify( f, *solver, strategy::bkind, true, 20 );
        r.require( bkind.kind == verdict_kind::unsafe && bkind.k <= k_star / 2 + 2 && bkind.k < kind.k,
                   "N=" + std::to_string( n ) + " kind " + describe( kind ) + " bkind " + describe( bkind ) );
        r.require( bkind.k == pinned, "N=" + std::to_string( n ) + " differs from the pinned value" );
        counts += " N=" + std::to_string( n ) + ":" + std::to_string( kind.k ) + "->" + std::to_string( bkind.k );
    }
    if ( r.pass )
        r.detail = counts;
    return r;
}

result soundness()
{
    result r;
    auto solver = make_builtin_backend();
    int runs = 0;
    int traces = 0;
    for ( const auto& row : test::manifest() )
    {
        const loaded f( row.path );
        const auto truth = oracle::bfs( f.graph, test::limits_for( f.graph ) );
        if ( truth.verdict == oracle::bfs_verdict::cap_exceeded )
        {
            r.require( false, row.name + ": oracle could not decide" );
            continue;
        }
        const bool unsafe = truth.verdict == oracle::bfs_verdict::unsafe;
        r.require( unsafe == ( row.expected == "unsafe" ), row.name + ": manifest disagrees with the oracle" );
        for ( auto s : { strategy::kind, strategy::bkind } )
            for ( bool inv : { false, true } )
            {
                ++runs;
                const auto v = verify( f, *solver, s, inv, 20 );
                const std::string cell = row.name + " " + engine::to_string( s ) + ( inv ? "+intervals" : "" );
                r.require( !( v.kind == verdict_kind::safe && unsafe ), cell + ": incorrect proof" );
                r.require( !( v.kind == verdict_kind::unsafe && !unsafe ), cell + ": incorrect alarm" );
                if ( v.cex )
                {
                    ++traces;
                    r.require( oracle::replay( *v.cex, f.graph ).valid && v.cex->ends_in_error(),
                               cell + ": trace does not replay" );
                }
            }
    }
    if ( r.pass )
        r.detail = std::to_string( runs ) + " runs, 0 incorrect, " + std::to_string( traces ) + " traces replayed";
    return r;
}

result oracle_equivalence()
{
    result r;
    auto solver = make_builtin_backend();
    int compared = 0;
    for ( const auto& row : test::manifest() )
    {
        const loaded f( row.path );
        const auto truth = oracle::bfs( f.graph, test::limits_for( f.graph ) );
        if ( truth.verdict == oracle::bfs_verdict::cap_exceeded || truth.states > ( std::size_t{ 1 } << 20 ) )
            continue;
        ++compared;
        for ( auto s : { strategy::kind, strategy::bkind } )
        {
            const auto v = verify( f, *solver, s, true, 20 );
            const std::string cell = row.name + " " + engine::to_string( s );
            if ( truth.verdict == oracle::bfs_verdict::unsafe )
            {
                r.require( v.kind == verdict_kind::unsafe, cell + ": expected unsafe, got " + describe( v ) );
                if ( s == strategy::kind )
                    r.require( v.k == truth.k_star, cell + ": k differs from k*" );
            }
            else
                r.require( v.kind == verdict_kind::safe, cell + ": expected safe, got " + describe( v ) );
        }
        if ( truth.verdict == oracle::bfs_verdict::unsafe )
        {
            r.require( row.k_star == truth.k_star, row.name + ": manifest k* differs from the oracle" );
            const auto at = check_sat( *solver, encode_base_case( f.ts, truth.k_star ), std::chrono::seconds( 60 ) );
            r.require( at.is_sat(), row.name + ": base case at k* is not sat" );
            if ( truth.k_star > 1 )
            {
                const auto below =
                    check_sat( *solver, encode_base_case( f.ts, truth.k_star - 1 ), std::chrono::seconds( 60 ) );
                r.require( below.is_unsat(), row.name + ": base case below k* is not unsat" );
            }
        }
    }
    if ( r.pass )
        r.detail = std::to_string( compared ) + " fixtures agree with explicit-state search";
    return r;
}

result invariant_soundness()
{
    result r;
    std::size_t states = 0;
    for ( const auto& row : test::manifest() )
    {
        const loaded f( row.path );
        const auto phi = intervals::to_formula( intervals::infer( f.graph ), f.ts );
        int violations = 0;
        for ( const auto& s : test::reachable_heads( f.graph ) )
        {
            ++states;
            violations += smt::evaluate( phi, test::as_model( s, f.ts ) ) != 1;
        }
        r.require( violations == 0, row.name + ": " + std::to_string( violations ) + " reachable states excluded" );
    }
    if ( r.pass )
        r.detail = std::to_string( states ) + " reachable loop-head states, 0 violations";
    return r;
}

result worked_example()
{
    result r;
    auto solver = make_builtin_backend();
    const loaded f( test::fixture_path( "eca_unsafe.bik" ) );
    engine::options o;
    engine::verifier v( f.ts, *solver, o );
    const auto step = v.inductive_step( 1, true );
    r.require( step.status == sat_status::sat && step.found.has_value(), "inductive step was not sat" );
    if ( step.found )
    {
        const auto& pre = step.found->states.at( 0 );
        // The havocked value read on the way to the error is the program's
        // input at the moment the final guard is evaluated.
        const std::uint64_t s = pre.values.at( 1 );
        const std::uint64_t input = pre.inputs.at( 0 );
        r.require( s == 5 && input == 5,
                   "pre-error state s=" + std::to_string( s ) + " input=" + std::to_string( input ) );
        r.require( step.found->ends_in_error(), "trace does not end in error" );
        if ( r.pass )
            r.detail = "pre-error state s=5, input=5";
    }
    return r;
}

result backend_agreement()
{
    result r;
    const auto z3 = test::z3_command();
    if ( z3.empty() )
    {
        r.require( false, "no external SMT-LIB solver available" );
        return r;
    }
    auto builtin = make_builtin_backend();
    auto external = make_backend( z3 );
    test::formula_generator gen( 2024, 8, 4 );
    int mismatches = 0;
    for ( int i = 0; i < 500; ++i )
    {
        const auto q = gen.generate();
        const auto a = check_sat( *builtin, q, std::chrono::seconds( 10 ) );
        const auto b = check_sat( *external, q, std::chrono::seconds( 10 ) );
        mismatches += a.status != b.status || a.status == sat_status::unknown;
    }
    r.require( mismatches == 0, std::to_string( mismatches ) + " of 500 formulas disagree" );

    int fixtures = 0;
    for ( const auto& row : test::manifest() )
    {
        const loaded f( row.path );
        for ( auto s : { strategy::kind, strategy::bkind } )
        {
            const auto a = verify( f, *builtin, s, true, 20 );
            const auto b = verify( f, *external, s, true, 20 );
            r.require( a.kind == b.kind, row.name + " " + engine::to_string( s ) + ": " + describe( a ) + " vs " + describe( b ) );
        }
        ++fixtures;
    }
    if ( r.pass )
        r.detail = "500 formulas and " + std::to_string( fixtures ) + " fixtures agree with " + z3.substr( 4 );
    return r;
}

} // namespace

int main()
{
    const std::vector< std::pair< const char*, std::function< result() > > > criteria{
        { "safe event loop proved with intervals", safe_with_intervals },
        { "safe event loop unknown without invariants", unknown_without_invariants },
        { "unsafe event loop found at depth 5", bug_depth },
        { "bkind iteration halving", iteration_halving },
        { "no incorrect proofs or alarms", soundness },
        { "agreement with explicit-state search", oracle_equivalence },
        { "interval invariants are sound", invariant_soundness },
        { "inductive-step model s=5, input=5", worked_example },
        { "built-in and external backends agree", backend_agreement },
    };
    int failed = 0;
    for ( std::size_t i = 0; i < criteria.size(); ++i )
    {
        result r;
        try
        {
            r = criteria[ i ].second();
        }
        catch ( const std::exception& e )
        {
            r.require( false, std::string( "exception: " ) + e.what() );
        }
        failed += !r.pass;
        std::cout << ( r.pass ? "PASS" : "FAIL" ) << " criterion " << i + 1 << ": " << criteria[ i ].first << " ("
                  << r.detail << ")" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
