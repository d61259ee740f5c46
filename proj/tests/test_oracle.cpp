#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace bikind;

TEST_CASE( "one matching input advances the event loop" )
{
    const cfg g = test::load_fixture( "eca_unsafe.bik" );
    const location head = g.loop_heads.at( 0 );
    oracle::input_domain one;
    one.range = std::pair< std::uint64_t, std::uint64_t >{ 1, 1 };
    const auto next = oracle::macro_successors( { head, { 1, 0 } }, g, one );
    REQUIRE( next.size() == 1 );
    CHECK( next[ 0 ].to.pc == head );
    CHECK( next[ 0 ].to.values[ 0 ] == 2 );
    CHECK( next[ 0 ].inputs == std::vector< std::uint64_t >{ 1 } );
}

TEST_CASE( "terminal states have no edge successors" )
{
    const cfg g = test::load_fixture( "counter_5.bik" );
    CHECK( oracle::successors( { cfg::exit, { 3 } }, g ).empty() );
    CHECK( oracle::successors( { cfg::error, { 3 } }, g ).empty() );
}

TEST_CASE( "the counter at x = 5 can only fail" )
{
    const cfg g = test::load_fixture( "counter_5.bik" );
    const auto next = oracle::macro_successors( { g.loop_heads.at( 0 ), { 5 } }, g, {} );
    REQUIRE( next.size() == 1 );
    CHECK( next[ 0 ].to.pc == cfg::error );
}

TEST_CASE( "havoc over a wide type exceeds the fan-out cap" )
{
    const cfg g = test::load_fixture( "eca_unsafe.bik" );
    CHECK_THROWS_AS( oracle::macro_successors( { g.loop_heads.at( 0 ), { 1, 0 } }, g, {} ), oracle::fanout_exceeded );
    CHECK( oracle::bfs( g ).verdict == oracle::bfs_verdict::cap_exceeded );
}

TEST_CASE( "the event loops under a restricted input domain" )
{
    oracle::bfs_limits limits;
    limits.inputs.range = std::pair< std::uint64_t, std::uint64_t >{ 0, 6 };
    const auto unsafe = oracle::bfs( test::load_fixture( "eca_unsafe_u8.bik" ), limits );
    CHECK( unsafe.verdict == oracle::bfs_verdict::unsafe );
    CHECK( unsafe.k_star == 5 );
    CHECK( unsafe.restricted );

    limits.depth_cap = 32;
    const auto safe = oracle::bfs( test::load_fixture( "eca_safe_u8.bik" ), limits );
    CHECK( ( safe.verdict == oracle::bfs_verdict::safe || safe.verdict == oracle::bfs_verdict::safe_within_cap ) );

    // The full u8 domain gives the same answers.
    const auto full = oracle::bfs( test::load_fixture( "eca_unsafe_u8.bik" ) );
    CHECK( full.verdict == oracle::bfs_verdict::unsafe );
    CHECK( full.k_star == 5 );
    CHECK( oracle::bfs( test::load_fixture( "eca_safe_u8.bik" ) ).verdict == oracle::bfs_verdict::safe );
}

TEST_CASE( "the counter family fails after N+1 loop-head visits" )
{
    for ( int n : { 3, 5, 7, 9 } )
    {
        INFO( "N=" << n );
        const auto r = oracle::bfs( test::load_fixture( "counter_" + std::to_string( n ) + ".bik" ) );
        CHECK( r.verdict == oracle::bfs_verdict::unsafe );
        CHECK( r.k_star == n + 1 );
        const auto halted = oracle::bfs( test::load_fixture( "counter_" + std::to_string( n ) + "_halt.bik" ) );
        CHECK( halted.verdict == oracle::bfs_verdict::safe );
    }
}

TEST_CASE( "a depth cap below the bug yields no verdict of unsafety" )
{
    oracle::bfs_limits limits;
    limits.depth_cap = 3;
    const auto r = oracle::bfs( test::load_fixture( "counter_9.bik" ), limits );
    CHECK( r.verdict == oracle::bfs_verdict::safe_within_cap );
}

TEST_CASE( "exit depth of bounded programs" )
{
    CHECK( oracle::exit_depth( test::load_fixture( "straight_line.bik" ) ) == 1 );
    // entry, four visits of the head (i = 0..3), then exit: five transitions.
    CHECK( oracle::exit_depth( test::load_fixture( "bounded_while.bik" ) ) == 4 );
    CHECK( oracle::exit_depth( test::load_fixture( "counter_5_halt.bik" ) ) == 6 );
    CHECK_FALSE( oracle::exit_depth( test::load_fixture( "eca_safe_u8.bik" ) ) );
}

TEST_CASE( "shortest traces replay and perturbed ones do not" )
{
    for ( const auto& row : test::manifest() )
    {
        if ( row.expected != "unsafe" )
            continue;
        INFO( row.name );
        const cfg g = cli::load_program( row.path );
        const auto r = oracle::bfs( g, test::limits_for( g ) );
        REQUIRE( r.verdict == oracle::bfs_verdict::unsafe );
        CHECK( r.shortest.ends_in_error() );
        CHECK( oracle::replay( r.shortest, g ).valid );

        for ( std::size_t i = 1; i + 1 < r.shortest.states.size(); ++i )
            for ( std::size_t v = 1; v < r.shortest.states[ i ].values.size(); ++v )
            {
                trace bad = r.shortest;
                bad.states[ i ].values[ v ] ^= 1;
                const auto verdict = oracle::replay( bad, g );
                INFO( "state " << i << " variable " << v );
                CHECK_FALSE( verdict.valid );
                CHECK( verdict.index == i );
                CHECK( verdict.reason == "no connecting edge" );
            }
    }
}

TEST_CASE( "replay checks the shape of a trace" )
{
    const cfg g = test::load_fixture( "counter_3.bik" );
    const auto r = oracle::bfs( g );
    REQUIRE( r.verdict == oracle::bfs_verdict::unsafe );

    trace wrong_start = r.shortest;
    wrong_start.states[ 0 ].values[ 1 ] = 1;
    CHECK_FALSE( oracle::replay( wrong_start, g ).valid );

    // A partial trace may start anywhere that is a cutpoint.
    trace suffix = r.shortest;
    suffix.kind = trace_kind::partial;
    suffix.states.erase( suffix.states.begin(), suffix.states.begin() + 2 );
    CHECK( oracle::replay( suffix, g ).valid );

    trace past_error = r.shortest;
    past_error.states.back().inputs.clear();
    past_error.states.push_back( past_error.states.back() );
    CHECK_FALSE( oracle::replay( past_error, g ).valid );
}
