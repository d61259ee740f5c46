#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace bikind;
using intervals::interval;

namespace
{

std::size_t var_index( const cfg& g, const std::string& name )
{
    for ( std::size_t i = 0; i < g.vars.size(); ++i )
        if ( g.vars[ i ].name == name )
            return i;
    throw std::out_of_range( name );
}

interval at_head( const intervals::invariant_set& inv, const cfg& g, const std::string& name )
{
    const auto& env = inv.at.at( g.loop_heads.at( 0 ) );
    REQUIRE( env );
    return ( *env )[ var_index( g, name ) ];
}

} // namespace

TEST_CASE( "the safe event loop keeps s within 1..5" )
{
    const cfg g = test::load_fixture( "eca_safe.bik" );
    const auto inv = intervals::infer( g );
    CHECK( at_head( inv, g, "s" ) == interval{ 1, 5 } );
    // input is dead at the head and reset there, so it is pinned to 0,
    // well inside its type's range.
    CHECK( at_head( inv, g, "input" ) == interval{ 0, 0 } );

    const auto ts = compile( g );
    const auto phi = intervals::to_formula( inv, ts );
    const location head = g.loop_heads[ 0 ];
    auto m = [ & ]( std::uint64_t s ) { return smt::model{ { { "pc", 0 }, head }, { { "s", 0 }, s }, { { "input", 0 }, 0 } }; };
    CHECK( smt::evaluate( phi, m( 1 ) ) == 1 );
    CHECK( smt::evaluate( phi, m( 5 ) ) == 1 );
    CHECK( smt::evaluate( phi, m( 0 ) ) == 0 );
    CHECK( smt::evaluate( phi, m( 6 ) ) == 0 );
}

TEST_CASE( "an unmodified variable keeps its initial value" )
{
    const cfg g = lower_to_cfg( parse( R"(
        var c: u8 = 7;
        var i: u8 = 0;
        loop {
            assert(c == 7);
            i = i + 1;
            if (i == 10) { break; }
        }
    )" ) );
    const auto inv = intervals::infer( g );
    CHECK( at_head( inv, g, "c" ) == interval{ 7, 7 } );
}

TEST_CASE( "the counter widens to the full range quickly" )
{
    const cfg g = test::load_fixture( "counter_5.bik" );
    const auto inv = intervals::infer( g );
    CHECK( at_head( inv, g, "x" ) == interval{ 0, 255 } );
    CHECK( inv.iterations <= 3 );
}

TEST_CASE( "transfer functions" )
{
    const cfg g = test::load_fixture( "eca_safe.bik" );
    const auto s = var_index( g, "s" );
    const auto input = var_index( g, "input" );
    const int_type u32{ 32, false };
    const auto s_ref = make_var( s, "s", u32 );
    const auto in_ref = make_var( input, "input", u32 );

    edge step;
    step.guard = make_and( make_binary( binary_op::eq, in_ref, make_int( 1, u32 ) ),
                           make_binary( binary_op::eq, s_ref, make_int( 1, u32 ) ) );
    step.updates.push_back( { s, make_int( 2, u32 ), std::nullopt } );
    std::vector< interval > env( 2 );
    env[ s ] = { 1, 1 };
    env[ input ] = intervals::top( u32 );
    const auto out = intervals::transfer( step, env, g );
    REQUIRE( out );
    CHECK( ( *out )[ s ] == interval{ 2, 2 } );
    CHECK( ( *out )[ input ] == interval{ 1, 1 } );

    const cfg c = lower_to_cfg( parse( "var x: u8; x = x + 1;" ) );
    const int_type u8{ 8, false };
    const auto x = make_var( 0, "x", u8 );

    edge infeasible;
    infeasible.guard = make_binary( binary_op::gt, x, make_int( 5, u8 ) );
    CHECK_FALSE( intervals::transfer( infeasible, std::vector< interval >{ { 0, 3 } }, c ) );

    edge inc;
    inc.guard = make_bool( true );
    inc.updates.push_back( { 0, make_binary( binary_op::add, x, make_int( 1, u8 ) ), std::nullopt } );
    const auto wrapped = intervals::transfer( inc, std::vector< interval >{ { 250, 255 } }, c );
    REQUIRE( wrapped );
    // The concrete images of 250..255 are 251..255 and 0.
    for ( std::uint64_t v = 250; v <= 255; ++v )
        CHECK( ( *wrapped )[ 0 ].contains( static_cast< std::int64_t >( ( v + 1 ) & 0xff ) ) );
    CHECK( ( *wrapped )[ 0 ] == interval{ 0, 255 } );
}

TEST_CASE( "widening" )
{
    const int_type u8{ 8, false };
    const int_type i8{ 8, true };
    CHECK( intervals::widen( { 1, 3 }, { 1, 4 }, u8 ) == interval{ 1, 255 } );
    CHECK( intervals::widen( { 1, 3 }, { 1, 3 }, u8 ) == interval{ 1, 3 } );
    CHECK( intervals::widen( { 1, 3 }, { 0, 3 }, i8 ) == interval{ -128, 3 } );
    CHECK( intervals::widen( { 1, 3 }, { 2, 2 }, u8 ) == interval{ 1, 3 } );
}

TEST_CASE( "top environments add nothing beyond the loop-head test" )
{
    const cfg g = test::load_fixture( "counter_5.bik" );
    const auto ts = compile( g );
    intervals::invariant_set inv;
    for ( auto h : g.loop_heads )
        inv.at[ h ] = std::vector< interval >{ intervals::top( g.vars[ 0 ].type ) };
    const auto phi = intervals::to_formula( inv, ts );
    for ( std::uint64_t x = 0; x < 256; ++x )
    {
        CHECK( smt::evaluate( phi, { { { "pc", 0 }, g.loop_heads[ 0 ] }, { { "x", 0 }, x } } ) == 1 );
        CHECK( smt::evaluate( phi, { { { "pc", 0 }, cfg::entry }, { { "x", 0 }, x } } ) == 0 );
    }
}

TEST_CASE( "invariants never exclude a reachable loop-head state" )
{
    for ( const auto& row : test::manifest() )
    {
        INFO( row.name );
        const cfg g = cli::load_program( row.path );
        const auto ts = compile( g );
        const auto phi = intervals::to_formula( intervals::infer( g ), ts );
        int violations = 0;
        for ( const auto& s : test::reachable_heads( g ) )
            violations += smt::evaluate( phi, test::as_model( s, ts ) ) != 1;
        CHECK( violations == 0 );
    }
}

TEST_CASE( "invariants only ever remove inductive-step models" )
{
    auto solver = make_builtin_backend();
    for ( const auto& row : test::manifest() )
    {
        INFO( row.name );
        const cfg g = cli::load_program( row.path );
        const auto ts = compile( g );
        const auto phi = intervals::to_formula( intervals::infer( g ), ts );
        for ( int k = 1; k <= 6; ++k )
        {
            INFO( "k=" << k );
            const auto plain = check_sat( *solver, encode_inductive_step( ts, k ), std::chrono::seconds( 30 ) );
            const auto strong = check_sat( *solver, encode_inductive_step( ts, k, phi ), std::chrono::seconds( 30 ) );
            if ( plain.status == sat_status::unsat )
                CHECK( strong.status == sat_status::unsat );
        }
    }
}

TEST_CASE( "the analysis is deterministic" )
{
    for ( const auto& row : test::manifest() )
    {
        const cfg g = cli::load_program( row.path );
        CHECK( intervals::to_json( intervals::infer( g ), g ) == intervals::to_json( intervals::infer( g ), g ) );
    }
}
