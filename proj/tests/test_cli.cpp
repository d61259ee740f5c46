#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace bikind;

namespace
{

struct outcome
{
    int code = 0;
    std::string out;
    std::string err;
};

outcome run( std::vector< std::string > args )
{
    args.insert( args.begin(), "bikind" );
    std::vector< const char* > argv;
    for ( const auto& a : args )
        argv.push_back( a.c_str() );
    std::ostringstream out, err;
    const int code = cli::run( static_cast< int >( argv.size() ), argv.data(), out, err );
    return { code, out.str(), err.str() };
}

std::string fx( const std::string& name ) { return test::fixture_path( name ).string(); }

std::filesystem::path write_temp( const std::string& name, const std::string& text )
{
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream( p ) << text;
    return p;
}

// Drops every wall-clock field so two reports can be compared.
void strip_times( nlohmann::ordered_json& j )
{
    if ( j.is_object() )
    {
        j.erase( "ms" );
        j.erase( "wall_ms" );
    }
    if ( j.is_structured() )
        for ( auto& v : j )
            strip_times( v );
}

} // namespace

TEST_CASE( "verify maps verdicts to exit codes" )
{
    const auto safe = run( { "verify", fx( "eca_safe.bik" ), "--strategy", "bkind", "--invariants", "intervals",
                             "--k-max", "10" } );
    CHECK( safe.code == 0 );
    CHECK( safe.out.find( "safe at iteration 1 by inductive-step" ) != std::string::npos );

    const auto unsafe = run( { "verify", fx( "eca_unsafe.bik" ), "--strategy", "kind", "--k-max", "10" } );
    CHECK( unsafe.code == 10 );
    CHECK( unsafe.out.find( "unsafe at iteration 5" ) != std::string::npos );
    CHECK( unsafe.out.find( "pc=error s=5" ) != std::string::npos );

    const auto unknown = run( { "verify", fx( "eca_safe.bik" ), "--strategy", "kind", "--invariants", "none",
                                "--k-max", "10" } );
    CHECK( unknown.code == 2 );
    CHECK( unknown.out.find( "unknown after 10 iterations" ) != std::string::npos );

    const auto joined = run( { "verify", fx( "eca_unsafe.bik" ) } );
    CHECK( joined.code == 10 );
    CHECK( joined.out.find( "<- join" ) != std::string::npos );
}

TEST_CASE( "usage and input errors exit with 1" )
{
    const auto missing = run( { "verify", "missing.bik" } );
    CHECK( missing.code == 1 );
    CHECK( missing.err.find( "missing.bik" ) != std::string::npos );

    const auto bad = write_temp( "bikind-bad.bik", "var x: u8 = 0;\nx = x +;\n" );
    const auto parse_error = run( { "verify", bad.string() } );
    CHECK( parse_error.code == 1 );
    CHECK( parse_error.err.find( ":2:" ) != std::string::npos );
    CHECK( parse_error.err.find( "syntax error" ) != std::string::npos );

    CHECK( run( { "verify", fx( "counter_3.bik" ), "--strategy", "sideways" } ).code == 1 );
    CHECK( run( { "verify", fx( "counter_3.bik" ), "--k-max", "0" } ).code == 1 );
    CHECK( run( { "verify", fx( "counter_3.bik" ), "--solver", "z3" } ).code == 1 );
    CHECK( run( { "verify", fx( "counter_3.bik" ), "--solver", "cmd:/nonexistent/solver" } ).code == 1 );
    CHECK( run( {} ).code == 1 );
    CHECK( run( { "frobnicate" } ).code == 1 );
    CHECK( run( { "--help" } ).code == 0 );
}

TEST_CASE( "JSON reports are versioned and stable" )
{
    const std::vector< std::string > args{ "verify", fx( "eca_unsafe.bik" ), "--json" };
    const auto a = run( args );
    const auto b = run( args );
    REQUIRE( a.code == 10 );
    auto ja = nlohmann::ordered_json::parse( a.out );
    auto jb = nlohmann::ordered_json::parse( b.out );
    CHECK( ja[ "schema" ] == 1 );
    CHECK( ja[ "verdict" ] == "unsafe" );
    CHECK( ja[ "iterations_used" ] == 4 );
    CHECK( ja[ "solver" ] == "builtin" );
    REQUIRE( ja.contains( "trace" ) );
    CHECK( ja[ "trace" ][ "states" ].back()[ "pc" ] == "error" );
    CHECK( ja[ "trace" ][ "join" ].is_number() );
    strip_times( ja );
    strip_times( jb );
    CHECK( ja.dump() == jb.dump() );

    const auto inv = run( { "verify", fx( "eca_safe.bik" ), "--json", "--dump-invariants" } );
    const auto ji = nlohmann::ordered_json::parse( inv.out );
    CHECK( ji[ "verdict" ] == "safe" );
    CHECK( ji[ "proved_by" ] == "inductive-step" );
    CHECK( ji[ "invariants_at_loop_heads" ][ "L3" ][ "s" ] == nlohmann::ordered_json::array( { 1, 5 } ) );
}

TEST_CASE( "bench over a small manifest" )
{
    const auto manifest = write_temp( "bikind-small.csv", "path,expected_verdict,expected_k_star\n" + fx( "counter_3.bik" ) +
                                                              ",unsafe,4\n" + fx( "counter_3_halt.bik" ) + ",safe,\n" +
                                                              fx( "eca_unsafe_u8.bik" ) + ",unsafe,5\n" );
    const auto rows = cli::read_manifest( manifest );
    REQUIRE( rows.size() == 3 );
    CHECK( rows[ 0 ].k_star == 4 );
    CHECK_FALSE( rows[ 1 ].k_star );

    cli::bench_config config;
    config.run.engine.k_max = 20;
    const auto serial = cli::bench( rows, config );
    config.jobs = 3;
    const auto parallel = cli::bench( rows, config );
    REQUIRE( serial.size() == 12 );
    CHECK( cli::to_csv( serial, false ) == cli::to_csv( parallel, false ) );

    const auto summary = cli::summarize( serial );
    CHECK( summary.incorrect_proofs == 0 );
    CHECK( summary.incorrect_alarms == 0 );
    CHECK( summary.correct_alarms == 8 );
    CHECK( summary.correct_proofs == 4 );

    // Rows come in kind/none, kind/intervals, bkind/none, bkind/intervals order.
    for ( std::size_t f = 0; f < rows.size(); ++f )
        if ( rows[ f ].expected == "unsafe" )
            for ( int inv = 0; inv < 2; ++inv )
                CHECK( serial[ 4 * f + 2 + inv ].iterations <= serial[ 4 * f + inv ].iterations );

    const auto cmd = run( { "bench", manifest.string(), "--jobs", "2" } );
    CHECK( cmd.code == 0 );
    CHECK( cmd.out.rfind( "file,strategy,invariants,verdict,expected,iterations,wall_ms\n", 0 ) == 0 );
    CHECK( cmd.out.find( "incorrect proofs  0" ) != std::string::npos );
}

TEST_CASE( "bench fails on a wrong expectation" )
{
    const auto manifest =
        write_temp( "bikind-wrong.csv", "path,expected_verdict,expected_k_star\n" + fx( "counter_3.bik" ) + ",safe,\n" );
    const auto r = run( { "bench", manifest.string() } );
    CHECK( r.code == 1 );
    CHECK( r.out.find( "incorrect alarms  4" ) != std::string::npos );
}

TEST_CASE( "bench on an empty manifest" )
{
    const auto manifest = write_temp( "bikind-empty.csv", "path,expected_verdict,expected_k_star\n" );
    const auto csv = std::filesystem::temp_directory_path() / "bikind-empty-out.csv";
    const auto r = run( { "bench", manifest.string(), "--csv", csv.string() } );
    CHECK( r.code == 0 );
    std::ifstream in( csv );
    std::stringstream text;
    text << in.rdbuf();
    CHECK( text.str() == "file,strategy,invariants,verdict,expected,iterations,wall_ms\n" );
}

TEST_CASE( "malformed manifests are rejected" )
{
    CHECK_THROWS( cli::read_manifest( write_temp( "bikind-m1.csv", "a.bik,maybe,\n" ) ) );
    CHECK_THROWS( cli::read_manifest( write_temp( "bikind-m2.csv", "a.bik,safe\n" ) ) );
    CHECK_THROWS( cli::read_manifest( write_temp( "bikind-m3.csv", "a.bik,unsafe,x\n" ) ) );
    CHECK( run( { "bench", "/nonexistent/manifest.csv" } ).code == 1 );
}

TEST_CASE( "oracle subcommand" )
{
    const auto r = run( { "oracle", fx( "eca_unsafe_u8.bik" ), "--depth", "32", "--input-range", "0:6" } );
    CHECK( r.code == 10 );
    const auto j = nlohmann::ordered_json::parse( r.out );
    CHECK( j[ "verdict" ] == "unsafe" );
    CHECK( j[ "k_star" ] == 5 );
    CHECK( j[ "trace" ][ "states" ].size() == 7 );

    const auto safe = run( { "oracle", fx( "counter_5_halt.bik" ) } );
    CHECK( safe.code == 0 );
    CHECK( nlohmann::ordered_json::parse( safe.out )[ "k_star" ].is_null() );

    CHECK( run( { "oracle", fx( "eca_unsafe.bik" ) } ).code == 2 );
}
