#include "bikind/cli/cli.hpp"
#include "bikind/frontend/parser.hpp"
#include "bikind/oracle/oracle.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>

namespace bikind::cli
{

namespace
{

struct engine_flags
{
    std::string strategy = "bkind";
    std::string invariants = "intervals";
    int k_max = 50;
    double timeout_s = 30;
    std::string solver = "builtin";
    bool cex_pool = false;
    std::string dump_smt;

    // bench runs every strategy and invariant mode itself.
    void attach( CLI::App& app, bool with_axes )
    {
        if ( with_axes )
        {
            app.add_option( "--strategy", strategy, "kind or bkind" )
                ->check( CLI::IsMember( { "kind", "bkind" } ) )
                ->capture_default_str();
            app.add_option( "--invariants", invariants, "none or intervals" )
                ->check( CLI::IsMember( { "none", "intervals" } ) )
                ->capture_default_str();
        }
        app.add_option( "--k-max", k_max, "Largest iteration to try" )
            ->check( CLI::PositiveNumber )
            ->capture_default_str();
        app.add_option( "--timeout", timeout_s, "Seconds per solver query" )
            ->check( CLI::PositiveNumber )
            ->capture_default_str();
        app.add_option( "--solver", solver, "builtin, enum or cmd:<command line>" )->capture_default_str();
        app.add_flag( "--cex-pool", cex_pool, "Match against every backward counterexample found so far" );
        app.add_option( "--dump-smt", dump_smt, "Write every query to this directory" );
    }

    run_config config() const
    {
        run_config c;
        c.engine.strat = strategy == "kind" ? engine::strategy::kind : engine::strategy::bkind;
        c.engine.use_invariants = invariants == "intervals";
        c.engine.k_max = k_max;
        c.engine.timeout = std::chrono::milliseconds( static_cast< long long >( timeout_s * 1000 ) );
        c.engine.cex_pool = cex_pool;
        c.engine.dump_smt_dir = dump_smt;
        c.solver = solver;
        return c;
    }
};

int do_verify( const std::string& file, const engine_flags& flags, bool json, bool dump_invariants,
               std::ostream& out )
{
    const run_report r = verify( file, flags.config() );
    if ( json )
    {
        auto j = to_json( r );
        if ( dump_invariants )
            j[ "invariants_at_loop_heads" ] = r.invariants_json;
        out << j.dump( 2 ) << "\n";
        return exit_code_for( r.verdict.kind );
    }

    out << r.file << ": " << engine::to_string( r.verdict.kind );
    switch ( r.verdict.kind )
    {
    case engine::verdict_kind::safe:
        out << " at iteration " << r.verdict.k << " by " << engine::to_string( r.verdict.by );
        break;
    case engine::verdict_kind::unsafe: out << " at iteration " << r.verdict.k; break;
    case engine::verdict_kind::unknown: out << " after " << r.verdict.k << " iterations"; break;
    }
    out << "\n";
    out << "strategy=" << r.strategy << " invariants=" << r.invariants << " solver=" << r.solver
        << " checks=" << r.timings.size() << " wall_ms=" << static_cast< long long >( r.wall_ms ) << "\n";
    if ( dump_invariants )
        out << "invariants:\n" << r.invariants_json.dump( 2 ) << "\n";
    if ( r.verdict.cex )
        out << "counterexample:\n" << r.trace_text;
    return exit_code_for( r.verdict.kind );
}

int do_bench( const std::string& manifest, const engine_flags& flags, unsigned jobs, const std::string& csv_path,
              std::ostream& out )
{
    bench_config config;
    config.run = flags.config();
    config.jobs = jobs;
    const auto rows = bench( read_manifest( manifest ), config );
    const auto csv = to_csv( rows );
    const auto summary = summarize( rows );
    if ( csv_path.empty() )
        out << csv << "\n";
    else
    {
        std::ofstream f( csv_path );
        if ( !f )
            throw std::runtime_error( "cannot write " + csv_path );
        f << csv;
    }
    out << format_summary( summary );
    return summary.incorrect_proofs == 0 && summary.incorrect_alarms == 0 ? 0 : 1;
}

int do_oracle( const std::string& file, int depth, std::size_t state_cap, const std::string& range,
               std::ostream& out )
{
    const cfg g = load_program( file );
    oracle::bfs_limits limits;
    limits.depth_cap = depth;
    limits.state_cap = state_cap;
    if ( !range.empty() )
    {
        const auto colon = range.find( ':' );
        if ( colon == std::string::npos )
            throw CLI::ValidationError( "--input-range", "expected lo:hi" );
        limits.inputs.range = std::pair{ std::stoull( range.substr( 0, colon ) ), std::stoull( range.substr( colon + 1 ) ) };
    }
    const auto r = oracle::bfs( g, limits );

    nlohmann::ordered_json j;
    j[ "schema" ] = 1;
    j[ "file" ] = file;
    j[ "verdict" ] = oracle::to_string( r.verdict );
    j[ "k_star" ] = r.verdict == oracle::bfs_verdict::unsafe ? nlohmann::ordered_json( r.k_star )
                                                             : nlohmann::ordered_json();
    j[ "trace" ] = r.verdict == oracle::bfs_verdict::unsafe ? trace_to_json( r.shortest, compile( g ) )
                                                            : nlohmann::ordered_json();
    j[ "states" ] = r.states;
    j[ "depth" ] = r.depth;
    j[ "restricted_inputs" ] = r.restricted;
    if ( !r.detail.empty() )
        j[ "detail" ] = r.detail;
    out << j.dump( 2 ) << "\n";
    switch ( r.verdict )
    {
    case oracle::bfs_verdict::unsafe: return exit_unsafe;
    case oracle::bfs_verdict::cap_exceeded: return exit_unknown;
    default: return exit_safe;
    }
}

} // namespace

int run( int argc, const char* const* argv, std::ostream& out, std::ostream& err )
{
    CLI::App app{ "Bounded and backward k-induction for small bit-vector programs", "bikind" };
    app.require_subcommand( 1 );

    std::string file;
    bool json = false;
    bool dump_invariants = false;
    engine_flags verify_flags;
    auto* verify_cmd = app.add_subcommand( "verify", "Verify one program" );
    verify_cmd->add_option( "file", file, "Program to verify" )->required();
    verify_flags.attach( *verify_cmd, true );
    verify_cmd->add_flag( "--json", json, "Print a JSON report" );
    verify_cmd->add_flag( "--dump-invariants", dump_invariants, "Print the loop-head intervals" );

    std::string manifest;
    std::string csv_path;
    unsigned jobs = 1;
    engine_flags bench_flags;
    auto* bench_cmd = app.add_subcommand( "bench", "Run every fixture of a manifest under all four configurations" );
    bench_cmd->add_option( "manifest", manifest, "CSV manifest" )->required();
    bench_flags.attach( *bench_cmd, false );
    bench_cmd->add_option( "--jobs", jobs, "Parallel workers" )->check( CLI::PositiveNumber );
    bench_cmd->add_option( "--csv", csv_path, "Write the CSV here instead of standard output" );

    std::string oracle_file;
    int depth = 64;
    std::size_t state_cap = std::size_t{ 1 } << 20;
    std::string range;
    auto* oracle_cmd = app.add_subcommand( "oracle", "Explicit-state search for fixture authoring" );
    oracle_cmd->add_option( "file", oracle_file, "Program to explore" )->required();
    oracle_cmd->add_option( "--depth", depth, "Loop-head visits to explore" )
        ->check( CLI::PositiveNumber )
        ->capture_default_str();
    oracle_cmd->add_option( "--states", state_cap, "State cap" )->capture_default_str();
    oracle_cmd->add_option( "--input-range", range, "Only havoc values lo:hi" );

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        const int code = app.exit( e, out, err );
        return code == 0 ? 0 : exit_error;
    }

    try
    {
        if ( *verify_cmd )
            return do_verify( file, verify_flags, json, dump_invariants, out );
        if ( *bench_cmd )
            return do_bench( manifest, bench_flags, jobs, csv_path, out );
        return do_oracle( oracle_file, depth, state_cap, range, out );
    }
    catch ( const frontend_error& e )
    {
        const std::string& name = *verify_cmd ? file : oracle_file;
        err << name << ":" << e.pos().line << ":" << e.pos().column << ": " << to_string( e.category() )
            << " error: " << e.message() << "\n";
    }
    catch ( const engine::internal_error& e )
    {
        err << "internal error: " << e.what() << "\n";
    }
    catch ( const std::exception& e )
    {
        err << "error: " << e.what() << "\n";
    }
    return exit_error;
}

} // namespace bikind::cli
