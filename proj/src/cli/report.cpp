#include "bikind/bv.hpp"
#include "bikind/cli/cli.hpp"
#include "bikind/frontend/parser.hpp"
#include "bikind/solver/trace.hpp"

#include <fstream>
#include <sstream>

namespace bikind::cli
{

int exit_code_for( engine::verdict_kind v )
{
    switch ( v )
    {
    case engine::verdict_kind::safe: return exit_safe;
    case engine::verdict_kind::unsafe: return exit_unsafe;
    case engine::verdict_kind::unknown: return exit_unknown;
    }
    return exit_error;
}

cfg load_program( const std::filesystem::path& path )
{
    std::ifstream in( path );
    if ( !in )
        throw std::runtime_error( "cannot read " + path.string() );
    std::stringstream text;
    text << in.rdbuf();
    return lower_to_cfg( parse( text.str() ) );
}

namespace
{

nlohmann::ordered_json value_json( std::uint64_t v, const state_var& var )
{
    if ( var.is_signed )
        return bv::to_signed( v, var.width );
    return v;
}

} // namespace

nlohmann::ordered_json trace_to_json( const trace& t, const transition_system& ts )
{
    nlohmann::ordered_json states = nlohmann::ordered_json::array();
    for ( const auto& s : t.states )
    {
        nlohmann::ordered_json values = nlohmann::ordered_json::object();
        for ( std::size_t v = 1; v < ts.state_vars.size(); ++v )
            values[ ts.state_vars[ v ].name ] = value_json( s.values[ v ], ts.state_vars[ v ] );
        nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
        for ( std::size_t i = 0; i < s.inputs.size(); ++i )
            inputs[ ts.inputs[ i ].name ] = value_json( s.inputs[ i ], ts.inputs[ i ] );
        states.push_back( { { "k", s.step },
                            { "pc", ts.graph.location_name( s.pc() ) },
                            { "values", values },
                            { "inputs", inputs } } );
    }
    nlohmann::ordered_json out;
    out[ "kind" ] = t.kind == trace_kind::full ? "full" : "partial";
    out[ "join" ] = t.join ? nlohmann::ordered_json( *t.join ) : nlohmann::ordered_json();
    out[ "states" ] = states;
    return out;
}

run_report verify( const std::filesystem::path& file, const run_config& config )
{
    const auto start = std::chrono::steady_clock::now();
    const cfg g = load_program( file );
    const transition_system ts = compile( g );
    auto solver = make_backend( config.solver );

    engine::verifier v( ts, *solver, config.engine );
    run_report r;
    r.file = file.string();
    r.strategy = engine::to_string( config.engine.strat );
    r.invariants = config.engine.use_invariants ? "intervals" : "none";
    r.solver = solver->id();
    r.k_max = config.engine.k_max;
    r.verdict = v.run();
    r.timings = v.timings();
    if ( r.verdict.cex )
    {
        r.trace_text = format_trace( *r.verdict.cex, ts );
        r.trace_json = trace_to_json( *r.verdict.cex, ts );
    }
    if ( config.engine.use_invariants )
        r.invariants_json = nlohmann::ordered_json::parse( intervals::to_json( v.invariants(), g ) );
    r.wall_ms = std::chrono::duration< double, std::milli >( std::chrono::steady_clock::now() - start ).count();
    return r;
}

nlohmann::ordered_json to_json( const run_report& r, bool with_timings )
{
    nlohmann::ordered_json j;
    j[ "schema" ] = 1;
    j[ "file" ] = r.file;
    j[ "strategy" ] = r.strategy;
    j[ "invariants" ] = r.invariants;
    j[ "solver" ] = r.solver;
    j[ "k_max" ] = r.k_max;
    j[ "verdict" ] = engine::to_string( r.verdict.kind );
    j[ "iterations_used" ] = r.verdict.k;
    if ( r.verdict.kind == engine::verdict_kind::safe )
        j[ "proved_by" ] = engine::to_string( r.verdict.by );
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for ( const auto& t : r.timings )
    {
        nlohmann::ordered_json c{ { "k", t.k }, { "check", t.check }, { "result", to_string( t.result ) } };
        if ( with_timings )
            c[ "ms" ] = t.ms;
        checks.push_back( c );
    }
    j[ "checks" ] = checks;
    if ( with_timings )
        j[ "wall_ms" ] = r.wall_ms;
    if ( r.verdict.cex )
        j[ "trace" ] = r.trace_json;
    return j;
}

} // namespace bikind::cli
