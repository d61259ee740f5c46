#include "bikind/cli/cli.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace bikind::cli
{

namespace
{

std::string trim( std::string s )
{
    const auto b = s.find_first_not_of( " \t\r" );
    if ( b == std::string::npos )
        return "";
    const auto e = s.find_last_not_of( " \t\r" );
    return s.substr( b, e - b + 1 );
}

std::vector< std::string > split_csv( const std::string& line )
{
    std::vector< std::string > fields;
    std::stringstream in( line );
    std::string f;
    while ( std::getline( in, f, ',' ) )
        fields.push_back( trim( f ) );
    if ( !line.empty() && line.back() == ',' )
        fields.emplace_back();
    return fields;
}

struct cell
{
    const manifest_row* row;
    engine::strategy strat;
    bool invariants;
};

bench_row run_cell( const cell& c, const run_config& base )
{
    bench_row out;
    out.file = c.row->name;
    out.strategy = engine::to_string( c.strat );
    out.invariants = c.invariants ? "intervals" : "none";
    out.expected = c.row->expected;

    run_config config = base;
    config.engine.strat = c.strat;
    config.engine.use_invariants = c.invariants;
    const auto start = std::chrono::steady_clock::now();
    try
    {
        const run_report r = verify( c.row->path, config );
        out.verdict = engine::to_string( r.verdict.kind );
        out.iterations = r.verdict.k;
    }
    catch ( const std::exception& )
    {
        out.verdict = "error";
    }
    out.wall_ms = std::chrono::duration< double, std::milli >( std::chrono::steady_clock::now() - start ).count();
    return out;
}

} // namespace

std::vector< manifest_row > read_manifest( const std::filesystem::path& manifest )
{
    std::ifstream in( manifest );
    if ( !in )
        throw std::runtime_error( "cannot read " + manifest.string() );
    const auto dir = manifest.parent_path();
    std::vector< manifest_row > rows;
    std::string line;
    int number = 0;
    bool header = true;
    while ( std::getline( in, line ) )
    {
        ++number;
        line = trim( line );
        if ( line.empty() || line[ 0 ] == '#' )
            continue;
        if ( header )
        {
            header = false;
            if ( line.rfind( "path,", 0 ) == 0 )
                continue;
        }
        const auto f = split_csv( line );
        const auto where = manifest.string() + ":" + std::to_string( number ) + ": ";
        if ( f.size() != 3 )
            throw std::runtime_error( where + "expected 3 fields" );
        if ( f[ 1 ] != "safe" && f[ 1 ] != "unsafe" )
            throw std::runtime_error( where + "expected verdict must be safe or unsafe" );
        manifest_row r;
        r.name = f[ 0 ];
        r.path = dir / f[ 0 ];
        r.expected = f[ 1 ];
        if ( !f[ 2 ].empty() )
        {
            try
            {
                r.k_star = std::stoi( f[ 2 ] );
            }
            catch ( const std::exception& )
            {
                throw std::runtime_error( where + "bad k*: " + f[ 2 ] );
            }
        }
        rows.push_back( std::move( r ) );
    }
    return rows;
}

std::vector< bench_row > bench( const std::vector< manifest_row >& rows, const bench_config& config )
{
    std::vector< cell > cells;
    for ( const auto& r : rows )
        for ( auto strat : { engine::strategy::kind, engine::strategy::bkind } )
            for ( bool inv : { false, true } )
                cells.push_back( { &r, strat, inv } );

    std::vector< bench_row > out( cells.size() );
    std::atomic< std::size_t > next{ 0 };
    auto worker = [ & ]
    {
        for ( std::size_t i; ( i = next++ ) < cells.size(); )
            out[ i ] = run_cell( cells[ i ], config.run );
    };
    const unsigned n = std::max( 1u, std::min< unsigned >( config.jobs, static_cast< unsigned >( cells.size() ) ) );
    std::vector< std::jthread > pool;
    for ( unsigned t = 1; t < n; ++t )
        pool.emplace_back( worker );
    worker();
    return out;
}

bench_summary summarize( const std::vector< bench_row >& rows )
{
    bench_summary s;
    for ( const auto& r : rows )
    {
        if ( r.verdict == "safe" )
            ++( r.expected == "safe" ? s.correct_proofs : s.incorrect_proofs );
        else if ( r.verdict == "unsafe" )
            ++( r.expected == "unsafe" ? s.correct_alarms : s.incorrect_alarms );
        else if ( r.verdict == "unknown" )
            ++s.unknown;
        else
            ++s.errors;
    }
    return s;
}

std::string to_csv( const std::vector< bench_row >& rows, bool with_wall_time )
{
    std::ostringstream out;
    out << "file,strategy,invariants,verdict,expected,iterations,wall_ms\n";
    for ( const auto& r : rows )
    {
        out << r.file << ',' << r.strategy << ',' << r.invariants << ',' << r.verdict << ',' << r.expected << ','
            << r.iterations << ',';
        if ( with_wall_time )
            out << std::fixed << std::setprecision( 1 ) << r.wall_ms;
        out << '\n';
    }
    return out.str();
}

std::string format_summary( const bench_summary& s )
{
    std::ostringstream out;
    out << "correct proofs    " << s.correct_proofs << "\n"
        << "correct alarms    " << s.correct_alarms << "\n"
        << "incorrect proofs  " << s.incorrect_proofs << "\n"
        << "incorrect alarms  " << s.incorrect_alarms << "\n"
        << "unknown           " << s.unknown << "\n";
    if ( s.errors )
        out << "errors            " << s.errors << "\n";
    return out.str();
}

} // namespace bikind::cli
