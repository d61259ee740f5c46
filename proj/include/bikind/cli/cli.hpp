#pragma once

#include "bikind/engine/engine.hpp"
#include "bikind/trace.hpp"
#include "bikind/transys/transys.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bikind::cli
{

enum exit_code
{
    exit_safe = 0,
    exit_error = 1,
    exit_unknown = 2,
    exit_unsafe = 10,
};

int exit_code_for( engine::verdict_kind v );

// Reads, parses and lowers a program. Throws std::runtime_error when the
// file cannot be read and frontend_error on bad input.
cfg load_program( const std::filesystem::path& path );

struct run_config
{
    engine::options engine;
    std::string solver = "builtin";
};

struct run_report
{
    std::string file;
    std::string strategy;
    std::string invariants;
    std::string solver;
    int k_max = 0;
    engine::verdict verdict;
    std::vector< engine::check_timing > timings;
    double wall_ms = 0;
    std::string trace_text; // unsafe only
    nlohmann::ordered_json trace_json;
    nlohmann::ordered_json invariants_json;
};

run_report verify( const std::filesystem::path& file, const run_config& config );

// Timings are left out when `with_timings` is false so the output can be
// compared byte for byte.
nlohmann::ordered_json to_json( const run_report& r, bool with_timings = true );

nlohmann::ordered_json trace_to_json( const trace& t, const transition_system& ts );

struct manifest_row
{
    std::string name;           // as written in the manifest
    std::filesystem::path path; // resolved against the manifest's directory
    std::string expected;       // safe or unsafe
    std::optional< int > k_star;
};

// `path,expected_verdict,expected_k_star` with a header line; blank lines
// and lines starting with '#' are skipped.
std::vector< manifest_row > read_manifest( const std::filesystem::path& manifest );

struct bench_row
{
    std::string file;
    std::string strategy;
    std::string invariants;
    std::string verdict;
    std::string expected;
    int iterations = 0;
    double wall_ms = 0;
};

struct bench_summary
{
    int correct_proofs = 0;
    int correct_alarms = 0;
    int incorrect_proofs = 0;
    int incorrect_alarms = 0;
    int unknown = 0;
    int errors = 0;
};

struct bench_config
{
    run_config run;
    unsigned jobs = 1;
};

// Every fixture under kind/bkind with and without invariants, in manifest
// order whatever the completion order.
std::vector< bench_row > bench( const std::vector< manifest_row >& rows, const bench_config& config );
bench_summary summarize( const std::vector< bench_row >& rows );
std::string to_csv( const std::vector< bench_row >& rows, bool with_wall_time = true );
std::string format_summary( const bench_summary& s );

// The whole command line; returns the process exit code.
int run( int argc, const char* const* argv, std::ostream& out, std::ostream& err );

} // namespace bikind::cli
