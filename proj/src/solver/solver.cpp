#include "bikind/solver/solver.hpp"

namespace bikind
{

const char* to_string( sat_status s )
{
    switch ( s )
    {
    case sat_status::sat: return "sat";
    case sat_status::unsat: return "unsat";
    case sat_status::unknown: return "unknown";
    }
    return "?";
}

const char* to_string( unknown_reason r )
{
    switch ( r )
    {
    case unknown_reason::none: return "none";
    case unknown_reason::timeout: return "timeout";
    case unknown_reason::process_failure: return "process-failure";
    case unknown_reason::too_large: return "too-large";
    }
    return "?";
}

std::unique_ptr< backend > make_backend( const std::string& spec )
{
    if ( spec == "builtin" )
        return make_builtin_backend();
    if ( spec == "enum" )
        return make_enum_backend();
    if ( spec.rfind( "cmd:", 0 ) == 0 && spec.size() > 4 )
        return make_external_backend( spec.substr( 4 ) );
    throw std::invalid_argument( "unknown solver '" + spec + "' (expected builtin, enum or cmd:<command>)" );
}

solve_result check_sat( backend& b, const smt::query& q, std::chrono::milliseconds budget )
{
    solve_result r = b.solve( q, budget );
    if ( !r.is_sat() )
    {
        r.model.clear();
        return r;
    }
    smt::model complete;
    for ( const auto& d : q.decls )
    {
        auto it = r.model.find( d.key() );
        complete[ d.key() ] = it == r.model.end() ? 0 : it->second;
    }
    // Symbols the formula mentions but the query forgot to declare.
    for ( const auto& d : smt::free_vars( q.formula ) )
        if ( !complete.count( d.key() ) )
        {
            auto it = r.model.find( d.key() );
            complete[ d.key() ] = it == r.model.end() ? 0 : it->second;
        }
    r.model = std::move( complete );
    if ( smt::evaluate( q.formula, r.model ) != 1 )
        throw model_validation_error( b.id() + " returned a model that falsifies the formula" );
    return r;
}

} // namespace bikind
