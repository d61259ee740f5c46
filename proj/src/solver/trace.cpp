#include "bikind/solver/trace.hpp"

#include "bikind/bv.hpp"

#include <sstream>

namespace bikind
{

namespace
{

std::uint64_t lookup( const smt::model& m, const std::string& name, int step )
{
    auto it = m.find( { name, step } );
    if ( it == m.end() )
        throw extraction_error( "model has no value for " + smt::to_string( smt::var_key{ name, step } ) );
    return it->second;
}

std::string value_text( std::uint64_t v, const state_var& sv )
{
    if ( sv.is_signed )
        return std::to_string( bv::to_signed( v, sv.width ) );
    return std::to_string( v );
}

} // namespace

trace extract_trace( const smt::model& m, const transition_system& ts, int steps, trace_kind kind )
{
    trace t;
    t.kind = kind;
    for ( int i = 0; i <= steps; ++i )
    {
        trace_state s;
        s.step = i;
        for ( const auto& v : ts.state_vars )
            s.values.push_back( lookup( m, v.name, i ) );
        if ( i < steps )
            for ( const auto& in : ts.inputs )
                s.inputs.push_back( lookup( m, in.name, i ) );
        const bool error = s.pc() == cfg::error;
        t.states.push_back( std::move( s ) );
        if ( error )
            break;
    }
    t.states.back().inputs.clear();
    return t;
}

std::string format_trace( const trace& t, const transition_system& ts )
{
    std::ostringstream out;
    for ( std::size_t i = 0; i < t.states.size(); ++i )
    {
        const auto& s = t.states[ i ];
        out << "k=" << s.step << " pc=" << ts.graph.location_name( s.pc() );
        for ( std::size_t v = 1; v < ts.state_vars.size(); ++v )
            out << " " << ts.state_vars[ v ].name << "=" << value_text( s.values[ v ], ts.state_vars[ v ] );
        std::vector< std::string > used;
        for ( std::size_t in = 0; in < s.inputs.size(); ++in )
            used.push_back( ts.inputs[ in ].name + "=" + value_text( s.inputs[ in ], ts.inputs[ in ] ) );
        if ( !used.empty() )
        {
            out << " [";
            for ( std::size_t u = 0; u < used.size(); ++u )
                out << ( u ? " " : "" ) << used[ u ];
            out << "]";
        }
        if ( t.join && *t.join == i )
            out << "  <- join: backward counterexample starts here";
        out << "\n";
    }
    return out.str();
}

} // namespace bikind
