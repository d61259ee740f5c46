#include "bikind/oracle/oracle.hpp"

#include "bikind/bv.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace bikind::oracle
{

std::uint64_t evaluate( const expr& e, const std::vector< std::uint64_t >& values )
{
    switch ( e.k )
    {
    case expr::kind::int_lit:
    case expr::kind::bool_lit: return e.value;
    case expr::kind::var: return values.at( e.var );
    case expr::kind::unary:
    {
        const auto a = evaluate( *e.lhs, values );
        switch ( e.uop )
        {
        case unary_op::neg: return bv::neg( a, e.type->width );
        case unary_op::bnot: return bv::bnot( a, e.type->width );
        case unary_op::lnot: return a ? 0 : 1;
        }
        break;
    }
    case expr::kind::binary:
    {
        if ( e.bop == binary_op::land )
            return evaluate( *e.lhs, values ) && evaluate( *e.rhs, values );
        if ( e.bop == binary_op::lor )
            return evaluate( *e.lhs, values ) || evaluate( *e.rhs, values );
        const auto a = evaluate( *e.lhs, values );
        const auto b = evaluate( *e.rhs, values );
        const unsigned w = e.lhs->type->width;
        const bool s = e.lhs->type->is_signed;
        switch ( e.bop )
        {
        case binary_op::add: return bv::add( a, b, w );
        case binary_op::sub: return bv::sub( a, b, w );
        case binary_op::mul: return bv::mul( a, b, w );
        case binary_op::div: return s ? bv::sdiv( a, b, w ) : bv::udiv( a, b, w );
        case binary_op::mod: return s ? bv::srem( a, b, w ) : bv::urem( a, b, w );
        case binary_op::band: return bv::band( a, b, w );
        case binary_op::bor: return bv::bor( a, b, w );
        case binary_op::bxor: return bv::bxor( a, b, w );
        case binary_op::shl: return bv::shl( a, b, w );
        case binary_op::shr: return s ? bv::ashr( a, b, w ) : bv::lshr( a, b, w );
        case binary_op::eq: return a == b;
        case binary_op::ne: return a != b;
        case binary_op::lt: return s ? bv::slt( a, b, w ) : bv::ult( a, b, w );
        case binary_op::le: return s ? bv::sle( a, b, w ) : bv::ule( a, b, w );
        case binary_op::gt: return s ? bv::slt( b, a, w ) : bv::ult( b, a, w );
        case binary_op::ge: return s ? bv::sle( b, a, w ) : bv::ule( b, a, w );
        default: break;
        }
        break;
    }
    }
    return 0;
}

namespace
{

std::vector< std::uint64_t > domain_of( int_type t, const input_domain& dom )
{
    const std::uint64_t max = bv::mask( t.width );
    std::vector< std::uint64_t > out;
    if ( dom.range )
    {
        for ( std::uint64_t v = dom.range->first; v <= std::min( dom.range->second, max ); ++v )
            out.push_back( v );
        return out;
    }
    if ( t.width >= 64 || ( std::uint64_t{ 1 } << t.width ) > dom.fanout_cap )
        throw fanout_exceeded( "havoc of a " + to_string( t ) + " exceeds the enumeration cap" );
    for ( std::uint64_t v = 0; v <= max; ++v )
        out.push_back( v );
    return out;
}

// Applies one edge; `pick` supplies the value of each havoc input.
template < typename Pick >
void apply_edge( const edge& e, const concrete_state& s, Pick pick, std::vector< concrete_state >& out,
                 std::vector< std::pair< std::size_t, std::uint64_t > >* chosen = nullptr )
{
    if ( !evaluate( *e.guard, s.values ) )
        return;
    concrete_state next{ e.to, s.values };
    std::vector< std::size_t > havocs;
    for ( const auto& u : e.updates )
    {
        if ( u.input )
            havocs.push_back( u.var );
        else
            next.values[ u.var ] = evaluate( *u.value, s.values );
    }
    if ( havocs.empty() )
    {
        out.push_back( std::move( next ) );
        return;
    }
    // Havoc edges carry exactly one havoc update.
    const update* h = nullptr;
    for ( const auto& u : e.updates )
        if ( u.input )
            h = &u;
    for ( std::uint64_t v : pick( *h ) )
    {
        next.values[ h->var ] = v;
        out.push_back( next );
        if ( chosen )
            chosen->push_back( { *h->input, v } );
    }
}

void macro_walk( const concrete_state& from, const cfg& g,
                 const std::function< std::vector< std::uint64_t >( const update& ) >& pick,
                 std::vector< macro_step >& out )
{
    if ( g.is_terminal( from.pc ) )
    {
        out.push_back( { from, std::vector< std::uint64_t >( g.inputs.size(), 0 ) } );
        return;
    }
    std::function< void( const concrete_state&, std::vector< std::uint64_t >& ) > walk =
        [ & ]( const concrete_state& s, std::vector< std::uint64_t >& inputs ) {
            for ( auto ei : g.out[ s.pc ] )
            {
                std::vector< concrete_state > next;
                std::vector< std::pair< std::size_t, std::uint64_t > > chosen;
                apply_edge( g.edges[ ei ], s, pick, next, &chosen );
                for ( std::size_t i = 0; i < next.size(); ++i )
                {
                    auto saved = inputs;
                    if ( !chosen.empty() )
                        inputs[ chosen[ i ].first ] = chosen[ i ].second;
                    if ( g.is_cutpoint( next[ i ].pc ) )
                        out.push_back( { next[ i ], inputs } );
                    else
                        walk( next[ i ], inputs );
                    inputs = std::move( saved );
                }
            }
        };
    std::vector< std::uint64_t > inputs( g.inputs.size(), 0 );
    walk( from, inputs );
}

bool satisfies_init( const concrete_state& s, const cfg& g )
{
    if ( s.pc != cfg::entry || s.values.size() != g.vars.size() )
        return false;
    for ( std::size_t v = 0; v < g.vars.size(); ++v )
    {
        if ( s.values[ v ] != bv::trunc( s.values[ v ], g.vars[ v ].type.width ) )
            return false;
        if ( g.vars[ v ].init && s.values[ v ] != *g.vars[ v ].init )
            return false;
    }
    return true;
}

} // namespace

std::vector< concrete_state > successors( const concrete_state& s, const cfg& g, const input_domain& dom )
{
    std::vector< concrete_state > out;
    for ( auto ei : g.out[ s.pc ] )
        apply_edge( g.edges[ ei ], s, [ & ]( const update& u ) { return domain_of( g.vars[ u.var ].type, dom ); },
                    out );
    return out;
}

std::vector< concrete_state > successors( const concrete_state& s, const cfg& g,
                                          const std::vector< std::uint64_t >& inputs )
{
    std::vector< concrete_state > out;
    for ( auto ei : g.out[ s.pc ] )
        apply_edge(
            g.edges[ ei ], s,
            [ & ]( const update& u ) {
                return std::vector< std::uint64_t >{ bv::trunc( inputs.at( *u.input ), g.vars[ u.var ].type.width ) };
            },
            out );
    return out;
}

std::vector< macro_step > macro_successors( const concrete_state& s, const cfg& g, const input_domain& dom )
{
    std::vector< macro_step > out;
    macro_walk( s, g, [ & ]( const update& u ) { return domain_of( g.vars[ u.var ].type, dom ); }, out );
    return out;
}

const char* to_string( bfs_verdict v )
{
    switch ( v )
    {
    case bfs_verdict::safe_within_cap: return "safe-within-cap";
    case bfs_verdict::safe: return "safe";
    case bfs_verdict::unsafe: return "unsafe";
    case bfs_verdict::cap_exceeded: return "cap-exceeded";
    }
    return "?";
}

std::vector< concrete_state > initial_states( const cfg& g, const input_domain& dom )
{
    std::vector< concrete_state > states{ { cfg::entry, std::vector< std::uint64_t >( g.vars.size(), 0 ) } };
    for ( std::size_t v = 0; v < g.vars.size(); ++v )
    {
        if ( g.vars[ v ].init )
        {
            for ( auto& s : states )
                s.values[ v ] = *g.vars[ v ].init;
            continue;
        }
        const auto values = domain_of( g.vars[ v ].type, dom );
        std::vector< concrete_state > expanded;
        for ( const auto& s : states )
            for ( auto x : values )
            {
                expanded.push_back( s );
                expanded.back().values[ v ] = x;
            }
        if ( expanded.size() > dom.fanout_cap )
            throw fanout_exceeded( "too many initial states" );
        states = std::move( expanded );
    }
    return states;
}

trace_state to_trace_state( const concrete_state& s, int step )
{
    trace_state t;
    t.step = step;
    t.values.push_back( s.pc );
    t.values.insert( t.values.end(), s.values.begin(), s.values.end() );
    return t;
}

concrete_state from_trace_state( const trace_state& s )
{
    return { s.pc(), std::vector< std::uint64_t >( s.values.begin() + 1, s.values.end() ) };
}

bfs_result bfs( const cfg& g, const bfs_limits& limits )
{
    bfs_result r;
    r.restricted = limits.inputs.range.has_value();

    struct origin
    {
        std::optional< concrete_state > parent;
        std::vector< std::uint64_t > inputs;
    };
    std::map< concrete_state, origin > seen;
    std::vector< concrete_state > frontier;
    try
    {
        for ( auto& s : initial_states( g, limits.inputs ) )
            if ( seen.emplace( s, origin{} ).second )
                frontier.push_back( s );

        // Depth counts transitions; k* = transitions - 1 loop-head visits.
        for ( int depth = 1; depth <= limits.depth_cap + 1; ++depth )
        {
            std::vector< concrete_state > next;
            for ( const auto& s : frontier )
            {
                if ( g.is_terminal( s.pc ) )
                    continue;
                for ( auto& step : macro_successors( s, g, limits.inputs ) )
                {
                    if ( !seen.emplace( step.to, origin{ s, step.inputs } ).second )
                        continue;
                    if ( step.to.pc == cfg::error )
                    {
                        std::vector< trace_state > states;
                        std::optional< concrete_state > cur = step.to;
                        std::vector< std::uint64_t > out_inputs;
                        while ( cur )
                        {
                            const origin& o = seen.at( *cur );
                            states.push_back( to_trace_state( *cur, 0 ) );
                            states.back().inputs = out_inputs;
                            out_inputs = o.inputs;
                            cur = o.parent;
                        }
                        std::reverse( states.begin(), states.end() );
                        for ( std::size_t i = 0; i < states.size(); ++i )
                            states[ i ].step = static_cast< int >( i );
                        r.verdict = bfs_verdict::unsafe;
                        r.k_star = std::max( 1, depth - 1 );
                        r.shortest = { trace_kind::full, std::move( states ), std::nullopt };
                        r.depth = depth;
                        r.states = seen.size();
                        return r;
                    }
                    next.push_back( step.to );
                    if ( seen.size() > limits.state_cap )
                    {
                        r.verdict = bfs_verdict::cap_exceeded;
                        r.detail = "state cap exceeded";
                        r.states = seen.size();
                        r.depth = depth;
                        return r;
                    }
                }
            }
            r.depth = depth;
            frontier = std::move( next );
            if ( frontier.empty() )
            {
                r.verdict = bfs_verdict::safe;
                r.states = seen.size();
                return r;
            }
        }
    }
    catch ( const fanout_exceeded& e )
    {
        r.verdict = bfs_verdict::cap_exceeded;
        r.detail = e.what();
        r.states = seen.size();
        return r;
    }
    r.verdict = bfs_verdict::safe_within_cap;
    r.states = seen.size();
    return r;
}

std::optional< int > exit_depth( const cfg& g, const bfs_limits& limits )
{
    std::set< concrete_state > layer;
    for ( auto& s : initial_states( g, limits.inputs ) )
        layer.insert( s );
    for ( int transitions = 1; transitions <= limits.depth_cap + 1; ++transitions )
    {
        std::set< concrete_state > next;
        for ( const auto& s : layer )
            for ( auto& step : macro_successors( s, g, limits.inputs ) )
                next.insert( std::move( step.to ) );
        if ( next.size() > limits.state_cap )
            return std::nullopt;
        layer = std::move( next );
        const bool all_exit =
            std::all_of( layer.begin(), layer.end(), []( const concrete_state& s ) { return s.pc == cfg::exit; } );
        if ( transitions >= 2 && all_exit )
            return transitions - 1;
    }
    return std::nullopt;
}

replay_result replay( const trace& t, const cfg& g )
{
    auto invalid = []( std::size_t i, std::string why ) { return replay_result{ false, i, std::move( why ) }; };
    if ( t.states.empty() )
        return invalid( 0, "empty trace" );
    for ( std::size_t i = 0; i < t.states.size(); ++i )
    {
        const auto& s = t.states[ i ];
        if ( s.values.size() != g.vars.size() + 1 )
            return invalid( i, "state has the wrong number of variables" );
        if ( s.pc() >= g.num_locations || !g.is_cutpoint( s.pc() ) )
            return invalid( i, "pc is not a cutpoint" );
        for ( std::size_t v = 0; v < g.vars.size(); ++v )
            if ( s.values[ v + 1 ] != bv::trunc( s.values[ v + 1 ], g.vars[ v ].type.width ) )
                return invalid( i, "value out of range for " + g.vars[ v ].name );
        if ( s.pc() == cfg::error && i + 1 != t.states.size() )
            return invalid( i, "error state before the end of the trace" );
    }
    if ( t.kind == trace_kind::full && !satisfies_init( from_trace_state( t.states[ 0 ] ), g ) )
        return invalid( 0, "first state is not initial" );

    for ( std::size_t i = 0; i + 1 < t.states.size(); ++i )
    {
        const auto& s = t.states[ i ];
        std::vector< std::uint64_t > inputs = s.inputs;
        if ( inputs.empty() )
            inputs.assign( g.inputs.size(), 0 );
        if ( inputs.size() != g.inputs.size() )
            return invalid( i, "wrong number of recorded inputs" );
        std::vector< macro_step > steps;
        macro_walk(
            from_trace_state( s ), g,
            [ & ]( const update& u ) {
                return std::vector< std::uint64_t >{ bv::trunc( inputs[ *u.input ], g.vars[ u.var ].type.width ) };
            },
            steps );
        const auto want = from_trace_state( t.states[ i + 1 ] );
        const bool connected =
            std::any_of( steps.begin(), steps.end(), [ & ]( const macro_step& m ) { return m.to == want; } );
        if ( !connected )
            return invalid( i + 1, "no connecting edge" );
    }
    return {};
}

} // namespace bikind::oracle
