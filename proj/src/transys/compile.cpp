#include "bikind/transys/transys.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <stdexcept>

namespace bikind
{

using namespace smt;

namespace
{

term translate( const expr& e, const std::vector< term >& env )
{
    switch ( e.k )
    {
    case expr::kind::bool_lit: return bool_val( e.value != 0 );
    case expr::kind::int_lit: return bv_val( e.value, e.type->width );
    case expr::kind::var: return env.at( e.var );
    case expr::kind::unary:
    {
        const term a = translate( *e.lhs, env );
        switch ( e.uop )
        {
        case unary_op::neg: return mk_app( op::bvneg, a );
        case unary_op::bnot: return mk_app( op::bvnot, a );
        case unary_op::lnot: return mk_not( a );
        }
        break;
    }
    case expr::kind::binary:
    {
        const term a = translate( *e.lhs, env );
        const term b = translate( *e.rhs, env );
        const bool is_signed = e.lhs->type && e.lhs->type->is_signed;
        switch ( e.bop )
        {
        case binary_op::add: return mk_app( op::add, a, b );
        case binary_op::sub: return mk_app( op::sub, a, b );
        case binary_op::mul: return mk_app( op::mul, a, b );
        case binary_op::div: return mk_app( is_signed ? op::sdiv : op::udiv, a, b );
        case binary_op::mod: return mk_app( is_signed ? op::srem : op::urem, a, b );
        case binary_op::band: return mk_app( op::bvand, a, b );
        case binary_op::bor: return mk_app( op::bvor, a, b );
        case binary_op::bxor: return mk_app( op::bvxor, a, b );
        case binary_op::shl: return mk_app( op::shl, a, b );
        case binary_op::shr: return mk_app( is_signed ? op::ashr : op::lshr, a, b );
        case binary_op::eq: return mk_eq( a, b );
        case binary_op::ne: return mk_ne( a, b );
        case binary_op::lt: return mk_app( is_signed ? op::slt : op::ult, a, b );
        case binary_op::le: return mk_app( is_signed ? op::sle : op::ule, a, b );
        case binary_op::gt: return mk_app( is_signed ? op::slt : op::ult, b, a );
        case binary_op::ge: return mk_app( is_signed ? op::sle : op::ule, b, a );
        case binary_op::land: return mk_and( a, b );
        case binary_op::lor: return mk_or( a, b );
        }
        break;
    }
    }
    throw std::logic_error( "translate: malformed expression" );
}

struct region_exit
{
    term cond;
    std::vector< term > env;
    location target;
};

// Symbolically executes every path from cutpoint `from` up to the next
// cutpoints. Path conditions are pairwise exclusive because the guards
// leaving any location are.
std::vector< region_exit > explore( const transition_system& ts, location from )
{
    const cfg& g = ts.graph;

    std::vector< location > order;
    {
        std::vector< bool > seen( g.num_locations, false );
        std::function< void( location ) > dfs = [ & ]( location l ) {
            seen[ l ] = true;
            for ( auto ei : g.out[ l ] )
            {
                const location to = g.edges[ ei ].to;
                if ( !g.is_cutpoint( to ) && !seen[ to ] )
                    dfs( to );
            }
            order.push_back( l );
        };
        dfs( from );
        std::reverse( order.begin(), order.end() );
    }

    struct pending
    {
        term reach;
        std::vector< term > env;
    };
    std::map< location, pending > at;
    {
        std::vector< term > env;
        for ( std::size_t v = 0; v < g.vars.size(); ++v )
            env.push_back( ts.state( v + 1, 0 ) );
        at[ from ] = { bool_val( true ), std::move( env ) };
    }

    std::vector< region_exit > exits;
    for ( location l : order )
    {
        auto it = at.find( l );
        if ( it == at.end() )
            continue;
        const pending here = std::move( it->second );
        at.erase( it );

        for ( auto ei : g.out[ l ] )
        {
            const edge& e = g.edges[ ei ];
            const term cond = mk_and( here.reach, translate( *e.guard, here.env ) );
            if ( cond->o == op::bool_const && !cond->value )
                continue;
            std::vector< term > env = here.env;
            for ( const auto& u : e.updates )
                env[ u.var ] = u.input ? ts.input( *u.input, 0 ) : translate( *u.value, here.env );

            if ( g.is_cutpoint( e.to ) )
            {
                exits.push_back( { cond, std::move( env ), e.to } );
                continue;
            }
            auto [ slot, fresh ] = at.try_emplace( e.to );
            if ( fresh )
            {
                slot->second = { cond, std::move( env ) };
                continue;
            }
            auto& p = slot->second;
            for ( std::size_t v = 0; v < env.size(); ++v )
                p.env[ v ] = mk_ite( cond, env[ v ], p.env[ v ] );
            p.reach = mk_or( p.reach, cond );
        }
    }
    return exits;
}

} // namespace

term transition_system::pc( int step ) const { return var( "pc", pc_width, step ); }

term transition_system::state( std::size_t index, int step ) const
{
    const auto& v = state_vars.at( index );
    return var( v.name, v.width, step );
}

term transition_system::input( std::size_t index, int step ) const
{
    const auto& v = inputs.at( index );
    return var( v.name, v.width, step );
}

std::vector< var_decl > transition_system::declarations( int last_step ) const
{
    std::vector< var_decl > out;
    for ( int s = 0; s <= last_step; ++s )
    {
        for ( const auto& v : state_vars )
            out.push_back( { v.name, s, v.width } );
        if ( s < last_step )
            for ( const auto& v : inputs )
                out.push_back( { v.name, s, v.width } );
    }
    return out;
}

transition_system compile( const cfg& g )
{
    transition_system ts;
    ts.graph = g;
    ts.pc_width = std::max( 1u, static_cast< unsigned >( std::bit_width( g.num_locations - 1 ) ) );

    ts.state_vars.push_back( { "pc", ts.pc_width, false } );
    for ( const auto& v : g.vars )
        ts.state_vars.push_back( { v.name, v.type.width, v.type.is_signed } );
    for ( const auto& in : g.inputs )
        ts.inputs.push_back( { in.name, g.vars[ in.var ].type.width, g.vars[ in.var ].type.is_signed } );

    auto pc_is = [ & ]( location l, int step ) { return mk_eq( ts.pc( step ), bv_val( l, ts.pc_width ) ); };

    std::vector< term > init{ pc_is( cfg::entry, 0 ) };
    for ( std::size_t v = 0; v < g.vars.size(); ++v )
        if ( g.vars[ v ].init )
            init.push_back( mk_eq( ts.state( v + 1, 0 ), bv_val( *g.vars[ v ].init, g.vars[ v ].type.width ) ) );
    ts.init = mk_and( init );

    ts.safety = mk_not( pc_is( cfg::error, 0 ) );
    ts.threshold = pc_is( cfg::exit, 0 );

    std::vector< term > heads, normal;
    for ( std::size_t h = 0; h < g.loop_heads.size(); ++h )
    {
        heads.push_back( pc_is( g.loop_heads[ h ], 0 ) );
        std::vector< term > zeros;
        for ( auto v : g.reset_at_head[ h ] )
            zeros.push_back( mk_eq( ts.state( v + 1, 0 ), bv_val( 0, g.vars[ v ].type.width ) ) );
        normal.push_back( mk_implies( heads.back(), mk_and( zeros ) ) );
    }
    ts.at_loop_head = mk_or( heads );
    ts.normal_form = mk_and( normal );

    // Next-state terms default to the identity, which is also what exit and
    // error do.
    const std::size_t n = ts.state_vars.size();
    std::vector< term > next( n );
    for ( std::size_t i = 0; i < n; ++i )
        next[ i ] = ts.state( i, 0 );
    std::vector< term > enabled{ pc_is( cfg::exit, 0 ), pc_is( cfg::error, 0 ) };

    std::vector< location > sources{ cfg::entry };
    sources.insert( sources.end(), g.loop_heads.begin(), g.loop_heads.end() );
    for ( auto it = sources.rbegin(); it != sources.rend(); ++it )
    {
        const location c = *it;
        const auto exits = explore( ts, c );
        if ( exits.empty() )
            continue;

        std::vector< term > local( n );
        local[ 0 ] = bv_val( exits.back().target, ts.pc_width );
        for ( std::size_t v = 1; v < n; ++v )
            local[ v ] = exits.back().env[ v - 1 ];
        std::vector< term > conds;
        for ( auto x = exits.rbegin(); x != exits.rend(); ++x )
        {
            conds.push_back( x->cond );
            if ( x == exits.rbegin() )
                continue;
            local[ 0 ] = mk_ite( x->cond, bv_val( x->target, ts.pc_width ), local[ 0 ] );
            for ( std::size_t v = 1; v < n; ++v )
                local[ v ] = mk_ite( x->cond, x->env[ v - 1 ], local[ v ] );
        }

        const term here = pc_is( c, 0 );
        enabled.push_back( mk_and( here, mk_or( conds ) ) );
        for ( std::size_t v = 0; v < n; ++v )
            next[ v ] = mk_ite( here, local[ v ], next[ v ] );
    }

    std::vector< term > trans{ mk_or( enabled ) };
    for ( std::size_t v = 0; v < n; ++v )
        trans.push_back( mk_eq( ts.state( v, 1 ), next[ v ] ) );
    ts.trans = mk_and( trans );
    return ts;
}

namespace
{

std::vector< term > unroll( const transition_system& ts, int transitions )
{
    std::vector< term > parts;
    for ( int i = 0; i < transitions; ++i )
        parts.push_back( at_step( ts.trans, i ) );
    return parts;
}

} // namespace

query encode_base_case( const transition_system& ts, int k )
{
    auto parts = unroll( ts, k + 1 );
    parts.insert( parts.begin(), ts.init );
    std::vector< term > bad;
    for ( int i = 0; i <= k + 1; ++i )
        bad.push_back( mk_not( at_step( ts.safety, i ) ) );
    parts.push_back( mk_or( bad ) );
    return { ts.declarations( k + 1 ), mk_and( parts ) };
}

query encode_forward_condition( const transition_system& ts, int k )
{
    auto parts = unroll( ts, k + 1 );
    parts.insert( parts.begin(), ts.init );
    parts.push_back( mk_not( at_step( ts.threshold, k + 1 ) ) );
    return { ts.declarations( k + 1 ), mk_and( parts ) };
}

query encode_inductive_step( const transition_system& ts, int k, const term& invariant )
{
    std::vector< term > parts{ ts.at_loop_head, ts.normal_form };
    if ( invariant )
        parts.push_back( invariant );
    for ( int i = 0; i < k; ++i )
    {
        parts.push_back( at_step( ts.safety, i ) );
        parts.push_back( at_step( ts.trans, i ) );
    }
    parts.push_back( mk_not( at_step( ts.safety, k ) ) );
    return { ts.declarations( k ), mk_and( parts ) };
}

term state_equals( const transition_system& ts, int step, const std::vector< std::uint64_t >& values )
{
    std::vector< term > eqs;
    for ( std::size_t i = 0; i < ts.state_vars.size(); ++i )
        eqs.push_back( mk_eq( ts.state( i, step ), bv_val( values.at( i ), ts.state_vars[ i ].width ) ) );
    return mk_and( eqs );
}

query encode_reaches_any( const transition_system& ts, int k,
                          const std::vector< std::vector< std::uint64_t > >& targets )
{
    auto parts = unroll( ts, k + 1 );
    parts.insert( parts.begin(), ts.init );
    std::vector< term > hits;
    for ( int i = 0; i <= k + 1; ++i )
        for ( const auto& t : targets )
            hits.push_back( state_equals( ts, i, t ) );
    parts.push_back( mk_or( hits ) );
    return { ts.declarations( k + 1 ), mk_and( parts ) };
}

} // namespace bikind
