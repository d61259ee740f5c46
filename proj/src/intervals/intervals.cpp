#include "bikind/intervals/intervals.hpp"

#include "bikind/bv.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <set>

namespace bikind::intervals
{

namespace
{

using i128 = __int128;

std::int64_t type_min( int_type t ) { return to_math( bv::min_value( t.width, t.is_signed ), t ); }
std::int64_t type_max( int_type t ) { return to_math( bv::max_value( t.width, t.is_signed ), t ); }

interval join( const interval& a, const interval& b ) { return { std::min( a.lo, b.lo ), std::max( a.hi, b.hi ) }; }

env join( const env& a, const env& b )
{
    if ( !a )
        return b;
    if ( !b )
        return a;
    std::vector< interval > r( a->size() );
    for ( std::size_t i = 0; i < r.size(); ++i )
        r[ i ] = join( ( *a )[ i ], ( *b )[ i ] );
    return r;
}

bool singleton( const interval& i ) { return i.lo == i.hi; }

class evaluator
{
public:
    interval eval( const expr& e, const std::vector< interval >& env ) const
    {
        const int_type t = *e.type;
        const interval all = top( t );
        switch ( e.k )
        {
        case expr::kind::int_lit:
        {
            const auto v = to_math( e.value, t );
            return { v, v };
        }
        case expr::kind::var: return env[ e.var ];
        case expr::kind::unary:
        {
            const interval a = eval( *e.lhs, env );
            if ( !singleton( a ) )
                return all;
            const auto bits = to_bits( a.lo, t );
            const auto r = to_math( e.uop == unary_op::neg ? bv::neg( bits, t.width ) : bv::bnot( bits, t.width ), t );
            return { r, r };
        }
        case expr::kind::binary: break;
        default: return all;
        }

        const interval a = eval( *e.lhs, env );
        const interval b = eval( *e.rhs, env );
        const i128 lo = type_min( t ), hi = type_max( t );
        auto fit = [ & ]( i128 l, i128 h ) -> interval {
            if ( l < lo || h > hi )
                return all; // may wrap
            return { static_cast< std::int64_t >( l ), static_cast< std::int64_t >( h ) };
        };

        switch ( e.bop )
        {
        case binary_op::add: return fit( i128{ a.lo } + b.lo, i128{ a.hi } + b.hi );
        case binary_op::sub: return fit( i128{ a.lo } - b.hi, i128{ a.hi } - b.lo );
        case binary_op::mul:
        {
            const i128 c[] = { i128{ a.lo } * b.lo, i128{ a.lo } * b.hi, i128{ a.hi } * b.lo, i128{ a.hi } * b.hi };
            return fit( *std::min_element( std::begin( c ), std::end( c ) ),
                        *std::max_element( std::begin( c ), std::end( c ) ) );
        }
        case binary_op::div:
            if ( !t.is_signed && b.lo > 0 )
                return { a.lo / b.hi, a.hi / b.lo };
            break;
        case binary_op::mod:
            if ( !t.is_signed && b.lo > 0 )
                return { 0, std::min( a.hi, b.hi - 1 ) };
            break;
        case binary_op::band:
            if ( !t.is_signed )
                return { 0, std::min( a.hi, b.hi ) };
            break;
        default: break;
        }
        if ( singleton( a ) && singleton( b ) )
        {
            const auto x = to_bits( a.lo, t ), y = to_bits( b.lo, t );
            std::uint64_t r = 0;
            switch ( e.bop )
            {
            case binary_op::div: r = t.is_signed ? bv::sdiv( x, y, t.width ) : bv::udiv( x, y, t.width ); break;
            case binary_op::mod: r = t.is_signed ? bv::srem( x, y, t.width ) : bv::urem( x, y, t.width ); break;
            case binary_op::band: r = bv::band( x, y, t.width ); break;
            case binary_op::bor: r = bv::bor( x, y, t.width ); break;
            case binary_op::bxor: r = bv::bxor( x, y, t.width ); break;
            case binary_op::shl: r = bv::shl( x, y, t.width ); break;
            case binary_op::shr: r = t.is_signed ? bv::ashr( x, y, t.width ) : bv::lshr( x, y, t.width ); break;
            default: return all;
            }
            const auto m = to_math( r, t );
            return { m, m };
        }
        return all;
    }

    env refine( const expr& c, env in, bool truth ) const
    {
        if ( !in )
            return in;
        switch ( c.k )
        {
        case expr::kind::bool_lit: return ( c.value != 0 ) == truth ? in : std::nullopt;
        case expr::kind::unary: return c.uop == unary_op::lnot ? refine( *c.lhs, in, !truth ) : in;
        case expr::kind::binary: break;
        default: return in;
        }

        if ( c.bop == binary_op::land || c.bop == binary_op::lor )
        {
            // Conjunctive when (a && b) holds or (a || b) fails.
            if ( ( c.bop == binary_op::land ) == truth )
                return refine( *c.rhs, refine( *c.lhs, in, truth ), truth );
            return join( refine( *c.lhs, in, truth ), refine( *c.rhs, in, truth ) );
        }
        if ( !is_comparison( c.bop ) )
            return in;

        binary_op o = c.bop;
        if ( !truth )
            o = negate( o );
        return compare( *c.lhs, o, *c.rhs, std::move( in ) );
    }

private:
    static binary_op negate( binary_op o )
    {
        switch ( o )
        {
        case binary_op::eq: return binary_op::ne;
        case binary_op::ne: return binary_op::eq;
        case binary_op::lt: return binary_op::ge;
        case binary_op::le: return binary_op::gt;
        case binary_op::gt: return binary_op::le;
        default: return binary_op::lt; // ge
        }
    }

    static binary_op mirror( binary_op o )
    {
        switch ( o )
        {
        case binary_op::lt: return binary_op::gt;
        case binary_op::le: return binary_op::ge;
        case binary_op::gt: return binary_op::lt;
        case binary_op::ge: return binary_op::le;
        default: return o;
        }
    }

    // Narrows `x` so that `x o other` is possible.
    static std::optional< interval > restrict( interval x, binary_op o, const interval& other )
    {
        switch ( o )
        {
        case binary_op::eq:
            x.lo = std::max( x.lo, other.lo );
            x.hi = std::min( x.hi, other.hi );
            break;
        case binary_op::ne:
            if ( singleton( other ) )
            {
                if ( x.lo == other.lo )
                    ++x.lo;
                else if ( x.hi == other.lo )
                    --x.hi;
            }
            break;
        case binary_op::lt: x.hi = std::min( x.hi, other.hi - 1 ); break;
        case binary_op::le: x.hi = std::min( x.hi, other.hi ); break;
        case binary_op::gt: x.lo = std::max( x.lo, other.lo + 1 ); break;
        case binary_op::ge: x.lo = std::max( x.lo, other.lo ); break;
        default: break;
        }
        if ( x.lo > x.hi )
            return std::nullopt;
        return x;
    }

    env compare( const expr& l, binary_op o, const expr& r, env in ) const
    {
        const interval a = eval( l, *in );
        const interval b = eval( r, *in );
        if ( !restrict( a, o, b ) )
            return std::nullopt;

        // Only `v ⋈ const` and `v ⋈ v'` shapes narrow a variable.
        auto simple = []( const expr& e ) { return e.k == expr::kind::var || e.k == expr::kind::int_lit; };
        if ( !simple( l ) || !simple( r ) )
            return in;
        if ( l.k == expr::kind::var )
        {
            auto x = restrict( ( *in )[ l.var ], o, b );
            if ( !x )
                return std::nullopt;
            ( *in )[ l.var ] = *x;
        }
        if ( r.k == expr::kind::var )
        {
            const interval a2 = eval( l, *in );
            auto y = restrict( ( *in )[ r.var ], mirror( o ), a2 );
            if ( !y )
                return std::nullopt;
            ( *in )[ r.var ] = *y;
        }
        return in;
    }
};

// Hull of the constants a variable can ever hold, when it is initialised
// and every assignment to it is a literal.
std::vector< std::optional< interval > > assignment_hulls( const cfg& g )
{
    std::vector< std::optional< interval > > hull( g.vars.size() );
    std::vector< bool > ruled_out( g.vars.size(), false );
    for ( std::size_t v = 0; v < g.vars.size(); ++v )
    {
        if ( !g.vars[ v ].init )
            ruled_out[ v ] = true;
        else
        {
            const auto x = to_math( *g.vars[ v ].init, g.vars[ v ].type );
            hull[ v ] = interval{ x, x };
        }
    }
    for ( const auto& e : g.edges )
        for ( const auto& u : e.updates )
        {
            if ( u.input || u.value->k != expr::kind::int_lit )
            {
                ruled_out[ u.var ] = true;
                continue;
            }
            if ( hull[ u.var ] )
            {
                const auto x = to_math( u.value->value, g.vars[ u.var ].type );
                hull[ u.var ] = join( *hull[ u.var ], interval{ x, x } );
            }
        }
    for ( std::size_t v = 0; v < g.vars.size(); ++v )
        if ( ruled_out[ v ] )
            hull[ v ].reset();
    return hull;
}

env clamp( env e, const std::vector< std::optional< interval > >& hull )
{
    if ( !e )
        return e;
    for ( std::size_t v = 0; v < hull.size(); ++v )
        if ( hull[ v ] )
        {
            auto& x = ( *e )[ v ];
            x.lo = std::max( x.lo, hull[ v ]->lo );
            x.hi = std::min( x.hi, hull[ v ]->hi );
            if ( x.lo > x.hi )
                return std::nullopt;
        }
    return e;
}

} // namespace

std::int64_t to_math( std::uint64_t bits, int_type t )
{
    if ( t.is_signed )
        return bv::to_signed( bits, t.width );
    return static_cast< std::int64_t >( bv::trunc( bits, t.width ) );
}

std::uint64_t to_bits( std::int64_t v, int_type t ) { return bv::from_signed( v, t.width ); }

interval top( int_type t ) { return { type_min( t ), type_max( t ) }; }

bool is_top( const interval& i, int_type t ) { return i == top( t ); }

interval widen( const interval& old_value, const interval& new_value, int_type t )
{
    return { new_value.lo < old_value.lo ? type_min( t ) : old_value.lo,
             new_value.hi > old_value.hi ? type_max( t ) : old_value.hi };
}

env transfer( const edge& e, const env& in, const cfg& g )
{
    const evaluator ev;
    env guarded = ev.refine( *e.guard, in, true );
    if ( !guarded )
        return guarded;
    std::vector< interval > out = *guarded;
    for ( const auto& u : e.updates )
        out[ u.var ] = u.input ? top( g.vars[ u.var ].type ) : ev.eval( *u.value, *guarded );
    return out;
}

invariant_set infer( const cfg& g )
{
    const auto hull = assignment_hulls( g );
    std::vector< env > state( g.num_locations );
    std::vector< int > updates( g.num_locations, 0 );

    std::vector< interval > start;
    for ( const auto& v : g.vars )
    {
        if ( v.init )
        {
            const auto x = to_math( *v.init, v.type );
            start.push_back( { x, x } );
        }
        else
            start.push_back( top( v.type ) );
    }
    state[ cfg::entry ] = clamp( start, hull );

    std::set< location > work{ cfg::entry };
    while ( !work.empty() )
    {
        const location l = *work.begin();
        work.erase( work.begin() );
        for ( auto ei : g.out[ l ] )
        {
            const edge& e = g.edges[ ei ];
            const env out = clamp( transfer( e, state[ l ], g ), hull );
            if ( !out )
                continue;
            env next = join( state[ e.to ], out );
            if ( state[ e.to ] && g.is_loop_head( e.to ) )
                for ( std::size_t v = 0; v < next->size(); ++v )
                    ( *next )[ v ] = widen( ( *state[ e.to ] )[ v ], ( *next )[ v ], g.vars[ v ].type );
            if ( next != state[ e.to ] )
            {
                state[ e.to ] = std::move( next );
                ++updates[ e.to ];
                work.insert( e.to );
            }
        }
    }

    // One descending sweep. Every location is recomputed from its
    // predecessors and met with its current value, which keeps it sound.
    std::vector< std::vector< std::size_t > > incoming( g.num_locations );
    for ( std::size_t i = 0; i < g.edges.size(); ++i )
        incoming[ g.edges[ i ].to ].push_back( i );
    for ( location l = 0; l < g.num_locations; ++l )
    {
        if ( l == cfg::entry || !state[ l ] )
            continue;
        env fresh;
        for ( auto ei : incoming[ l ] )
            fresh = join( fresh, clamp( transfer( g.edges[ ei ], state[ g.edges[ ei ].from ], g ), hull ) );
        if ( !fresh )
            continue;
        for ( std::size_t v = 0; v < fresh->size(); ++v )
        {
            auto& cur = ( *state[ l ] )[ v ];
            cur.lo = std::max( cur.lo, ( *fresh )[ v ].lo );
            cur.hi = std::min( cur.hi, ( *fresh )[ v ].hi );
        }
    }

    invariant_set inv;
    for ( auto h : g.loop_heads )
    {
        inv.at[ h ] = state[ h ];
        inv.iterations = std::max( inv.iterations, updates[ h ] );
    }
    return inv;
}

smt::term to_formula( const invariant_set& inv, const transition_system& ts )
{
    using namespace smt;
    std::vector< term > cases;
    for ( const auto& [ head, e ] : inv.at )
    {
        if ( !e )
            continue;
        std::vector< term > parts{ mk_eq( ts.pc( 0 ), bv_val( head, ts.pc_width ) ) };
        for ( std::size_t v = 0; v < e->size(); ++v )
        {
            const int_type t = ts.graph.vars[ v ].type;
            const interval& i = ( *e )[ v ];
            const term x = ts.state( v + 1, 0 );
            const op le = t.is_signed ? op::sle : op::ule;
            if ( i.lo != type_min( t ) )
                parts.push_back( mk_app( le, bv_val( to_bits( i.lo, t ), t.width ), x ) );
            if ( i.hi != type_max( t ) )
                parts.push_back( mk_app( le, x, bv_val( to_bits( i.hi, t ), t.width ) ) );
        }
        cases.push_back( mk_and( parts ) );
    }
    return mk_or( cases );
}

std::string to_json( const invariant_set& inv, const cfg& g )
{
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for ( const auto& [ head, e ] : inv.at )
    {
        auto& slot = out[ g.location_name( head ) ];
        if ( !e )
        {
            slot = nullptr;
            continue;
        }
        slot = nlohmann::ordered_json::object();
        for ( std::size_t v = 0; v < e->size(); ++v )
            slot[ g.vars[ v ].name ] = { ( *e )[ v ].lo, ( *e )[ v ].hi };
    }
    return out.dump( 2 );
}

} // namespace bikind::intervals
