#include "bikind/solver/sat.hpp"
#include "bikind/solver/solver.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace bikind
{

using namespace smt;
using sat::lit;

namespace
{

using bits = std::vector< lit >;

// Tseitin translation with structural hashing of and/xor/mux gates.
class bitblaster
{
public:
    explicit bitblaster( sat::solver& s ) : s_( s )
    {
        true_ = sat::pos( s_.new_var() );
        s_.add_clause( { true_ } );
    }

    void assert_formula( const term& t )
    {
        if ( t->o == op::and_ )
        {
            for ( const auto& a : t->args )
                assert_formula( a );
            return;
        }
        s_.add_clause( { boolean( t ) } );
    }

    const std::map< var_key, bits >& vars() const { return vars_; }

private:
    lit constant( bool b ) const { return b ? true_ : sat::neg( true_ ); }
    bool is_const( lit l ) const { return sat::var_of( l ) == sat::var_of( true_ ); }

    lit fresh() { return sat::pos( s_.new_var() ); }

    lit gate_and( lit a, lit b )
    {
        if ( a > b )
            std::swap( a, b );
        if ( a == constant( false ) || b == constant( false ) || a == sat::neg( b ) )
            return constant( false );
        if ( a == constant( true ) || a == b )
            return b;
        if ( b == constant( true ) )
            return a;
        auto [ it, fresh_gate ] = ands_.try_emplace( { a, b }, 0 );
        if ( !fresh_gate )
            return it->second;
        const lit o = fresh();
        s_.add_clause( { sat::neg( o ), a } );
        s_.add_clause( { sat::neg( o ), b } );
        s_.add_clause( { o, sat::neg( a ), sat::neg( b ) } );
        return it->second = o;
    }

    lit gate_or( lit a, lit b ) { return sat::neg( gate_and( sat::neg( a ), sat::neg( b ) ) ); }

    lit gate_xor( lit a, lit b )
    {
        bool flip = false;
        if ( sat::is_neg( a ) )
            a = sat::neg( a ), flip = !flip;
        if ( sat::is_neg( b ) )
            b = sat::neg( b ), flip = !flip;
        if ( a > b )
            std::swap( a, b );
        lit o;
        if ( a == b )
            o = constant( false );
        else if ( is_const( a ) )
            o = sat::neg( b ); // the constant is true after normalising
        else if ( is_const( b ) )
            o = sat::neg( a );
        else
        {
            auto [ it, fresh_gate ] = xors_.try_emplace( { a, b }, 0 );
            if ( fresh_gate )
            {
                const lit x = fresh();
                s_.add_clause( { sat::neg( x ), a, b } );
                s_.add_clause( { sat::neg( x ), sat::neg( a ), sat::neg( b ) } );
                s_.add_clause( { x, sat::neg( a ), b } );
                s_.add_clause( { x, a, sat::neg( b ) } );
                it->second = x;
            }
            o = it->second;
        }
        return flip ? sat::neg( o ) : o;
    }

    lit gate_mux( lit c, lit t, lit e )
    {
        if ( t == e || c == constant( true ) )
            return t;
        if ( c == constant( false ) )
            return e;
        if ( t == sat::neg( e ) )
            return sat::neg( gate_xor( c, t ) );
        if ( is_const( t ) || is_const( e ) || t == c || e == c || t == sat::neg( c ) || e == sat::neg( c ) )
            return gate_or( gate_and( c, t ), gate_and( sat::neg( c ), e ) );
        auto [ it, fresh_gate ] = muxes_.try_emplace( { c, t, e }, 0 );
        if ( !fresh_gate )
            return it->second;
        const lit o = fresh();
        s_.add_clause( { sat::neg( c ), sat::neg( t ), o } );
        s_.add_clause( { sat::neg( c ), t, sat::neg( o ) } );
        s_.add_clause( { c, sat::neg( e ), o } );
        s_.add_clause( { c, e, sat::neg( o ) } );
        s_.add_clause( { sat::neg( t ), sat::neg( e ), o } );
        s_.add_clause( { t, e, sat::neg( o ) } );
        return it->second = o;
    }

    lit gate_and_n( const std::vector< lit >& in )
    {
        std::vector< lit > ls;
        for ( lit l : in )
        {
            if ( l == constant( false ) )
                return l;
            if ( l != constant( true ) )
                ls.push_back( l );
        }
        std::sort( ls.begin(), ls.end() );
        ls.erase( std::unique( ls.begin(), ls.end() ), ls.end() );
        for ( std::size_t i = 1; i < ls.size(); ++i )
            if ( ls[ i ] == sat::neg( ls[ i - 1 ] ) )
                return constant( false );
        if ( ls.empty() )
            return constant( true );
        if ( ls.size() <= 2 )
            return ls.size() == 1 ? ls[ 0 ] : gate_and( ls[ 0 ], ls[ 1 ] );
        const lit o = fresh();
        std::vector< lit > big{ o };
        for ( lit l : ls )
        {
            s_.add_clause( { sat::neg( o ), l } );
            big.push_back( sat::neg( l ) );
        }
        s_.add_clause( big );
        return o;
    }

    lit gate_or_n( const std::vector< lit >& in )
    {
        std::vector< lit > negated;
        for ( lit l : in )
            negated.push_back( sat::neg( l ) );
        return sat::neg( gate_and_n( negated ) );
    }

    // a + b + carry; returns the sum and sets `carry` to the carry out.
    bits adder( const bits& a, const bits& b, lit& carry )
    {
        bits sum( a.size() );
        for ( std::size_t i = 0; i < a.size(); ++i )
        {
            const lit x = gate_xor( a[ i ], b[ i ] );
            sum[ i ] = gate_xor( x, carry );
            carry = gate_or( gate_and( a[ i ], b[ i ] ), gate_and( carry, x ) );
        }
        return sum;
    }

    bits invert( const bits& a )
    {
        bits r( a.size() );
        for ( std::size_t i = 0; i < a.size(); ++i )
            r[ i ] = sat::neg( a[ i ] );
        return r;
    }

    bits add( const bits& a, const bits& b )
    {
        lit c = constant( false );
        return adder( a, b, c );
    }

    bits sub( const bits& a, const bits& b )
    {
        lit c = constant( true );
        return adder( a, invert( b ), c );
    }

    bits negate( const bits& a ) { return sub( bits( a.size(), constant( false ) ), a ); }

    lit ult( const bits& a, const bits& b )
    {
        lit c = constant( true );
        adder( a, invert( b ), c );
        return sat::neg( c );
    }

    lit slt( bits a, bits b )
    {
        a.back() = sat::neg( a.back() );
        b.back() = sat::neg( b.back() );
        return ult( a, b );
    }

    lit equal( const bits& a, const bits& b )
    {
        std::vector< lit > same;
        for ( std::size_t i = 0; i < a.size(); ++i )
            same.push_back( sat::neg( gate_xor( a[ i ], b[ i ] ) ) );
        return gate_and_n( same );
    }

    bits mux( lit c, const bits& t, const bits& e )
    {
        bits r( t.size() );
        for ( std::size_t i = 0; i < t.size(); ++i )
            r[ i ] = gate_mux( c, t[ i ], e[ i ] );
        return r;
    }

    bits multiply( const bits& a, const bits& b )
    {
        const std::size_t w = a.size();
        bits acc( w, constant( false ) );
        for ( std::size_t i = 0; i < w; ++i )
        {
            if ( b[ i ] == constant( false ) )
                continue;
            bits partial( w, constant( false ) );
            for ( std::size_t j = i; j < w; ++j )
                partial[ j ] = gate_and( a[ j - i ], b[ i ] );
            acc = add( acc, partial );
        }
        return acc;
    }

    // Restoring division. A zero divisor yields all-ones and the dividend,
    // as SMT-LIB prescribes.
    void divide( const bits& a, const bits& b, bits& quotient, bits& remainder )
    {
        const std::size_t w = a.size();
        bits wide_b = b;
        wide_b.push_back( constant( false ) );
        bits rem( w + 1, constant( false ) );
        quotient.assign( w, constant( false ) );
        for ( std::size_t step = w; step-- > 0; )
        {
            bits shifted( w + 1 );
            shifted[ 0 ] = a[ step ];
            for ( std::size_t j = 1; j <= w; ++j )
                shifted[ j ] = rem[ j - 1 ];
            const lit fits = sat::neg( ult( shifted, wide_b ) );
            quotient[ step ] = fits;
            rem = mux( fits, sub( shifted, wide_b ), shifted );
        }
        remainder.assign( rem.begin(), rem.begin() + static_cast< std::ptrdiff_t >( w ) );
    }

    bits signed_divide( const bits& a, const bits& b, bool want_remainder )
    {
        const lit sa = a.back(), sb = b.back();
        const bits abs_a = mux( sa, negate( a ), a );
        const bits abs_b = mux( sb, negate( b ), b );
        bits q, r;
        divide( abs_a, abs_b, q, r );
        if ( want_remainder )
            return mux( sa, negate( r ), r );
        return mux( gate_xor( sa, sb ), negate( q ), q );
    }

    bits shift( const bits& a, const bits& amount, op o )
    {
        const std::size_t w = a.size();
        const lit fill = o == op::ashr ? a.back() : constant( false );
        bits cur = a;
        std::vector< lit > too_far;
        for ( std::size_t j = 0; j < amount.size(); ++j )
        {
            if ( j >= 63 || ( std::uint64_t{ 1 } << j ) >= w )
            {
                too_far.push_back( amount[ j ] );
                continue;
            }
            const std::size_t by = std::size_t{ 1 } << j;
            bits moved( w );
            for ( std::size_t i = 0; i < w; ++i )
            {
                if ( o == op::shl )
                    moved[ i ] = i >= by ? cur[ i - by ] : constant( false );
                else
                    moved[ i ] = i + by < w ? cur[ i + by ] : fill;
            }
            cur = mux( amount[ j ], moved, cur );
        }
        return mux( gate_or_n( too_far ), bits( w, fill ), cur );
    }

    lit boolean( const term& t ) { return vec( t )[ 0 ]; }

    const bits& vec( const term& t )
    {
        if ( auto it = cache_.find( t.get() ); it != cache_.end() )
            return it->second;
        bits r = build( t );
        return cache_.emplace( t.get(), std::move( r ) ).first->second;
    }

    bits build( const term& t )
    {
        auto arg = [ & ]( std::size_t i ) -> const bits& { return vec( t->args[ i ] ); };
        switch ( t->o )
        {
        case op::bool_const: return { constant( t->value != 0 ) };
        case op::bv_const:
        {
            bits r( t->width );
            for ( unsigned i = 0; i < t->width; ++i )
                r[ i ] = constant( ( ( t->value >> i ) & 1 ) != 0 );
            return r;
        }
        case op::var:
        {
            auto [ it, fresh_var ] = vars_.try_emplace( { t->name, t->step } );
            if ( fresh_var )
                for ( unsigned i = 0; i < t->width; ++i )
                    it->second.push_back( fresh() );
            return it->second;
        }
        case op::not_: return { sat::neg( arg( 0 )[ 0 ] ) };
        case op::and_:
        case op::or_:
        {
            std::vector< lit > ls;
            for ( std::size_t i = 0; i < t->args.size(); ++i )
                ls.push_back( arg( i )[ 0 ] );
            return { t->o == op::and_ ? gate_and_n( ls ) : gate_or_n( ls ) };
        }
        case op::implies: return { gate_or( sat::neg( arg( 0 )[ 0 ] ), arg( 1 )[ 0 ] ) };
        case op::ite:
        {
            const lit c = arg( 0 )[ 0 ];
            return mux( c, arg( 1 ), arg( 2 ) );
        }
        case op::eq: return { equal( arg( 0 ), arg( 1 ) ) };
        case op::ult: return { ult( arg( 0 ), arg( 1 ) ) };
        case op::ule: return { sat::neg( ult( arg( 1 ), arg( 0 ) ) ) };
        case op::slt: return { slt( arg( 0 ), arg( 1 ) ) };
        case op::sle: return { sat::neg( slt( arg( 1 ), arg( 0 ) ) ) };
        case op::bvnot: return invert( arg( 0 ) );
        case op::bvneg: return negate( arg( 0 ) );
        case op::bvand:
        case op::bvor:
        case op::bvxor:
        {
            const bits& a = arg( 0 );
            const bits& b = arg( 1 );
            bits r( a.size() );
            for ( std::size_t i = 0; i < a.size(); ++i )
                r[ i ] = t->o == op::bvand  ? gate_and( a[ i ], b[ i ] )
                         : t->o == op::bvor ? gate_or( a[ i ], b[ i ] )
                                            : gate_xor( a[ i ], b[ i ] );
            return r;
        }
        case op::add: return add( arg( 0 ), arg( 1 ) );
        case op::sub: return sub( arg( 0 ), arg( 1 ) );
        case op::mul: return multiply( arg( 0 ), arg( 1 ) );
        case op::udiv:
        case op::urem:
        {
            bits q, r;
            divide( arg( 0 ), arg( 1 ), q, r );
            return t->o == op::udiv ? q : r;
        }
        case op::sdiv: return signed_divide( arg( 0 ), arg( 1 ), false );
        case op::srem: return signed_divide( arg( 0 ), arg( 1 ), true );
        case op::shl:
        case op::lshr:
        case op::ashr: return shift( arg( 0 ), arg( 1 ), t->o );
        }
        return {};
    }

    sat::solver& s_;
    lit true_ = 0;
    std::unordered_map< const node*, bits > cache_;
    std::map< var_key, bits > vars_;
    std::map< std::pair< lit, lit >, lit > ands_;
    std::map< std::pair< lit, lit >, lit > xors_;
    std::map< std::tuple< lit, lit, lit >, lit > muxes_;
};

class builtin_backend : public backend
{
public:
    std::string id() const override { return "builtin"; }

    solve_result solve( const query& q, std::chrono::milliseconds budget ) override
    {
        const auto deadline = std::chrono::steady_clock::now() + budget;
        sat::solver s;
        bitblaster bb( s );
        bb.assert_formula( q.formula );

        solve_result r;
        switch ( s.solve( deadline ) )
        {
        case sat::result::unsat: r.status = sat_status::unsat; break;
        case sat::result::unknown:
            r.status = sat_status::unknown;
            r.reason = unknown_reason::timeout;
            break;
        case sat::result::sat:
            r.status = sat_status::sat;
            for ( const auto& [ key, bs ] : bb.vars() )
            {
                std::uint64_t v = 0;
                for ( std::size_t i = 0; i < bs.size(); ++i )
                {
                    const bool bit = s.model_value( sat::var_of( bs[ i ] ) ) != sat::is_neg( bs[ i ] );
                    if ( bit )
                        v |= std::uint64_t{ 1 } << i;
                }
                r.model[ key ] = v;
            }
            break;
        }
        return r;
    }
};

} // namespace

std::unique_ptr< backend > make_builtin_backend() { return std::make_unique< builtin_backend >(); }

} // namespace bikind
