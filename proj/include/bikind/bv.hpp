#pragma once

// Fixed-width two's-complement arithmetic on bit patterns stored in a
// std::uint64_t. Semantics follow SMT-LIB QF_BV exactly, including the
// total definitions of division and remainder by zero.

#include <cstdint>

namespace bikind::bv
{

using value = std::uint64_t;

constexpr value mask( unsigned width )
{
    return width >= 64 ? ~value{ 0 } : ( ( value{ 1 } << width ) - 1 );
}

constexpr value trunc( value v, unsigned width ) { return v & mask( width ); }

constexpr bool msb( value v, unsigned width ) { return ( ( v >> ( width - 1 ) ) & 1 ) != 0; }

constexpr std::int64_t to_signed( value v, unsigned width )
{
    v = trunc( v, width );
    if ( width < 64 && msb( v, width ) )
        return static_cast< std::int64_t >( v | ~mask( width ) );
    return static_cast< std::int64_t >( v );
}

constexpr value from_signed( std::int64_t v, unsigned width )
{
    return trunc( static_cast< value >( v ), width );
}

constexpr value add( value a, value b, unsigned w ) { return trunc( a + b, w ); }
constexpr value sub( value a, value b, unsigned w ) { return trunc( a - b, w ); }
constexpr value mul( value a, value b, unsigned w ) { return trunc( a * b, w ); }
constexpr value neg( value a, unsigned w ) { return trunc( ~a + 1, w ); }
constexpr value bnot( value a, unsigned w ) { return trunc( ~a, w ); }
constexpr value band( value a, value b, unsigned w ) { return trunc( a & b, w ); }
constexpr value bor( value a, value b, unsigned w ) { return trunc( a | b, w ); }
constexpr value bxor( value a, value b, unsigned w ) { return trunc( a ^ b, w ); }

constexpr value udiv( value a, value b, unsigned w )
{
    a = trunc( a, w );
    b = trunc( b, w );
    return b == 0 ? mask( w ) : a / b;
}

constexpr value urem( value a, value b, unsigned w )
{
    a = trunc( a, w );
    b = trunc( b, w );
    return b == 0 ? a : a % b;
}

constexpr value sdiv( value a, value b, unsigned w )
{
    const bool na = msb( a, w );
    const bool nb = msb( b, w );
    const value ua = na ? neg( a, w ) : trunc( a, w );
    const value ub = nb ? neg( b, w ) : trunc( b, w );
    const value q = udiv( ua, ub, w );
    return na != nb ? neg( q, w ) : q;
}

constexpr value srem( value a, value b, unsigned w )
{
    const bool na = msb( a, w );
    const bool nb = msb( b, w );
    const value ua = na ? neg( a, w ) : trunc( a, w );
    const value ub = nb ? neg( b, w ) : trunc( b, w );
    const value r = urem( ua, ub, w );
    return na ? neg( r, w ) : r;
}

constexpr value shl( value a, value b, unsigned w )
{
    b = trunc( b, w );
    return b >= w ? 0 : trunc( a << b, w );
}

constexpr value lshr( value a, value b, unsigned w )
{
    a = trunc( a, w );
    b = trunc( b, w );
    return b >= w ? 0 : a >> b;
}

constexpr value ashr( value a, value b, unsigned w )
{
    b = trunc( b, w );
    const bool sign = msb( a, w );
    if ( b >= w )
        return sign ? mask( w ) : 0;
    return from_signed( to_signed( a, w ) >> b, w );
}

constexpr bool ult( value a, value b, unsigned w ) { return trunc( a, w ) < trunc( b, w ); }
constexpr bool ule( value a, value b, unsigned w ) { return trunc( a, w ) <= trunc( b, w ); }
constexpr bool slt( value a, value b, unsigned w ) { return to_signed( a, w ) < to_signed( b, w ); }
constexpr bool sle( value a, value b, unsigned w ) { return to_signed( a, w ) <= to_signed( b, w ); }

// Smallest and largest representable values, as bit patterns.
constexpr value min_value( unsigned w, bool is_signed )
{
    return is_signed ? ( value{ 1 } << ( w - 1 ) ) : 0;
}

constexpr value max_value( unsigned w, bool is_signed )
{
    return is_signed ? mask( w - 1 ) : mask( w );
}

} // namespace bikind::bv
