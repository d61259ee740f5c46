#include "bikind/transys/formula.hpp"

#include "bikind/bv.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace bikind::smt
{

const char* smtlib_name( op o )
{
    switch ( o )
    {
    case op::not_: return "not";
    case op::and_: return "and";
    case op::or_: return "or";
    case op::implies: return "=>";
    case op::ite: return "ite";
    case op::eq: return "=";
    case op::ult: return "bvult";
    case op::ule: return "bvule";
    case op::slt: return "bvslt";
    case op::sle: return "bvsle";
    case op::bvnot: return "bvnot";
    case op::bvneg: return "bvneg";
    case op::bvand: return "bvand";
    case op::bvor: return "bvor";
    case op::bvxor: return "bvxor";
    case op::add: return "bvadd";
    case op::sub: return "bvsub";
    case op::mul: return "bvmul";
    case op::udiv: return "bvudiv";
    case op::urem: return "bvurem";
    case op::sdiv: return "bvsdiv";
    case op::srem: return "bvsrem";
    case op::shl: return "bvshl";
    case op::lshr: return "bvlshr";
    case op::ashr: return "bvashr";
    default: return "?";
    }
}

std::string to_string( const var_key& k ) { return k.name + "@" + std::to_string( k.step ); }

namespace
{

term make( op o, unsigned width, std::vector< term > args )
{
    auto n = std::make_shared< node >();
    n->o = o;
    n->width = width;
    n->args = std::move( args );
    return n;
}

bool is_true( const term& t ) { return t->o == op::bool_const && t->value; }
bool is_false( const term& t ) { return t->o == op::bool_const && !t->value; }

bool is_predicate( op o )
{
    return o == op::eq || o == op::ult || o == op::ule || o == op::slt || o == op::sle;
}

std::uint64_t apply( op o, const std::vector< std::uint64_t >& a, unsigned w, unsigned arg_width )
{
    switch ( o )
    {
    case op::not_: return !a[ 0 ];
    case op::and_:
        return std::all_of( a.begin(), a.end(), []( std::uint64_t x ) { return x != 0; } );
    case op::or_:
        return std::any_of( a.begin(), a.end(), []( std::uint64_t x ) { return x != 0; } );
    case op::implies: return !a[ 0 ] || a[ 1 ];
    case op::ite: return a[ 0 ] ? a[ 1 ] : a[ 2 ];
    case op::eq: return a[ 0 ] == a[ 1 ];
    case op::ult: return bv::ult( a[ 0 ], a[ 1 ], arg_width );
    case op::ule: return bv::ule( a[ 0 ], a[ 1 ], arg_width );
    case op::slt: return bv::slt( a[ 0 ], a[ 1 ], arg_width );
    case op::sle: return bv::sle( a[ 0 ], a[ 1 ], arg_width );
    case op::bvnot: return bv::bnot( a[ 0 ], w );
    case op::bvneg: return bv::neg( a[ 0 ], w );
    case op::bvand: return bv::band( a[ 0 ], a[ 1 ], w );
    case op::bvor: return bv::bor( a[ 0 ], a[ 1 ], w );
    case op::bvxor: return bv::bxor( a[ 0 ], a[ 1 ], w );
    case op::add: return bv::add( a[ 0 ], a[ 1 ], w );
    case op::sub: return bv::sub( a[ 0 ], a[ 1 ], w );
    case op::mul: return bv::mul( a[ 0 ], a[ 1 ], w );
    case op::udiv: return bv::udiv( a[ 0 ], a[ 1 ], w );
    case op::urem: return bv::urem( a[ 0 ], a[ 1 ], w );
    case op::sdiv: return bv::sdiv( a[ 0 ], a[ 1 ], w );
    case op::srem: return bv::srem( a[ 0 ], a[ 1 ], w );
    case op::shl: return bv::shl( a[ 0 ], a[ 1 ], w );
    case op::lshr: return bv::lshr( a[ 0 ], a[ 1 ], w );
    case op::ashr: return bv::ashr( a[ 0 ], a[ 1 ], w );
    default: throw std::logic_error( "apply: not an operator" );
    }
}

term fold( op o, unsigned width, std::vector< term > args )
{
    if ( std::all_of( args.begin(), args.end(), []( const term& t ) { return t->is_const(); } ) )
    {
        std::vector< std::uint64_t > vals;
        for ( const auto& t : args )
            vals.push_back( t->value );
        const auto r = apply( o, vals, width, args.empty() ? 0 : args[ 0 ]->width );
        return width == 0 ? bool_val( r != 0 ) : bv_val( r, width );
    }
    return make( o, width, std::move( args ) );
}

} // namespace

term bool_val( bool b )
{
    static const term t = [] {
        auto n = std::make_shared< node >();
        n->o = op::bool_const;
        n->value = 1;
        return n;
    }();
    static const term f = std::make_shared< node >();
    return b ? t : f;
}

term bv_val( std::uint64_t v, unsigned width )
{
    auto n = std::make_shared< node >();
    n->o = op::bv_const;
    n->width = width;
    n->value = bv::trunc( v, width );
    return n;
}

term var( const std::string& name, unsigned width, int step )
{
    auto n = std::make_shared< node >();
    n->o = op::var;
    n->width = width;
    n->name = name;
    n->step = step;
    return n;
}

term mk_not( const term& a )
{
    if ( a->o == op::bool_const )
        return bool_val( !a->value );
    if ( a->o == op::not_ )
        return a->args[ 0 ];
    return make( op::not_, 0, { a } );
}

term mk_and( std::vector< term > args )
{
    std::vector< term > kept;
    for ( auto& a : args )
    {
        if ( is_false( a ) )
            return a;
        if ( is_true( a ) )
            continue;
        if ( a->o == op::and_ )
            kept.insert( kept.end(), a->args.begin(), a->args.end() );
        else
            kept.push_back( std::move( a ) );
    }
    if ( kept.empty() )
        return bool_val( true );
    if ( kept.size() == 1 )
        return kept[ 0 ];
    return make( op::and_, 0, std::move( kept ) );
}

term mk_and( const term& a, const term& b ) { return mk_and( std::vector< term >{ a, b } ); }

term mk_or( std::vector< term > args )
{
    std::vector< term > kept;
    for ( auto& a : args )
    {
        if ( is_true( a ) )
            return a;
        if ( is_false( a ) )
            continue;
        if ( a->o == op::or_ )
            kept.insert( kept.end(), a->args.begin(), a->args.end() );
        else
            kept.push_back( std::move( a ) );
    }
    if ( kept.empty() )
        return bool_val( false );
    if ( kept.size() == 1 )
        return kept[ 0 ];
    return make( op::or_, 0, std::move( kept ) );
}

term mk_or( const term& a, const term& b ) { return mk_or( std::vector< term >{ a, b } ); }

term mk_implies( const term& a, const term& b )
{
    if ( is_true( a ) )
        return b;
    if ( is_false( a ) || is_true( b ) )
        return bool_val( true );
    return make( op::implies, 0, { a, b } );
}

term mk_ite( const term& c, const term& t, const term& e )
{
    if ( t->width != e->width )
        throw std::logic_error( "ite: branch widths differ" );
    if ( c->o == op::bool_const )
        return c->value ? t : e;
    if ( t == e )
        return t;
    if ( t->is_const() && e->is_const() && t->value == e->value )
        return t;
    return make( op::ite, t->width, { c, t, e } );
}

term mk_eq( const term& a, const term& b )
{
    if ( a->width != b->width )
        throw std::logic_error( "=: operand widths differ" );
    if ( a == b )
        return bool_val( true );
    return fold( op::eq, 0, { a, b } );
}

term mk_ne( const term& a, const term& b ) { return mk_not( mk_eq( a, b ) ); }

term mk_app( op o, const term& a, const term& b )
{
    if ( a->is_bool() )
        throw std::logic_error( std::string( smtlib_name( o ) ) + ": boolean operand" );
    if ( o == op::bvnot || o == op::bvneg )
        return fold( o, a->width, { a } );
    if ( !b || b->width != a->width )
        throw std::logic_error( std::string( smtlib_name( o ) ) + ": operand widths differ" );
    if ( o == op::eq )
        return mk_eq( a, b );
    return fold( o, is_predicate( o ) ? 0 : a->width, { a, b } );
}

std::uint64_t evaluate( const term& root, const model& m )
{
    std::unordered_map< const node*, std::uint64_t > memo;
    std::function< std::uint64_t( const term& ) > eval = [ & ]( const term& t ) -> std::uint64_t {
        if ( t->is_const() )
            return t->value;
        if ( auto it = memo.find( t.get() ); it != memo.end() )
            return it->second;
        std::uint64_t r = 0;
        if ( t->o == op::var )
        {
            auto it = m.find( { t->name, t->step } );
            if ( it == m.end() )
                throw std::out_of_range( "no value for " + to_string( var_key{ t->name, t->step } ) );
            r = bv::trunc( it->second, t->width );
        }
        else if ( t->o == op::ite )
            r = eval( t->args[ 0 ] ) ? eval( t->args[ 1 ] ) : eval( t->args[ 2 ] );
        else
        {
            std::vector< std::uint64_t > vals;
            vals.reserve( t->args.size() );
            for ( const auto& a : t->args )
                vals.push_back( eval( a ) );
            r = apply( t->o, vals, t->width, t->args[ 0 ]->width );
        }
        memo.emplace( t.get(), r );
        return r;
    };
    return eval( root );
}

std::vector< var_decl > free_vars( const term& root )
{
    std::set< var_decl > out;
    std::unordered_set< const node* > seen;
    std::vector< const node* > stack{ root.get() };
    while ( !stack.empty() )
    {
        const node* n = stack.back();
        stack.pop_back();
        if ( !seen.insert( n ).second )
            continue;
        if ( n->o == op::var )
            out.insert( { n->name, n->step, n->width } );
        for ( const auto& a : n->args )
            stack.push_back( a.get() );
    }
    return { out.begin(), out.end() };
}

term at_step( const term& root, int shift )
{
    if ( shift == 0 )
        return root;
    std::unordered_map< const node*, term > memo;
    std::function< term( const term& ) > go = [ & ]( const term& t ) -> term {
        if ( t->is_const() )
            return t;
        if ( auto it = memo.find( t.get() ); it != memo.end() )
            return it->second;
        term r;
        if ( t->o == op::var )
            r = var( t->name, t->width, t->step + shift );
        else
        {
            std::vector< term > args;
            for ( const auto& a : t->args )
                args.push_back( go( a ) );
            r = make( t->o, t->width, std::move( args ) );
        }
        memo.emplace( t.get(), r );
        return r;
    };
    return go( root );
}

std::size_t dag_size( const term& root )
{
    std::unordered_set< const node* > seen;
    std::vector< const node* > stack{ root.get() };
    while ( !stack.empty() )
    {
        const node* n = stack.back();
        stack.pop_back();
        if ( !seen.insert( n ).second )
            continue;
        for ( const auto& a : n->args )
            stack.push_back( a.get() );
    }
    return seen.size();
}

std::string constant_text( std::uint64_t v, unsigned width )
{
    return "(_ bv" + std::to_string( v ) + " " + std::to_string( width ) + ")";
}

std::string to_smtlib( const term& root )
{
    // Non-leaf nodes referenced more than once are bound with `let`, in
    // post-order so every binding only mentions earlier ones.
    std::unordered_map< const node*, int > refs;
    std::vector< const node* > post;
    {
        std::unordered_set< const node* > done;
        std::vector< std::pair< const node*, bool > > stack{ { root.get(), false } };
        while ( !stack.empty() )
        {
            auto [ n, expanded ] = stack.back();
            stack.pop_back();
            if ( expanded )
            {
                post.push_back( n );
                continue;
            }
            if ( !done.insert( n ).second )
                continue;
            stack.push_back( { n, true } );
            for ( auto it = n->args.rbegin(); it != n->args.rend(); ++it )
            {
                ++refs[ it->get() ];
                stack.push_back( { it->get(), false } );
            }
        }
    }

    std::unordered_map< const node*, std::string > names;
    auto print = [ & ]( const node* n ) {
        std::string s;
        std::function< void( const node* ) > go = [ & ]( const node* x ) {
            if ( auto it = names.find( x ); it != names.end() )
            {
                s += it->second;
                return;
            }
            switch ( x->o )
            {
            case op::bool_const: s += x->value ? "true" : "false"; return;
            case op::bv_const: s += constant_text( x->value, x->width ); return;
            case op::var: s += to_string( var_key{ x->name, x->step } ); return;
            default: break;
            }
            s += "(";
            s += smtlib_name( x->o );
            for ( const auto& a : x->args )
            {
                s += " ";
                go( a.get() );
            }
            s += ")";
        };
        go( n );
        return s;
    };

    std::string lets;
    int opened = 0;
    for ( const node* n : post )
    {
        if ( n == root.get() || n->args.empty() || refs[ n ] < 2 )
            continue;
        const std::string name = "?t" + std::to_string( names.size() );
        lets += "(let ((" + name + " " + print( n ) + ")) ";
        names.emplace( n, name );
        ++opened;
    }
    return lets + print( root.get() ) + std::string( opened, ')' );
}

std::string to_smtlib( const query& q )
{
    std::ostringstream out;
    out << "(set-logic QF_BV)\n";
    for ( const auto& d : q.decls )
        out << "(declare-const " << to_string( d.key() ) << " (_ BitVec " << d.width << "))\n";
    out << "(assert " << to_smtlib( q.formula ) << ")\n";
    out << "(check-sat)\n";
    return out.str();
}

} // namespace bikind::smt
