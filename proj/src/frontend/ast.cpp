#include "bikind/frontend/ast.hpp"

#include "bikind/bv.hpp"

#include <sstream>

namespace bikind
{

std::string to_string( int_type t )
{
    return ( t.is_signed ? "i" : "u" ) + std::to_string( t.width );
}

const char* to_string( unary_op op )
{
    switch ( op )
    {
    case unary_op::neg: return "-";
    case unary_op::bnot: return "~";
    case unary_op::lnot: return "!";
    }
    return "?";
}

const char* to_string( binary_op op )
{
    switch ( op )
    {
    case binary_op::add: return "+";
    case binary_op::sub: return "-";
    case binary_op::mul: return "*";
    case binary_op::div: return "/";
    case binary_op::mod: return "%";
    case binary_op::band: return "&";
    case binary_op::bor: return "|";
    case binary_op::bxor: return "^";
    case binary_op::shl: return "<<";
    case binary_op::shr: return ">>";
    case binary_op::eq: return "==";
    case binary_op::ne: return "!=";
    case binary_op::lt: return "<";
    case binary_op::le: return "<=";
    case binary_op::gt: return ">";
    case binary_op::ge: return ">=";
    case binary_op::land: return "&&";
    case binary_op::lor: return "||";
    }
    return "?";
}

bool is_comparison( binary_op op )
{
    switch ( op )
    {
    case binary_op::eq:
    case binary_op::ne:
    case binary_op::lt:
    case binary_op::le:
    case binary_op::gt:
    case binary_op::ge:
        return true;
    default:
        return false;
    }
}

bool is_logical( binary_op op ) { return op == binary_op::land || op == binary_op::lor; }

expr_ptr make_bool( bool b )
{
    auto e = std::make_shared< expr >();
    e->k = expr::kind::bool_lit;
    e->value = b ? 1 : 0;
    return e;
}

expr_ptr make_int( std::uint64_t bits, int_type t )
{
    auto e = std::make_shared< expr >();
    e->k = expr::kind::int_lit;
    e->type = t;
    e->value = bv::trunc( bits, t.width );
    return e;
}

expr_ptr make_var( std::size_t index, std::string name, int_type t )
{
    auto e = std::make_shared< expr >();
    e->k = expr::kind::var;
    e->type = t;
    e->var = index;
    e->name = std::move( name );
    return e;
}

expr_ptr make_unary( unary_op op, expr_ptr operand )
{
    auto e = std::make_shared< expr >();
    e->k = expr::kind::unary;
    e->uop = op;
    e->type = op == unary_op::lnot ? std::nullopt : operand->type;
    e->pos = operand->pos;
    e->lhs = std::move( operand );
    return e;
}

expr_ptr make_binary( binary_op op, expr_ptr l, expr_ptr r )
{
    auto e = std::make_shared< expr >();
    e->k = expr::kind::binary;
    e->bop = op;
    if ( !is_comparison( op ) && !is_logical( op ) )
        e->type = l->type;
    e->pos = l->pos;
    e->lhs = std::move( l );
    e->rhs = std::move( r );
    return e;
}

expr_ptr make_not( expr_ptr e )
{
    if ( e->k == expr::kind::bool_lit )
        return make_bool( e->value == 0 );
    return make_unary( unary_op::lnot, std::move( e ) );
}

expr_ptr make_and( expr_ptr l, expr_ptr r )
{
    if ( l->k == expr::kind::bool_lit )
        return l->value ? r : l;
    if ( r->k == expr::kind::bool_lit )
        return r->value ? l : r;
    return make_binary( binary_op::land, std::move( l ), std::move( r ) );
}

namespace
{

std::string literal_text( std::uint64_t bits, int_type t )
{
    if ( t.is_signed )
        return std::to_string( bv::to_signed( bits, t.width ) );
    return std::to_string( bits );
}

void print_expr( std::ostream& out, const expr& e )
{
    switch ( e.k )
    {
    case expr::kind::int_lit:
        out << literal_text( e.value, *e.type );
        break;
    case expr::kind::bool_lit:
        out << ( e.value ? "true" : "false" );
        break;
    case expr::kind::var:
        out << e.name;
        break;
    case expr::kind::unary:
        out << to_string( e.uop ) << "(";
        print_expr( out, *e.lhs );
        out << ")";
        break;
    case expr::kind::binary:
        out << "(";
        print_expr( out, *e.lhs );
        out << " " << to_string( e.bop ) << " ";
        print_expr( out, *e.rhs );
        out << ")";
        break;
    }
}

void print_block( std::ostream& out, const program& p, const block& b, int indent );

void print_stmt( std::ostream& out, const program& p, const stmt& s, int indent )
{
    const std::string pad( indent * 4, ' ' );
    switch ( s.k )
    {
    case stmt::kind::assign:
        out << pad << p.decls[ s.var ].name << " = ";
        print_expr( out, *s.value );
        out << ";\n";
        break;
    case stmt::kind::havoc:
        out << pad << "havoc " << p.decls[ s.var ].name << ";\n";
        break;
    case stmt::kind::assert_:
        out << pad << "assert(";
        print_expr( out, *s.value );
        out << ");\n";
        break;
    case stmt::kind::assume:
        out << pad << "assume(";
        print_expr( out, *s.value );
        out << ");\n";
        break;
    case stmt::kind::break_:
        out << pad << "break;\n";
        break;
    case stmt::kind::halt:
        out << pad << "halt;\n";
        break;
    case stmt::kind::if_:
        for ( std::size_t i = 0; i < s.branches.size(); ++i )
        {
            out << ( i == 0 ? pad + "if (" : " else if (" );
            print_expr( out, *s.branches[ i ].cond );
            out << ") {\n";
            print_block( out, p, s.branches[ i ].body, indent + 1 );
            out << pad << "}";
        }
        if ( s.else_body )
        {
            out << " else {\n";
            print_block( out, p, *s.else_body, indent + 1 );
            out << pad << "}";
        }
        out << "\n";
        break;
    case stmt::kind::loop:
        out << pad << "loop {\n";
        print_block( out, p, s.body, indent + 1 );
        out << pad << "}\n";
        break;
    case stmt::kind::while_:
        out << pad << "while (";
        print_expr( out, *s.value );
        out << ") {\n";
        print_block( out, p, s.body, indent + 1 );
        out << pad << "}\n";
        break;
    }
}

void print_block( std::ostream& out, const program& p, const block& b, int indent )
{
    for ( const auto& s : b )
        print_stmt( out, p, *s, indent );
}

bool same_expr( const expr_ptr& a, const expr_ptr& b )
{
    if ( !a || !b )
        return !a && !b;
    if ( a->k != b->k || a->type != b->type )
        return false;
    switch ( a->k )
    {
    case expr::kind::int_lit:
    case expr::kind::bool_lit:
        return a->value == b->value;
    case expr::kind::var:
        return a->var == b->var;
    case expr::kind::unary:
        return a->uop == b->uop && same_expr( a->lhs, b->lhs );
    case expr::kind::binary:
        return a->bop == b->bop && same_expr( a->lhs, b->lhs ) && same_expr( a->rhs, b->rhs );
    }
    return false;
}

bool same_block( const block& a, const block& b );

bool same_stmt( const stmt& a, const stmt& b )
{
    if ( a.k != b.k || a.var != b.var || !same_expr( a.value, b.value ) )
        return false;
    if ( a.branches.size() != b.branches.size() )
        return false;
    for ( std::size_t i = 0; i < a.branches.size(); ++i )
        if ( !same_expr( a.branches[ i ].cond, b.branches[ i ].cond ) ||
             !same_block( a.branches[ i ].body, b.branches[ i ].body ) )
            return false;
    if ( a.else_body.has_value() != b.else_body.has_value() )
        return false;
    if ( a.else_body && !same_block( *a.else_body, *b.else_body ) )
        return false;
    return same_block( a.body, b.body );
}

bool same_block( const block& a, const block& b )
{
    if ( a.size() != b.size() )
        return false;
    for ( std::size_t i = 0; i < a.size(); ++i )
        if ( !same_stmt( *a[ i ], *b[ i ] ) )
            return false;
    return true;
}

} // namespace

std::string to_string( const expr& e )
{
    std::ostringstream out;
    print_expr( out, e );
    return out.str();
}

std::string to_source( const program& p )
{
    std::ostringstream out;
    for ( const auto& d : p.decls )
    {
        out << "var " << d.name << ": " << to_string( d.type );
        if ( d.init )
            out << " = " << literal_text( *d.init, d.type );
        out << ";\n";
    }
    print_block( out, p, p.body, 0 );
    return out.str();
}

bool same_structure( const program& a, const program& b )
{
    if ( a.decls.size() != b.decls.size() )
        return false;
    for ( std::size_t i = 0; i < a.decls.size(); ++i )
    {
        const auto& x = a.decls[ i ];
        const auto& y = b.decls[ i ];
        if ( x.name != y.name || x.type != y.type || x.init != y.init )
            return false;
    }
    return same_block( a.body, b.body );
}

} // namespace bikind
